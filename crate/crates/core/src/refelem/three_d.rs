//! Elements on the reference cube `[-1, 1]³`.
//!
//! Stress components are ordered `(σ11, σ22, σ33, σ12, σ13, σ23)`. Local faces are
//! numbered `2v` (at `x_v = -1`) and `2v + 1` (at `x_v = 1`). The edge parallel to
//! axis `a` through corner `c` of the cross-section is `4a + c`, corners running
//! counterclockwise from `(-1, -1)` in the two remaining variables.

use crate::error::Result;
use crate::mpoly::{Poly, PolyField};
use crate::polys::{gauss_lobatto_interior, jacobi, legendre};

use super::{
    check_order, embed_field, field_moments, legendre_product, moment, mono, DofFunctional, DofKind, Entity, Family,
    PolySpace, ReferenceElement,
};

pub const MAX_ORDER: usize = 2;

/// Coordinate plane `(X, Y)` of a shear component; the third variable is `Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShearPlane {
    XY,
    XZ,
    YZ,
}

impl ShearPlane {
    pub const ALL: [ShearPlane; 3] = [ShearPlane::XY, ShearPlane::XZ, ShearPlane::YZ];

    /// `(X, Y, Z)` as variable indices.
    pub fn axes(self) -> (usize, usize, usize) {
        match self {
            ShearPlane::XY => (0, 1, 2),
            ShearPlane::XZ => (0, 2, 1),
            ShearPlane::YZ => (1, 2, 0),
        }
    }

    /// Index of the matching shear component in the stress ordering.
    pub fn component(self) -> usize {
        match self {
            ShearPlane::XY => 3,
            ShearPlane::XZ => 4,
            ShearPlane::YZ => 5,
        }
    }
}

impl std::fmt::Display for ShearPlane {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ShearPlane::XY => "xy",
            ShearPlane::XZ => "xz",
            ShearPlane::YZ => "yz",
        })
    }
}

impl std::str::FromStr for ShearPlane {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "xy" => Ok(ShearPlane::XY),
            "xz" => Ok(ShearPlane::XZ),
            "yz" => Ok(ShearPlane::YZ),
            other => Err(crate::error::Error::Config(format!("unknown plane '{other}'"))),
        }
    }
}

/// Stress component index of the symmetric entry `(i, j)`.
pub fn sym_index(i: usize, j: usize) -> usize {
    match (i.min(j), i.max(j)) {
        (a, b) if a == b => a,
        (0, 1) => 3,
        (0, 2) => 4,
        _ => 5,
    }
}

fn nq(k: usize) -> usize {
    k + 3
}

fn mono3(e: [usize; 3]) -> Poly<3> {
    mono(e)
}

fn leg(d: usize, var: usize) -> Poly<3> {
    Poly::from_1d(&legendre(d), var)
}

/// Row-wise divergence of a stress field with six components.
pub fn divergence(tau: &PolyField<3>) -> PolyField<3> {
    PolyField {
        comps: (0..3)
            .map(|i| {
                (0..3).fold(Poly::zero(), |acc, j| acc.add(&tau.comps[sym_index(i, j)].deriv(j)))
            })
            .collect(),
    }
}

/// Stress field of the Airy function `q(X, Y)` of a plane, multiplied by `factor`.
pub fn airy_product(plane: ShearPlane, q: &Poly<3>, factor: &Poly<3>) -> PolyField<3> {
    let (x, y, _) = plane.axes();
    let mut f = PolyField::zero(6);
    f.comps[x] = q.deriv(y).deriv(y).mul(factor);
    f.comps[y] = q.deriv(x).deriv(x).mul(factor);
    f.comps[plane.component()] = q.deriv(x).deriv(y).scale(-1.0).mul(factor);
    f
}

/// Degree bounds per variable for normal component `c`: `k` along `c`, `k - 1` otherwise.
fn rt_monomials(k: usize, c: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    let bound = |v: usize| if v == c { k } else { k - 1 };
    for a in 0..=bound(0) {
        for b in 0..=bound(1) {
            for d in 0..=bound(2) {
                out.push([a, b, d]);
            }
        }
    }
    out
}

fn others(c: usize) -> (usize, usize) {
    match c {
        0 => (1, 2),
        1 => (2, 0),
        _ => (0, 1),
    }
}

fn normal_space(k: usize, family: Family) -> PolySpace<3> {
    let mut cands = Vec::new();
    for c in 0..3 {
        for e in rt_monomials(k, c) {
            cands.push(PolyField::single(3, c, mono3(e)));
        }
        if family == Family::Full {
            let (p, q) = others(c);
            for (v, d) in (0..k).map(|d| (p, d)).chain((0..k).map(|d| (q, d))) {
                let mut e = [0; 3];
                e[c] = k + 1;
                e[v] = d;
                cands.push(PolyField::single(3, c, mono3(e)));
            }
        }
    }
    PolySpace::from_candidates(3, cands)
}

fn normal_dofs(k: usize, family: Family) -> Result<Vec<DofFunctional<3>>> {
    let mut dofs = Vec::new();
    for v in 0..3 {
        let (p, q) = others(v);
        for (side, value) in [(0u8, -1.0), (1u8, 1.0)] {
            let face = 2 * v as u8 + side;
            for a in 0..k {
                for b in 0..k {
                    dofs.push(moment(
                        DofKind::FaceMoment,
                        Entity::Face(face),
                        format!("face {face}: normal stress against L_{a} L_{b}"),
                        v,
                        Some((v, value)),
                        &leg(a, p).mul(&leg(b, q)),
                        nq(k),
                    )?);
                }
            }
        }
    }
    if family == Family::Full {
        for c in 0..3 {
            let (p, q) = others(c);
            let jac = Poly::from_1d(&jacobi(k - 1), c);
            let weights = (0..k).map(|b| (p, b)).chain((1..k).map(|d| (q, d)));
            for (v, d) in weights {
                dofs.push(moment(
                    DofKind::InteriorMoment,
                    Entity::Interior,
                    format!("component {c} against J_{} L_{d}(x_{v})", k - 1),
                    c,
                    None,
                    &jac.mul(&leg(d, v)),
                    nq(k),
                )?);
            }
        }
    }
    if k >= 2 {
        for c in 0..3 {
            // degree k - 2 along the normal direction, k - 1 across
            for a in 0..=k - 2 {
                for b in 0..k {
                    for d in 0..k {
                        let (p, q) = others(c);
                        let mut degs = [0; 3];
                        degs[c] = a;
                        degs[p] = b;
                        degs[q] = d;
                        dofs.push(moment(
                            DofKind::InteriorMoment,
                            Entity::Interior,
                            format!("component {c} against L_{}(x) L_{}(y) L_{}(z)", degs[0], degs[1], degs[2]),
                            c,
                            None,
                            &legendre_product(degs),
                            nq(k),
                        )?);
                    }
                }
            }
        }
    }
    Ok(dofs)
}

/// Normal-stress element for `(σ11, σ22, σ33)`: enriched Raviart–Thomas (full) or `RT_k` (reduced).
pub fn normal_stress_element_3d(k: usize, family: Family) -> Result<ReferenceElement<3>> {
    check_order(k, MAX_ORDER)?;
    ReferenceElement::new(
        format!("normal stress 3d k={k} {family}"),
        normal_space(k, family),
        normal_dofs(k, family)?,
    )
}

/// `P_k(X, Y) × P_{k-1}(Z)` as scalar fields.
pub fn reduced_shear_base_space(k: usize, plane: ShearPlane) -> PolySpace<3> {
    PolySpace::from_candidates(1, shear_base(k, plane))
}

fn shear_base(k: usize, plane: ShearPlane) -> Vec<PolyField<3>> {
    let (x, y, z) = plane.axes();
    let mut cands = Vec::new();
    for total in 0..=k {
        for a in (0..=total).rev() {
            for c in 0..k {
                let mut e = [0; 3];
                e[x] = a;
                e[y] = total - a;
                e[z] = c;
                cands.push(PolyField::single(1, 0, mono3(e)));
            }
        }
    }
    cands
}

fn shear_space(k: usize, plane: ShearPlane, family: Family) -> PolySpace<3> {
    let (x, y, z) = plane.axes();
    let mut cands = shear_base(k, plane);
    match family {
        Family::Full => {
            for c in 0..k {
                for (a, b) in [(k, 1), (1, k)] {
                    let mut e = [0; 3];
                    e[x] = a;
                    e[y] = b;
                    e[z] = c;
                    cands.push(PolyField::single(1, 0, mono3(e)));
                }
            }
        }
        Family::Reduced => {
            for f in airy_enrichment_plane(k, plane) {
                cands.push(PolyField {
                    comps: vec![f.comps[plane.component()].clone()],
                });
            }
        }
    }
    PolySpace::from_candidates(1, cands)
}

fn airy_enrichment_plane(k: usize, plane: ShearPlane) -> Vec<PolyField<3>> {
    let (x, y, z) = plane.axes();
    let mut out = Vec::new();
    for (a, b) in [(k + 1, 2), (2, k + 1)] {
        let mut e = [0; 3];
        e[x] = a;
        e[y] = b;
        let q = mono3(e);
        for c in 0..k {
            out.push(airy_product(plane, &q, &leg(c, z)));
        }
    }
    out
}

/// Airy-product enrichment of the reduced stress space, over all three planes.
pub fn reduced_enrichment_3d(k: usize) -> Result<PolySpace<3>> {
    check_order(k, MAX_ORDER)?;
    Ok(PolySpace::from_candidates(
        6,
        ShearPlane::ALL.iter().flat_map(|&p| airy_enrichment_plane(k, p)).collect(),
    ))
}

/// Point values on `k` planes `Z = const`: the four `Z`-parallel edges, then `k - 1`
/// points on each `Z`-parallel face.
fn shear_dofs(k: usize, plane: ShearPlane) -> Vec<DofFunctional<3>> {
    let (x, y, z) = plane.axes();
    let heights = gauss_lobatto_interior(k + 2);
    let edge_pts = gauss_lobatto_interior(k + 1);
    let corners = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];
    let mut dofs = Vec::new();
    for (hi, &hz) in heights.iter().enumerate() {
        for (ci, c) in corners.iter().enumerate() {
            let mut p = [0.0; 3];
            p[x] = c[0];
            p[y] = c[1];
            p[z] = hz;
            dofs.push(DofFunctional::point_value(
                Entity::Edge((4 * z + ci) as u8),
                0,
                p,
                format!("value on edge {} at height {hi}", 4 * z + ci),
            ));
        }
        // faces x_X = ∓1 carry points along Y, faces x_Y = ∓1 along X
        for (fixed, free) in [(x, y), (y, x)] {
            for (side, value) in [(0usize, -1.0), (1, 1.0)] {
                for (i, &t) in edge_pts.iter().enumerate() {
                    let mut p = [0.0; 3];
                    p[fixed] = value;
                    p[free] = t;
                    p[z] = hz;
                    let face = 2 * fixed + side;
                    dofs.push(DofFunctional::point_value(
                        Entity::Face(face as u8),
                        0,
                        p,
                        format!("value at point {i} of face {face}, height {hi}"),
                    ));
                }
            }
        }
    }
    dofs
}

/// Shear-stress element of one coordinate plane, as a scalar field.
///
/// The full space is `S_k(X, Y) × P_{k-1}(Z)`; the reduced one is
/// `P_k(X, Y) × P_{k-1}(Z)` plus the shear part of the Airy products.
pub fn shear_element_3d(k: usize, plane: ShearPlane, family: Family) -> Result<ReferenceElement<3>> {
    check_order(k, MAX_ORDER)?;
    ReferenceElement::new(
        format!("shear 3d {plane:?} k={k} {family}"),
        shear_space(k, plane, family),
        shear_dofs(k, plane),
    )
}

pub fn displacement_space_3d(k: usize, family: Family) -> PolySpace<3> {
    let mut cands = Vec::new();
    for c in 0..3 {
        for a in 0..k {
            for b in 0..k {
                for d in 0..k {
                    cands.push(PolyField::single(3, c, mono3([a, b, d])));
                }
            }
        }
    }
    if family == Family::Full {
        for c in 0..3 {
            let (p, q) = others(c);
            for (v, d) in (0..k).map(|d| (p, d)).chain((0..k).map(|d| (q, d))) {
                let mut e = [0; 3];
                e[c] = k;
                e[v] = d;
                cands.push(PolyField::single(3, c, mono3(e)));
            }
        }
    }
    PolySpace::from_candidates(3, cands)
}

pub fn displacement_element_3d(k: usize, family: Family) -> Result<ReferenceElement<3>> {
    check_order(k, MAX_ORDER)?;
    let space = displacement_space_3d(k, family);
    let dofs = field_moments(space.fields(), nq(k))?;
    ReferenceElement::new(format!("displacement 3d k={k} {family}"), space, dofs)
}

/// Full symmetric stress element with six components.
pub fn stress_element_3d(k: usize, family: Family) -> Result<ReferenceElement<3>> {
    check_order(k, MAX_ORDER)?;
    let mut cands: Vec<PolyField<3>> = normal_space(k, family)
        .fields()
        .iter()
        .map(|f| embed_field(f, 6, &[0, 1, 2]))
        .collect();
    for plane in ShearPlane::ALL {
        let map = [plane.component()];
        match family {
            Family::Full => {
                cands.extend(shear_space(k, plane, family).fields().iter().map(|f| embed_field(f, 6, &map)));
            }
            Family::Reduced => {
                cands.extend(shear_base(k, plane).iter().map(|f| embed_field(f, 6, &map)));
            }
        }
    }
    if family == Family::Reduced {
        cands.extend(reduced_enrichment_3d(k)?.fields().iter().cloned());
    }
    let space = PolySpace::from_candidates(6, cands);
    let mut dofs: Vec<DofFunctional<3>> = normal_dofs(k, family)?
        .into_iter()
        .map(|d| d.remap_components(&[0, 1, 2]))
        .collect();
    for plane in ShearPlane::ALL {
        dofs.extend(
            shear_dofs(k, plane)
                .into_iter()
                .map(|d| d.remap_components(&[plane.component()])),
        );
    }
    ReferenceElement::new(format!("stress 3d k={k} {family}"), space, dofs)
}
