//! Elements on the reference square `[-1, 1]²`.
//!
//! Stress fields have components `(σ11, σ22, σ12)`; the normal-stress element
//! alone carries `(σ11, σ22)`. Local vertices run counterclockwise from
//! `(-1, -1)`; local edges are 0 left, 1 right, 2 bottom, 3 top. Edge moments
//! pair the normal component for the fixed normals `(1, 0)` on vertical edges and
//! `(0, 1)` on horizontal ones, and edge parameters increase with the coordinate.

use crate::error::Result;
use crate::mpoly::{Poly, PolyField};
use crate::polys::{gauss_lobatto_interior, jacobi, legendre};

use super::{
    check_order, embed_field, exponents_up_to, field_moments, legendre_product, moment, mono, DofFunctional, DofKind,
    Entity, Family, PolySpace, ReferenceElement,
};

pub const MAX_ORDER: usize = 3;

pub const LOCAL_VERTICES: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

/// Local edge `e`: `(fixed variable, fixed value)`. The free variable is the other one.
pub const LOCAL_EDGES: [(usize, f64); 4] = [(0, -1.0), (0, 1.0), (1, -1.0), (1, 1.0)];

pub fn is_vertical_edge(e: usize) -> bool {
    e < 2
}

fn nq(k: usize) -> usize {
    k + 3
}

/// Airy operator `q ↦ (∂yy q, ∂xx q, -∂xy q)` in `(τ11, τ22, τ12)` order.
pub fn airy(q: &Poly<2>) -> PolyField<2> {
    PolyField {
        comps: vec![
            q.deriv(1).deriv(1),
            q.deriv(0).deriv(0),
            q.deriv(0).deriv(1).scale(-1.0),
        ],
    }
}

/// Row-wise divergence of a symmetric stress field `(τ11, τ22, τ12)`.
pub fn divergence(tau: &PolyField<2>) -> PolyField<2> {
    PolyField {
        comps: vec![
            tau.comps[0].deriv(0).add(&tau.comps[2].deriv(1)),
            tau.comps[2].deriv(0).add(&tau.comps[1].deriv(1)),
        ],
    }
}

fn normal_space(k: usize, family: Family) -> PolySpace<2> {
    let mut cands = Vec::new();
    for e in exponents_up_to::<2>(k) {
        if e != [0, k] {
            cands.push(PolyField::single(2, 0, mono(e)));
        }
    }
    if family == Family::Full {
        cands.push(PolyField::single(2, 0, mono([k + 1, 0])));
        cands.push(PolyField::single(2, 0, mono([2, k - 1])));
    }
    for e in exponents_up_to::<2>(k) {
        if e != [k, 0] {
            cands.push(PolyField::single(2, 1, mono(e)));
        }
    }
    if family == Family::Full {
        cands.push(PolyField::single(2, 1, mono([0, k + 1])));
        cands.push(PolyField::single(2, 1, mono([k - 1, 2])));
    }
    PolySpace::from_candidates(2, cands)
}

/// Edge normal moments of degree `< k` followed by `(P_{k-2})²` interior moments.
fn normal_edge_and_interior_dofs(k: usize) -> Result<Vec<DofFunctional<2>>> {
    let mut dofs = Vec::new();
    for (e, &(var, value)) in LOCAL_EDGES.iter().enumerate() {
        let free = 1 - var;
        let comp = if is_vertical_edge(e) { 0 } else { 1 };
        for j in 0..k {
            dofs.push(moment(
                DofKind::EdgeMoment,
                Entity::Edge(e as u8),
                format!("edge {e}: normal stress against L_{j}"),
                comp,
                Some((var, value)),
                &Poly::from_1d(&legendre(j), free),
                nq(k),
            )?);
        }
    }
    if k >= 2 {
        for comp in 0..2 {
            for [a, b] in exponents_up_to::<2>(k - 2) {
                dofs.push(moment(
                    DofKind::InteriorMoment,
                    Entity::Interior,
                    format!("component {comp} against L_{a}(x) L_{b}(y)"),
                    comp,
                    None,
                    &legendre_product([a, b]),
                    nq(k),
                )?);
            }
        }
    }
    Ok(dofs)
}

fn normal_dofs(k: usize, family: Family) -> Result<Vec<DofFunctional<2>>> {
    let mut dofs = normal_edge_and_interior_dofs(k)?;
    if family == Family::Full {
        let jac = jacobi(k - 1);
        dofs.push(moment(
            DofKind::InteriorMoment,
            Entity::Interior,
            format!("component 0 against J_{}(x)", k - 1),
            0,
            None,
            &Poly::from_1d(&jac, 0),
            nq(k),
        )?);
        dofs.push(moment(
            DofKind::InteriorMoment,
            Entity::Interior,
            format!("component 1 against J_{}(y)", k - 1),
            1,
            None,
            &Poly::from_1d(&jac, 1),
            nq(k),
        )?);
        // for k = 1 these coincide with the Jacobi moments above
        if k >= 2 {
            let leg = legendre(k - 1);
            dofs.push(moment(
                DofKind::InteriorMoment,
                Entity::Interior,
                format!("component 0 against L_{}(y)", k - 1),
                0,
                None,
                &Poly::from_1d(&leg, 1),
                nq(k),
            )?);
            dofs.push(moment(
                DofKind::InteriorMoment,
                Entity::Interior,
                format!("component 1 against L_{}(x)", k - 1),
                1,
                None,
                &Poly::from_1d(&leg, 0),
                nq(k),
            )?);
        }
    }
    Ok(dofs)
}

/// Normal-stress element for `(σ11, σ22)`: the enriched space `H_k` (full) or `BDFM_k` (reduced).
pub fn normal_stress_element(k: usize, family: Family) -> Result<ReferenceElement<2>> {
    check_order(k, MAX_ORDER)?;
    ReferenceElement::new(
        format!("normal stress k={k} {family}"),
        normal_space(k, family),
        normal_dofs(k, family)?,
    )
}

/// Serendipity space `P_k + span{x^k y, x y^k}`.
pub fn serendipity_space(k: usize) -> PolySpace<2> {
    let mut cands: Vec<PolyField<2>> = exponents_up_to::<2>(k)
        .into_iter()
        .map(|e| PolyField::single(1, 0, mono(e)))
        .collect();
    cands.push(PolyField::single(1, 0, mono([k, 1])));
    cands.push(PolyField::single(1, 0, mono([1, k])));
    PolySpace::from_candidates(1, cands)
}

/// Serendipity functionals: vertex values, `k - 1` Gauss–Lobatto points per edge, `P_{k-4}` moments.
pub fn serendipity_dofs(k: usize) -> Result<Vec<DofFunctional<2>>> {
    let mut dofs = Vec::new();
    for (v, p) in LOCAL_VERTICES.iter().enumerate() {
        dofs.push(DofFunctional::point_value(
            Entity::Vertex(v as u8),
            0,
            *p,
            format!("value at vertex {v}"),
        ));
    }
    let pts = gauss_lobatto_interior(k + 1);
    for (e, &(var, value)) in LOCAL_EDGES.iter().enumerate() {
        for (i, &t) in pts.iter().enumerate() {
            let mut point = [0.0; 2];
            point[var] = value;
            point[1 - var] = t;
            dofs.push(DofFunctional::point_value(
                Entity::Edge(e as u8),
                0,
                point,
                format!("value at point {i} of edge {e}"),
            ));
        }
    }
    if k >= 4 {
        for [a, b] in exponents_up_to::<2>(k - 4) {
            dofs.push(moment(
                DofKind::InteriorMoment,
                Entity::Interior,
                format!("against L_{a}(x) L_{b}(y)"),
                0,
                None,
                &legendre_product([a, b]),
                nq(k),
            )?);
        }
    }
    Ok(dofs)
}

/// Scalar serendipity element used for the shear stress `σ12`.
pub fn shear_element(k: usize) -> Result<ReferenceElement<2>> {
    check_order(k, MAX_ORDER)?;
    ReferenceElement::new(format!("serendipity k={k}"), serendipity_space(k), serendipity_dofs(k)?)
}

pub fn displacement_space(k: usize, family: Family) -> PolySpace<2> {
    let mut cands = Vec::new();
    for comp in 0..2 {
        for e in exponents_up_to::<2>(k - 1) {
            cands.push(PolyField::single(2, comp, mono(e)));
        }
    }
    if family == Family::Full {
        cands.push(PolyField::single(2, 0, mono([k, 0])));
        cands.push(PolyField::single(2, 1, mono([0, k])));
        cands.push(PolyField::single(2, 0, mono([1, k - 1])));
        cands.push(PolyField::single(2, 1, mono([k - 1, 1])));
    }
    PolySpace::from_candidates(2, cands)
}

/// Discontinuous displacement element with interior moments against its own spanning set.
pub fn displacement_element(k: usize, family: Family) -> Result<ReferenceElement<2>> {
    check_order(k, MAX_ORDER)?;
    let space = displacement_space(k, family);
    let dofs = field_moments(space.fields(), nq(k))?;
    ReferenceElement::new(format!("displacement k={k} {family}"), space, dofs)
}

/// Airy enrichment `span{J(x^{k+1} y²), J(x² y^{k+1})}` of the reduced stress space.
pub fn reduced_enrichment(k: usize) -> Result<PolySpace<2>> {
    check_order(k, MAX_ORDER)?;
    Ok(PolySpace::from_candidates(
        3,
        vec![airy(&mono([k + 1, 2])), airy(&mono([2, k + 1]))],
    ))
}

/// Symmetric stress element `(σ11, σ22, σ12)` of the chosen family.
///
/// DOFs list the normal-stress functionals first, then the shear functionals.
pub fn stress_element(k: usize, family: Family) -> Result<ReferenceElement<2>> {
    check_order(k, MAX_ORDER)?;
    let mut cands: Vec<PolyField<2>> = normal_space(k, family)
        .fields()
        .iter()
        .map(|f| embed_field(f, 3, &[0, 1]))
        .collect();
    match family {
        Family::Full => {
            cands.extend(serendipity_space(k).fields().iter().map(|f| embed_field(f, 3, &[2])));
        }
        Family::Reduced => {
            cands.extend(
                exponents_up_to::<2>(k)
                    .into_iter()
                    .map(|e| PolyField::single(3, 2, mono(e))),
            );
            cands.extend(reduced_enrichment(k)?.fields().iter().cloned());
        }
    }
    let space = PolySpace::from_candidates(3, cands);
    let mut dofs: Vec<DofFunctional<2>> = normal_dofs(k, family)?
        .into_iter()
        .map(|d| d.remap_components(&[0, 1]))
        .collect();
    dofs.extend(serendipity_dofs(k)?.into_iter().map(|d| d.remap_components(&[2])));
    ReferenceElement::new(format!("stress k={k} {family}"), space, dofs)
}
