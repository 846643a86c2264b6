//! Reference-cell finite elements: a polynomial space, a set of degree-of-freedom
//! functionals, and the basis dual to those functionals.
//!
//! Every functional is stored as a weighted sum of point samples of one field
//! component. Moments are sampled with Gauss rules exact for the degrees
//! involved, so evaluation on the polynomial spaces here is exact up to rounding.

use std::fmt;
use std::io::Write;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::mpoly::{coefficient_columns, Poly, PolyField};
use crate::polys::TensorRule;

pub mod three_d;
pub mod two_d;

/// Largest condition number of a DOF matrix accepted as unisolvent.
pub const MAX_CONDITION: f64 = 1e8;

/// Which element family: the enriched spaces, or the reduced (Airy-enriched) ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Full,
    Reduced,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Full => "full",
            Family::Reduced => "reduced",
        })
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Family::Full),
            "reduced" => Ok(Family::Reduced),
            other => Err(Error::Config(format!("unknown family '{other}'"))),
        }
    }
}

/// Geometric entity of the reference cell a functional is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entity {
    Vertex(u8),
    Edge(u8),
    Face(u8),
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DofKind {
    EdgeMoment,
    FaceMoment,
    InteriorMoment,
    PointValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample<const D: usize> {
    pub point: [f64; D],
    pub comp: usize,
    pub weight: f64,
}

/// A linear functional on polynomial fields.
#[derive(Debug, Clone, PartialEq)]
pub struct DofFunctional<const D: usize> {
    pub kind: DofKind,
    pub entity: Entity,
    pub label: String,
    samples: Vec<Sample<D>>,
}

impl<const D: usize> DofFunctional<D> {
    pub fn new(kind: DofKind, entity: Entity, label: impl Into<String>, samples: Vec<Sample<D>>) -> Self {
        Self {
            kind,
            entity,
            label: label.into(),
            samples,
        }
    }

    pub fn point_value(entity: Entity, comp: usize, point: [f64; D], label: impl Into<String>) -> Self {
        Self::new(
            DofKind::PointValue,
            entity,
            label,
            vec![Sample {
                point,
                comp,
                weight: 1.0,
            }],
        )
    }

    pub fn samples(&self) -> &[Sample<D>] {
        &self.samples
    }

    pub fn apply(&self, f: &PolyField<D>) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * f.comps[s.comp].eval(&s.point))
            .sum()
    }

    /// Apply to a field given by a closure returning all components at a point.
    pub fn apply_fn(&self, f: impl Fn(&[f64; D]) -> Vec<f64>) -> f64 {
        self.samples
            .iter()
            .map(|s| s.weight * f(&s.point)[s.comp])
            .sum()
    }

    /// Move the functional onto other components: component `c` becomes `map[c]`.
    pub fn remap_components(mut self, map: &[usize]) -> Self {
        for s in &mut self.samples {
            s.comp = map[s.comp];
        }
        self
    }
}

/// Span of a family of polynomial fields, kept linearly independent.
#[derive(Debug, Clone)]
pub struct PolySpace<const D: usize> {
    n_comps: usize,
    fields: Vec<PolyField<D>>,
}

impl<const D: usize> PolySpace<D> {
    /// Keep each candidate that is not in the span of the ones already kept.
    pub fn from_candidates(n_comps: usize, candidates: Vec<PolyField<D>>) -> Self {
        let refs: Vec<&PolyField<D>> = candidates.iter().collect();
        let cols = coefficient_columns(&refs);
        let mut ortho: Vec<Vec<f64>> = Vec::new();
        let mut fields = Vec::new();
        for (field, col) in candidates.iter().zip(cols) {
            let norm0 = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm0 == 0.0 {
                continue;
            }
            let mut v = col;
            for _ in 0..2 {
                for q in &ortho {
                    let d: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-10 * norm0 {
                ortho.push(v.iter().map(|x| x / norm).collect());
                fields.push(field.clone());
            }
        }
        Self { n_comps, fields }
    }

    pub fn dim(&self) -> usize {
        self.fields.len()
    }

    pub fn n_comps(&self) -> usize {
        self.n_comps
    }

    pub fn fields(&self) -> &[PolyField<D>] {
        &self.fields
    }

    /// Distance (in monomial coefficients) from `f` to this span.
    pub fn residual(&self, f: &PolyField<D>) -> Result<f64> {
        let mut refs: Vec<&PolyField<D>> = self.fields.iter().collect();
        refs.push(f);
        let mut cols = coefficient_columns(&refs);
        let target = cols.pop().unwrap_or_default();
        if cols.is_empty() {
            return Ok(target.iter().map(|x| x * x).sum::<f64>().sqrt());
        }
        linalg::lstsq_residual(&linalg::mat_from_cols(&cols), &target)
    }
}

/// A reference element with its dual basis.
#[derive(Debug, Clone)]
pub struct ReferenceElement<const D: usize> {
    name: String,
    space: PolySpace<D>,
    dofs: Vec<DofFunctional<D>>,
    dual: Mat<f64>,
    basis: Vec<PolyField<D>>,
    condition: f64,
}

/// Matrix `M_ij = dof_i(span_j)`.
pub fn dof_matrix<const D: usize>(space: &PolySpace<D>, dofs: &[DofFunctional<D>]) -> Mat<f64> {
    Mat::from_fn(dofs.len(), space.dim(), |i, j| dofs[i].apply(&space.fields[j]))
}

impl<const D: usize> ReferenceElement<D> {
    pub fn new(name: impl Into<String>, space: PolySpace<D>, dofs: Vec<DofFunctional<D>>) -> Result<Self> {
        let name = name.into();
        if space.dim() != dofs.len() {
            return Err(Error::DimensionMismatch {
                element: name,
                space: space.dim(),
                dofs: dofs.len(),
            });
        }
        let m = dof_matrix(&space, &dofs);
        let condition = linalg::condition_number(&m)?;
        if !(condition < MAX_CONDITION) {
            return Err(Error::Unisolvence {
                element: name,
                condition,
            });
        }
        let dual = linalg::inverse(&m);
        let n = space.dim();
        let basis = (0..n)
            .map(|j| {
                (0..n).fold(PolyField::zero(space.n_comps()), |acc, l| {
                    acc.add(&space.fields[l].scale(dual[(l, j)]))
                })
            })
            .collect();
        Ok(Self {
            name,
            space,
            dofs,
            dual,
            basis,
            condition,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    pub fn n_comps(&self) -> usize {
        self.space.n_comps()
    }

    pub fn space(&self) -> &PolySpace<D> {
        &self.space
    }

    pub fn dofs(&self) -> &[DofFunctional<D>] {
        &self.dofs
    }

    /// Basis functions, `basis()[j]` dual to `dofs()[j]`.
    pub fn basis(&self) -> &[PolyField<D>] {
        &self.basis
    }

    /// Coefficients of the dual basis in the spanning set (column `j` is basis function `j`).
    pub fn dual_matrix(&self) -> &Mat<f64> {
        &self.dual
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Apply every DOF functional to `f`, i.e. the coefficients of its interpolant.
    pub fn interpolate(&self, f: &PolyField<D>) -> Vec<f64> {
        self.dofs.iter().map(|d| d.apply(f)).collect()
    }

    /// Plain-text export: one line per basis term, `basis comp e_1 .. e_D coefficient`.
    pub fn write_basis_table(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "# element {}", self.name)?;
        let vars = ["x", "y", "z"];
        let header: Vec<&str> = vars.iter().take(D).copied().collect();
        writeln!(out, "# basis comp {} coeff", header.join(" "))?;
        for (j, f) in self.basis.iter().enumerate() {
            for (c, p) in f.comps.iter().enumerate() {
                for (e, v) in p.terms() {
                    if v.abs() < 1e-14 {
                        continue;
                    }
                    let exps: Vec<String> = e.iter().map(|x| x.to_string()).collect();
                    writeln!(out, "{j} {c} {} {v:.17e}", exps.join(" "))?;
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnisolvenceReport {
    pub element: String,
    pub dim: usize,
    pub condition: f64,
    /// `log10 |det M|` of the DOF matrix.
    pub log10_det: f64,
}

/// Rebuild the DOF matrix of `elem` and check that it is well conditioned.
pub fn verify_unisolvence<const D: usize>(elem: &ReferenceElement<D>) -> Result<UnisolvenceReport> {
    check_unisolvent(elem.name(), elem.space(), elem.dofs())
}

/// Same check for a space and functionals that have not been turned into an element.
pub fn check_unisolvent<const D: usize>(
    name: &str,
    space: &PolySpace<D>,
    dofs: &[DofFunctional<D>],
) -> Result<UnisolvenceReport> {
    if space.dim() != dofs.len() {
        return Err(Error::DimensionMismatch {
            element: name.to_string(),
            space: space.dim(),
            dofs: dofs.len(),
        });
    }
    let m = dof_matrix(space, dofs);
    let s = linalg::singular_values(&m)?;
    let smax = s.first().copied().unwrap_or(1.0);
    let smin = s.last().copied().unwrap_or(1.0);
    let condition = if smin > smax * f64::EPSILON { smax / smin } else { f64::INFINITY };
    if !(condition < MAX_CONDITION) {
        return Err(Error::Unisolvence {
            element: name.to_string(),
            condition,
        });
    }
    Ok(UnisolvenceReport {
        element: name.to_string(),
        dim: space.dim(),
        condition,
        log10_det: s.iter().map(|x| x.log10()).sum(),
    })
}

/// `(column, duality error)`: the worst `|dof_i(basis_j) - δ_ij|` over the element.
pub fn duality_error<const D: usize>(elem: &ReferenceElement<D>) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, dof) in elem.dofs().iter().enumerate() {
        for (j, b) in elem.basis().iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((dof.apply(b) - target).abs());
        }
    }
    worst
}

pub(crate) fn check_order(k: usize, max: usize) -> Result<()> {
    if (1..=max).contains(&k) {
        Ok(())
    } else {
        Err(Error::UnsupportedOrder { k, min: 1, max })
    }
}

/// Copy field components into a wider field: component `c` goes to `map[c]`.
pub fn embed_field<const D: usize>(f: &PolyField<D>, n_comps: usize, map: &[usize]) -> PolyField<D> {
    let mut out = PolyField::zero(n_comps);
    for (c, p) in f.comps.iter().enumerate() {
        out.comps[map[c]] = p.clone();
    }
    out
}

/// Moment `∫ f_comp · weight` over the reference cell, or over the face `x_fixed.0 = fixed.1`.
///
/// Uses an `nq`-point Gauss rule along every free axis.
pub(crate) fn moment<const D: usize>(
    kind: DofKind,
    entity: Entity,
    label: String,
    comp: usize,
    fixed: Option<(usize, f64)>,
    weight: &Poly<D>,
    nq: usize,
) -> Result<DofFunctional<D>> {
    let rule = crate::polys::gauss_rule(nq)?;
    let free: Vec<usize> = (0..D).filter(|&v| fixed.is_none_or(|f| f.0 != v)).collect();
    let total = nq.pow(free.len() as u32);
    let mut samples = Vec::with_capacity(total);
    for flat in 0..total {
        let mut idx = flat;
        let mut point = [0.0; D];
        let mut w = 1.0;
        for &v in &free {
            let i = idx % nq;
            idx /= nq;
            point[v] = rule.nodes[i];
            w *= rule.weights[i];
        }
        if let Some((v, value)) = fixed {
            point[v] = value;
        }
        let wt = w * weight.eval(&point);
        if wt != 0.0 {
            samples.push(Sample {
                point,
                comp,
                weight: wt,
            });
        }
    }
    Ok(DofFunctional::new(kind, entity, label, samples))
}

/// Interior moments `∫ v · φ` against each field `φ` of a spanning set.
pub(crate) fn field_moments<const D: usize>(fields: &[PolyField<D>], nq: usize) -> Result<Vec<DofFunctional<D>>> {
    let rule = TensorRule::<D>::gauss(nq)?;
    Ok(fields
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let mut samples = Vec::new();
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                for (c, comp) in f.comps.iter().enumerate() {
                    let wt = w * comp.eval(p);
                    if wt != 0.0 {
                        samples.push(Sample {
                            point: *p,
                            comp: c,
                            weight: wt,
                        });
                    }
                }
            }
            DofFunctional::new(DofKind::InteriorMoment, Entity::Interior, format!("moment against field {i}"), samples)
        })
        .collect())
}

/// `L_a(x_0) L_b(x_1) ...` as a polynomial.
pub(crate) fn legendre_product<const D: usize>(degrees: [usize; D]) -> Poly<D> {
    degrees.iter().enumerate().fold(Poly::constant(1.0), |acc, (v, &d)| {
        acc.mul(&Poly::from_1d(&crate::polys::legendre(d), v))
    })
}

/// Exponent tuples with total degree `<= deg`, ordered by total degree then lexicographically.
pub(crate) fn exponents_up_to<const D: usize>(deg: usize) -> Vec<[usize; D]> {
    let mut out = Vec::new();
    for total in 0..=deg {
        let mut cur = [0usize; D];
        collect_exponents(&mut out, &mut cur, 0, total);
    }
    out
}

fn collect_exponents<const D: usize>(out: &mut Vec<[usize; D]>, cur: &mut [usize; D], var: usize, left: usize) {
    if var == D - 1 {
        cur[var] = left;
        out.push(*cur);
        return;
    }
    for e in (0..=left).rev() {
        cur[var] = e;
        collect_exponents(out, cur, var + 1, left - e);
    }
}

pub(crate) fn mono<const D: usize>(e: [usize; D]) -> Poly<D> {
    let mut ex = [0u8; D];
    for (a, b) in ex.iter_mut().zip(e) {
        *a = b as u8;
    }
    Poly::monomial(ex, 1.0)
}

/// Outcome of rebuilding one reference element and checking its DOF matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    /// Spatial dimension, 2 or 3.
    pub space_dim: usize,
    pub family: Family,
    pub k: usize,
    pub element: String,
    pub dofs: usize,
    pub condition: f64,
    /// Worst `|dof_i(φ_j) - δ_ij|` of the dual basis.
    pub duality_error: f64,
    /// Construction failure, if any.
    pub error: Option<String>,
}

impl AuditEntry {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.condition < MAX_CONDITION && self.duality_error < 1e-8
    }
}

fn audit_one<const D: usize>(space_dim: usize, family: Family, k: usize, label: &str, elem: Result<ReferenceElement<D>>) -> AuditEntry {
    let checked = elem.and_then(|e| verify_unisolvence(&e).map(|r| (r, duality_error(&e))));
    match checked {
        Ok((r, dual)) => AuditEntry {
            space_dim,
            family,
            k,
            element: r.element,
            dofs: r.dim,
            condition: r.condition,
            duality_error: dual,
            error: None,
        },
        Err(e) => AuditEntry {
            space_dim,
            family,
            k,
            element: label.to_string(),
            dofs: 0,
            condition: f64::INFINITY,
            duality_error: f64::INFINITY,
            error: Some(e.to_string()),
        },
    }
}

/// Rebuild every supported element for the given spatial dimensions (2 and/or 3),
/// both families and all supported orders.
pub fn audit_elements(space_dims: &[usize]) -> Vec<AuditEntry> {
    let mut out = Vec::new();
    for family in [Family::Full, Family::Reduced] {
        if space_dims.contains(&2) {
            for k in 1..=two_d::MAX_ORDER {
                out.push(audit_one(2, family, k, "normal", two_d::normal_stress_element(k, family)));
                out.push(audit_one(2, family, k, "shear", two_d::shear_element(k)));
                out.push(audit_one(2, family, k, "stress", two_d::stress_element(k, family)));
                out.push(audit_one(2, family, k, "displacement", two_d::displacement_element(k, family)));
            }
        }
        if space_dims.contains(&3) {
            for k in 1..=three_d::MAX_ORDER {
                out.push(audit_one(3, family, k, "normal", three_d::normal_stress_element_3d(k, family)));
                for plane in three_d::ShearPlane::ALL {
                    out.push(audit_one(3, family, k, "shear", three_d::shear_element_3d(k, plane, family)));
                }
                out.push(audit_one(3, family, k, "stress", three_d::stress_element_3d(k, family)));
                out.push(audit_one(3, family, k, "displacement", three_d::displacement_element_3d(k, family)));
            }
        }
    }
    out
}
