//! Stability diagnostics: the constructive inf-sup witness, discrete inf-sup
//! constants, macroelement kernels and the mesh-dependent norms used for `k = 1`
//! with traction boundary conditions.
//!
//! Everything here works with dense matrices and is meant for small meshes
//! (`n ≤ 8`).

use std::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryCondition, Discretization};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseMatrix};
use crate::mesh::Mesh;
use crate::mpoly::{Poly, PolyField};
use crate::polys::gauss_rule;
use crate::refelem::two_d::divergence;
use crate::refelem::Family;

/// Singular values below this fraction of the largest count as zero.
pub const KERNEL_TOLERANCE: f64 = 1e-9;

/// Membership tolerance for displacement fields handed to the witness.
pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;

/// A stress `τ = diag(τ11, τ22)` with `div τ = v`, built by integrating `v1` along
/// element rows and `v2` along element columns.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessField {
    /// Global stress coefficients (`τ12 ≡ 0`).
    pub stress: Vec<f64>,
    /// Largest coefficient mismatch between `div τ` and `v`.
    pub div_residual: f64,
    /// Largest disagreement of a shared DOF between neighbouring elements.
    pub continuity_residual: f64,
    /// `‖τ‖²` in `L²`.
    pub stress_norm_sq: f64,
    /// `‖v‖²` in `L²`, which equals `‖div τ‖²`.
    pub displacement_norm_sq: f64,
}

impl WitnessField {
    pub fn hdiv_norm_sq(&self) -> f64 {
        self.stress_norm_sq + self.displacement_norm_sq
    }
}

fn local_field(basis: &[PolyField<2>], coeffs: &[f64]) -> PolyField<2> {
    let n_comps = basis.first().map_or(0, |b| b.n_comps());
    basis
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| **c != 0.0)
        .fold(PolyField::zero(n_comps), |acc, (b, c)| acc.add(&b.scale(*c)))
}

fn max_coeff(p: &Poly<2>) -> f64 {
    p.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
}

fn field_distance(a: &PolyField<2>, b: &PolyField<2>) -> f64 {
    a.comps.iter().zip(&b.comps).map(|(p, q)| max_coeff(&p.sub(q))).fold(0.0, f64::max)
}

fn require_displacement_bc(disc: &Discretization) -> Result<()> {
    if disc.bc() != BoundaryCondition::Displacement {
        return Err(Error::Mismatch(
            "the witness lives in the stress space without boundary conditions".into(),
        ));
    }
    Ok(())
}

/// Build the witness for a displacement given by its global coefficients.
pub fn construct_witness(disc: &Discretization, v: &[f64]) -> Result<WitnessField> {
    require_displacement_bc(disc)?;
    if v.len() != disc.dofs().n_disp() {
        return Err(Error::Mismatch(format!(
            "displacement has {} coefficients, space has {}",
            v.len(),
            disc.dofs().n_disp()
        )));
    }
    let basis = disc.displacement_element().basis();
    let fields: Vec<PolyField<2>> = (0..disc.mesh().num_elements())
        .map(|e| local_field(basis, disc.local_displacement(v, e)))
        .collect();
    witness_from_local(disc, &fields, v)
}

/// Build the witness for a displacement given per element as a polynomial in
/// reference coordinates. Fields outside the discrete displacement space are rejected.
pub fn witness_from_fields(disc: &Discretization, fields: &[PolyField<2>]) -> Result<WitnessField> {
    require_displacement_bc(disc)?;
    if fields.len() != disc.mesh().num_elements() || fields.iter().any(|f| f.n_comps() != 2) {
        return Err(Error::Mismatch("expected one two-component field per element".into()));
    }
    let space = disc.displacement_element().space();
    let mut v = vec![0.0; disc.dofs().n_disp()];
    for (e, f) in fields.iter().enumerate() {
        let r = space.residual(f)?;
        if r > MEMBERSHIP_TOLERANCE {
            return Err(Error::NotInSpace(r));
        }
        for (g, c) in disc.dofs().disp_dofs(e).zip(disc.displacement_element().interpolate(f)) {
            v[g] = c;
        }
    }
    witness_from_local(disc, fields, &v)
}

fn witness_from_local(disc: &Discretization, fields: &[PolyField<2>], v: &[f64]) -> Result<WitnessField> {
    let mesh = disc.mesh();
    let n = mesh.n();
    let half = 0.5 * mesh.h();
    let ne = mesh.num_elements();
    let mut tau: Vec<PolyField<2>> = vec![PolyField::zero(3); ne];
    // τ11 along rows, τ22 along columns; `carry` is the trace on the last edge.
    for (comp, var) in [(0, 0), (1, 1)] {
        for line in 0..n {
            let mut carry = Poly::zero();
            for step in 0..n {
                let e = if var == 0 {
                    mesh.element_index(step, line)
                } else {
                    mesh.element_index(line, step)
                };
                let t = carry.add(&fields[e].comps[comp].antideriv_from(var, -1.0).scale(half));
                carry = t.restrict(var, 1.0);
                tau[e].comps[comp] = t;
            }
        }
    }

    let stress_elem = disc.stress_element();
    let disp_elem = disc.displacement_element();
    let mut stress = vec![f64::NAN; disc.dofs().n_stress()];
    let mut continuity: f64 = 0.0;
    let mut stress_norm_sq = 0.0;
    let mut displacement_norm_sq = 0.0;
    let mut div_residual: f64 = 0.0;
    let m = disc.reference_matrices();
    let jac = half * half;
    for e in 0..ne {
        let local = stress_elem.interpolate(&tau[e]);
        let interp = local_field(stress_elem.basis(), &local);
        continuity = continuity.max(field_distance(&interp, &tau[e]));
        for (c, g) in local.iter().zip(disc.dofs().stress_dofs(e)) {
            let g = g.expect("unconstrained stress space");
            if stress[g].is_nan() {
                stress[g] = *c;
            } else {
                continuity = continuity.max((stress[g] - c).abs());
            }
        }
        let div = divergence(&interp).scale(1.0 / half);
        let dv = disp_elem.interpolate(&div);
        let vl = disc.local_displacement(v, e);
        let recon = local_field(disp_elem.basis(), &dv);
        div_residual = div_residual.max(field_distance(&recon, &div));
        for (a, b) in dv.iter().zip(vl) {
            div_residual = div_residual.max((a - b).abs());
        }
        stress_norm_sq += jac * quad_form(&m.stress_mass, &local);
        displacement_norm_sq += jac * quad_form(&m.disp_mass, vl);
    }
    Ok(WitnessField {
        stress,
        div_residual,
        continuity_residual: continuity,
        stress_norm_sq,
        displacement_norm_sq,
    })
}

fn quad_form(m: &Mat<f64>, x: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            s += x[i] * m[(i, j)] * x[j];
        }
    }
    s
}

/// Norm pairing used for the discrete inf-sup constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfSupNorm {
    /// `‖τ‖_{H(div)}` against `‖v‖_{L²}`.
    #[default]
    Hdiv,
    /// `‖τ‖_{0,h}` against `|v|_{1,h}` (macroelement-based, even meshes only).
    MeshDependent,
}

impl fmt::Display for InfSupNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InfSupNorm::Hdiv => "hdiv",
            InfSupNorm::MeshDependent => "mesh-dependent",
        })
    }
}

impl std::str::FromStr for InfSupNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hdiv" => Ok(InfSupNorm::Hdiv),
            "mesh-dependent" => Ok(InfSupNorm::MeshDependent),
            other => Err(Error::Config(format!("unknown inf-sup norm '{other}'"))),
        }
    }
}

/// One row of the stability diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub k: usize,
    pub family: Family,
    pub bc: BoundaryCondition,
    pub norm: InfSupNorm,
    pub beta: f64,
    /// Dimension of `{v : (div τ, v) = 0 for all τ}` in the whole displacement space.
    pub kernel_dim: usize,
}

impl StabilityReport {
    pub const CSV_HEADER: &'static str = "n,k,family,bc,norm,beta_h,kernel_dim";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.10},{}",
            self.n, self.k, self.family, self.bc, self.norm, self.beta, self.kernel_dim
        )
    }
}

/// Basis (as columns) of the displacements orthogonal to the rigid motions, or the
/// identity when no constraint applies.
fn admissible_displacements(disc: &Discretization) -> Result<Mat<f64>> {
    let nu = disc.dofs().n_disp();
    match disc.bc() {
        BoundaryCondition::Displacement => Ok(Mat::identity(nu, nu)),
        BoundaryCondition::Traction => linalg::null_space(&disc.rigid_motion_rows().to_dense(), 1e-12),
    }
}

/// `B X⁻¹ Bᵀ` for the stress Gram matrix `x`.
fn schur_complement(b: &Mat<f64>, x: &Mat<f64>) -> Result<Mat<f64>> {
    let l = linalg::cholesky_lower(x)?;
    let y = linalg::solve_lower(&l, &b.transpose().to_owned());
    Ok(y.transpose() * &y)
}

fn congruence(z: &Mat<f64>, m: &Mat<f64>) -> Mat<f64> {
    z.transpose() * m * z
}

/// Discrete inf-sup constant `β_h` of the divergence pairing.
///
/// For [`InfSupNorm::Hdiv`], `β_h² = min vᵀ B X⁻¹ Bᵀ v / vᵀ M v` with `X` the
/// `H(div)` Gram matrix of the stress space and `M` the displacement mass matrix.
/// For [`InfSupNorm::MeshDependent`], `X` is the Gram matrix of `‖·‖_{0,h}` and `M`
/// the one of `|·|_{1,h}`; since the latter is only a seminorm, the minimum is taken
/// through the largest eigenvalue of the reversed pencil. Traction problems
/// restrict `v` to the complement of the rigid motions.
pub fn infsup_constant(disc: &Discretization, norm: InfSupNorm) -> Result<f64> {
    let b = disc.divergence_matrix().to_dense();
    let (x, m) = match norm {
        InfSupNorm::Hdiv => {
            let x = disc.stress_mass().to_dense() + disc.divdiv().to_dense();
            (x, disc.displacement_mass().to_dense())
        }
        InfSupNorm::MeshDependent => (
            mesh_stress_norm_matrix(disc)?.to_dense(),
            mesh_seminorm_matrix(disc)?.to_dense(),
        ),
    };
    let z = admissible_displacements(disc)?;
    let s = congruence(&z, &schur_complement(&b, &x)?);
    let m = congruence(&z, &m);
    let beta_sq = match norm {
        InfSupNorm::Hdiv => linalg::generalized_eigenvalues(&s, &m)?.first().copied().unwrap_or(f64::NAN),
        InfSupNorm::MeshDependent => {
            let top = linalg::generalized_eigenvalues(&m, &s)?.last().copied().unwrap_or(f64::NAN);
            1.0 / top
        }
    };
    if !beta_sq.is_finite() {
        return Err(Error::Eigen(format!("inf-sup eigenvalue is not finite ({beta_sq})")));
    }
    Ok(beta_sq.max(0.0).sqrt())
}

/// Dimension of the kernel of `Bᵀ` in the whole displacement space.
pub fn divergence_kernel_dim(disc: &Discretization) -> Result<usize> {
    let b = disc.divergence_matrix().to_dense();
    Ok(disc.dofs().n_disp() - linalg::rank(&b, KERNEL_TOLERANCE)?)
}

pub fn stability_report(n: usize, k: usize, family: Family, bc: BoundaryCondition, norm: InfSupNorm) -> Result<StabilityReport> {
    let disc = Discretization::new(Mesh::uniform(n)?, k, family, bc)?;
    Ok(StabilityReport {
        n,
        k,
        family,
        bc,
        norm,
        beta: infsup_constant(&disc, norm)?,
        kernel_dim: divergence_kernel_dim(&disc)?,
    })
}

/// Rank of `B` on the displacements orthogonal to the rigid motions (traction) or on
/// all displacements (displacement BC), with the dimension of that space.
pub fn divergence_rank(disc: &Discretization) -> Result<(usize, usize)> {
    let z = admissible_displacements(disc)?;
    let bt = z.transpose() * disc.divergence_matrix().to_dense();
    Ok((linalg::rank(&bt, KERNEL_TOLERANCE)?, z.ncols()))
}

/// The displacements `v` with `(div τ, v) = 0` for every stress `τ` vanishing in
/// normal direction on the boundary of one 2×2 macroelement.
#[derive(Debug, Clone)]
pub struct MacroKernel {
    disc: Discretization,
    /// Columns orthonormal in the `L²` inner product.
    basis: Mat<f64>,
    mass: Mat<f64>,
}

/// Kernel of the macroelement coupling on the 2×2 mesh; it must be three-dimensional.
pub fn macro_kernel(k: usize, family: Family) -> Result<MacroKernel> {
    let disc = Discretization::new(Mesh::uniform(2)?, k, family, BoundaryCondition::Traction)?;
    let b = disc.divergence_matrix().to_dense();
    let null = linalg::null_space(&b.transpose().to_owned(), KERNEL_TOLERANCE)?;
    if null.ncols() != 3 {
        return Err(Error::Stability(format!(
            "macroelement kernel for k = {k} ({family}) has dimension {}, expected 3",
            null.ncols()
        )));
    }
    let mass = disc.displacement_mass().to_dense();
    let basis = mass_orthonormal(&null, &mass)?;
    Ok(MacroKernel { disc, basis, mass })
}

/// Orthonormalize the columns of `a` in the inner product `m`.
fn mass_orthonormal(a: &Mat<f64>, m: &Mat<f64>) -> Result<Mat<f64>> {
    let g = congruence(a, m);
    let l = linalg::cholesky_lower(&g)?;
    // a L⁻ᵀ has Gram matrix identity.
    let linv = linalg::solve_lower(&l, &Mat::identity(g.nrows(), g.ncols()));
    Ok(a * linv.transpose())
}

impl MacroKernel {
    pub fn dimension(&self) -> usize {
        self.basis.ncols()
    }

    pub fn discretization(&self) -> &Discretization {
        &self.disc
    }

    /// Kernel mode `j` as global displacement coefficients.
    pub fn mode(&self, j: usize) -> Vec<f64> {
        (0..self.basis.nrows()).map(|i| self.basis[(i, j)]).collect()
    }

    /// Relative `L²` distance from `v` to the kernel.
    pub fn distance(&self, v: &[f64]) -> f64 {
        let x = Mat::from_fn(v.len(), 1, |i, _| v[i]);
        let coeffs = self.basis.transpose() * &self.mass * &x;
        let r = &x - &self.basis * &coeffs;
        let nr = congruence(&r, &self.mass)[(0, 0)].max(0.0).sqrt();
        let nx = congruence(&x, &self.mass)[(0, 0)].sqrt();
        nr / nx
    }

    /// Sine of the largest principal angle between the kernel and the span of `vs`.
    pub fn angle_to(&self, vs: &[Vec<f64>]) -> Result<f64> {
        let a = linalg::mat_from_cols(vs);
        let q = mass_orthonormal(&a, &self.mass)?;
        let r = &q - &self.basis * (self.basis.transpose() * &self.mass * &q);
        let g = congruence(&r, &self.mass);
        let top = linalg::symmetric_eigenvalues(&g)?.last().copied().unwrap_or(0.0);
        if q.ncols() < self.dimension() {
            return Ok(1.0);
        }
        Ok(top.max(0.0).sqrt())
    }

    /// The rigid motions projected onto the displacement space.
    pub fn rigid_motions(&self) -> Vec<Vec<f64>> {
        rigid_motion_coefficients(&self.disc)
    }

    /// The macroelement checkerboard `(-1, 1)`, `(-1, -1)`, `(1, -1)`, `(1, 1)` on
    /// `K1..K4`, the piecewise-constant counterpart of `(y, -x)`.
    pub fn checkerboard(&self) -> Vec<f64> {
        checkerboard_coefficients(&self.disc, 0).unwrap_or_default()
    }
}

pub fn rigid_motion_coefficients(disc: &Discretization) -> Vec<Vec<f64>> {
    (0..3)
        .map(|r| disc.project_displacement(&|x| crate::assembly::rigid_motions(x)[r]))
        .collect()
}

/// Checkerboard mode on macroelement `mac`, zero elsewhere.
pub fn checkerboard_coefficients(disc: &Discretization, mac: usize) -> Result<Vec<f64>> {
    let macs = disc.mesh().macroelements()?;
    let m = macs
        .get(mac)
        .ok_or_else(|| Error::Mismatch(format!("macroelement {mac} out of range")))?;
    let values = [[-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0], [1.0, 1.0]];
    let mut out = vec![0.0; disc.dofs().n_disp()];
    for (el, val) in m.elements.iter().zip(values) {
        let field = PolyField {
            comps: vec![Poly::constant(val[0]), Poly::constant(val[1])],
        };
        let c = disc.displacement_element().interpolate(&field);
        for (g, c) in disc.dofs().disp_dofs(*el).zip(c) {
            out[g] = c;
        }
    }
    Ok(out)
}

/// Gram matrix of `|v|²_{1,h} = Σ_M |v|²_{1,h,M}`, summing per macroelement the
/// elementwise strain norms, `h⁻¹`-scaled jumps of `v1` across its vertical interior
/// edges and of `v2` across its horizontal ones, and the square of
///
/// ```text
/// (v1|K1 - v1|K4)(m(e4)) + (v1|K2 - v1|K3)(m(e2)) + (v2|K1 - v2|K2)(m(e1)) + (v2|K4 - v2|K3)(m(e3))
/// ```
///
/// with `m(e)` the edge midpoints.
pub fn mesh_seminorm_matrix(disc: &Discretization) -> Result<SparseMatrix> {
    let mesh = disc.mesh();
    let macs = mesh.macroelements()?;
    let basis = disc.displacement_element().basis();
    let nb = basis.len();
    let nq = disc.k() + 3;
    let rule = gauss_rule(nq)?;
    let grads: Vec<[Poly<2>; 4]> = basis
        .iter()
        .map(|f| [f.comps[0].deriv(0), f.comps[0].deriv(1), f.comps[1].deriv(0), f.comps[1].deriv(1)])
        .collect();

    // Scale-invariant: ‖ε(v)‖²_K equals the reference integral of the reference strain.
    let mut strain = Mat::<f64>::zeros(nb, nb);
    for (xi, wx) in rule.nodes.iter().zip(&rule.weights) {
        for (eta, wy) in rule.nodes.iter().zip(&rule.weights) {
            let p = [*xi, *eta];
            let eps: Vec<[f64; 3]> = grads
                .iter()
                .map(|g| [g[0].eval(&p), g[3].eval(&p), 0.5 * (g[1].eval(&p) + g[2].eval(&p))])
                .collect();
            for a in 0..nb {
                for b in 0..nb {
                    strain[(a, b)] += wx * wy * crate::assembly::frobenius(&eps[a], &eps[b]);
                }
            }
        }
    }

    let mut trip = Vec::new();
    let add_outer = |trip: &mut Vec<(usize, usize, f64)>, row: &[(usize, f64)], w: f64| {
        for &(i, a) in row {
            for &(j, b) in row {
                trip.push((i, j, w * a * b));
            }
        }
    };
    // Values of component `comp` of every local basis function at reference point `p`
    // of element `el`, as (global dof, value) pairs with sign `s`.
    let values = |el: usize, comp: usize, p: [f64; 2], s: f64| -> Vec<(usize, f64)> {
        disc.dofs()
            .disp_dofs(el)
            .zip(basis)
            .map(|(g, f)| (g, s * f.comps[comp].eval(&p)))
            .collect()
    };

    for mac in &macs {
        for &el in &mac.elements {
            let g: Vec<usize> = disc.dofs().disp_dofs(el).collect();
            for a in 0..nb {
                for b in 0..nb {
                    trip.push((g[a], g[b], strain[(a, b)]));
                }
            }
        }
        let [k1, k2, k3, k4] = mac.elements;
        // (minus side, plus side, component, vertical edge?)
        let jumps = [(k1, k2, 0, true), (k4, k3, 0, true), (k2, k3, 1, false), (k1, k4, 1, false)];
        for (lo, hi, comp, vertical) in jumps {
            for (t, w) in rule.nodes.iter().zip(&rule.weights) {
                let (plo, phi) = if vertical {
                    ([1.0, *t], [-1.0, *t])
                } else {
                    ([*t, 1.0], [*t, -1.0])
                };
                let mut row = values(lo, comp, plo, 1.0);
                row.extend(values(hi, comp, phi, -1.0));
                // h⁻¹ ‖[v]‖²_e = h⁻¹ (h / 2) ∫_{-1}^{1}.
                add_outer(&mut trip, &row, 0.5 * w);
            }
        }
        let mut row = Vec::new();
        row.extend(values(k1, 0, [0.0, 1.0], 1.0));
        row.extend(values(k4, 0, [0.0, -1.0], -1.0));
        row.extend(values(k2, 0, [0.0, 1.0], 1.0));
        row.extend(values(k3, 0, [0.0, -1.0], -1.0));
        row.extend(values(k1, 1, [1.0, 0.0], 1.0));
        row.extend(values(k2, 1, [-1.0, 0.0], -1.0));
        row.extend(values(k4, 1, [1.0, 0.0], 1.0));
        row.extend(values(k3, 1, [-1.0, 0.0], -1.0));
        add_outer(&mut trip, &row, 1.0);
    }
    let n = disc.dofs().n_disp();
    Ok(SparseMatrix::from_triplets(n, n, trip))
}

/// Gram matrix of `‖τ‖²_{0,h}`: the `L²` norm plus `h ‖τ11‖²_e` on interior vertical
/// edges, `h ‖τ22‖²_e` on interior horizontal edges, and `h² τ12(A)²` for every edge
/// meeting an interior vertex `A`.
pub fn mesh_stress_norm_matrix(disc: &Discretization) -> Result<SparseMatrix> {
    let mesh = disc.mesh();
    mesh.macroelements()?;
    let h = mesh.h();
    let basis = disc.stress_element().basis();
    let rule = gauss_rule(disc.k() + 3)?;
    let mut trip = disc.stress_mass().entries().to_vec();
    let values = |el: usize, comp: usize, p: [f64; 2]| -> Vec<(usize, f64)> {
        disc.dofs()
            .stress_dofs(el)
            .iter()
            .zip(basis)
            .filter_map(|(g, f)| g.map(|g| (g, f.comps[comp].eval(&p))))
            .collect()
    };
    let add_outer = |trip: &mut Vec<(usize, usize, f64)>, row: &[(usize, f64)], w: f64| {
        for &(i, a) in row {
            for &(j, b) in row {
                trip.push((i, j, w * a * b));
            }
        }
    };
    for edge in mesh.edges() {
        if edge.boundary {
            continue;
        }
        let el = edge.elements[0].expect("interior edge");
        let vertical = edge.orientation == crate::mesh::Orientation::Vertical;
        for (t, w) in rule.nodes.iter().zip(&rule.weights) {
            let (comp, p) = if vertical { (0, [1.0, *t]) } else { (1, [*t, 1.0]) };
            // h ‖τ‖²_e = h (h / 2) ∫_{-1}^{1}.
            add_outer(&mut trip, &values(el, comp, p), h * 0.5 * h * w);
        }
    }
    let n = mesh.n();
    for j in 1..n {
        for i in 1..n {
            // Element below-left of vertex (i, j); four edges meet there.
            let el = mesh.element_index(i - 1, j - 1);
            add_outer(&mut trip, &values(el, 2, [1.0, 1.0]), 4.0 * h * h);
        }
    }
    let ns = disc.dofs().n_stress();
    Ok(SparseMatrix::from_triplets(ns, ns, trip))
}

fn gram_norm(m: &SparseMatrix, x: &[f64]) -> f64 {
    let mx = m.mul_vec(x);
    x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt()
}

/// `|v|_{1,h}` of displacement coefficients `v`.
pub fn mesh_seminorm(disc: &Discretization, v: &[f64]) -> Result<f64> {
    Ok(gram_norm(&mesh_seminorm_matrix(disc)?, v))
}

/// `‖τ‖_{0,h}` of stress coefficients `tau`.
pub fn mesh_stress_norm(disc: &Discretization, tau: &[f64]) -> Result<f64> {
    Ok(gram_norm(&mesh_stress_norm_matrix(disc)?, tau))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: usize, k: usize, family: Family, bc: BoundaryCondition) -> Discretization {
        Discretization::new(Mesh::uniform(n).unwrap(), k, family, bc).unwrap()
    }

    #[test]
    fn witness_of_unit_load_on_one_cell() {
        let d = disc(1, 1, Family::Full, BoundaryCondition::Displacement);
        let v = d.project_displacement(&|_| [1.0, 0.0]);
        let w = construct_witness(&d, &v).unwrap();
        // τ11 = x on [0, 1]².
        assert!((w.stress_norm_sq - 1.0 / 3.0).abs() < 1e-13);
        assert!((w.displacement_norm_sq - 1.0).abs() < 1e-13);
        let s = d.stress_at(&w.stress, 0, &[0.5, -0.3]);
        assert!((s[0] - 0.75).abs() < 1e-13 && s[1].abs() < 1e-13 && s[2].abs() < 1e-13);

        let v = d.project_displacement(&|_| [0.0, 1.0]);
        let w = construct_witness(&d, &v).unwrap();
        let s = d.stress_at(&w.stress, 0, &[0.5, -0.3]);
        assert!((s[1] - 0.35).abs() < 1e-13 && s[0].abs() < 1e-13);
        assert!(w.div_residual < 1e-12);
    }

    #[test]
    fn witness_rejects_fields_outside_the_space() {
        let d = disc(2, 1, Family::Full, BoundaryCondition::Displacement);
        let mut fields = vec![
            PolyField {
                comps: vec![Poly::constant(1.0), Poly::zero()]
            };
            4
        ];
        assert!(witness_from_fields(&d, &fields).is_ok());
        fields[2].comps[1] = Poly::monomial([2, 0], 1.0);
        assert!(matches!(witness_from_fields(&d, &fields), Err(Error::NotInSpace(_))));
        let t = disc(2, 1, Family::Full, BoundaryCondition::Traction);
        assert!(construct_witness(&t, &vec![0.0; t.dofs().n_disp()]).is_err());
    }

    #[test]
    fn infsup_bounds_on_small_meshes() {
        for (n, k) in [(2, 1), (2, 2), (4, 1)] {
            let d = disc(n, k, Family::Full, BoundaryCondition::Displacement);
            let b = infsup_constant(&d, InfSupNorm::Hdiv).unwrap();
            assert!(b >= (2.0f64 / 3.0).sqrt() - 1e-9 && b <= 1.0 + 1e-12, "n={n} k={k} beta={b}");
        }
    }

    #[test]
    fn macro_kernel_lowest_order_contains_checkerboard() {
        let mk = macro_kernel(1, Family::Full).unwrap();
        assert_eq!(mk.dimension(), 3);
        assert!(mk.distance(&mk.checkerboard()) < 1e-9);
        // The elementwise projection of (y, -x) onto piecewise linears is a
        // translation plus a quarter of the checkerboard.
        let rm = mk.rigid_motions();
        assert!(rm.iter().all(|r| mk.distance(r) < 1e-9));
    }

    #[test]
    fn macro_kernel_is_rigid_motion_for_k2() {
        let mk = macro_kernel(2, Family::Full).unwrap();
        assert!(mk.angle_to(&mk.rigid_motions()).unwrap() < 1e-8);
    }

    #[test]
    fn mesh_norms_vanish_on_trivial_fields() {
        let d = disc(2, 1, Family::Full, BoundaryCondition::Traction);
        let t = d.project_displacement(&|_| [1.0, -2.0]);
        assert!(mesh_seminorm(&d, &t).unwrap() < 1e-12);
        assert_eq!(mesh_stress_norm(&d, &vec![0.0; d.dofs().n_stress()]).unwrap(), 0.0);
        let odd = disc(3, 1, Family::Full, BoundaryCondition::Traction);
        assert!(matches!(mesh_seminorm_matrix(&odd), Err(Error::OddMesh(3))));
    }

    /// The seminorm vanishes exactly on the macroelement kernel: the checkerboard
    /// has zero strain, no jumps across the edges it is continuous over, and its
    /// midpoint combination cancels; the mirrored checkerboard does not.
    #[test]
    fn mesh_seminorm_kernel_is_macro_kernel() {
        let d = disc(2, 1, Family::Full, BoundaryCondition::Traction);
        let cb = checkerboard_coefficients(&d, 0).unwrap();
        assert!(mesh_seminorm(&d, &cb).unwrap() < 1e-12);
        let mirrored = d.project_displacement(&|x| [(x[1] - 0.5).signum(), (x[0] - 0.5).signum()]);
        assert!(mesh_seminorm(&d, &mirrored).unwrap() > 1.0);
        let g = mesh_seminorm_matrix(&d).unwrap().to_dense();
        let zero = linalg::null_space(&g, 1e-10).unwrap().ncols();
        assert_eq!(zero, 3);
    }
}
