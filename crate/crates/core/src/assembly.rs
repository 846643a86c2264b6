//! Global numbering, boundary conditions and assembly of the saddle-point system
//!
//! ```text
//! [ A  Bᵀ  0 ] [σ]   [0]
//! [ B  0   Cᵀ] [u] = [F]
//! [ 0  C   0 ] [m]   [0]
//! ```
//!
//! where `A` is the compliance mass matrix, `B_ai = (div τ_i, v_a)`, `F_a = (f, v_a)`
//! and `C` (traction problems only) holds the moments of the displacement basis
//! against the rigid motions `(1, 0)`, `(0, 1)`, `(y, -x)`.
//!
//! All cells are congruent squares, so local matrices are computed once on the
//! reference square and scaled: `A_K = (h²/4) Â`, `B_K = (h/2) B̂`, and mass
//! matrices by `h²/4`. Stress fields map componentwise (no Piola transform is
//! needed on axis-aligned cells).

use std::collections::BTreeMap;
use std::fmt;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::SparseMatrix;
use crate::mesh::Mesh;
use crate::mpoly::PolyField;
use crate::polys::TensorRule;
use crate::refelem::two_d::{displacement_element, divergence, stress_element};
use crate::refelem::{DofKind, Entity, Family, ReferenceElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryCondition {
    /// `u = 0` on the boundary; no constraint on the stress.
    Displacement,
    /// `σν = 0` on the boundary; displacements orthogonal to rigid motions.
    Traction,
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryCondition::Displacement => "displacement",
            BoundaryCondition::Traction => "traction",
        })
    }
}

impl std::str::FromStr for BoundaryCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "displacement" => Ok(BoundaryCondition::Displacement),
            "traction" => Ok(BoundaryCondition::Traction),
            other => Err(Error::Config(format!("unknown boundary condition '{other}'"))),
        }
    }
}

/// Isotropic material given by its Lamé constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) || !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "material needs mu > 0 and lambda >= 0, got lambda = {lambda}, mu = {mu}"
            )));
        }
        Ok(Self { lambda, mu })
    }

    /// Weight of the trace term: `A σ = (σ - c tr(σ) δ) / 2μ`.
    pub fn trace_coefficient(&self) -> f64 {
        self.lambda / (2.0 * self.mu + 2.0 * self.lambda)
    }

    /// `(A σ) : τ` for symmetric tensors stored as `(11, 22, 12)`.
    pub fn compliance_product(&self, s: &[f64; 3], t: &[f64; 3]) -> f64 {
        let c = self.trace_coefficient();
        (frobenius(s, t) - c * (s[0] + s[1]) * (t[0] + t[1])) / (2.0 * self.mu)
    }

    /// `σ = 2μ ε + λ tr(ε) δ` for a symmetric strain `(ε11, ε22, ε12)`.
    pub fn stress_from_strain(&self, e: &[f64; 3]) -> [f64; 3] {
        let tr = e[0] + e[1];
        [
            2.0 * self.mu * e[0] + self.lambda * tr,
            2.0 * self.mu * e[1] + self.lambda * tr,
            2.0 * self.mu * e[2],
        ]
    }
}

impl Default for Material {
    fn default() -> Self {
        Self { lambda: 1.0, mu: 0.5 }
    }
}

/// `σ : τ` for symmetric tensors stored as `(11, 22, 12)`.
pub fn frobenius(s: &[f64; 3], t: &[f64; 3]) -> f64 {
    s[0] * t[0] + s[1] * t[1] + 2.0 * s[2] * t[2]
}

/// What a global stress unknown is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StressDofKey {
    /// Normal-stress moment on an edge.
    EdgeMoment { edge: usize, slot: usize },
    /// Shear value at a mesh vertex.
    Vertex(usize),
    /// Shear value at an interior point of an edge.
    EdgePoint { edge: usize, slot: usize },
    /// Element-interior functional (local index within the element).
    Interior { element: usize, slot: usize },
}

impl StressDofKey {
    pub fn on_boundary(&self, mesh: &Mesh) -> bool {
        match *self {
            StressDofKey::EdgeMoment { edge, .. } | StressDofKey::EdgePoint { edge, .. } => mesh.edge(edge).boundary,
            StressDofKey::Vertex(v) => mesh.is_boundary_vertex(v),
            StressDofKey::Interior { .. } => false,
        }
    }
}

/// Global numbering of the stress and displacement unknowns.
#[derive(Debug, Clone)]
pub struct DofMap {
    stress: Vec<Vec<Option<usize>>>,
    keys: Vec<StressDofKey>,
    disp_per_element: usize,
    n_disp: usize,
}

impl DofMap {
    pub fn build(
        mesh: &Mesh,
        stress: &ReferenceElement<2>,
        disp: &ReferenceElement<2>,
        bc: BoundaryCondition,
    ) -> Self {
        let local_keys: Vec<Vec<StressDofKey>> = (0..mesh.num_elements())
            .map(|e| local_stress_keys(mesh, stress, e))
            .collect();
        let mut all: Vec<StressDofKey> = local_keys.iter().flatten().copied().collect();
        all.sort();
        all.dedup();
        if bc == BoundaryCondition::Traction {
            all.retain(|k| !k.on_boundary(mesh));
        }
        let index: BTreeMap<StressDofKey, usize> = all.iter().enumerate().map(|(i, k)| (*k, i)).collect();
        let stress = local_keys
            .iter()
            .map(|keys| keys.iter().map(|k| index.get(k).copied()).collect())
            .collect();
        Self {
            stress,
            keys: all,
            disp_per_element: disp.dim(),
            n_disp: disp.dim() * mesh.num_elements(),
        }
    }

    pub fn n_stress(&self) -> usize {
        self.keys.len()
    }

    pub fn n_disp(&self) -> usize {
        self.n_disp
    }

    /// Global index of each local stress DOF of element `e`; `None` when constrained to zero.
    pub fn stress_dofs(&self, e: usize) -> &[Option<usize>] {
        &self.stress[e]
    }

    pub fn disp_dofs(&self, e: usize) -> std::ops::Range<usize> {
        e * self.disp_per_element..(e + 1) * self.disp_per_element
    }

    pub fn key(&self, global: usize) -> StressDofKey {
        self.keys[global]
    }
}

fn local_stress_keys(mesh: &Mesh, stress: &ReferenceElement<2>, e: usize) -> Vec<StressDofKey> {
    let edges = mesh.element_edges(e);
    let verts = mesh.element_vertices(e);
    let mut seen: BTreeMap<(bool, u8), usize> = BTreeMap::new();
    stress
        .dofs()
        .iter()
        .enumerate()
        .map(|(l, d)| match (d.kind, d.entity) {
            (DofKind::EdgeMoment, Entity::Edge(le)) => {
                let slot = seen.entry((true, le)).or_insert(0);
                *slot += 1;
                StressDofKey::EdgeMoment {
                    edge: edges[le as usize],
                    slot: *slot - 1,
                }
            }
            (DofKind::PointValue, Entity::Vertex(lv)) => StressDofKey::Vertex(verts[lv as usize]),
            (DofKind::PointValue, Entity::Edge(le)) => {
                let slot = seen.entry((false, le)).or_insert(0);
                *slot += 1;
                StressDofKey::EdgePoint {
                    edge: edges[le as usize],
                    slot: *slot - 1,
                }
            }
            _ => StressDofKey::Interior { element: e, slot: l },
        })
        .collect()
}

/// Reference basis values at quadrature points.
#[derive(Debug, Clone)]
struct Tabulation {
    rule: TensorRule<2>,
    stress: Vec<Vec<[f64; 3]>>,
    stress_div: Vec<Vec<[f64; 2]>>,
    disp: Vec<Vec<[f64; 2]>>,
}

impl Tabulation {
    fn new(stress: &ReferenceElement<2>, disp: &ReferenceElement<2>, points: usize) -> Result<Self> {
        let rule = TensorRule::<2>::gauss(points)?;
        let divs: Vec<PolyField<2>> = stress.basis().iter().map(divergence).collect();
        let eval3 = |f: &PolyField<2>, p: &[f64; 2]| {
            let v = f.eval(p);
            [v[0], v[1], v[2]]
        };
        let eval2 = |f: &PolyField<2>, p: &[f64; 2]| {
            let v = f.eval(p);
            [v[0], v[1]]
        };
        Ok(Self {
            stress: rule.points.iter().map(|p| stress.basis().iter().map(|f| eval3(f, p)).collect()).collect(),
            stress_div: rule.points.iter().map(|p| divs.iter().map(|f| eval2(f, p)).collect()).collect(),
            disp: rule.points.iter().map(|p| disp.basis().iter().map(|f| eval2(f, p)).collect()).collect(),
            rule,
        })
    }
}

/// Reference-square matrices shared by every cell.
#[derive(Debug, Clone)]
pub struct ReferenceMatrices {
    /// `∫ φ_i : φ_j`.
    pub stress_mass: Mat<f64>,
    /// `∫ tr φ_i tr φ_j`.
    pub stress_trace: Mat<f64>,
    /// `∫ div φ_i · div φ_j`.
    pub divdiv: Mat<f64>,
    /// `∫ div φ_i · ψ_a`, displacement rows.
    pub div: Mat<f64>,
    /// `∫ ψ_a · ψ_b`.
    pub disp_mass: Mat<f64>,
}

impl ReferenceMatrices {
    fn new(tab: &Tabulation, ns: usize, nu: usize) -> Self {
        let w = &tab.rule.weights;
        let sum = |f: &dyn Fn(usize) -> f64| -> f64 { (0..w.len()).map(|q| w[q] * f(q)).sum() };
        let s = &tab.stress;
        let sd = &tab.stress_div;
        let d = &tab.disp;
        Self {
            stress_mass: Mat::from_fn(ns, ns, |i, j| sum(&|q| frobenius(&s[q][i], &s[q][j]))),
            stress_trace: Mat::from_fn(ns, ns, |i, j| {
                sum(&|q| (s[q][i][0] + s[q][i][1]) * (s[q][j][0] + s[q][j][1]))
            }),
            divdiv: Mat::from_fn(ns, ns, |i, j| {
                sum(&|q| sd[q][i][0] * sd[q][j][0] + sd[q][i][1] * sd[q][j][1])
            }),
            div: Mat::from_fn(nu, ns, |a, i| sum(&|q| sd[q][i][0] * d[q][a][0] + sd[q][i][1] * d[q][a][1])),
            disp_mass: Mat::from_fn(nu, nu, |a, b| sum(&|q| d[q][a][0] * d[q][b][0] + d[q][a][1] * d[q][b][1])),
        }
    }
}

/// Default number of Gauss points per axis for the local matrices.
pub fn default_quadrature_points(k: usize) -> usize {
    k + 3
}

/// Gauss points per axis used for loads and rigid-motion moments of non-polynomial data.
pub fn load_quadrature_points(k: usize) -> usize {
    k + 5
}

/// The discrete stress and displacement spaces on a mesh, with their numbering.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Mesh,
    k: usize,
    family: Family,
    bc: BoundaryCondition,
    stress: ReferenceElement<2>,
    disp: ReferenceElement<2>,
    dofs: DofMap,
    tab: Tabulation,
    load_tab: Tabulation,
    local: ReferenceMatrices,
}

impl Discretization {
    pub fn new(mesh: Mesh, k: usize, family: Family, bc: BoundaryCondition) -> Result<Self> {
        Self::with_quadrature(mesh, k, family, bc, default_quadrature_points(k))
    }

    /// As [`Discretization::new`] with an explicit number of Gauss points per axis.
    ///
    /// Local integrands have degree up to `2k + 2` per axis, so fewer than `k + 2`
    /// points are rejected.
    pub fn with_quadrature(
        mesh: Mesh,
        k: usize,
        family: Family,
        bc: BoundaryCondition,
        points: usize,
    ) -> Result<Self> {
        let stress = stress_element(k, family)?;
        let disp = displacement_element(k, family)?;
        if points < k + 2 {
            return Err(Error::QuadratureOrder {
                points,
                degree: 2 * k + 2,
            });
        }
        let tab = Tabulation::new(&stress, &disp, points)?;
        let load_tab = Tabulation::new(&stress, &disp, load_quadrature_points(k))?;
        let local = ReferenceMatrices::new(&tab, stress.dim(), disp.dim());
        let dofs = DofMap::build(&mesh, &stress, &disp, bc);
        Ok(Self {
            mesh,
            k,
            family,
            bc,
            stress,
            disp,
            dofs,
            tab,
            load_tab,
            local,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn bc(&self) -> BoundaryCondition {
        self.bc
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn stress_element(&self) -> &ReferenceElement<2> {
        &self.stress
    }

    pub fn displacement_element(&self) -> &ReferenceElement<2> {
        &self.disp
    }

    pub fn reference_matrices(&self) -> &ReferenceMatrices {
        &self.local
    }

    pub fn quadrature_points(&self) -> usize {
        self.tab.rule.points.len().isqrt()
    }

    fn scatter_ss(&self, local: &Mat<f64>, scale: f64) -> SparseMatrix {
        let mut trip = Vec::new();
        for e in 0..self.mesh.num_elements() {
            let g = self.dofs.stress_dofs(e);
            for (i, gi) in g.iter().enumerate() {
                let Some(gi) = *gi else { continue };
                for (j, gj) in g.iter().enumerate() {
                    let Some(gj) = *gj else { continue };
                    trip.push((gi, gj, scale * local[(i, j)]));
                }
            }
        }
        let n = self.dofs.n_stress();
        SparseMatrix::from_triplets(n, n, trip)
    }

    /// Compliance mass matrix `(A τ_j, τ_i)`.
    pub fn compliance_matrix(&self, material: &Material) -> SparseMatrix {
        let c = material.trace_coefficient();
        let h = self.mesh.h();
        let s = &self.local.stress_mass;
        let t = &self.local.stress_trace;
        let local = Mat::from_fn(s.nrows(), s.ncols(), |i, j| s[(i, j)] - c * t[(i, j)]);
        self.scatter_ss(&local, h * h / 4.0 / (2.0 * material.mu))
    }

    /// `L²` Gram matrix `(τ_j, τ_i)` with the Frobenius product.
    pub fn stress_mass(&self) -> SparseMatrix {
        let h = self.mesh.h();
        self.scatter_ss(&self.local.stress_mass, h * h / 4.0)
    }

    /// `(div τ_j, div τ_i)`; invariant under the cell scaling.
    pub fn divdiv(&self) -> SparseMatrix {
        self.scatter_ss(&self.local.divdiv, 1.0)
    }

    /// `B_ai = (div τ_i, v_a)`.
    pub fn divergence_matrix(&self) -> SparseMatrix {
        let scale = 0.5 * self.mesh.h();
        let mut trip = Vec::new();
        for e in 0..self.mesh.num_elements() {
            let g = self.dofs.stress_dofs(e);
            for (a, ga) in self.dofs.disp_dofs(e).enumerate() {
                for (i, gi) in g.iter().enumerate() {
                    let Some(gi) = *gi else { continue };
                    trip.push((ga, gi, scale * self.local.div[(a, i)]));
                }
            }
        }
        SparseMatrix::from_triplets(self.dofs.n_disp(), self.dofs.n_stress(), trip)
    }

    pub fn displacement_mass(&self) -> SparseMatrix {
        let h = self.mesh.h();
        let mut trip = Vec::new();
        for e in 0..self.mesh.num_elements() {
            let r = self.dofs.disp_dofs(e);
            for (a, ga) in r.clone().enumerate() {
                for (b, gb) in r.clone().enumerate() {
                    trip.push((ga, gb, h * h / 4.0 * self.local.disp_mass[(a, b)]));
                }
            }
        }
        let n = self.dofs.n_disp();
        SparseMatrix::from_triplets(n, n, trip)
    }

    /// `F_a = (f, v_a)` with `k + 5` Gauss points per axis.
    pub fn load_vector(&self, f: &dyn Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let h = self.mesh.h();
        let jac = h * h / 4.0;
        let mut out = vec![0.0; self.dofs.n_disp()];
        for e in 0..self.mesh.num_elements() {
            let r = self.dofs.disp_dofs(e);
            for (q, (p, w)) in self.load_tab.rule.points.iter().zip(&self.load_tab.rule.weights).enumerate() {
                let fx = f(self.mesh.map_point(e, p));
                for (a, ga) in r.clone().enumerate() {
                    let v = self.load_tab.disp[q][a];
                    out[ga] += jac * w * (fx[0] * v[0] + fx[1] * v[1]);
                }
            }
        }
        out
    }

    /// `∫_Ω f · w` for the three rigid motions, with the load quadrature.
    pub fn rigid_motion_moments(&self, f: &dyn Fn([f64; 2]) -> [f64; 2]) -> [f64; 3] {
        let h = self.mesh.h();
        let jac = h * h / 4.0;
        let mut out = [0.0; 3];
        for e in 0..self.mesh.num_elements() {
            for (p, w) in self.load_tab.rule.points.iter().zip(&self.load_tab.rule.weights) {
                let x = self.mesh.map_point(e, p);
                let fx = f(x);
                for (r, wr) in rigid_motions(x).iter().enumerate() {
                    out[r] += jac * w * (fx[0] * wr[0] + fx[1] * wr[1]);
                }
            }
        }
        out
    }

    /// Rows `C_ra = (v_a, w_r)` for the rigid motions `(1, 0)`, `(0, 1)`, `(y, -x)`.
    pub fn rigid_motion_rows(&self) -> SparseMatrix {
        self.rigid_motion_rows_on(0..self.mesh.num_elements())
    }

    /// The rigid-motion rows restricted to the 2×2 corner patch of elements.
    pub fn corner_rigid_motion_rows(&self) -> SparseMatrix {
        let m = self.mesh.n().min(2);
        let patch: Vec<usize> = (0..m)
            .flat_map(|j| (0..m).map(move |i| (i, j)))
            .map(|(i, j)| self.mesh.element_index(i, j))
            .collect();
        self.rigid_motion_rows_on(patch)
    }

    fn rigid_motion_rows_on(&self, elements: impl IntoIterator<Item = usize>) -> SparseMatrix {
        let h = self.mesh.h();
        let jac = h * h / 4.0;
        let mut trip = Vec::new();
        for e in elements {
            let r = self.dofs.disp_dofs(e);
            for (q, (p, w)) in self.tab.rule.points.iter().zip(&self.tab.rule.weights).enumerate() {
                let x = self.mesh.map_point(e, p);
                for (row, wr) in rigid_motions(x).iter().enumerate() {
                    for (a, ga) in r.clone().enumerate() {
                        let v = self.tab.disp[q][a];
                        trip.push((row, ga, jac * w * (v[0] * wr[0] + v[1] * wr[1])));
                    }
                }
            }
        }
        SparseMatrix::from_triplets(3, self.dofs.n_disp(), trip)
    }

    /// Assemble the saddle-point system for the load `f`.
    ///
    /// Traction problems check that `f` is orthogonal to the rigid motions first.
    pub fn assemble(&self, material: &Material, f: &dyn Fn([f64; 2]) -> [f64; 2]) -> Result<SaddleSystem> {
        let (c, anchor) = match self.bc {
            BoundaryCondition::Displacement => (None, None),
            BoundaryCondition::Traction => {
                let m = self.rigid_motion_moments(f);
                for (index, &value) in m.iter().enumerate() {
                    if value.abs() > 1e-8 {
                        return Err(Error::IncompatibleLoad { index, value });
                    }
                }
                (Some(self.rigid_motion_rows()), Some(self.corner_rigid_motion_rows()))
            }
        };
        Ok(SaddleSystem {
            a: self.compliance_matrix(material),
            b: self.divergence_matrix(),
            c,
            anchor,
            load: self.load_vector(f),
        })
    }

    /// Stress of the global coefficient vector at reference point `xi` of element `e`.
    pub fn stress_at(&self, coeffs: &[f64], e: usize, xi: &[f64; 2]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (i, g) in self.dofs.stress_dofs(e).iter().enumerate() {
            let Some(g) = *g else { continue };
            if coeffs[g] == 0.0 {
                continue;
            }
            let v = self.stress.basis()[i].eval(xi);
            for c in 0..3 {
                out[c] += coeffs[g] * v[c];
            }
        }
        out
    }

    /// Local stress coefficients of element `e` (zero for constrained DOFs).
    pub fn local_stress(&self, coeffs: &[f64], e: usize) -> Vec<f64> {
        self.dofs
            .stress_dofs(e)
            .iter()
            .map(|g| g.map_or(0.0, |g| coeffs[g]))
            .collect()
    }

    pub fn local_displacement<'a>(&self, coeffs: &'a [f64], e: usize) -> &'a [f64] {
        &coeffs[self.dofs.disp_dofs(e)]
    }

    /// Interpolate a physical stress field through the stress DOFs.
    ///
    /// Shared DOFs take the value computed on the first element that owns them.
    pub fn interpolate_stress(&self, f: &dyn Fn([f64; 2]) -> [f64; 3]) -> Vec<f64> {
        let mut out = vec![f64::NAN; self.dofs.n_stress()];
        for e in 0..self.mesh.num_elements() {
            for (d, g) in self.stress.dofs().iter().zip(self.dofs.stress_dofs(e)) {
                let Some(g) = *g else { continue };
                if out[g].is_nan() {
                    out[g] = d.apply_fn(|xi| f(self.mesh.map_point(e, xi)).to_vec());
                }
            }
        }
        out
    }

    /// Elementwise `L²` projection of a physical displacement field.
    pub fn project_displacement(&self, f: &dyn Fn([f64; 2]) -> [f64; 2]) -> Vec<f64> {
        let mut out = vec![0.0; self.dofs.n_disp()];
        for e in 0..self.mesh.num_elements() {
            for (d, g) in self.disp.dofs().iter().zip(self.dofs.disp_dofs(e)) {
                out[g] = d.apply_fn(|xi| f(self.mesh.map_point(e, xi)).to_vec());
            }
        }
        out
    }

    /// Displacement of the global coefficient vector at reference point `xi` of element `e`.
    pub fn displacement_at(&self, coeffs: &[f64], e: usize, xi: &[f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (a, g) in self.dofs.disp_dofs(e).enumerate() {
            let v = self.disp.basis()[a].eval(xi);
            out[0] += coeffs[g] * v[0];
            out[1] += coeffs[g] * v[1];
        }
        out
    }
}

/// Discrete fields at one point of the `k + 5` Gauss rule on an element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub element: usize,
    pub x: [f64; 2],
    /// Quadrature weight including the cell Jacobian.
    pub weight: f64,
    pub stress: [f64; 3],
    pub div_stress: [f64; 2],
    pub displacement: [f64; 2],
}

impl Discretization {
    /// Visit the discrete stress, its divergence and the displacement at every point
    /// of the `k + 5` Gauss rule of every element.
    pub fn visit_fields(&self, stress: &[f64], disp: &[f64], mut visit: impl FnMut(&FieldSample)) {
        let h = self.mesh.h();
        let jac = h * h / 4.0;
        let tab = &self.load_tab;
        for e in 0..self.mesh.num_elements() {
            let ls = self.local_stress(stress, e);
            let lu = self.local_displacement(disp, e);
            for (q, (p, w)) in tab.rule.points.iter().zip(&tab.rule.weights).enumerate() {
                let mut s = [0.0; 3];
                let mut d = [0.0; 2];
                for (i, c) in ls.iter().enumerate() {
                    for r in 0..3 {
                        s[r] += c * tab.stress[q][i][r];
                    }
                    for r in 0..2 {
                        d[r] += c * tab.stress_div[q][i][r];
                    }
                }
                let mut u = [0.0; 2];
                for (a, c) in lu.iter().enumerate() {
                    u[0] += c * tab.disp[q][a][0];
                    u[1] += c * tab.disp[q][a][1];
                }
                visit(&FieldSample {
                    element: e,
                    x: self.mesh.map_point(e, p),
                    weight: jac * w,
                    stress: s,
                    div_stress: [2.0 / h * d[0], 2.0 / h * d[1]],
                    displacement: u,
                });
            }
        }
    }
}

/// The rigid motions `(1, 0)`, `(0, 1)`, `(y, -x)` at `x`.
pub fn rigid_motions(x: [f64; 2]) -> [[f64; 2]; 3] {
    [[1.0, 0.0], [0.0, 1.0], [x[1], -x[0]]]
}

/// Assembled blocks of the discrete problem.
#[derive(Debug, Clone)]
pub struct SaddleSystem {
    pub a: SparseMatrix,
    pub b: SparseMatrix,
    pub c: Option<SparseMatrix>,
    /// Sparse stand-in for `c` that fixes the same kernel; the solver factors with it
    /// and corrects the result afterwards.
    pub anchor: Option<SparseMatrix>,
    pub load: Vec<f64>,
}

impl SaddleSystem {
    pub fn n_stress(&self) -> usize {
        self.a.nrows()
    }

    pub fn n_disp(&self) -> usize {
        self.b.nrows()
    }

    pub fn n_multipliers(&self) -> usize {
        self.c.as_ref().map_or(0, |c| c.nrows())
    }

    pub fn size(&self) -> usize {
        self.n_stress() + self.n_disp() + self.n_multipliers()
    }

    /// The full symmetric block matrix.
    pub fn matrix(&self) -> SparseMatrix {
        self.matrix_with(self.c.as_ref())
    }

    /// The block matrix with `constraints` in place of `c`.
    pub fn matrix_with(&self, constraints: Option<&SparseMatrix>) -> SparseMatrix {
        let ns = self.n_stress();
        let nu = self.n_disp();
        let mut trip: Vec<(usize, usize, f64)> = self.a.entries().to_vec();
        for &(r, c, v) in self.b.entries() {
            trip.push((ns + r, c, v));
            trip.push((c, ns + r, v));
        }
        if let Some(cm) = constraints {
            for &(r, c, v) in cm.entries() {
                trip.push((ns + nu + r, ns + c, v));
                trip.push((ns + c, ns + nu + r, v));
            }
        }
        let n = self.size();
        SparseMatrix::from_triplets(n, n, trip)
    }

    pub fn rhs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.size()];
        let ns = self.n_stress();
        out[ns..ns + self.n_disp()].copy_from_slice(&self.load);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn disc(n: usize, k: usize, family: Family, bc: BoundaryCondition) -> Discretization {
        Discretization::new(Mesh::uniform(n).unwrap(), k, family, bc).unwrap()
    }

    #[test]
    fn lowest_order_counts() {
        let d = disc(2, 1, Family::Full, BoundaryCondition::Displacement);
        let m = d.mesh();
        assert_eq!(d.dofs().n_stress(), m.num_edges() + 2 * m.num_elements() + m.num_vertices());
        assert_eq!(d.dofs().n_stress() + d.dofs().n_disp(), 45);
        let d = disc(1, 1, Family::Full, BoundaryCondition::Traction);
        assert_eq!(d.dofs().n_stress() + d.dofs().n_disp(), 6);
        let d = disc(2, 2, Family::Full, BoundaryCondition::Displacement);
        assert_eq!(d.dofs().n_disp(), 40);
    }

    #[test]
    fn compliance_of_identity() {
        // λ/(2μ+2λ) = 1/3, so (Aδ, δ) = 2 - 4/3 per unit area
        let mat = Material::default();
        assert!((mat.trace_coefficient() - 1.0 / 3.0).abs() < 1e-16);
        assert!((mat.compliance_product(&[1.0, 1.0, 0.0], &[1.0, 1.0, 0.0]) - 2.0 / 3.0).abs() < 1e-15);
        let d = disc(3, 1, Family::Full, BoundaryCondition::Displacement);
        let s = d.interpolate_stress(&|_| [1.0, 1.0, 0.0]);
        let a = d.compliance_matrix(&mat);
        let v: f64 = a.mul_vec(&s).iter().zip(&s).map(|(x, y)| x * y).sum();
        assert!((v - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rigid_motion_rows_of_constant_field() {
        let d = disc(2, 2, Family::Full, BoundaryCondition::Traction);
        let v = d.project_displacement(&|_| [1.0, 0.0]);
        let c = d.rigid_motion_rows();
        let r = c.mul_vec(&v);
        assert!((r[0] - 1.0).abs() < 1e-13 && r[1].abs() < 1e-13 && (r[2] - 0.5).abs() < 1e-13);
        let rot = d.project_displacement(&|x| [x[1], -x[0]]);
        assert!(c.mul_vec(&rot)[2] > 0.0);
    }

    #[test]
    fn low_quadrature_is_rejected() {
        let r = Discretization::with_quadrature(
            Mesh::uniform(1).unwrap(),
            2,
            Family::Full,
            BoundaryCondition::Displacement,
            3,
        );
        assert!(matches!(r, Err(Error::QuadratureOrder { .. })));
    }

    #[test]
    fn system_is_symmetric() {
        let d = disc(2, 2, Family::Reduced, BoundaryCondition::Traction);
        let sys = d.assemble(&Material::default(), &|_| [0.0, 0.0]).unwrap();
        assert_eq!(sys.matrix().asymmetry(), 0.0);
    }

    #[test]
    fn incompatible_load_is_rejected() {
        let d = disc(2, 1, Family::Full, BoundaryCondition::Traction);
        let r = d.assemble(&Material::default(), &|_| [1.0, 0.0]);
        assert!(matches!(r, Err(Error::IncompatibleLoad { index: 0, .. })));
    }
}
