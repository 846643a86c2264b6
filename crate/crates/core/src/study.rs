//! Manufactured solutions, error norms and convergence tables.
//!
//! Both problems are posed on the unit square with `λ = 1`, `μ = 1/2`. The load
//! is `f = div σ` with `σ = 2μ ε(u) + λ tr ε(u) δ`, which expands to
//!
//! ```text
//! f1 = (2μ+λ) ∂xx u1 + μ ∂yy u1 + (μ+λ) ∂xy u2
//! f2 = (2μ+λ) ∂yy u2 + μ ∂xx u2 + (μ+λ) ∂xy u1
//! ```
//!
//! and is evaluated from hand-coded first and second derivatives of `u`.

use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::assembly::{BoundaryCondition, Discretization, Material};
use crate::error::{Error, Result};
use crate::mesh::Mesh;
use crate::refelem::Family;
use crate::solve::{solve, DiscreteSolution};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    /// `u = sin(πx) sin(πy) (1, 1)` with `u = 0` on the boundary.
    SinusoidalDisplacement,
    /// `u = (100 x²(1-x)² y²(1-y)² - 1/9) (1, -1)` with `σν = 0` on the boundary.
    TractionBubble,
}

impl Problem {
    pub fn id(self) -> u8 {
        match self {
            Problem::SinusoidalDisplacement => 1,
            Problem::TractionBubble => 2,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Problem::SinusoidalDisplacement),
            2 => Ok(Problem::TractionBubble),
            other => Err(Error::Config(format!("unknown problem {other} (expected 1 or 2)"))),
        }
    }

    pub fn boundary_condition(self) -> BoundaryCondition {
        match self {
            Problem::SinusoidalDisplacement => BoundaryCondition::Displacement,
            Problem::TractionBubble => BoundaryCondition::Traction,
        }
    }

    /// Coarsest level with a nonsingular system. On the single-cell mesh every
    /// traction stress DOF except the interior ones is removed and the system
    /// degenerates, so the traction problem starts at level 2.
    pub fn first_level(self) -> usize {
        match self {
            Problem::SinusoidalDisplacement => 1,
            Problem::TractionBubble => 2,
        }
    }

    /// `(u, ∇u, ∇²u)` at `x`: `grad[i][j] = ∂_j u_i`, `hess[i][j][l] = ∂_j ∂_l u_i`.
    pub fn derivatives(self, x: [f64; 2]) -> Derivatives {
        match self {
            Problem::SinusoidalDisplacement => {
                let (sx, cx) = (PI * x[0]).sin_cos();
                let (sy, cy) = (PI * x[1]).sin_cos();
                let s = sx * sy;
                let g = [PI * cx * sy, PI * sx * cy];
                let hxx = -PI * PI * s;
                let hxy = PI * PI * cx * cy;
                let hess = [[hxx, hxy], [hxy, hxx]];
                Derivatives {
                    u: [s, s],
                    grad: [g, g],
                    hess: [hess, hess],
                }
            }
            Problem::TractionBubble => {
                let p = |t: f64| t * t * (1.0 - t) * (1.0 - t);
                let dp = |t: f64| 2.0 * t * (1.0 - t) * (1.0 - 2.0 * t);
                let ddp = |t: f64| 2.0 * (1.0 - 6.0 * t + 6.0 * t * t);
                let (px, py) = (p(x[0]), p(x[1]));
                let g = 100.0 * px * py - 1.0 / 9.0;
                let grad = [100.0 * dp(x[0]) * py, 100.0 * px * dp(x[1])];
                let hxy = 100.0 * dp(x[0]) * dp(x[1]);
                let hess = [[100.0 * ddp(x[0]) * py, hxy], [hxy, 100.0 * px * ddp(x[1])]];
                let neg = |m: [[f64; 2]; 2]| [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]];
                Derivatives {
                    u: [g, -g],
                    grad: [grad, [-grad[0], -grad[1]]],
                    hess: [hess, neg(hess)],
                }
            }
        }
    }

    pub fn displacement(self, x: [f64; 2]) -> [f64; 2] {
        self.derivatives(x).u
    }

    pub fn stress(self, material: &Material, x: [f64; 2]) -> [f64; 3] {
        let g = self.derivatives(x).grad;
        material.stress_from_strain(&[g[0][0], g[1][1], 0.5 * (g[0][1] + g[1][0])])
    }

    pub fn load(self, material: &Material, x: [f64; 2]) -> [f64; 2] {
        let h = self.derivatives(x).hess;
        let (l, m) = (material.lambda, material.mu);
        [
            (2.0 * m + l) * h[0][0][0] + m * h[0][1][1] + (m + l) * h[1][0][1],
            (2.0 * m + l) * h[1][1][1] + m * h[1][0][0] + (m + l) * h[0][0][1],
        ]
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Problem::SinusoidalDisplacement => "sinusoidal-displacement",
            Problem::TractionBubble => "traction-bubble",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivatives {
    pub u: [f64; 2],
    pub grad: [[f64; 2]; 2],
    pub hess: [[[f64; 2]; 2]; 2],
}

/// `(u, σ, f)` of a manufactured problem at `x`.
pub fn exact_fields(problem: Problem, material: &Material, x: [f64; 2]) -> ([f64; 2], [f64; 3], [f64; 2]) {
    (
        problem.displacement(x),
        problem.stress(material, x),
        problem.load(material, x),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorNorms {
    pub displacement: f64,
    /// Stress error in the norm selected by the report (see [`StressNorm`]).
    pub stress: f64,
    pub divergence: f64,
    /// `‖σ11 - σ11,h‖`, `‖σ22 - σ22,h‖`, `‖σ12 - σ12,h‖`.
    pub stress_components: [f64; 3],
}

/// How the stress error is combined from its components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StressNorm {
    /// `(σ11, σ22, σ12)` as a vector: the shear component counted once.
    #[default]
    Vector,
    /// Tensor Frobenius norm: the shear component counted twice.
    Frobenius,
    /// Only the first normal component, `‖σ11 - σ11,h‖`.
    FirstComponent,
}

impl StressNorm {
    pub fn combine(self, c: &[f64; 3]) -> f64 {
        match self {
            StressNorm::Vector => (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt(),
            StressNorm::Frobenius => (c[0] * c[0] + c[1] * c[1] + 2.0 * c[2] * c[2]).sqrt(),
            StressNorm::FirstComponent => c[0],
        }
    }
}

impl fmt::Display for StressNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StressNorm::Vector => "vector",
            StressNorm::Frobenius => "frobenius",
            StressNorm::FirstComponent => "first-component",
        })
    }
}

impl std::str::FromStr for StressNorm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "vector" => Ok(StressNorm::Vector),
            "frobenius" => Ok(StressNorm::Frobenius),
            "first-component" => Ok(StressNorm::FirstComponent),
            other => Err(Error::Config(format!("unknown stress norm '{other}'"))),
        }
    }
}

/// `L²` errors `‖u - u_h‖`, `‖σ - σ_h‖` and `‖div σ - div σ_h‖`, integrated with
/// `k + 5` Gauss points per axis. The stress error uses [`StressNorm::Vector`].
pub fn error_norms(
    disc: &Discretization,
    solution: &DiscreteSolution,
    problem: Problem,
    material: &Material,
) -> Result<ErrorNorms> {
    if solution.stress.len() != disc.dofs().n_stress() || solution.displacement.len() != disc.dofs().n_disp() {
        return Err(Error::Mismatch(format!(
            "solution has {}+{} unknowns, discretization {}+{}",
            solution.stress.len(),
            solution.displacement.len(),
            disc.dofs().n_stress(),
            disc.dofs().n_disp()
        )));
    }
    let mut acc = [0.0; 5];
    disc.visit_fields(&solution.stress, &solution.displacement, |s| {
        let (u, sig, f) = exact_fields(problem, material, s.x);
        let du = [u[0] - s.displacement[0], u[1] - s.displacement[1]];
        let ds = [sig[0] - s.stress[0], sig[1] - s.stress[1], sig[2] - s.stress[2]];
        let dd = [f[0] - s.div_stress[0], f[1] - s.div_stress[1]];
        acc[0] += s.weight * (du[0] * du[0] + du[1] * du[1]);
        acc[1] += s.weight * (dd[0] * dd[0] + dd[1] * dd[1]);
        for c in 0..3 {
            acc[2 + c] += s.weight * ds[c] * ds[c];
        }
    });
    let comps = [acc[2].sqrt(), acc[3].sqrt(), acc[4].sqrt()];
    Ok(ErrorNorms {
        displacement: acc[0].sqrt(),
        stress: StressNorm::Vector.combine(&comps),
        divergence: acc[1].sqrt(),
        stress_components: comps,
    })
}

/// Assemble and solve one manufactured problem on the `n × n` mesh.
pub fn solve_problem(
    problem: Problem,
    n: usize,
    k: usize,
    family: Family,
    material: &Material,
) -> Result<(Discretization, DiscreteSolution)> {
    let disc = Discretization::new(Mesh::uniform(n)?, k, family, problem.boundary_condition())?;
    let load = |x: [f64; 2]| problem.load(material, x);
    let sys = disc.assemble(material, &load)?;
    let sol = solve(&sys)?;
    Ok((disc, sol))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub level: usize,
    pub n: usize,
    pub errors: ErrorNorms,
    /// `log2` of the error ratio to the previous row; `0.0` on the first row.
    pub rates: ErrorNorms,
    pub stress_dofs: usize,
    pub displacement_dofs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub problem: Problem,
    pub k: usize,
    pub family: Family,
    pub material: Material,
    pub stress_norm: StressNorm,
    pub rows: Vec<LevelRow>,
}

/// Mesh size of a refinement level: level 1 is the unit square itself.
pub fn level_size(level: usize) -> usize {
    1 << (level - 1)
}

pub fn convergence_table(
    problem: Problem,
    k: usize,
    family: Family,
    material: &Material,
    levels: &[usize],
) -> Result<ConvergenceReport> {
    let mut rows: Vec<LevelRow> = Vec::with_capacity(levels.len());
    for &level in levels {
        if level == 0 || level > 12 {
            return Err(Error::Config(format!("level {level} outside 1..=12")));
        }
        let n = level_size(level);
        let wrap = |e: Error| Error::Level {
            level,
            cause: Box::new(e),
        };
        let (disc, sol) = solve_problem(problem, n, k, family, material).map_err(wrap)?;
        let errors = error_norms(&disc, &sol, problem, material).map_err(wrap)?;
        rows.push(LevelRow {
            level,
            n,
            errors,
            rates: errors,
            stress_dofs: disc.dofs().n_stress(),
            displacement_dofs: disc.dofs().n_disp(),
        });
    }
    let mut report = ConvergenceReport {
        problem,
        k,
        family,
        material: *material,
        stress_norm: StressNorm::Vector,
        rows,
    };
    report.update_rates();
    Ok(report)
}

fn rate(prev: f64, cur: f64) -> f64 {
    (prev / cur).log2()
}

impl ConvergenceReport {
    /// Recombine the stress column in another norm and recompute the rates.
    pub fn with_stress_norm(mut self, norm: StressNorm) -> Self {
        self.stress_norm = norm;
        for r in &mut self.rows {
            r.errors.stress = norm.combine(&r.errors.stress_components);
        }
        self.update_rates();
        self
    }

    fn update_rates(&mut self) {
        for i in 0..self.rows.len() {
            let cur = self.rows[i].errors;
            self.rows[i].rates = match i {
                0 => ErrorNorms {
                    displacement: 0.0,
                    stress: 0.0,
                    divergence: 0.0,
                    stress_components: [0.0; 3],
                },
                _ => {
                    let prev = self.rows[i - 1].errors;
                    ErrorNorms {
                        displacement: rate(prev.displacement, cur.displacement),
                        stress: rate(prev.stress, cur.stress),
                        divergence: rate(prev.divergence, cur.divergence),
                        stress_components: [0, 1, 2]
                            .map(|c| rate(prev.stress_components[c], cur.stress_components[c])),
                    }
                }
            };
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("level,n,err_u,rate_u,err_sigma,rate_sigma,err_div,rate_div\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:.6e},{:.3},{:.6e},{:.3},{:.6e},{:.3}",
                r.level,
                r.n,
                r.errors.displacement,
                r.rates.displacement,
                r.errors.stress,
                r.rates.stress,
                r.errors.divergence,
                r.rates.divergence
            );
        }
        out
    }

    /// Markdown table with the columns error, rate, error, rate, error, rate.
    pub fn to_markdown(&self) -> String {
        let k = self.k;
        let mut out = format!(
            "| level | ‖u - u_{k},h‖₀ | rate | ‖σ - σ_{k},h‖₀ | rate | ‖div(σ - σ_{k},h)‖₀ | rate |\n"
        );
        out.push_str("|---:|---:|---:|---:|---:|---:|---:|\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "| {} | {} | {:.1} | {} | {:.1} | {} | {:.1} |",
                r.level,
                format_error(r.errors.displacement),
                r.rates.displacement,
                format_error(r.errors.stress),
                r.rates.stress,
                format_error(r.errors.divergence),
                r.rates.divergence
            );
        }
        out
    }
}

/// Four decimals above `1e-3`, otherwise five significant digits in exponent form.
pub fn format_error(v: f64) -> String {
    if v >= 1e-3 {
        format!("{v:.4}")
    } else {
        format!("{v:.4e}")
    }
}
