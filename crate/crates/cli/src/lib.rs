//! Driver behind the `rectmix` binary.
//!
//! Every command produces a [`Report`]: the rendered text in the requested format
//! and whether the checks it performs passed. JSON output wraps the result with the
//! parsed configuration, the tolerances applied and the library version.

pub mod config;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use serde::Serialize;
use serde_json::{json, Value};

use rectmix::assembly::{BoundaryCondition, Material};
use rectmix::config::ProblemConfig;
use rectmix::linalg::SparseMatrix;
use rectmix::refelem::{self, three_d, two_d, AuditEntry, MAX_CONDITION};
use rectmix::solve::{solve, RESIDUAL_TOLERANCE};
use rectmix::stability::{self, InfSupNorm, StabilityReport, KERNEL_TOLERANCE};
use rectmix::study::{self, format_error, Problem};
use rectmix::Error;

pub use config::{Command, Format, RunConfig};
use config::*;

/// Environment variable naming a directory for all output files.
pub const OUT_DIR_ENV: &str = "RECTMIX_OUT_DIR";

/// `β_h` lower bound checked for displacement boundary conditions.
pub fn infsup_floor() -> f64 {
    (2.0f64 / 3.0).sqrt() - 1e-9
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub passed: bool,
}

/// Whether an error is the caller's fault (bad flags or unsupported input) rather
/// than a failed computation.
pub fn is_usage_error(err: &anyhow::Error) -> bool {
    err.chain().any(|e| {
        matches!(
            e.downcast_ref::<Error>().map(Error::root),
            Some(
                Error::UnsupportedOrder { .. }
                    | Error::OddMesh(_)
                    | Error::EmptyMesh
                    | Error::Config(_)
                    | Error::QuadratureOrder { .. }
            )
        )
    })
}

fn envelope(cfg: &RunConfig, tolerances: Value, passed: bool, result: impl Serialize) -> Result<String> {
    let v = json!({
        "tool": "rectmix",
        "version": env!("CARGO_PKG_VERSION"),
        "config": cfg,
        "tolerances": tolerances,
        "passed": passed,
        "result": result,
    });
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match &cfg.command {
        Command::Converge(a) => converge(cfg, a),
        Command::Infsup(a) => infsup(cfg, a),
        Command::Unisolvence(a) => unisolvence(cfg, a),
        Command::Kernel(a) => kernel(cfg, a),
        Command::ExportBasis(a) => export_basis(cfg, a),
        Command::ExportMatrix(a) => export_matrix(cfg, a),
        Command::Solve(a) => solve_cmd(cfg, a),
    }
}

/// Where the report goes: `None` means stdout.
pub fn output_path(cfg: &RunConfig, out_dir: Option<&Path>) -> Option<PathBuf> {
    match (&cfg.output, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!("{}.{}", cfg.command.name(), cfg.format.extension()))),
        (None, None) => None,
    }
}

pub fn write_report(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn converge(cfg: &RunConfig, a: &ConvergeArgs) -> Result<Report> {
    let problem = Problem::from_id(a.problem)?;
    let material = Material::new(a.lambda, a.mu)?;
    let levels = a.levels.resolve(problem.first_level());
    if levels.is_empty() {
        return Err(Error::Config(format!("no levels selected by '{}'", a.levels)).into());
    }
    let report = study::convergence_table(problem, a.k, a.family, &material, &levels)?.with_stress_norm(a.stress_norm);
    let passed = report.rows.iter().all(|r| {
        r.errors.displacement.is_finite() && r.errors.stress.is_finite() && r.errors.divergence.is_finite()
    });
    let text = match cfg.format {
        Format::Csv => report.to_csv(),
        Format::Md => report.to_markdown(),
        Format::Json => envelope(cfg, json!({ "solver_residual": RESIDUAL_TOLERANCE }), passed, &report)?,
    };
    Ok(Report { text, passed })
}

fn infsup(cfg: &RunConfig, a: &InfsupArgs) -> Result<Report> {
    let mut rows = Vec::new();
    for &n in &a.n {
        rows.push(stability::stability_report(n, a.k, a.family, a.bc, a.norm)?);
    }
    let expected_kernel = match a.bc {
        BoundaryCondition::Displacement => 0,
        BoundaryCondition::Traction => 3,
    };
    let row_ok = |r: &StabilityReport| {
        let bound = match (a.bc, a.norm) {
            (BoundaryCondition::Displacement, InfSupNorm::Hdiv) => r.beta >= infsup_floor() && r.beta <= 1.0 + 1e-12,
            _ => r.beta > 0.0,
        };
        bound && r.kernel_dim == expected_kernel
    };
    let passed = rows.iter().all(row_ok);
    let text = match cfg.format {
        Format::Csv => {
            let mut out = format!("{},status\n", StabilityReport::CSV_HEADER);
            for r in &rows {
                let _ = writeln!(out, "{},{}", r.csv_row(), status(row_ok(r)));
            }
            out
        }
        Format::Md => {
            let mut out = String::from("| n | k | family | bc | norm | β_h | kernel dim | status |\n|---:|---:|---|---|---|---:|---:|---|\n");
            for r in &rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {:.8} | {} | {} |",
                    r.n,
                    r.k,
                    r.family,
                    r.bc,
                    r.norm,
                    r.beta,
                    r.kernel_dim,
                    status(row_ok(r))
                );
            }
            out
        }
        Format::Json => envelope(
            cfg,
            json!({ "beta_floor": infsup_floor(), "kernel_singular_value": KERNEL_TOLERANCE }),
            passed,
            &rows,
        )?,
    };
    Ok(Report { text, passed })
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn unisolvence(cfg: &RunConfig, a: &UnisolvenceArgs) -> Result<Report> {
    let dims: Vec<usize> = match a.dim {
        Some(d) => vec![d as usize],
        None => vec![2, 3],
    };
    let entries = refelem::audit_elements(&dims);
    let passed = entries.iter().all(AuditEntry::passed);
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::from("dim,family,k,element,dofs,condition,duality_error,status\n");
            for e in &entries {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{:.6e},{:.3e},{}",
                    e.space_dim,
                    e.family,
                    e.k,
                    e.element,
                    e.dofs,
                    e.condition,
                    e.duality_error,
                    status(e.passed())
                );
            }
            out
        }
        Format::Md => {
            let mut out = String::from(
                "| dim | family | k | element | DOFs | condition | duality error | status |\n|---:|---|---:|---|---:|---:|---:|---|\n",
            );
            for e in &entries {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {} | {:.3e} | {:.1e} | {} |",
                    e.space_dim,
                    e.family,
                    e.k,
                    e.element,
                    e.dofs,
                    e.condition,
                    e.duality_error,
                    status(e.passed())
                );
            }
            out
        }
        Format::Json => envelope(cfg, json!({ "max_condition": MAX_CONDITION, "duality": 1e-8 }), passed, &entries)?,
    };
    Ok(Report { text, passed })
}

#[derive(Serialize)]
struct KernelMode {
    mode: usize,
    /// Displacement at each element center of the macroelement, `K1..K4`.
    centers: Vec<[f64; 2]>,
    coefficients: Vec<f64>,
}

#[derive(Serialize)]
struct KernelSummary {
    k: usize,
    family: rectmix::Family,
    dimension: usize,
    rigid_motion_angle: f64,
    checkerboard_distance: f64,
    checkerboard_in_kernel: bool,
    equals_rigid_motions: bool,
    n: usize,
    global_traction_kernel_dim: usize,
    modes: Vec<KernelMode>,
}

fn kernel(cfg: &RunConfig, a: &KernelArgs) -> Result<Report> {
    if !a.n.is_multiple_of(2) || a.n == 0 {
        return Err(Error::OddMesh(a.n).into());
    }
    let mk = stability::macro_kernel(a.k, a.family)?;
    let disc = mk.discretization();
    let angle = mk.angle_to(&mk.rigid_motions())?;
    let cb = mk.distance(&mk.checkerboard());
    let global = rectmix::assembly::Discretization::new(
        rectmix::mesh::Mesh::uniform(a.n)?,
        a.k,
        a.family,
        BoundaryCondition::Traction,
    )?;
    let global_dim = stability::divergence_kernel_dim(&global)?;
    let mac = disc.mesh().macroelements()?[0];
    let modes: Vec<KernelMode> = (0..mk.dimension())
        .map(|j| {
            let c = mk.mode(j);
            KernelMode {
                mode: j,
                centers: mac.elements.iter().map(|&e| disc.displacement_at(&c, e, &[0.0, 0.0])).collect(),
                coefficients: c,
            }
        })
        .collect();
    let summary = KernelSummary {
        k: a.k,
        family: a.family,
        dimension: mk.dimension(),
        rigid_motion_angle: angle,
        checkerboard_distance: cb,
        checkerboard_in_kernel: cb < 1e-9,
        equals_rigid_motions: angle < 1e-8,
        n: a.n,
        global_traction_kernel_dim: global_dim,
        modes,
    };
    let passed = summary.dimension == 3
        && global_dim == 3
        && if a.k == 1 { summary.checkerboard_in_kernel } else { summary.equals_rigid_motions };
    let text = match cfg.format {
        Format::Csv => {
            let mut out = String::new();
            let _ = writeln!(out, "# k={} family={} dimension={}", a.k, a.family, summary.dimension);
            let _ = writeln!(
                out,
                "# rigid_motion_angle={:.3e} equals_rigid_motions={}",
                angle, summary.equals_rigid_motions
            );
            let _ = writeln!(
                out,
                "# checkerboard_distance={:.3e} checkerboard_in_kernel={}",
                cb, summary.checkerboard_in_kernel
            );
            let _ = writeln!(out, "# n={} global_traction_kernel_dim={}", a.n, global_dim);
            out.push_str("mode,element,v1,v2\n");
            for m in &summary.modes {
                for (i, v) in m.centers.iter().enumerate() {
                    let _ = writeln!(out, "{},K{},{:.12e},{:.12e}", m.mode, i + 1, v[0], v[1]);
                }
            }
            out
        }
        Format::Md => {
            let mut out = format!(
                "Macroelement kernel, k = {}, {} family: dimension {}\n\n",
                a.k, a.family, summary.dimension
            );
            let _ = writeln!(out, "- spanned by the (projected) rigid motions: {} (largest angle sine {:.3e})", summary.equals_rigid_motions, angle);
            let _ = writeln!(
                out,
                "- contains the checkerboard mode: {} (distance {:.3e})",
                summary.checkerboard_in_kernel, cb
            );
            let _ = writeln!(out, "- global traction kernel on the {}×{} mesh: dimension {}\n", a.n, a.n, global_dim);
            out.push_str("| mode | v(K1) | v(K2) | v(K3) | v(K4) |\n|---:|---|---|---|---|\n");
            for m in &summary.modes {
                let cells: Vec<String> = m.centers.iter().map(|v| format!("({:.4}, {:.4})", v[0], v[1])).collect();
                let _ = writeln!(out, "| {} | {} |", m.mode, cells.join(" | "));
            }
            out
        }
        Format::Json => envelope(
            cfg,
            json!({ "kernel_singular_value": KERNEL_TOLERANCE, "angle": 1e-8, "checkerboard": 1e-9 }),
            passed,
            &summary,
        )?,
    };
    Ok(Report { text, passed })
}

fn export_basis(cfg: &RunConfig, a: &ExportBasisArgs) -> Result<Report> {
    let mut table = Vec::new();
    match a.dim {
        2 => {
            let elem = match a.element {
                ElementKind::Stress => two_d::stress_element(a.k, a.family)?,
                ElementKind::Normal => two_d::normal_stress_element(a.k, a.family)?,
                ElementKind::Shear => two_d::shear_element(a.k)?,
                ElementKind::Displacement => two_d::displacement_element(a.k, a.family)?,
            };
            elem.write_basis_table(&mut table)?;
        }
        _ => {
            let elem = match a.element {
                ElementKind::Stress => three_d::stress_element_3d(a.k, a.family)?,
                ElementKind::Normal => three_d::normal_stress_element_3d(a.k, a.family)?,
                ElementKind::Shear => {
                    let plane = a.plane.unwrap_or(three_d::ShearPlane::XY);
                    three_d::shear_element_3d(a.k, plane, a.family)?
                }
                ElementKind::Displacement => three_d::displacement_element_3d(a.k, a.family)?,
            };
            elem.write_basis_table(&mut table)?;
        }
    }
    let table = String::from_utf8(table)?;
    let text = match cfg.format {
        Format::Json => envelope(cfg, json!({}), true, json!({ "table": table }))?,
        _ => table,
    };
    Ok(Report { text, passed: true })
}

fn problem_config(a: &ProblemArgs) -> Result<ProblemConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            ProblemConfig::parse(&text).with_context(|| format!("in {}", path.display()))?
        }
        None => ProblemConfig::default(),
    };
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(k) = a.k {
        cfg.k = k;
    }
    if let Some(f) = a.family {
        cfg.family = f;
    }
    if let Some(p) = a.problem {
        let p = Problem::from_id(p)?;
        cfg.problem = Some(p);
        cfg.bc = p.boundary_condition();
    }
    if let Some(bc) = a.bc {
        if let Some(p) = cfg.problem.filter(|p| p.boundary_condition() != bc) {
            return Err(Error::Config(format!("bc = {bc} contradicts problem {}", p.id())).into());
        }
        cfg.bc = bc;
    }
    if let Some(l) = a.lambda {
        cfg.lambda = l;
    }
    if let Some(m) = a.mu {
        cfg.mu = m;
    }
    cfg.material()?;
    Ok(cfg)
}

fn coordinate_text(m: &SparseMatrix) -> Result<String> {
    let mut buf = Vec::new();
    m.write_coordinate(&mut buf)?;
    Ok(String::from_utf8(buf)?)
}

fn export_matrix(cfg: &RunConfig, a: &ExportMatrixArgs) -> Result<Report> {
    let pc = problem_config(&a.problem)?;
    let disc = pc.discretization()?;
    let material = pc.material()?;
    let matrix = match a.block {
        MatrixBlock::Compliance => disc.compliance_matrix(&material),
        MatrixBlock::Divergence => disc.divergence_matrix(),
        MatrixBlock::Constraints => match pc.bc {
            BoundaryCondition::Traction => disc.rigid_motion_rows(),
            BoundaryCondition::Displacement => {
                return Err(Error::Config("constraint rows exist only for traction problems".into()).into())
            }
        },
        MatrixBlock::System => {
            let zero = |_: [f64; 2]| [0.0, 0.0];
            disc.assemble(&material, &zero)?.matrix()
        }
    };
    let table = coordinate_text(&matrix)?;
    let text = match cfg.format {
        Format::Json => envelope(
            cfg,
            json!({}),
            true,
            json!({ "problem": pc, "rows": matrix.nrows(), "cols": matrix.ncols(), "nnz": matrix.nnz(), "coordinate": table }),
        )?,
        _ => table,
    };
    Ok(Report { text, passed: true })
}

#[derive(Serialize)]
struct SolveSummary {
    problem: ProblemConfig,
    stress_dofs: usize,
    displacement_dofs: usize,
    residual: f64,
    errors: study::ErrorNorms,
}

fn solve_cmd(cfg: &RunConfig, a: &SolveArgs) -> Result<Report> {
    let pc = problem_config(&a.problem)?;
    let problem = pc
        .problem
        .ok_or_else(|| anyhow!(Error::Config("solve needs a problem (flag --problem or key 'problem')".into())))?;
    let material = pc.material()?;
    let disc = pc.discretization()?;
    let sys = disc.assemble(&material, &|x| problem.load(&material, x))?;
    let sol = solve(&sys)?;
    let errors = study::error_norms(&disc, &sol, problem, &material)?;
    let summary = SolveSummary {
        problem: pc,
        stress_dofs: disc.dofs().n_stress(),
        displacement_dofs: disc.dofs().n_disp(),
        residual: sol.residual,
        errors,
    };
    let text = match cfg.format {
        Format::Csv => format!(
            "n,k,family,bc,problem,stress_dofs,displacement_dofs,residual,err_u,err_sigma,err_div\n{},{},{},{},{},{},{},{:.3e},{:.6e},{:.6e},{:.6e}\n",
            pc.n,
            pc.k,
            pc.family,
            pc.bc,
            problem.id(),
            summary.stress_dofs,
            summary.displacement_dofs,
            sol.residual,
            errors.displacement,
            errors.stress,
            errors.divergence
        ),
        Format::Md => format!(
            "| n | k | family | bc | ‖u - u_h‖₀ | ‖σ - σ_h‖₀ | ‖div(σ - σ_h)‖₀ |\n|---:|---:|---|---|---:|---:|---:|\n| {} | {} | {} | {} | {} | {} | {} |\n",
            pc.n,
            pc.k,
            pc.family,
            pc.bc,
            format_error(errors.displacement),
            format_error(errors.stress),
            format_error(errors.divergence)
        ),
        Format::Json => envelope(cfg, json!({ "solver_residual": RESIDUAL_TOLERANCE }), true, &summary)?,
    };
    Ok(Report { text, passed: true })
}
