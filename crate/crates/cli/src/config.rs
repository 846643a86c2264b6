//! Command-line configuration. A [`RunConfig`] is what `clap` parses from argv;
//! it serializes to JSON (echoed in every JSON report) and back to argv.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use rectmix::assembly::BoundaryCondition;
use rectmix::refelem::three_d::ShearPlane;
use rectmix::stability::InfSupNorm;
use rectmix::study::StressNorm;
use rectmix::Family;

#[derive(Parser, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[command(name = "rectmix", version, about = "Mixed elasticity elements on rectangles: convergence studies and stability diagnostics")]
pub struct RunConfig {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file. Relative paths are resolved against $RECTMIX_OUT_DIR when it is set;
    /// without this flag the report goes to stdout, or to `<command>.<ext>` inside
    /// $RECTMIX_OUT_DIR.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Md,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Md => "md",
            Format::Json => "json",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

#[derive(Subcommand, Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Errors and rates of a manufactured problem over refinement levels.
    Converge(ConvergeArgs),
    /// Discrete inf-sup constants over a list of mesh sizes.
    Infsup(InfsupArgs),
    /// Rebuild every reference element and check its DOF matrix.
    Unisolvence(UnisolvenceArgs),
    /// Kernel of the divergence pairing on a 2×2 macroelement.
    Kernel(KernelArgs),
    /// Print the monomial coefficients of a reference basis.
    ExportBasis(ExportBasisArgs),
    /// Print an assembled matrix in coordinate format.
    ExportMatrix(ExportMatrixArgs),
    /// Solve one manufactured problem described by a configuration file and/or flags.
    Solve(SolveArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Converge(_) => "converge",
            Command::Infsup(_) => "infsup",
            Command::Unisolvence(_) => "unisolvence",
            Command::Kernel(_) => "kernel",
            Command::ExportBasis(_) => "export-basis",
            Command::ExportMatrix(_) => "export-matrix",
            Command::Solve(_) => "solve",
        }
    }
}

/// Refinement levels: `5` (from the problem's first level up to 5), `2-6`, or `1,3,4`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Levels {
    UpTo(usize),
    Range { from: usize, to: usize },
    List(Vec<usize>),
}

impl Levels {
    pub fn resolve(&self, first: usize) -> Vec<usize> {
        match self {
            Levels::UpTo(to) => (first..=*to).collect(),
            Levels::Range { from, to } => (*from..=*to).collect(),
            Levels::List(v) => v.clone(),
        }
    }
}

impl FromStr for Levels {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("invalid level '{t}'"));
        if let Some((a, b)) = s.split_once('-') {
            let (from, to) = (num(a)?, num(b)?);
            if from == 0 || from > to {
                return Err(format!("invalid level range '{s}'"));
            }
            return Ok(Levels::Range { from, to });
        }
        if s.contains(',') {
            let v = s.split(',').filter(|t| !t.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?;
            if v.is_empty() {
                return Err(format!("invalid level list '{s}'"));
            }
            if v.contains(&0) {
                return Err("levels start at 1".into());
            }
            return Ok(Levels::List(v));
        }
        match num(s)? {
            0 => Err("levels start at 1".into()),
            to => Ok(Levels::UpTo(to)),
        }
    }
}

impl fmt::Display for Levels {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Levels::UpTo(to) => write!(f, "{to}"),
            Levels::Range { from, to } => write!(f, "{from}-{to}"),
            Levels::List(v) => {
                let parts: Vec<String> = v.iter().map(|l| l.to_string()).collect();
                // A one-element list keeps a trailing comma so it does not read as `UpTo`.
                if parts.len() == 1 {
                    write!(f, "{},", parts[0])
                } else {
                    f.write_str(&parts.join(","))
                }
            }
        }
    }
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergeArgs {
    /// 1: sinusoidal displacement with clamped boundary; 2: traction-free bubble.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub problem: u8,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, default_value_t = Family::Full)]
    pub family: Family,
    #[arg(long, default_value = "5")]
    pub levels: Levels,
    /// How the stress error combines its components: vector, frobenius or first-component.
    #[arg(long, default_value_t = StressNorm::Vector)]
    pub stress_norm: StressNorm,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.5)]
    pub mu: f64,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfsupArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = Family::Full)]
    pub family: Family,
    #[arg(long, default_value_t = BoundaryCondition::Displacement)]
    pub bc: BoundaryCondition,
    /// Mesh sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 4, 8])]
    pub n: Vec<usize>,
    /// hdiv or mesh-dependent.
    #[arg(long, default_value_t = InfSupNorm::Hdiv)]
    pub norm: InfSupNorm,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnisolvenceArgs {
    /// Restrict to 2D or 3D elements.
    #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: Option<u8>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelArgs {
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = Family::Full)]
    pub family: Family,
    /// Even mesh size for the global traction kernel count.
    #[arg(long, default_value_t = 2)]
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Stress,
    Normal,
    Shear,
    Displacement,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportBasisArgs {
    #[arg(long, value_enum)]
    pub element: ElementKind,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
    pub dim: u8,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = Family::Full)]
    pub family: Family,
    /// Shear plane of a 3D shear element: xy, xz or yz.
    #[arg(long)]
    pub plane: Option<ShearPlane>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixBlock {
    /// Compliance matrix `(A σ, τ)`.
    Compliance,
    /// Divergence pairing `(div τ, v)`.
    Divergence,
    /// Rigid-motion constraint rows (traction only).
    Constraints,
    /// The whole symmetric saddle-point matrix.
    System,
}

/// Problem settings shared by `export-matrix` and `solve`: a configuration file,
/// overridden by any flag that is given.
#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemArgs {
    /// Key/value configuration file (keys n, k, family, bc, lambda, mu, problem).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub family: Option<Family>,
    #[arg(long)]
    pub bc: Option<BoundaryCondition>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub problem: Option<u8>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub mu: Option<f64>,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportMatrixArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, value_enum, default_value_t = MatrixBlock::System)]
    pub block: MatrixBlock,
}

#[derive(Args, Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
}

fn push<T: fmt::Display>(out: &mut Vec<String>, flag: &str, v: &T) {
    out.push(format!("--{flag}"));
    out.push(v.to_string());
}

fn push_opt<T: fmt::Display>(out: &mut Vec<String>, flag: &str, v: &Option<T>) {
    if let Some(v) = v {
        push(out, flag, v);
    }
}

impl ProblemArgs {
    fn to_args(&self, out: &mut Vec<String>) {
        if let Some(p) = &self.config {
            push(out, "config", &p.display());
        }
        push_opt(out, "n", &self.n);
        push_opt(out, "k", &self.k);
        push_opt(out, "family", &self.family);
        push_opt(out, "bc", &self.bc);
        push_opt(out, "problem", &self.problem);
        push_opt(out, "lambda", &self.lambda);
        push_opt(out, "mu", &self.mu);
    }
}

impl RunConfig {
    /// Command-line arguments (without the program name) that parse back to `self`.
    pub fn to_args(&self) -> Vec<String> {
        let mut out = vec![self.command.name().to_string()];
        match &self.command {
            Command::Converge(a) => {
                push(&mut out, "problem", &a.problem);
                push(&mut out, "k", &a.k);
                push(&mut out, "family", &a.family);
                push(&mut out, "levels", &a.levels);
                push(&mut out, "stress-norm", &a.stress_norm);
                push(&mut out, "lambda", &a.lambda);
                push(&mut out, "mu", &a.mu);
            }
            Command::Infsup(a) => {
                push(&mut out, "k", &a.k);
                push(&mut out, "family", &a.family);
                push(&mut out, "bc", &a.bc);
                let n: Vec<String> = a.n.iter().map(|n| n.to_string()).collect();
                push(&mut out, "n", &n.join(","));
                push(&mut out, "norm", &a.norm);
            }
            Command::Unisolvence(a) => push_opt(&mut out, "dim", &a.dim),
            Command::Kernel(a) => {
                push(&mut out, "k", &a.k);
                push(&mut out, "family", &a.family);
                push(&mut out, "n", &a.n);
            }
            Command::ExportBasis(a) => {
                let element = a.element.to_possible_value().expect("no skipped variants");
                push(&mut out, "element", &element.get_name());
                push(&mut out, "dim", &a.dim);
                push(&mut out, "k", &a.k);
                push(&mut out, "family", &a.family);
                push_opt(&mut out, "plane", &a.plane);
            }
            Command::ExportMatrix(a) => {
                a.problem.to_args(&mut out);
                let block = a.block.to_possible_value().expect("no skipped variants");
                push(&mut out, "block", &block.get_name());
            }
            Command::Solve(a) => a.problem.to_args(&mut out),
        }
        push(&mut out, "format", &self.format);
        if let Some(p) = &self.output {
            push(&mut out, "output", &p.display());
        }
        out
    }
}
