use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order k = {k} is not supported here (expected {min}..={max})")]
    UnsupportedOrder { k: usize, min: usize, max: usize },

    #[error("gauss rule with {0} points is outside the supported range 1..=20")]
    QuadratureRange(usize),

    #[error("mesh needs at least one subdivision per axis")]
    EmptyMesh,

    #[error("macroelements need an even number of subdivisions, got n = {0}")]
    OddMesh(usize),

    #[error("{element}: spanning set has dimension {space} but {dofs} functionals were given")]
    DimensionMismatch {
        element: String,
        space: usize,
        dofs: usize,
    },

    #[error("{element}: degrees of freedom are not unisolvent (condition number {condition:.3e})")]
    Unisolvence { element: String, condition: f64 },

    #[error("{points}-point quadrature per axis cannot integrate degree {degree} exactly")]
    QuadratureOrder { points: usize, degree: usize },

    #[error("load is not orthogonal to rigid motion #{index}: |(f, w)| = {value:.3e}")]
    IncompatibleLoad { index: usize, value: f64 },

    #[error("linear solve failed: {reason} (residual {residual:.3e})")]
    Solver { reason: String, residual: f64 },

    #[error("eigen-solver failed: {0}")]
    Eigen(String),

    #[error("stability violation: {0}")]
    Stability(String),

    #[error("field is not in the discrete space (residual {0:.3e})")]
    NotInSpace(f64),

    #[error("{0}")]
    Mismatch(String),

    #[error("level {level}: {cause}")]
    Level { level: usize, cause: Box<Error> },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// The error itself, or the underlying one for errors wrapped with a level.
    pub fn root(&self) -> &Error {
        match self {
            Error::Level { cause, .. } => cause.root(),
            other => other,
        }
    }
}
