use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("core length {0} must lie strictly inside (0, 1)")]
    InvalidLength(f64),

    #[error("abscissa {x} lies outside the collar [{a}, {b}]")]
    OutOfDomain { x: f64, a: f64, b: f64 },

    #[error("grid needs at least {min} nodes, got {got}")]
    GridTooSmall { min: usize, got: usize },

    #[error("grid and domain disagree: {0}")]
    GridMismatch(String),

    #[error("non-finite sample at node {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("could not bracket the shooting constant; last interval tried [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("root finder did not converge within {0} iterations")]
    RootNotConverged(usize),

    #[error("ODE integration failed: {0}")]
    OdeFailure(String),

    #[error("boundary system is singular (Wronskian {0:e})")]
    SingularBoundarySystem(f64),

    #[error("tridiagonal system is singular at row {0}")]
    SingularMatrix(usize),

    #[error("dc0/dL = {0:e} is indistinguishable from zero")]
    DegenerateDerivative(f64),

    #[error("positivity violated: min value {0:e} for a nonnegative source")]
    PositivityViolated(f64),

    #[error("curvature assembly mismatch: four-component R = {full:e}, real-field R = {simplified:e}")]
    AssemblyMismatch { full: f64, simplified: f64 },

    #[error("degenerate plane: Pi = {0:e}")]
    DegeneratePlane(f64),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidLength(_) | Error::InvalidArgument(_) | Error::GridTooSmall { .. } => 1,
            Error::Io(_) | Error::Parse { .. } => 3,
            _ => 2,
        }
    }
}
