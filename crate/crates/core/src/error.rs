use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("singular affine map (|det| = {0:e})")]
    SingularMap(f64),

    #[error("degenerate body: {0}")]
    Degenerate(String),

    #[error("unbounded body: {0}")]
    Unbounded(String),

    #[error("origin is not interior to {0}")]
    OriginNotInterior(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("measure is not log-concave: {0}")]
    NotLogConcave(String),

    #[error("grids do not overlap")]
    DisjointGrids,

    #[error("rejection sampler acceptance rate {rate:e} below 1e-4")]
    LowAcceptance { rate: f64 },

    #[error("disconnected rasterization: {components} components (h too coarse?)")]
    Disconnected { components: usize },

    #[error("grid too large: {cells} cells exceeds cap {cap}")]
    GridTooLarge { cells: usize, cap: usize },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("linear solver breakdown: {0}")]
    SolverBreakdown(String),

    #[error("integral diverges: {0}")]
    Divergent(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for failures of a numerical method (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::SolverBreakdown(_) | Error::Divergent(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
