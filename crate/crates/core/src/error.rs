use alloc::string::String;

/// Errors produced by the solvers and the node algebra.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    Topology(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("edge {edge} is not attached to node {node}")]
    NotAttached { edge: usize, node: usize },
    #[error("missing trace for edge {edge} at node {node}")]
    MissingTrace { edge: usize, node: usize },
    #[error("CFL violation: time step {dt:e} exceeds the stable limit {limit:e}")]
    Cfl { dt: f64, limit: f64 },
    #[error("singular linear system: {0}")]
    Singular(&'static str),
    #[error("linear system residual {residual:e} exceeds tolerance {tolerance:e}")]
    Residual { residual: f64, tolerance: f64 },
    #[error("no convergence after {iterations} iterations (last change {change:e})")]
    NoConvergence { iterations: usize, change: f64 },
    #[error("half-space domain too short: far-field density slope {slope:e}")]
    DomainTooShort { slope: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
