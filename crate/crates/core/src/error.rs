use thiserror::Error;

/// Errors raised by the numerics and the batch runner.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Exponents or curvature data violate a structural constraint.
    #[error("constraint violated: {0}")]
    Constraint(String),
    /// The operator degenerates (vanishing gradient with p < 2, z = 0, ...).
    #[error("degenerate point: {0}")]
    Degenerate(String),
    /// Inconsistent configuration of an operation or a run.
    #[error("configuration error: {0}")]
    Config(String),
    /// An iterative solver did not converge.
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
