//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Invalid mesh data (degenerate triangle, bad index, broken topology).
    Mesh(String),
    /// Dimension/arity mismatch or out-of-range index in linear algebra.
    Dimension(String),
    /// Iterative solver did not reach the requested residual.
    SolverConvergence {
        what: String,
        iterations: usize,
        residual: f64,
    },
    /// Breakdown of a Krylov recurrence or a singular factorization pivot.
    SolverBreakdown(String),
    /// Nonlinear iteration exhausted its iteration budget.
    NonlinearFailure {
        method: &'static str,
        step: usize,
        iterations: usize,
        increments: Vec<f64>,
    },
    /// Invalid configuration value; names the offending key and constraint.
    Config(String),
    /// File I/O failure, carrying the path.
    Io { path: String, message: String },
    /// Malformed input file (mesh format, config file).
    Parse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Mesh(msg) => write!(f, "mesh error: {msg}"),
            Error::Dimension(msg) => write!(f, "dimension error: {msg}"),
            Error::SolverConvergence {
                what,
                iterations,
                residual,
            } => write!(
                f,
                "{what}: no convergence after {iterations} iterations (residual {residual:.3e})"
            ),
            Error::SolverBreakdown(msg) => write!(f, "solver breakdown: {msg}"),
            Error::NonlinearFailure {
                method,
                step,
                iterations,
                increments,
            } => write!(
                f,
                "{method} iteration failed at step {step} after {iterations} iterations \
                 (last increments {:?})",
                &increments[increments.len().saturating_sub(3)..]
            ),
            Error::Config(msg) => write!(f, "config error: {msg}"),
            Error::Io { path, message } => write!(f, "i/o error on {path}: {message}"),
            Error::Parse(msg) => write!(f, "parse error: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
