//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while evaluating an expression or its jets at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    /// A power/log/sqrt argument vanished, so no branch of the logarithm exists.
    #[error("branch point: {what} has zero argument at the evaluation point")]
    BranchPoint { what: &'static str },
    /// Branch continuation from the anchor could not resolve a continuous argument.
    #[error("branch continuation failed: {0}")]
    BranchContinuation(String),
    /// The anchored policy could not reproduce the reference value at the anchor.
    #[error("anchor mismatch: no branch assignment reproduces the reference value (best error {best_err:.3e})")]
    AnchorMismatch { best_err: f64 },
    /// Division by a jet whose constant term vanishes (pole or removable point).
    #[error("pole or removable singularity: division by a value vanishing at the point")]
    DivisionByZero,
    /// Requested jet order outside the supported range.
    #[error("jet order {requested} exceeds the maximum {max}")]
    Order { requested: usize, max: usize },
    /// A result became non-finite (overflow, singularity crossed).
    #[error("evaluation produced a non-finite value")]
    NonFinite,
}

/// A quantity the operation assumes nonzero vanished within tolerance.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("degenerate input: {0}")]
pub struct DegeneracyError(pub String);

/// Errors from the numerical contour-integration machinery.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    /// The outer integrand has a pole on the integration segment.
    #[error("integrand pole on path near s = {at}")]
    PoleOnPath { at: num_complex::Complex64 },
    /// Adaptive refinement exhausted its budget before reaching the tolerance.
    #[error("requested tolerance {tol:.3e} not met (best error estimate {best:.3e})")]
    ToleranceNotMet { tol: f64, best: f64 },
    /// Evaluation of the integrand failed.
    #[error("integrand evaluation failed: {0}")]
    Eval(#[from] EvalError),
}
