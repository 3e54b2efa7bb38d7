//! Vanishing orders of F, F', F'' at a point.

use super::{eval_jet, BranchPolicy};
use crate::error::EvalError;
use crate::expr::Expr;
use num_complex::Complex64;
use serde::Serialize;

/// Default relative tolerance for deciding that a derivative vanishes.
pub const DEFAULT_ZERO_TOL: f64 = 1e-9;

/// Which of F, F', F'' vanish at a point, and the least index `n >= 2` with
/// `F^(n) != 0`. This is the key into the local curvature-sign taxonomy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ZeroProfile {
    pub f_zero: bool,
    pub f1_zero: bool,
    pub f2_zero: bool,
    /// Least index `>= 2` with a nonvanishing derivative. Meaningful only
    /// when `well_defined` is true; 2 whenever `F''` itself is nonzero.
    pub n: usize,
    /// False when every derivative up to the inspected order vanishes.
    pub well_defined: bool,
}

/// Classify the vanishing pattern of the expression's derivatives at `z0`.
///
/// A derivative counts as zero when its magnitude is at most `tol` times the
/// largest computed derivative magnitude (floored at 1).
pub fn zero_profile(
    e: &Expr,
    z0: Complex64,
    max_order: usize,
    tol: f64,
    policy: &BranchPolicy,
) -> Result<ZeroProfile, EvalError> {
    let max_order = max_order.max(2);
    let jet = eval_jet(e, z0, max_order, policy)?;
    let derivs: Vec<f64> = (0..=max_order).map(|j| jet.derivative(j).norm()).collect();
    let scale = derivs.iter().cloned().fold(1.0f64, f64::max);
    let is_zero = |j: usize| derivs[j] <= tol * scale;

    let mut n = 2;
    let mut well_defined = false;
    for j in 2..=max_order {
        if !is_zero(j) {
            n = j;
            well_defined = true;
            break;
        }
    }
    Ok(ZeroProfile {
        f_zero: is_zero(0),
        f1_zero: is_zero(1),
        f2_zero: is_zero(2),
        n,
        well_defined,
    })
}
