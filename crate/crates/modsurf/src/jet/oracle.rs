//! Numerical differentiation through Cauchy's integral formula.
//!
//! `F^(j)(z0)` is recovered as the j-th Fourier moment of `F` on a small
//! circle around `z0`, with the trapezoid rule (spectrally accurate for
//! analytic integrands). The radius adapts: starting at 1e-2 it halves until
//! two consecutive radii agree to 1e-8 or six shrinks elapse. This path never
//! touches the jet recurrences, so it serves as an independent oracle for
//! them.

use super::{eval_value, BranchPolicy, FACTORIALS};
use crate::error::EvalError;
use crate::expr::Expr;
use num_complex::Complex64;
use std::f64::consts::TAU;

const SAMPLES: usize = 128;
const START_RADIUS: f64 = 1e-2;
const MAX_SHRINKS: usize = 6;
const AGREE_TOL: f64 = 1e-8;

/// j-th derivative of an arbitrary complex-analytic callable at `z0`.
pub fn cauchy_derivative<F>(mut f: F, z0: Complex64, j: usize) -> Result<Complex64, EvalError>
where
    F: FnMut(Complex64) -> Result<Complex64, EvalError>,
{
    let mut radius = START_RADIUS;
    let mut prev: Option<Complex64> = None;
    // fallback when the agreement criterion never fires: the earlier member
    // of the best-agreeing consecutive pair (shrinking the radius amplifies
    // rounding as r^-j, so later estimates only help near a singularity)
    let mut best: Option<(f64, Complex64)> = None;
    for _ in 0..=MAX_SHRINKS {
        let mut acc = Complex64::new(0.0, 0.0);
        for t in 0..SAMPLES {
            let theta = TAU * (t as f64) / (SAMPLES as f64);
            let dir = Complex64::new(theta.cos(), theta.sin());
            let v = f(z0 + dir * radius)?;
            // e^{-i j theta}
            let phase = Complex64::new((j as f64 * theta).cos(), -(j as f64 * theta).sin());
            acc += v * phase;
        }
        let estimate = acc * FACTORIALS[j] / (SAMPLES as f64 * radius.powi(j as i32));
        if let Some(p) = prev {
            let disagreement = (estimate - p).norm();
            if disagreement <= AGREE_TOL * (1.0 + estimate.norm()) {
                return Ok(estimate);
            }
            if best.is_none_or(|(d, _)| disagreement < d) {
                best = Some((disagreement, p));
            }
        }
        prev = Some(estimate);
        radius *= 0.5;
    }
    Ok(best.map(|(_, e)| e).or(prev).expect("at least one radius evaluated"))
}

/// j-th derivative of the expression at `z0` on the principal branch.
pub fn fd_oracle(e: &Expr, z0: Complex64, j: usize) -> Result<Complex64, EvalError> {
    cauchy_derivative(|z| eval_value(e, z, &BranchPolicy::Principal), z0, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cubic_third_derivative() {
        let e = parse("z^3").unwrap();
        let d = fd_oracle(&e, c(0.0, 0.0), 3).unwrap();
        assert!((d - c(6.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn exp_second_derivative_off_axis() {
        let e = parse("exp(z)").unwrap();
        let z0 = c(0.5, 0.5);
        let d = fd_oracle(&e, z0, 2).unwrap();
        assert!((d - z0.exp()).norm() < 1e-9);
    }

    #[test]
    fn sin_squared_second_derivative() {
        let e = parse("sin(z)^2").unwrap();
        let d = fd_oracle(&e, c(0.0, 0.0), 2).unwrap();
        assert!((d - c(2.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn sample_on_a_pole_propagates_the_error() {
        // the first sampling circle (radius 1e-2, theta = 0) lands exactly
        // on the pole at z = 0.01
        let e = parse("1/(z-0.01)").unwrap();
        assert_eq!(fd_oracle(&e, c(0.0, 0.0), 1), Err(EvalError::DivisionByZero));
    }
}
