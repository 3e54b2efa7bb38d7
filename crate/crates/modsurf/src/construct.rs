//! Construction of generating functions with prescribed curvature behavior.
//!
//! Given an analytic `beta` (never 1) on a star-shaped domain about the
//! origin, a constant `k` and a start value `F(0)`, the generating function
//! is recovered as
//!
//! ```text
//! F(z) = F(0) * exp( integral_0^z ds / (k + integral_0^s beta) )
//! ```
//!
//! evaluated by nested adaptive quadrature along straight segments. The
//! curvature sign of the resulting surface is locked by where `beta` sits
//! relative to the circle `|beta - 1/2| = 1/2`: outside means positive
//! Gaussian curvature, inside negative. The flat families `exp(m z + n)`
//! and `(m z + n)^(1+i l)` are produced in closed form.

use crate::error::{DegeneracyError, EvalError, QuadError};
use crate::expr::{Expr, Func};
use crate::geometry::Rect;
use crate::jet::{cauchy_derivative, eval_jet, eval_value, BranchPolicy, DEFAULT_ZERO_TOL};
use crate::quad;
use num_complex::Complex64;
use serde::Serialize;
use std::cell::Cell;
use std::collections::HashMap;
use std::sync::Mutex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error(transparent)]
    Degenerate(#[from] DegeneracyError),
    #[error("point {0} outside the construction domain")]
    OutsideDomain(Complex64),
    #[error("invalid construction data: {0}")]
    InvalidSpec(String),
}

/// Star-shaped (here: convex) region about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Domain {
    Disk { radius: f64 },
    Rect(Rect),
}

impl Domain {
    pub fn contains(&self, z: Complex64) -> bool {
        match self {
            // open disk: the construction data may degenerate exactly on
            // the rim (e.g. beta = z + 1/2 reaches 1 at z = 1/2)
            Domain::Disk { radius } => z.norm() < *radius,
            Domain::Rect(r) => r.contains(z),
        }
    }

    /// Uniform validation lattice covering the domain.
    pub fn validation_points(&self, per_axis: usize) -> Vec<Complex64> {
        let bb = match self {
            Domain::Disk { radius } => Rect::centered_square(*radius),
            Domain::Rect(r) => *r,
        };
        let mut pts = Vec::new();
        for iy in 0..per_axis {
            for ix in 0..per_axis {
                let x = bb.x0 + (bb.x1 - bb.x0) * ix as f64 / (per_axis - 1) as f64;
                let y = bb.y0 + (bb.y1 - bb.y0) * iy as f64 / (per_axis - 1) as f64;
                let z = Complex64::new(x, y);
                if self.contains(z) {
                    pts.push(z);
                }
            }
        }
        pts
    }
}

/// Construction data: the prescribed `beta`, the constant `k = F(0)/F'(0)`,
/// the start value `F(0)`, and the domain.
#[derive(Debug, Clone)]
pub struct BetaSpec {
    pub beta: Expr,
    pub k: Complex64,
    pub f0: Complex64,
    pub domain: Domain,
}

impl BetaSpec {
    /// Validates the construction invariants on a lattice: `F(0) != 0`,
    /// the domain contains the origin, and `beta` never equals 1.
    pub fn new(
        beta: Expr,
        k: Complex64,
        f0: Complex64,
        domain: Domain,
    ) -> Result<Self, ConstructError> {
        if f0 == Complex64::new(0.0, 0.0) {
            return Err(ConstructError::InvalidSpec("F(0) must be nonzero".into()));
        }
        if !domain.contains(Complex64::new(0.0, 0.0)) {
            return Err(ConstructError::InvalidSpec(
                "domain must contain the origin".into(),
            ));
        }
        let spec = BetaSpec {
            beta,
            k,
            f0,
            domain,
        };
        for &z in &spec.domain.validation_points(17) {
            let b = eval_value(&spec.beta, z, &BranchPolicy::Principal)?;
            if (b - Complex64::new(1.0, 0.0)).norm() < 1e-9 {
                return Err(ConstructError::InvalidSpec(format!(
                    "beta takes the forbidden value 1 near {z}"
                )));
            }
        }
        Ok(spec)
    }
}

const INNER_ABS_TOL: f64 = 1e-12;
const INNER_REL_TOL: f64 = 1e-11;
// Wide enough that adaptive refinement piling up against a zero of the
// denominator actually lands a sample inside the window; an integrand this
// close to a pole has no usable accuracy anyway.
const POLE_REL: f64 = 1e-6;

/// Antiderivative of beta from `from` to `to` along the straight segment.
fn beta_antiderivative(
    beta: &Expr,
    from: Complex64,
    to: Complex64,
) -> Result<(Complex64, f64), QuadError> {
    let dz = to - from;
    if dz == Complex64::new(0.0, 0.0) {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let r = quad::integrate(
        |u| Ok(eval_value(beta, from + dz * u, &BranchPolicy::Principal)?),
        0.0,
        1.0,
        INNER_ABS_TOL,
        INNER_REL_TOL,
    )?;
    Ok((r.value * dz, r.err * dz.norm()))
}

/// Evaluate the construction along a polyline starting at the origin.
/// Used directly for the path-independence checks; `ullrich_eval` is the
/// single-segment case.
pub fn ullrich_eval_path(
    spec: &BetaSpec,
    path: &[Complex64],
    tol: f64,
) -> Result<(Complex64, f64), ConstructError> {
    let mut from = Complex64::new(0.0, 0.0);
    let mut b_start = Complex64::new(0.0, 0.0);
    let mut outer = Complex64::new(0.0, 0.0);
    let mut err_integral = 0.0f64;
    if !spec.domain.contains(from) {
        return Err(ConstructError::OutsideDomain(from));
    }

    for &to in path {
        if !spec.domain.contains(to) {
            return Err(ConstructError::OutsideDomain(to));
        }
        let seg = to - from;
        if seg == Complex64::new(0.0, 0.0) {
            continue;
        }
        let inner_err = Cell::new(0.0f64);
        let max_inv_sq = Cell::new(0.0f64);
        let pole_at = Cell::new(None::<Complex64>);
        let result = quad::integrate(
            |t| {
                let s = from + seg * t;
                let (b_seg, e) = beta_antiderivative(&spec.beta, from, s)?;
                inner_err.set(inner_err.get().max(e));
                let den = spec.k + b_start + b_seg;
                let scale = spec.k.norm() + (b_start + b_seg).norm() + 1.0;
                if den.norm() <= POLE_REL * scale {
                    pole_at.set(Some(s));
                    return Err(QuadError::PoleOnPath { at: s });
                }
                let inv = 1.0 / den;
                max_inv_sq.set(max_inv_sq.get().max(inv.norm() * inv.norm()));
                Ok(inv)
            },
            0.0,
            1.0,
            INNER_ABS_TOL,
            INNER_REL_TOL,
        );
        let result = match result {
            Ok(r) => r,
            Err(QuadError::PoleOnPath { at }) => {
                return Err(QuadError::PoleOnPath {
                    at: pole_at.get().unwrap_or(at),
                }
                .into())
            }
            Err(e) => return Err(e.into()),
        };
        outer += result.value * seg;
        err_integral +=
            result.err * seg.norm() + seg.norm() * inner_err.get() * max_inv_sq.get();

        let (b_full, _) = beta_antiderivative(&spec.beta, from, to)?;
        b_start += b_full;
        from = to;
    }

    let f = spec.f0 * outer.exp();
    let err = f.norm() * err_integral;
    if err > tol {
        return Err(QuadError::ToleranceNotMet {
            tol,
            best: err,
        }
        .into());
    }
    Ok((f, err))
}

/// Evaluate the constructed generating function at `z` (segment from 0).
pub fn ullrich_eval(
    spec: &BetaSpec,
    z: Complex64,
    tol: f64,
) -> Result<(Complex64, f64), ConstructError> {
    ullrich_eval_path(spec, &[z], tol)
}

/// A constructed generating function with a memoizing numeric evaluator.
pub struct ConstructedF {
    pub spec: BetaSpec,
    tol: f64,
    cache: Mutex<HashMap<(u64, u64), (Complex64, f64)>>,
}

impl ConstructedF {
    pub fn new(spec: BetaSpec, tol: f64) -> Self {
        ConstructedF {
            spec,
            tol,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// `F(z)` with its error estimate; repeated lookups hit the cache.
    pub fn eval(&self, z: Complex64) -> Result<(Complex64, f64), ConstructError> {
        let key = (z.re.to_bits(), z.im.to_bits());
        if let Some(hit) = self.cache.lock().expect("cache poisoned").get(&key) {
            return Ok(*hit);
        }
        let out = ullrich_eval(&self.spec, z, self.tol)?;
        self.cache.lock().expect("cache poisoned").insert(key, out);
        Ok(out)
    }

    /// j-th derivative through the contour-integral oracle on the numeric
    /// evaluator (no differentiation of quadrature output).
    pub fn derivative(&self, z: Complex64, j: usize) -> Result<Complex64, ConstructError> {
        let failed = Cell::new(None::<ConstructError>);
        let d = cauchy_derivative(
            |w| match self.eval(w) {
                Ok((v, _)) => Ok(v),
                Err(e) => {
                    failed.set(Some(e));
                    Err(EvalError::NonFinite)
                }
            },
            z,
            j,
        );
        match d {
            Ok(v) => Ok(v),
            Err(e) => Err(failed.take().unwrap_or(ConstructError::Eval(e))),
        }
    }
}

/// `beta = (F'^2 - F F'')/F'^2` from jet evaluation of an expression.
pub fn recover_beta_expr(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<Complex64, ConstructError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);
    let scale = [f0, f1, f2].iter().map(|v| v.norm()).fold(1.0, f64::max);
    if f1.norm() <= DEFAULT_ZERO_TOL * scale {
        return Err(DegeneracyError(format!("F' vanishes at {z}")).into());
    }
    Ok((f1 * f1 - f0 * f2) / (f1 * f1))
}

/// `beta` recovered from a constructed evaluator via contour derivatives.
pub fn recover_beta_constructed(
    cf: &ConstructedF,
    z: Complex64,
) -> Result<Complex64, ConstructError> {
    let f0 = cf.eval(z)?.0;
    let f1 = cf.derivative(z, 1)?;
    let f2 = cf.derivative(z, 2)?;
    if f1.norm() <= DEFAULT_ZERO_TOL * (1.0 + f0.norm() + f2.norm()) {
        return Err(DegeneracyError(format!("F' vanishes at {z}")).into());
    }
    Ok((f1 * f1 - f0 * f2) / (f1 * f1))
}

/// The two identically-flat families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroKKind {
    Exponential,
    PowerLaw,
}

/// Closed-form generating functions with identically zero Gaussian
/// curvature: `exp(m z + n)` and `(m z + n)^(1 + i l)`.
pub fn zero_k_family(kind: ZeroKKind, m: Complex64, n: Complex64, l: f64) -> Expr {
    let affine = Expr::add(Expr::mul(Expr::constant(m), Expr::Var), Expr::constant(n));
    match kind {
        ZeroKKind::Exponential => Expr::app(Func::Exp, affine),
        ZeroKKind::PowerLaw => Expr::pow_literal(affine, Complex64::new(1.0, l)),
    }
}

/// Target curvature sign for the locked construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TargetSign {
    Positive,
    Negative,
}

/// Grid points where the `|beta - 1/2|` condition fails the target.
#[derive(Debug, Clone, Serialize)]
pub struct ValidationFailure {
    pub target: TargetSign,
    /// `(point, |beta - 1/2|)` for each violation.
    pub violations: Vec<(Complex64, f64)>,
}

/// Outcome of the sign-locked construction: a validation failure is a
/// value, not an error.
pub enum SignLockOutcome {
    Accepted(ConstructedF),
    Rejected(ValidationFailure),
}

/// Validate `|beta - 1/2|` against 1/2 over the domain lattice, then build
/// the evaluator.
pub fn sign_locked_construct(
    spec: BetaSpec,
    target: TargetSign,
    tol: f64,
) -> Result<SignLockOutcome, ConstructError> {
    let mut violations = Vec::new();
    for &z in &spec.domain.validation_points(33) {
        let b = eval_value(&spec.beta, z, &BranchPolicy::Principal)?;
        let d = (b - Complex64::new(0.5, 0.0)).norm();
        let ok = match target {
            TargetSign::Positive => d > 0.5,
            TargetSign::Negative => d < 0.5,
        };
        if !ok {
            violations.push((z, d));
        }
    }
    if violations.is_empty() {
        Ok(SignLockOutcome::Accepted(ConstructedF::new(spec, tol)))
    } else {
        Ok(SignLockOutcome::Rejected(ValidationFailure {
            target,
            violations,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disk(r: f64) -> Domain {
        Domain::Disk { radius: r }
    }

    #[test]
    fn zero_beta_gives_exp() {
        let spec = BetaSpec::new(parse("0").unwrap(), c(1.0, 0.0), c(1.0, 0.0), disk(1.0)).unwrap();
        for z in [c(0.3, 0.0), c(-0.2, 0.4), c(0.0, -0.7)] {
            let (f, err) = ullrich_eval(&spec, z, 1e-8).unwrap();
            assert!((f - z.exp()).norm() < 1e-10, "at {z}: {f} vs {}", z.exp());
            assert!(err <= 1e-8);
        }
    }

    #[test]
    fn constant_beta_gives_the_binomial_power() {
        // beta = c: F(z) = (1 + c z)^(1/c); at c = 0.5, z = 0.2 this is 1.21
        let spec =
            BetaSpec::new(parse("0.5").unwrap(), c(1.0, 0.0), c(1.0, 0.0), disk(0.5)).unwrap();
        let (f, _) = ullrich_eval(&spec, c(0.2, 0.0), 1e-8).unwrap();
        assert!((f - c(1.21, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn worked_negative_curvature_example_matches_its_closed_form() {
        // beta = z + 1/2, k = -1, F(0) = (-1/2)^(2/3):
        // F(z) = ((z-1)/(z+2))^(2/3) on the branch anchored at F(0)
        let f0 = c(-0.5, 0.0).powc(c(2.0 / 3.0, 0.0));
        let spec =
            BetaSpec::new(parse("z+0.5").unwrap(), c(-1.0, 0.0), f0, disk(0.5)).unwrap();
        let closed = parse("((z-1)/(z+2))^(0.6666666666666666)").unwrap();
        let policy = BranchPolicy::anchored(c(0.0, 0.0), f0);
        for z in [c(0.1, 0.0), c(-0.2, 0.3), c(0.25, -0.3)] {
            let (f, _) = ullrich_eval(&spec, z, 1e-8).unwrap();
            let want = eval_value(&closed, z, &policy).unwrap();
            assert!((f - want).norm() < 1e-8, "at {z}: {f} vs {want}");
        }
    }

    #[test]
    fn pole_on_path_is_detected() {
        // k + B(s) = 1 - s^2/2 ... with beta = -z: B(s) = -s^2/2; choose k
        // so the denominator vanishes inside: k = 0.02 => zero at s = 0.2
        let spec = BetaSpec::new(
            parse("-z").unwrap(),
            c(0.02, 0.0),
            c(1.0, 0.0),
            disk(0.9),
        )
        .unwrap();
        let err = ullrich_eval(&spec, c(0.5, 0.0), 1e-6).unwrap_err();
        assert!(matches!(
            err,
            ConstructError::Quad(QuadError::PoleOnPath { .. })
        ));
    }

    #[test]
    fn recover_beta_examples() {
        let exp = parse("exp(z)").unwrap();
        let b = recover_beta_expr(&exp, c(0.4, -0.1), &BranchPolicy::Principal).unwrap();
        assert!(b.norm() < 1e-12);

        let f0 = c(-0.5, 0.0).powc(c(2.0 / 3.0, 0.0));
        let closed = parse("((z-1)/(z+2))^(0.6666666666666666)").unwrap();
        let policy = BranchPolicy::anchored(c(0.0, 0.0), f0);
        let b = recover_beta_expr(&closed, c(0.0, 0.0), &policy).unwrap();
        assert!((b - c(0.5, 0.0)).norm() < 1e-10);

        let spec =
            BetaSpec::new(parse("z+0.5").unwrap(), c(-1.0, 0.0), f0, disk(0.5)).unwrap();
        let cf = ConstructedF::new(spec, 1e-10);
        let b = recover_beta_constructed(&cf, c(0.2, 0.0)).unwrap();
        assert!((b - c(0.7, 0.0)).norm() < 1e-6, "recovered {b}");
    }

    #[test]
    fn zero_k_family_shapes() {
        let e = zero_k_family(ZeroKKind::Exponential, c(1.0, 0.0), c(0.0, 0.0), 0.0);
        assert_eq!(e.to_string(), "exp(1*z+0)");
        let p = zero_k_family(ZeroKKind::PowerLaw, c(1.0, 0.0), c(2.0, 0.0), 3.0);
        assert_eq!(p.to_string(), "(1*z+2)^(1+3i)");
        let affine = zero_k_family(ZeroKKind::PowerLaw, c(1.0, 0.0), c(2.0, 0.0), 0.0);
        assert_eq!(affine.to_string(), "(1*z+2)^1");
    }

    #[test]
    fn sign_lock_accepts_and_rejects() {
        let f0 = c(-0.5, 0.0).powc(c(2.0 / 3.0, 0.0));
        let neg = BetaSpec::new(parse("z+0.5").unwrap(), c(-1.0, 0.0), f0, disk(0.5)).unwrap();
        assert!(matches!(
            sign_locked_construct(neg.clone(), TargetSign::Negative, 1e-8).unwrap(),
            SignLockOutcome::Accepted(_)
        ));
        assert!(matches!(
            sign_locked_construct(neg, TargetSign::Positive, 1e-8).unwrap(),
            SignLockOutcome::Rejected(_)
        ));

        let pos = BetaSpec::new(parse("2+z").unwrap(), c(1.0, 0.0), c(1.0, 0.0), disk(0.5))
            .unwrap();
        assert!(matches!(
            sign_locked_construct(pos, TargetSign::Positive, 1e-8).unwrap(),
            SignLockOutcome::Accepted(_)
        ));
    }
}
