//! Jet and value evaluation of expressions, with branch handling for
//! `log`, `sqrt` and general powers.
//!
//! Every branch-sensitive node takes the principal branch (cut along the
//! negative real axis of its argument) unless the policy carries an anchor:
//! a point and a reference value. Under an anchored policy the branch
//! arguments are transported from the anchor to the evaluation point by
//! stepping along the straight segment between them, so the evaluated
//! function is the analytic continuation of the branch fixed at the anchor.

use super::ComplexJet;
use crate::error::EvalError;
use crate::expr::{Expr, Func};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};

/// How branch-sensitive nodes pick their logarithm branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BranchPolicy {
    /// Principal branch everywhere.
    Principal,
    /// Branches fixed so that evaluation at `at` reproduces `value`, then
    /// transported by continuity along the straight segment to the target.
    Anchored { at: Complex64, value: Complex64 },
}

impl BranchPolicy {
    pub fn anchored(at: Complex64, value: Complex64) -> Self {
        BranchPolicy::Anchored { at, value }
    }
}

enum StepFail {
    Eval(EvalError),
    /// The continuation step was too coarse (argument moved more than pi/2
    /// or a base value crossed zero); retry with a smaller step.
    NeedRefine,
}

impl From<EvalError> for StepFail {
    fn from(e: EvalError) -> Self {
        StepFail::Eval(e)
    }
}

/// Supplies the logarithm argument for each branch-sensitive node, indexed
/// in depth-first pre-order.
trait BranchSource {
    fn theta(&mut self, idx: usize, w: Complex64) -> Result<f64, StepFail>;
}

struct Principal;

impl BranchSource for Principal {
    fn theta(&mut self, _idx: usize, w: Complex64) -> Result<f64, StepFail> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(EvalError::BranchPoint { what: "power/log argument" }.into());
        }
        Ok(w.arg())
    }
}

struct Fixed<'a>(&'a [f64]);

impl BranchSource for Fixed<'_> {
    fn theta(&mut self, idx: usize, w: Complex64) -> Result<f64, StepFail> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(EvalError::BranchPoint { what: "power/log argument" }.into());
        }
        Ok(self.0[idx])
    }
}

/// Principal branch that records each node's argument and base value.
struct Collect {
    args: Vec<f64>,
    bases: Vec<Complex64>,
}

impl BranchSource for Collect {
    fn theta(&mut self, idx: usize, w: Complex64) -> Result<f64, StepFail> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(EvalError::BranchPoint { what: "power/log argument" }.into());
        }
        let t = w.arg();
        self.args[idx] = t;
        self.bases[idx] = w;
        Ok(t)
    }
}

/// Fixed arguments, recording the base value each node sees under them.
struct FixedCollect<'a> {
    args: &'a [f64],
    bases: Vec<Complex64>,
}

impl BranchSource for FixedCollect<'_> {
    fn theta(&mut self, idx: usize, w: Complex64) -> Result<f64, StepFail> {
        if w == Complex64::new(0.0, 0.0) {
            return Err(EvalError::BranchPoint { what: "power/log argument" }.into());
        }
        self.bases[idx] = w;
        Ok(self.args[idx])
    }
}

/// One continuation step: arguments move by the (small) angle between the
/// previous and current base values.
struct Step<'a> {
    prev_args: &'a [f64],
    prev_bases: &'a [Complex64],
    next_args: Vec<f64>,
    next_bases: Vec<Complex64>,
}

impl BranchSource for Step<'_> {
    fn theta(&mut self, idx: usize, w: Complex64) -> Result<f64, StepFail> {
        let prev = self.prev_bases[idx];
        if w == Complex64::new(0.0, 0.0) || prev == Complex64::new(0.0, 0.0) {
            return Err(StepFail::NeedRefine);
        }
        let delta = (w / prev).arg();
        if !delta.is_finite() || delta.abs() > FRAC_PI_2 {
            return Err(StepFail::NeedRefine);
        }
        let t = self.prev_args[idx] + delta;
        self.next_args[idx] = t;
        self.next_bases[idx] = w;
        Ok(t)
    }
}

fn log_from(w: Complex64, theta: f64) -> Complex64 {
    Complex64::new(w.norm().ln(), theta)
}

fn value_rec<B: BranchSource>(
    e: &Expr,
    z: Complex64,
    src: &mut B,
    idx: &mut usize,
) -> Result<Complex64, StepFail> {
    match e {
        Expr::Var => Ok(z),
        Expr::Const(c) => Ok(*c),
        Expr::Neg(a) => Ok(-value_rec(a, z, src, idx)?),
        Expr::Add(a, b) => Ok(value_rec(a, z, src, idx)? + value_rec(b, z, src, idx)?),
        Expr::Sub(a, b) => Ok(value_rec(a, z, src, idx)? - value_rec(b, z, src, idx)?),
        Expr::Mul(a, b) => Ok(value_rec(a, z, src, idx)? * value_rec(b, z, src, idx)?),
        Expr::Div(a, b) => {
            let num = value_rec(a, z, src, idx)?;
            let den = value_rec(b, z, src, idx)?;
            if den == Complex64::new(0.0, 0.0) {
                return Err(EvalError::DivisionByZero.into());
            }
            Ok(num / den)
        }
        Expr::PowInt(a, n) => {
            let v = value_rec(a, z, src, idx)?;
            if *n < 0 && v == Complex64::new(0.0, 0.0) {
                return Err(EvalError::DivisionByZero.into());
            }
            Ok(v.powi(*n))
        }
        Expr::Pow(a, c) => {
            let my = *idx;
            *idx += 1;
            let w = value_rec(a, z, src, idx)?;
            let theta = src.theta(my, w)?;
            Ok((c * log_from(w, theta)).exp())
        }
        Expr::App(f, a) => {
            match f {
                Func::Log | Func::Sqrt => {
                    let my = *idx;
                    *idx += 1;
                    let w = value_rec(a, z, src, idx)?;
                    let theta = src.theta(my, w)?;
                    let l = log_from(w, theta);
                    Ok(match f {
                        Func::Log => l,
                        _ => (l * 0.5).exp(),
                    })
                }
                _ => {
                    let v = value_rec(a, z, src, idx)?;
                    Ok(match f {
                        Func::Exp => v.exp(),
                        Func::Sin => v.sin(),
                        Func::Cos => v.cos(),
                        Func::Sinh => v.sinh(),
                        Func::Cosh => v.cosh(),
                        Func::Log | Func::Sqrt => unreachable!(),
                    })
                }
            }
        }
    }
}

fn jet_rec<B: BranchSource>(
    e: &Expr,
    z0: Complex64,
    order: usize,
    src: &mut B,
    idx: &mut usize,
) -> Result<ComplexJet, EvalError> {
    let fail = |sf: StepFail| match sf {
        StepFail::Eval(e) => e,
        StepFail::NeedRefine => unreachable!("jets never run in continuation-step mode"),
    };
    match e {
        Expr::Var => Ok(ComplexJet::variable(z0, order)),
        Expr::Const(c) => Ok(ComplexJet::constant(z0, *c, order)),
        Expr::Neg(a) => Ok(jet_rec(a, z0, order, src, idx)?.neg()),
        Expr::Add(a, b) => {
            let x = jet_rec(a, z0, order, src, idx)?;
            let y = jet_rec(b, z0, order, src, idx)?;
            Ok(x.add(&y))
        }
        Expr::Sub(a, b) => {
            let x = jet_rec(a, z0, order, src, idx)?;
            let y = jet_rec(b, z0, order, src, idx)?;
            Ok(x.sub(&y))
        }
        Expr::Mul(a, b) => {
            let x = jet_rec(a, z0, order, src, idx)?;
            let y = jet_rec(b, z0, order, src, idx)?;
            Ok(x.mul(&y))
        }
        Expr::Div(a, b) => {
            let x = jet_rec(a, z0, order, src, idx)?;
            let y = jet_rec(b, z0, order, src, idx)?;
            x.div(&y)
        }
        Expr::PowInt(a, n) => jet_rec(a, z0, order, src, idx)?.powi(*n),
        Expr::Pow(a, c) => {
            let my = *idx;
            *idx += 1;
            let base = jet_rec(a, z0, order, src, idx)?;
            let theta = src.theta(my, base.value()).map_err(fail)?;
            let l = base.log_with(log_from(base.value(), theta))?;
            Ok(l.scale(*c).exp())
        }
        Expr::App(f, a) => match f {
            Func::Log | Func::Sqrt => {
                let my = *idx;
                *idx += 1;
                let base = jet_rec(a, z0, order, src, idx)?;
                let theta = src.theta(my, base.value()).map_err(fail)?;
                let l = base.log_with(log_from(base.value(), theta))?;
                Ok(match f {
                    Func::Log => l,
                    _ => l.scale(Complex64::new(0.5, 0.0)).exp(),
                })
            }
            Func::Exp => Ok(jet_rec(a, z0, order, src, idx)?.exp()),
            Func::Sin => Ok(jet_rec(a, z0, order, src, idx)?.sin_cos().0),
            Func::Cos => Ok(jet_rec(a, z0, order, src, idx)?.sin_cos().1),
            Func::Sinh => Ok(jet_rec(a, z0, order, src, idx)?.sinh_cosh().0),
            Func::Cosh => Ok(jet_rec(a, z0, order, src, idx)?.sinh_cosh().1),
        },
    }
}

const ANCHOR_RTOL: f64 = 1e-9;
const MIN_STEP: f64 = 1e-9;

/// Transport the branch arguments from the anchor to `target`.
fn continue_args(
    e: &Expr,
    at: Complex64,
    value: Complex64,
    target: Complex64,
) -> Result<Vec<f64>, EvalError> {
    let b = e.branchy_count();
    let unwrap_eval = |sf: StepFail| match sf {
        StepFail::Eval(err) => err,
        StepFail::NeedRefine => unreachable!(),
    };

    // Branch assignment at the anchor: principal first, then search small
    // 2*pi*k shifts of a single node if the principal value misses the
    // reference.
    let mut collect = Collect {
        args: vec![f64::NAN; b],
        bases: vec![Complex64::new(0.0, 0.0); b],
    };
    let f_at = value_rec(e, at, &mut collect, &mut 0).map_err(unwrap_eval)?;
    let tol = ANCHOR_RTOL * (1.0 + value.norm());
    let mut args = collect.args;
    let mut bases = collect.bases;
    let mut best_err = (f_at - value).norm();
    if best_err > tol {
        let mut best_args: Option<Vec<f64>> = None;
        for node in 0..b {
            for k in [-3i32, -2, -1, 1, 2, 3] {
                let mut cand = args.clone();
                cand[node] += 2.0 * PI * f64::from(k);
                let v = value_rec(e, at, &mut Fixed(&cand), &mut 0).map_err(unwrap_eval)?;
                let err = (v - value).norm();
                if err < best_err {
                    best_err = err;
                    best_args = Some(cand);
                }
            }
        }
        match best_args {
            Some(a) if best_err <= tol => args = a,
            _ => return Err(EvalError::AnchorMismatch { best_err }),
        }
        // refresh the recorded base values under the corrected assignment
        let mut refresh = FixedCollect {
            args: &args,
            bases: vec![Complex64::new(0.0, 0.0); b],
        };
        value_rec(e, at, &mut refresh, &mut 0).map_err(unwrap_eval)?;
        bases = refresh.bases;
    }

    if target == at || b == 0 {
        return Ok(args);
    }

    let dz = target - at;
    let mut t = 0.0f64;
    let mut step = 1.0f64;
    while t < 1.0 {
        let t_next = (t + step).min(1.0);
        let z_next = at + dz * t_next;
        let mut state = Step {
            prev_args: &args,
            prev_bases: &bases,
            next_args: vec![f64::NAN; b],
            next_bases: vec![Complex64::new(0.0, 0.0); b],
        };
        match value_rec(e, z_next, &mut state, &mut 0) {
            Ok(_) => {
                let Step {
                    next_args,
                    next_bases,
                    ..
                } = state;
                args = next_args;
                bases = next_bases;
                t = t_next;
                step = (step * 2.0).min(1.0);
            }
            Err(StepFail::NeedRefine) => {
                step *= 0.5;
                if step < MIN_STEP {
                    return Err(EvalError::BranchContinuation(format!(
                        "argument not resolvable near t = {t:.6} on the segment to the target"
                    )));
                }
            }
            Err(StepFail::Eval(err)) => return Err(err),
        }
    }
    Ok(args)
}

fn resolve_args(
    e: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<Option<Vec<f64>>, EvalError> {
    match policy {
        BranchPolicy::Principal => Ok(None),
        BranchPolicy::Anchored { at, value } => Ok(Some(continue_args(e, *at, *value, z)?)),
    }
}

/// Evaluate the expression and its first `order` derivatives at `z0`.
pub fn eval_jet(
    e: &Expr,
    z0: Complex64,
    order: usize,
    policy: &BranchPolicy,
) -> Result<ComplexJet, EvalError> {
    if order > super::MAX_ORDER {
        return Err(EvalError::Order {
            requested: order,
            max: super::MAX_ORDER,
        });
    }
    let jet = match resolve_args(e, z0, policy)? {
        None => jet_rec(e, z0, order, &mut Principal, &mut 0)?,
        Some(args) => jet_rec(e, z0, order, &mut Fixed(&args), &mut 0)?,
    };
    if !jet.is_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok(jet)
}

/// Evaluate the expression value at `z` (order-zero fast path).
pub fn eval_value(e: &Expr, z: Complex64, policy: &BranchPolicy) -> Result<Complex64, EvalError> {
    let unwrap_eval = |sf: StepFail| match sf {
        StepFail::Eval(err) => err,
        StepFail::NeedRefine => unreachable!(),
    };
    let v = match resolve_args(e, z, policy)? {
        None => value_rec(e, z, &mut Principal, &mut 0).map_err(unwrap_eval)?,
        Some(args) => value_rec(e, z, &mut Fixed(&args), &mut 0).map_err(unwrap_eval)?,
    };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(EvalError::NonFinite);
    }
    Ok(v)
}
