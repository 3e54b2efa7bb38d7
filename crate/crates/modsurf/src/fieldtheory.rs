//! Scalar-field verifications built on the log-harmonicity of modular
//! height functions (`h * laplacian(h) = |grad h|^2`): zero-mean-curvature
//! residual scans, the constant-mean-curvature family, convexity bounds,
//! Liouville and massless-scalar Euler-Lagrange residuals, and the
//! sigma-model Christoffel recovery.

use crate::error::{DegeneracyError, EvalError};
use crate::expr::Expr;
use crate::geometry::{Rect, LIGHTLIKE_BAND};
use crate::jet::{eval_jet, eval_value, BranchPolicy, DEFAULT_ZERO_TOL};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Degenerate(#[from] DegeneracyError),
    #[error("field not positive at ({x}, {y}): h = {value}")]
    Positivity { x: f64, y: f64, value: f64 },
    #[error("field not log-harmonic at ({x}, {y}): residual {residual:.3e}")]
    NotLogHarmonic { x: f64, y: f64, residual: f64 },
    #[error("field not convex at ({x}, {y}): det Hess = {det:.3e}")]
    Convexity { x: f64, y: f64, det: f64 },
    #[error("field not spacelike at ({x}, {y}): |grad h|^2 = {grad_sq:.3e}")]
    NotSpacelike { x: f64, y: f64, grad_sq: f64 },
    #[error("profile not real-valued at t = {t}: imaginary part {im:.3e}")]
    ProfileNotReal { t: f64, im: f64 },
}

/// Value and first/second derivatives of a scalar field at a point.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldDerivs {
    pub h: f64,
    pub hx: f64,
    pub hy: f64,
    pub hxx: f64,
    pub hxy: f64,
    pub hyy: f64,
}

impl FieldDerivs {
    pub fn grad_sq(&self) -> f64 {
        self.hx * self.hx + self.hy * self.hy
    }

    pub fn laplacian(&self) -> f64 {
        self.hxx + self.hyy
    }

    pub fn det_hess(&self) -> f64 {
        self.hxx * self.hyy - self.hxy * self.hxy
    }
}

type ValueFn = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;
type DerivsFn = Box<dyn Fn(f64, f64) -> FieldDerivs + Send + Sync>;

enum FieldSource {
    /// `h = |F(z)|` for an analytic F; exact derivatives come from jets.
    Modulus { f: Expr, policy: BranchPolicy },
    /// Closed-form field, optionally with exact derivatives.
    Closed {
        value: ValueFn,
        exact: Option<DerivsFn>,
    },
    /// `h(x, y) = f(x + sign*y)` for a one-dimensional analytic profile;
    /// derivatives by the exact chain rule.
    Profile { f: Expr, sign: f64 },
}

/// A positive scalar field over a rectangular lattice, evaluable anywhere
/// on its domain.
pub struct ScalarField {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
    source: FieldSource,
}

/// Central-difference step for field derivatives (one Richardson level).
pub const FIELD_FD_STEP: f64 = 1e-3;

impl ScalarField {
    pub fn modulus(f: Expr, policy: BranchPolicy, domain: Rect, nx: usize, ny: usize) -> Self {
        ScalarField {
            domain,
            nx,
            ny,
            source: FieldSource::Modulus { f, policy },
        }
    }

    pub fn closed(
        value: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        domain: Rect,
        nx: usize,
        ny: usize,
    ) -> Self {
        ScalarField {
            domain,
            nx,
            ny,
            source: FieldSource::Closed {
                value: Box::new(value),
                exact: None,
            },
        }
    }

    pub fn closed_exact(
        derivs: impl Fn(f64, f64) -> FieldDerivs + Send + Sync + 'static,
        domain: Rect,
        nx: usize,
        ny: usize,
    ) -> Self {
        let d = std::sync::Arc::new(derivs);
        let dv = d.clone();
        ScalarField {
            domain,
            nx,
            ny,
            source: FieldSource::Closed {
                value: Box::new(move |x, y| dv(x, y).h),
                exact: Some(Box::new(move |x, y| d(x, y))),
            },
        }
    }

    pub fn profile(f: Expr, sign: f64, domain: Rect, nx: usize, ny: usize) -> Self {
        ScalarField {
            domain,
            nx,
            ny,
            source: FieldSource::Profile { f, sign },
        }
    }

    pub fn value(&self, x: f64, y: f64) -> Result<f64, FieldError> {
        match &self.source {
            FieldSource::Modulus { f, policy } => {
                Ok(eval_value(f, Complex64::new(x, y), policy)?.norm())
            }
            FieldSource::Closed { value, .. } => Ok(value(x, y)),
            FieldSource::Profile { f, sign } => {
                let t = x + sign * y;
                let v = eval_value(f, Complex64::new(t, 0.0), &BranchPolicy::Principal)?;
                if v.im.abs() > 1e-12 * (1.0 + v.norm()) {
                    return Err(FieldError::ProfileNotReal { t, im: v.im });
                }
                Ok(v.re)
            }
        }
    }

    /// Derivatives by central differences, always; the independent route.
    pub fn derivs_fd(&self, x: f64, y: f64) -> Result<FieldDerivs, FieldError> {
        let center = self.value(x, y)?;
        let stencil = |s: f64| -> Result<[f64; 5], FieldError> {
            let px = self.value(x + s, y)?;
            let mx = self.value(x - s, y)?;
            let py = self.value(x, y + s)?;
            let my = self.value(x, y - s)?;
            let pp = self.value(x + s, y + s)?;
            let pm = self.value(x + s, y - s)?;
            let mp = self.value(x - s, y + s)?;
            let mm = self.value(x - s, y - s)?;
            Ok([
                (px - 2.0 * center + mx) / (s * s),
                (py - 2.0 * center + my) / (s * s),
                (pp - pm - mp + mm) / (4.0 * s * s),
                (px - mx) / (2.0 * s),
                (py - my) / (2.0 * s),
            ])
        };
        let full = stencil(FIELD_FD_STEP)?;
        let half = stencil(FIELD_FD_STEP / 2.0)?;
        let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;
        Ok(FieldDerivs {
            h: center,
            hx: rich(full[3], half[3]),
            hy: rich(full[4], half[4]),
            hxx: rich(full[0], half[0]),
            hxy: rich(full[2], half[2]),
            hyy: rich(full[1], half[1]),
        })
    }

    /// Derivatives on the exact path where one exists, finite differences
    /// otherwise.
    pub fn derivs(&self, x: f64, y: f64) -> Result<FieldDerivs, FieldError> {
        match &self.source {
            FieldSource::Modulus { f, policy } => {
                let jet = eval_jet(f, Complex64::new(x, y), 2, policy)?;
                let f0 = jet.derivative(0);
                let f1 = jet.derivative(1);
                let f2 = jet.derivative(2);
                let h = f0.norm();
                if h == 0.0 {
                    return Err(FieldError::Positivity { x, y, value: 0.0 });
                }
                let g = f1 / f0;
                let gp = f2 / f0 - g * g;
                Ok(FieldDerivs {
                    h,
                    hx: h * g.re,
                    hy: -h * g.im,
                    hxx: h * (g.re * g.re + gp.re),
                    hxy: h * (-g.im * g.re - gp.im),
                    hyy: h * (g.im * g.im - gp.re),
                })
            }
            FieldSource::Closed { exact, .. } => match exact {
                Some(d) => Ok(d(x, y)),
                None => self.derivs_fd(x, y),
            },
            FieldSource::Profile { f, sign } => {
                let t = x + sign * y;
                let jet = eval_jet(f, Complex64::new(t, 0.0), 2, &BranchPolicy::Principal)?;
                let v = jet.derivative(0);
                if v.im.abs() > 1e-12 * (1.0 + v.norm()) {
                    return Err(FieldError::ProfileNotReal { t, im: v.im });
                }
                let d1 = jet.derivative(1).re;
                let d2 = jet.derivative(2).re;
                Ok(FieldDerivs {
                    h: v.re,
                    hx: d1,
                    hy: sign * d1,
                    hxx: d2,
                    hxy: sign * d2,
                    hyy: d2,
                })
            }
        }
    }

    pub fn lattice(&self) -> Vec<(f64, f64)> {
        lattice_points(self.domain, self.nx, self.ny)
    }
}

pub fn lattice_points(domain: Rect, nx: usize, ny: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::with_capacity(nx * ny);
    for iy in 0..ny {
        for ix in 0..nx {
            let x = domain.x0 + (domain.x1 - domain.x0) * ix as f64 / (nx - 1).max(1) as f64;
            let y = domain.y0 + (domain.y1 - domain.y0) * iy as f64 / (ny - 1).max(1) as f64;
            pts.push((x, y));
        }
    }
    pts
}

/// A grid of per-point residual values.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualGrid {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
    pub values: Vec<f64>,
}

impl ResidualGrid {
    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |a, b| a.max(b.abs()))
    }
}

/// `|h * laplacian(h) - |grad h|^2|` per lattice point, by central
/// differences. Zero (to discretization error) exactly on modular heights.
pub fn log_harmonic_residual(h: &ScalarField) -> Result<ResidualGrid, FieldError> {
    let mut values = Vec::with_capacity(h.nx * h.ny);
    for (x, y) in h.lattice() {
        let v = h.value(x, y)?;
        if v <= 0.0 {
            return Err(FieldError::Positivity { x, y, value: v });
        }
        let d = h.derivs_fd(x, y)?;
        values.push((d.h * d.laplacian() - d.grad_sq()).abs());
    }
    Ok(ResidualGrid {
        domain: h.domain,
        nx: h.nx,
        ny: h.ny,
        values,
    })
}

fn check_log_harmonic(h: &ScalarField, x: f64, y: f64) -> Result<(), FieldError> {
    let v = h.value(x, y)?;
    if v <= 0.0 {
        return Err(FieldError::Positivity { x, y, value: v });
    }
    let d = h.derivs_fd(x, y)?;
    let residual = (d.h * d.laplacian() - d.grad_sq()).abs();
    if residual > 1e-5 * (1.0 + d.h * d.h) {
        return Err(FieldError::NotLogHarmonic { x, y, residual });
    }
    Ok(())
}

/// Where the point sits relative to the lightlike threshold `|F'| = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZmcRegime {
    MaximalCandidate,
    TimelikeCandidate,
    Degenerate,
}

/// Residual of the zero-mean-curvature equation
/// `Re(FF''/F'^2) = 1 - 1/|F'|^2` at a point.
pub fn zmc_residual(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<(f64, ZmcRegime), FieldError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);
    let scale = [f0, f1, f2].iter().map(|v| v.norm()).fold(1.0, f64::max);
    if f0.norm() <= DEFAULT_ZERO_TOL * scale {
        return Err(DegeneracyError(format!("F vanishes at {z}")).into());
    }
    if f1.norm() <= DEFAULT_ZERO_TOL * scale {
        return Err(DegeneracyError(format!("F' vanishes at {z}")).into());
    }
    let grad_sq = f1.norm_sqr();
    let re_w = ((f0 * f2) / (f1 * f1)).re;
    let residual = (re_w - (1.0 - 1.0 / grad_sq)).abs();
    let regime = if (grad_sq - 1.0).abs() <= LIGHTLIKE_BAND {
        ZmcRegime::Degenerate
    } else if grad_sq < 1.0 {
        ZmcRegime::MaximalCandidate
    } else {
        ZmcRegime::TimelikeCandidate
    };
    Ok((residual, regime))
}

/// Extremes of the ZMC residual over a grid, degeneracies masked.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ZmcScanReport {
    pub max_residual: Option<f64>,
    pub min_residual: Option<f64>,
    pub evaluated: usize,
    pub masked: usize,
}

pub fn zmc_scan(
    f: &Expr,
    domain: Rect,
    nx: usize,
    ny: usize,
    policy: &BranchPolicy,
) -> ZmcScanReport {
    let mut max_r = None::<f64>;
    let mut min_r = None::<f64>;
    let mut evaluated = 0;
    let mut masked = 0;
    for (x, y) in lattice_points(domain, nx, ny) {
        match zmc_residual(f, Complex64::new(x, y), policy) {
            Ok((r, ZmcRegime::Degenerate)) => {
                let _ = r;
                masked += 1;
            }
            Ok((r, _)) => {
                evaluated += 1;
                max_r = Some(max_r.map_or(r, |m: f64| m.max(r)));
                min_r = Some(min_r.map_or(r, |m: f64| m.min(r)));
            }
            Err(_) => masked += 1,
        }
    }
    ZmcScanReport {
        max_residual: max_r,
        min_residual: min_r,
        evaluated,
        masked,
    }
}

/// Parameters of the constant-mean-curvature height family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CmcParams {
    pub h_mean: f64,
    pub a: f64,
    pub b: f64,
}

impl CmcParams {
    pub fn new(h_mean: f64, a: f64, b: f64) -> Result<Self, DegeneracyError> {
        if h_mean == 0.0 {
            return Err(DegeneracyError("the CMC scalar must be nonzero".into()));
        }
        Ok(CmcParams { h_mean, a, b })
    }
}

/// `h(x, y) = H/2 (x^2 + y^2) + a x + b y + (a^2 + b^2)/(2H)`.
pub fn cmc_height(p: &CmcParams, x: f64, y: f64) -> f64 {
    0.5 * p.h_mean * (x * x + y * y) + p.a * x + p.b * y
        + (p.a * p.a + p.b * p.b) / (2.0 * p.h_mean)
}

/// Residuals of `laplacian(h) = 2H` and `|grad h|^2 = 2 H h` for the CMC
/// family, with exact symbolic derivatives. Both vanish identically.
pub fn cmc_verify(p: &CmcParams, domain: Rect, n: usize) -> (f64, f64) {
    let mut max_laplace = 0.0f64;
    let mut max_eikonal = 0.0f64;
    // exact derivatives of the quadratic: hxx = hyy = H
    let (hxx, hyy) = (p.h_mean, p.h_mean);
    for (x, y) in lattice_points(domain, n, n) {
        let hx = p.h_mean * x + p.a;
        let hy = p.h_mean * y + p.b;
        let laplace = hxx + hyy - 2.0 * p.h_mean;
        let eikonal = hx * hx + hy * hy - 2.0 * p.h_mean * cmc_height(p, x, y);
        max_laplace = max_laplace.max(laplace.abs());
        max_eikonal = max_eikonal.max(eikonal.abs());
    }
    (max_laplace, max_eikonal)
}

/// Residual of the characteristic constraint
/// `(df/dx)^2 + (df/dy)^2 + 2H (x df/dx + y df/dy - f) = 0`
/// for the affine solution `f = a x + b y + (a^2+b^2)/(2H)`.
pub fn characteristic_f_check(a: f64, b: f64, h_mean: f64, domain: Rect, n: usize) -> f64 {
    let c = (a * a + b * b) / (2.0 * h_mean);
    let mut max_res = 0.0f64;
    for (x, y) in lattice_points(domain, n, n) {
        let f = a * x + b * y + c;
        let res = a * a + b * b + 2.0 * h_mean * (x * a + y * b - f);
        max_res = max_res.max(res.abs());
    }
    max_res
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    Euclidean,
    Minkowski,
}

/// Convexity bound report: the pointwise bound value, and the trend of the
/// relevant quantity on bands of increasing distance from the origin (a
/// desk-scale proxy for the behavior at infinity, not an assertion of it).
#[derive(Debug, Clone, Serialize)]
pub struct ConvexityReport {
    pub ambient: Ambient,
    /// Max over the grid of `2 K h^2` (Euclidean) or `2 h_xx h_yy h^2`
    /// (Minkowski).
    pub max_bound: f64,
    pub bound_holds: bool,
    /// `(mean radius, max quantity)` per radial band: Gaussian curvature
    /// for Euclidean, largest Hessian entry for Minkowski.
    pub trend: Vec<(f64, f64)>,
    pub trend_monotone: bool,
    pub points: usize,
}

/// Check the curvature bound `2 K h^2 < 1` (Euclidean) or its Minkowski
/// counterpart on a convex, log-harmonic field.
pub fn convexity_bounds(h: &ScalarField, ambient: Ambient) -> Result<ConvexityReport, FieldError> {
    let mut per_point: Vec<(f64, f64, f64)> = Vec::new(); // (radius, bound, trend quantity)
    for (x, y) in h.lattice() {
        check_log_harmonic(h, x, y)?;
        let d = h.derivs(x, y)?;
        let det = d.det_hess();
        if det <= 0.0 {
            return Err(FieldError::Convexity { x, y, det });
        }
        let radius = (x * x + y * y).sqrt();
        match ambient {
            Ambient::Euclidean => {
                // K through the log-harmonic substitution |grad h|^2 = h Dh
                let k = det / (1.0 + d.h * d.laplacian()).powi(2);
                per_point.push((radius, 2.0 * k * d.h * d.h, k));
            }
            Ambient::Minkowski => {
                let grad_sq = d.grad_sq();
                if grad_sq >= 1.0 {
                    return Err(FieldError::NotSpacelike { x, y, grad_sq });
                }
                let entry = d.hxx.abs().max(d.hxy.abs()).max(d.hyy.abs());
                per_point.push((radius, 2.0 * d.hxx * d.hyy * d.h * d.h, entry));
            }
        }
    }

    let max_bound = per_point.iter().fold(0.0f64, |a, p| a.max(p.1));
    let bound_holds = per_point.iter().all(|p| p.1 < 1.0);

    // radial bands with equal point counts
    let mut sorted = per_point.clone();
    sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
    let bands = 4.min(sorted.len().max(1));
    let mut trend = Vec::new();
    for b in 0..bands {
        let lo = b * sorted.len() / bands;
        let hi = ((b + 1) * sorted.len() / bands).max(lo + 1).min(sorted.len());
        let chunk = &sorted[lo..hi];
        if chunk.is_empty() {
            continue;
        }
        let mean_r = chunk.iter().map(|p| p.0).sum::<f64>() / chunk.len() as f64;
        let max_q = chunk.iter().fold(0.0f64, |a, p| a.max(p.2));
        trend.push((mean_r, max_q));
    }
    let trend_monotone = trend.windows(2).all(|w| w[1].1 <= w[0].1 * 1.05);

    Ok(ConvexityReport {
        ambient,
        max_bound,
        bound_holds,
        trend,
        trend_monotone,
        points: per_point.len(),
    })
}

/// Per-point residual of the reduced Liouville equation
/// `|grad h|^2 / h - Q S_g h + 2 mu e^(2 b h)` and the non-triviality
/// predicate `Q S_g h - 2 mu e^(2 b h) > 0`.
#[derive(Debug, Clone, Serialize)]
pub struct LiouvilleReport {
    pub residual: ResidualGrid,
    pub nontrivial: Vec<bool>,
}

pub fn liouville_residual(
    h: &ScalarField,
    q: f64,
    mu: f64,
    bcpl: f64,
    sg: f64,
) -> Result<LiouvilleReport, FieldError> {
    let mut values = Vec::with_capacity(h.nx * h.ny);
    let mut nontrivial = Vec::with_capacity(h.nx * h.ny);
    for (x, y) in h.lattice() {
        let v = h.value(x, y)?;
        if v <= 0.0 {
            return Err(FieldError::Positivity { x, y, value: v });
        }
        let d = h.derivs(x, y)?;
        let exp_term = 2.0 * mu * (2.0 * bcpl * d.h).exp();
        values.push(d.grad_sq() / d.h - q * sg * d.h + exp_term);
        nontrivial.push(q * sg * d.h - exp_term > 0.0);
    }
    Ok(LiouvilleReport {
        residual: ResidualGrid {
            domain: h.domain,
            nx: h.nx,
            ny: h.ny,
            values,
        },
        nontrivial,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    XPlusY,
    XMinusY,
}

/// Box and null-gradient residuals for the travelling profile
/// `h(x, y) = f(x +/- y)`, via the exact chain rule. Identically zero for
/// any twice-differentiable positive profile.
pub fn massless_check(
    f: &Expr,
    orientation: Orientation,
    domain: Rect,
    n: usize,
) -> Result<(f64, f64), FieldError> {
    let sign = match orientation {
        Orientation::XPlusY => 1.0,
        Orientation::XMinusY => -1.0,
    };
    let field = ScalarField::profile(f.clone(), sign, domain, n, n);
    massless_field_check(&field)
}

/// General-field version of the box and null-gradient residuals
/// `max |h_xx - h_yy|` and `max |h_x^2 - h_y^2|`.
pub fn massless_field_check(h: &ScalarField) -> Result<(f64, f64), FieldError> {
    let mut box_res = 0.0f64;
    let mut null_res = 0.0f64;
    for (x, y) in h.lattice() {
        let v = h.value(x, y)?;
        if v <= 0.0 {
            return Err(FieldError::Positivity { x, y, value: v });
        }
        let d = h.derivs(x, y)?;
        box_res = box_res.max((d.hxx - d.hyy).abs());
        null_res = null_res.max((d.hx * d.hx - d.hy * d.hy).abs());
    }
    Ok((box_res, null_res))
}

/// Minimum-norm Christoffel symbols making an n-tuple of log-harmonic
/// fields a sigma model, per lattice point.
#[derive(Debug, Clone, Serialize)]
pub struct SigmaSolveResult {
    pub n: usize,
    pub nx: usize,
    pub ny: usize,
    /// Per point: `n*n*n` entries, `gamma[i][j][k]` flattened row-major;
    /// symmetric in (j, k).
    pub gamma: Vec<Vec<f64>>,
    /// Per point: max over i of the recomputed equation residual.
    pub residual: Vec<f64>,
    /// Per point: effective rank of the constraint (0 when the gradient
    /// matrix vanishes).
    pub rank: Vec<u8>,
    /// Per point: true when no solution exists there (zero gradients with a
    /// nonzero source).
    pub singular: Vec<bool>,
}

/// Solve `B^i + sum_jk Gamma^i_jk A_jk h^i = 0` per point for the
/// minimum-Frobenius-norm symmetric `Gamma^i`, where
/// `A_jk = p^j p^k + q^j q^k` and `B^i = e1 (p^i)^2 + e2 (q^i)^2`.
pub fn sigma_solve(
    fields: &[&ScalarField],
    signature: (i8, i8),
) -> Result<SigmaSolveResult, FieldError> {
    assert!(!fields.is_empty(), "at least one component field");
    assert!(
        signature.0.abs() == 1 && signature.1.abs() == 1,
        "signature entries must be +-1"
    );
    let n = fields.len();
    let base = fields[0];
    for f in fields {
        assert!(
            f.nx == base.nx && f.ny == base.ny && f.domain == base.domain,
            "component fields must share a lattice"
        );
    }
    let (e1, e2) = (f64::from(signature.0), f64::from(signature.1));

    let mut gamma = Vec::new();
    let mut residual = Vec::new();
    let mut rank = Vec::new();
    let mut singular = Vec::new();

    for (x, y) in base.lattice() {
        let mut hval = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut q = vec![0.0; n];
        for (i, f) in fields.iter().enumerate() {
            check_log_harmonic(f, x, y)?;
            let d = f.derivs(x, y)?;
            hval[i] = d.h;
            p[i] = d.hx;
            q[i] = d.hy;
        }
        let mut a = vec![0.0; n * n];
        let mut fro_sq = 0.0;
        let mut trace = 0.0;
        for j in 0..n {
            for k in 0..n {
                let v = p[j] * p[k] + q[j] * q[k];
                a[j * n + k] = v;
                fro_sq += v * v;
            }
            trace += a[j * n + j];
        }
        let a_zero = fro_sq.sqrt() <= 1e-12 * (1.0 + trace);

        let mut g = vec![0.0; n * n * n];
        let mut res_pt = 0.0f64;
        let mut sing_pt = false;
        for i in 0..n {
            let b_i = e1 * p[i] * p[i] + e2 * q[i] * q[i];
            if a_zero {
                if b_i.abs() > 1e-12 * (1.0 + trace) {
                    sing_pt = true;
                    res_pt = res_pt.max(b_i.abs());
                }
                continue; // gamma stays zero
            }
            let scale = -b_i / (hval[i] * fro_sq);
            let mut recompute = b_i;
            for j in 0..n {
                for k in 0..n {
                    let gijk = scale * a[j * n + k];
                    g[(i * n + j) * n + k] = gijk;
                    recompute += gijk * a[j * n + k] * hval[i];
                }
            }
            res_pt = res_pt.max(recompute.abs());
        }
        gamma.push(g);
        residual.push(res_pt);
        rank.push(u8::from(!a_zero));
        singular.push(sing_pt);
    }

    Ok(SigmaSolveResult {
        n,
        nx: base.nx,
        ny: base.ny,
        gamma,
        residual,
        rank,
        singular,
    })
}
