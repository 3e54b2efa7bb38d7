//! Pointwise and grid geometry of a modular surface: the graph of
//! `h = |F(z)|` over a planar domain, viewed in Lorentz-Minkowski 3-space
//! (metric dx^2 + dy^2 - dt^2) and, as a variant, in Euclidean 3-space.
//!
//! The causal character is governed by `|grad h|^2 = |F'|^2`: spacelike
//! below 1, timelike above, lightlike on the unit band. Gaussian curvature
//! comes from the jet formula
//! `K = -(|F'|^4 - |2FF'' - F'^2|^2) / (4|F|^2 (1-|F'|^2)^2)` with an
//! equivalent second form through `Re(F'^2/(F F''))`, and a finite-difference
//! fallback on the real Hessian of `h` for the points the jet formulas do
//! not reach. Mean curvature uses the graph formula driven by
//! `Re(F F''/F'^2)`. All finite differencing here is an independent route
//! from the jet recurrences, which is what the identity tests lean on.

use crate::error::{DegeneracyError, EvalError};
use crate::expr::Expr;
use crate::jet::{eval_jet, eval_value, BranchPolicy, DEFAULT_ZERO_TOL, MAX_ORDER};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

/// Width of the lightlike band on `|grad h|^2` around 1.
pub const LIGHTLIKE_BAND: f64 = 1e-9;

/// Central-difference step for Hessian/gradient estimates of `h`.
pub const FD_STEP: f64 = 1e-5;

/// Tolerance for the `|t| - 1/2` sign predicates.
pub const SIGN_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Degenerate(#[from] DegeneracyError),
}

/// Causal character of the immersion at a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalCharacter {
    Spacelike,
    Timelike,
    Lightlike,
}

/// Which formula produced the reported Gaussian curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KMode {
    Eq5,
    Eq6,
    Eq3Fallback,
    RemarkFZero,
}

impl KMode {
    pub fn label(self) -> &'static str {
        match self {
            KMode::Eq5 => "eq5",
            KMode::Eq6 => "eq6",
            KMode::Eq3Fallback => "eq3-fallback",
            KMode::RemarkFZero => "remark-F-zero",
        }
    }
}

/// A curvature value that may be genuinely undefined, or defined only as a
/// removable limit (the closed formula degenerates but the graph still has a
/// classical curvature there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Curvature {
    Defined(f64),
    LimitDefined(f64),
    Undefined,
}

impl Curvature {
    pub fn value(&self) -> Option<f64> {
        match self {
            Curvature::Defined(v) | Curvature::LimitDefined(v) => Some(*v),
            Curvature::Undefined => None,
        }
    }

    pub fn defined(&self) -> Option<f64> {
        match self {
            Curvature::Defined(v) => Some(*v),
            _ => None,
        }
    }
}

/// Symmetric 2x2 Hessian of the height function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Hessian {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Hessian {
    pub fn det(&self) -> f64 {
        self.xx * self.yy - self.xy * self.xy
    }

    pub fn trace(&self) -> f64 {
        self.xx + self.yy
    }
}

/// Everything computed at one surface point.
#[derive(Debug, Clone, Serialize)]
pub struct SurfaceSample {
    pub point: Complex64,
    /// Height `|F(z)|`.
    pub h: f64,
    /// `|grad h|^2 = |F'(z)|^2`.
    pub grad_sq: f64,
    /// Finite-difference Hessian of `h` (independent of the jet route).
    pub hess: Hessian,
    pub causal: CausalCharacter,
    pub k: Curvature,
    pub k_mode: Option<KMode>,
    /// Cross-check value from the `Re(F'^2/(FF''))` form, when available.
    pub k_eq6: Option<f64>,
    /// Numerator `|F'|^4 - |2FF'' - F'^2|^2` of the jet curvature formula;
    /// its zero set is the zero-curvature locus.
    pub k_numerator: f64,
    /// `|F'|^4 + |2FF'' - F'^2|^2`, the natural magnitude scale of the
    /// numerator before cancellation.
    pub k_num_scale: f64,
    pub h_mean: Option<f64>,
    pub alpha: Option<Complex64>,
    pub beta: Option<Complex64>,
    pub t: Option<Complex64>,
    /// False at points where `h` fails to be twice differentiable
    /// (odd-order zeros of F); mean curvature is undefined there.
    pub smooth: bool,
}

/// Sign classification of Gaussian curvature from `t = 1/2 - beta`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum KSign {
    Kpos,
    Kzero,
    Kneg,
}

/// `|t| > 1/2` means positive curvature, `|t| = 1/2` flat, `|t| < 1/2`
/// negative.
pub fn sign_predicates(t: Complex64) -> KSign {
    let m = t.norm();
    if m > 0.5 + SIGN_TOL {
        KSign::Kpos
    } else if m < 0.5 - SIGN_TOL {
        KSign::Kneg
    } else {
        KSign::Kzero
    }
}

fn zero_scale(values: &[Complex64]) -> f64 {
    values.iter().map(|v| v.norm()).fold(1.0, f64::max)
}

/// Finite-difference Hessian and gradient of `h = |F|` at `z`, central
/// differences with one Richardson extrapolation level.
pub fn fd_hess_grad(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<(Hessian, [f64; 2]), EvalError> {
    let hv = |dx: f64, dy: f64| -> Result<f64, EvalError> {
        Ok(eval_value(f, z + Complex64::new(dx, dy), policy)?.norm())
    };
    let center = hv(0.0, 0.0)?;
    let stencil = |s: f64| -> Result<[f64; 5], EvalError> {
        let px = hv(s, 0.0)?;
        let mx = hv(-s, 0.0)?;
        let py = hv(0.0, s)?;
        let my = hv(0.0, -s)?;
        let pp = hv(s, s)?;
        let pm = hv(s, -s)?;
        let mp = hv(-s, s)?;
        let mm = hv(-s, -s)?;
        Ok([
            (px - 2.0 * center + mx) / (s * s),
            (py - 2.0 * center + my) / (s * s),
            (pp - pm - mp + mm) / (4.0 * s * s),
            (px - mx) / (2.0 * s),
            (py - my) / (2.0 * s),
        ])
    };
    let full = stencil(FD_STEP)?;
    let half = stencil(FD_STEP / 2.0)?;
    let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;
    Ok((
        Hessian {
            xx: rich(full[0], half[0]),
            yy: rich(full[1], half[1]),
            xy: rich(full[2], half[2]),
        },
        [rich(full[3], half[3]), rich(full[4], half[4])],
    ))
}

/// Numerator `|F'|^4 - |2FF'' - F'^2|^2` of the jet curvature formula.
pub fn k_numerator(f: &Expr, z: Complex64, policy: &BranchPolicy) -> Result<f64, EvalError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);
    Ok(f1.norm().powi(4) - (2.0 * f0 * f2 - f1 * f1).norm_sqr())
}

/// Least derivative order with a nonvanishing value, up to [`MAX_ORDER`].
fn vanishing_order(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<Option<usize>, EvalError> {
    let jet = eval_jet(f, z, MAX_ORDER, policy)?;
    let derivs: Vec<Complex64> = (0..=MAX_ORDER).map(|j| jet.derivative(j)).collect();
    let scale = zero_scale(&derivs);
    Ok(derivs
        .iter()
        .position(|d| d.norm() > DEFAULT_ZERO_TOL * scale))
}

/// Full geometric record of the modular surface at `z`.
pub fn sample_point(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<SurfaceSample, EvalError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);

    let h = f0.norm();
    let grad_sq = f1.norm_sqr();
    let causal = if grad_sq < 1.0 - LIGHTLIKE_BAND {
        CausalCharacter::Spacelike
    } else if grad_sq > 1.0 + LIGHTLIKE_BAND {
        CausalCharacter::Timelike
    } else {
        CausalCharacter::Lightlike
    };

    let scale = zero_scale(&[f0, f1, f2]);
    let f_zero = f0.norm() <= DEFAULT_ZERO_TOL * scale;
    let f1_zero = f1.norm() <= DEFAULT_ZERO_TOL * scale;
    let f2_zero = f2.norm() <= DEFAULT_ZERO_TOL * scale;

    let cross = (2.0 * f0 * f2 - f1 * f1).norm_sqr();
    let num = f1.norm().powi(4) - cross;
    let num_scale = f1.norm().powi(4) + cross;
    let (hess, _grad) = fd_hess_grad(f, z, policy)?;

    let (alpha, beta, t) = if !f_zero && !f1_zero && !f2_zero {
        let a = (f1 * f1) / (f0 * f2);
        let b = (f1 * f1 - f0 * f2) / (f1 * f1);
        (Some(a), Some(b), Some(Complex64::new(0.5, 0.0) - b))
    } else {
        (None, None, None)
    };

    let lightlike = causal == CausalCharacter::Lightlike;
    let mut k = Curvature::Undefined;
    let mut k_mode = None;
    let mut k_eq6 = None;
    let mut h_mean = None;
    let mut smooth = true;

    if !f_zero {
        if !lightlike {
            let denom = 4.0 * h * h * (1.0 - grad_sq) * (1.0 - grad_sq);
            k = Curvature::Defined(-num / denom);
            k_mode = Some(KMode::Eq5);
            if !f2_zero {
                let re_alpha = ((f1 * f1) / (f0 * f2)).re;
                let d = (1.0 - grad_sq) * (1.0 - grad_sq);
                k_eq6 = Some(-f2.norm_sqr() * (re_alpha - 1.0) / d);
            }
            h_mean = if f1_zero {
                Some(0.0)
            } else {
                let re_w = ((f0 * f2) / (f1 * f1)).re;
                let bracket = 1.0 - grad_sq * (1.0 - re_w);
                Some(-(grad_sq / h) * bracket / (2.0 * (1.0 - grad_sq).abs().powf(1.5)))
            };
        }
        // lightlike: both curvatures undefined, the formula denominators vanish
    } else {
        // F vanishes: the surface touches height zero. Behavior is set by
        // the vanishing order m of F.
        match vanishing_order(f, z, policy)? {
            None => {
                // identically zero to the inspected order: the zero plane
                k = Curvature::Defined(0.0);
                k_mode = Some(KMode::Eq3Fallback);
                h_mean = Some(0.0);
            }
            Some(m) if m % 2 == 0 => {
                // F has an analytic square root f; h = |f|^2 is smooth and
                // K = -4|f'|^4 there.
                let sqrt_limit = if m == 2 { -f2.norm_sqr() } else { 0.0 };
                k = Curvature::Defined(sqrt_limit);
                k_mode = Some(KMode::RemarkFZero);
                // grad h = 0 at these points, so H = -(laplacian h)/2,
                // which is -|F''| for a double zero and 0 beyond.
                h_mean = Some(if m == 2 { -f2.norm() } else { 0.0 });
            }
            Some(1) => {
                // cone point, h is not even C^1
                smooth = false;
            }
            Some(_) => {
                // odd order >= 3: h is C^2 but not smooth; the jet formula
                // is 0/0 while the finite-difference limit exists.
                smooth = false;
                if !lightlike {
                    let d = (1.0 - grad_sq) * (1.0 - grad_sq);
                    k = Curvature::LimitDefined(-hess.det() / d);
                    k_mode = Some(KMode::Eq3Fallback);
                }
            }
        }
    }

    Ok(SurfaceSample {
        point: z,
        h,
        grad_sq,
        hess,
        causal,
        k,
        k_mode,
        k_eq6,
        k_numerator: num,
        k_num_scale: num_scale,
        h_mean,
        alpha,
        beta,
        t,
        smooth,
    })
}

/// `alpha = F'^2/(F F'')`, `beta = (F'^2 - F F'')/F'^2`, `t = 1/2 - beta`.
/// All three of F, F', F'' must be nonvanishing.
pub fn alpha_beta(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<(Complex64, Complex64, Complex64), GeomError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);
    let scale = zero_scale(&[f0, f1, f2]);
    for (v, name) in [(f0, "F"), (f1, "F'"), (f2, "F''")] {
        if v.norm() <= DEFAULT_ZERO_TOL * scale {
            return Err(DegeneracyError(format!("{name} vanishes at {z}")).into());
        }
    }
    let alpha = (f1 * f1) / (f0 * f2);
    let beta = (f1 * f1 - f0 * f2) / (f1 * f1);
    let t = Complex64::new(0.5, 0.0) - beta;
    Ok((alpha, beta, t))
}

/// Gaussian and mean curvature of the same graph read in Euclidean 3-space.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EuclideanPoint {
    pub k: f64,
    pub h_mean: f64,
}

pub fn euclidean_variant(
    f: &Expr,
    z: Complex64,
    policy: &BranchPolicy,
) -> Result<EuclideanPoint, GeomError> {
    let jet = eval_jet(f, z, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let grad_sq = f1.norm_sqr();
    let scale = zero_scale(&[f0, f1]);
    if f0.norm() <= DEFAULT_ZERO_TOL * scale {
        if let Some(m) = vanishing_order(f, z, policy)? {
            if m % 2 == 1 {
                return Err(DegeneracyError(format!(
                    "height function not twice differentiable at {z} (odd-order zero)"
                ))
                .into());
            }
        }
    }
    let (hess, grad) = fd_hess_grad(f, z, policy)?;
    let k = hess.det() / ((1.0 + grad_sq) * (1.0 + grad_sq));
    let (hx, hy) = (grad[0], grad[1]);
    let g = 1.0 + hx * hx + hy * hy;
    let h_mean =
        ((1.0 + hy * hy) * hess.xx - 2.0 * hx * hy * hess.xy + (1.0 + hx * hx) * hess.yy)
            / (2.0 * g.powf(1.5));
    Ok(EuclideanPoint { k, h_mean })
}

/// Axis-aligned rectangle in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn centered_square(half: f64) -> Self {
        Rect::new(-half, half, -half, half)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }
}

/// A uniform lattice of samples over a rectangle. Points where evaluation
/// failed (branch cut, pole) are excluded rather than fatal.
#[derive(Debug, Clone)]
pub struct GridField {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
    samples: Vec<Option<SurfaceSample>>,
}

impl GridField {
    pub fn x_at(&self, ix: usize) -> f64 {
        if self.nx == 1 {
            self.domain.x0
        } else {
            self.domain.x0 + (self.domain.x1 - self.domain.x0) * ix as f64 / (self.nx - 1) as f64
        }
    }

    pub fn y_at(&self, iy: usize) -> f64 {
        if self.ny == 1 {
            self.domain.y0
        } else {
            self.domain.y0 + (self.domain.y1 - self.domain.y0) * iy as f64 / (self.ny - 1) as f64
        }
    }

    /// Row-major sample access; `None` marks an excluded point.
    pub fn at(&self, ix: usize, iy: usize) -> Option<&SurfaceSample> {
        self.samples[iy * self.nx + ix].as_ref()
    }

    pub fn is_excluded(&self, ix: usize, iy: usize) -> bool {
        self.samples[iy * self.nx + ix].is_none()
    }

    pub fn excluded_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_none()).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Option<&SurfaceSample>)> {
        let nx = self.nx;
        self.samples
            .iter()
            .enumerate()
            .map(move |(i, s)| (i % nx, i / nx, s.as_ref()))
    }

    pub fn samples(&self) -> impl Iterator<Item = &SurfaceSample> {
        self.samples.iter().filter_map(|s| s.as_ref())
    }
}

/// Sample the surface on an `nx` by `ny` lattice over `domain`.
/// Deterministic; per-point failures set the exclusion mask.
pub fn scan_grid(
    f: &Expr,
    domain: Rect,
    nx: usize,
    ny: usize,
    policy: &BranchPolicy,
) -> GridField {
    assert!(nx >= 2 && ny >= 2, "resolution must be at least 2x2");
    let mut samples = Vec::with_capacity(nx * ny);
    let mut grid = GridField {
        domain,
        nx,
        ny,
        samples: Vec::new(),
    };
    for iy in 0..ny {
        for ix in 0..nx {
            let z = Complex64::new(grid.x_at(ix), grid.y_at(iy));
            samples.push(sample_point(f, z, policy).ok());
        }
    }
    grid.samples = samples;
    grid
}
