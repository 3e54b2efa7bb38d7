//! Shared corpus and finite-difference helpers for the integration suites.

#![allow(dead_code)]

use modsurf::expr::{parse, Expr};
use modsurf::geometry::Rect;
use modsurf::jet::{eval_value, BranchPolicy};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Entry {
    pub text: &'static str,
    pub expr: Expr,
    /// Window the function is sampled on (pole- and cut-free).
    pub window: Rect,
}

/// Ten-function test corpus with safe sampling windows.
pub fn corpus() -> Vec<Entry> {
    let items: [(&'static str, Rect); 10] = [
        ("exp(z)", Rect::new(-1.0, 1.0, -1.0, 1.0)),
        ("1+z^2", Rect::new(-0.8, 0.8, -0.8, 0.8)),
        ("z^3+2", Rect::new(-0.7, 0.7, -0.7, 0.7)),
        ("sin(z)", Rect::new(0.4, 1.1, -0.4, 0.4)),
        ("cos(z)+2", Rect::new(-1.0, 1.0, -1.0, 1.0)),
        ("exp(z)*(1+0.25*z^2)", Rect::new(-0.8, 0.8, -0.8, 0.8)),
        ("1/(z+3)", Rect::new(-1.0, 1.0, -1.0, 1.0)),
        ("z^4+z+1", Rect::new(-0.6, 0.6, -0.6, 0.6)),
        // principal branch is analytic on the upper strip (the cut image
        // lies on the real axis)
        (
            "((z-1)/(z+2))^(0.6666666666666666)",
            Rect::new(-0.3, 0.3, 0.05, 0.3),
        ),
        ("(z+2)^(1+3i)", Rect::new(-0.5, 0.5, -0.5, 0.5)),
    ];
    items
        .into_iter()
        .map(|(text, window)| Entry {
            text,
            expr: parse(text).expect("corpus member parses"),
            window,
        })
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn rand_in(r: &mut ChaCha8Rng, w: Rect) -> Complex64 {
    Complex64::new(r.gen_range(w.x0..w.x1), r.gen_range(w.y0..w.y1))
}

pub const PRINCIPAL: BranchPolicy = BranchPolicy::Principal;

/// `|F|` at z, or None where evaluation fails.
pub fn height(f: &Expr, z: Complex64) -> Option<f64> {
    eval_value(f, z, &PRINCIPAL).ok().map(|v| v.norm())
}

/// Plain central-difference gradient of `|F|` at step 1e-5 (the gradient
/// identity's stated oracle).
pub fn fd_gradient(f: &Expr, z: Complex64) -> Option<(f64, f64)> {
    let s = 1e-5;
    let hx = (height(f, z + Complex64::new(s, 0.0))? - height(f, z - Complex64::new(s, 0.0))?)
        / (2.0 * s);
    let hy = (height(f, z + Complex64::new(0.0, s))? - height(f, z - Complex64::new(0.0, s))?)
        / (2.0 * s);
    Some((hx, hy))
}

/// Richardson-extrapolated central-difference derivatives of `|F|` at step
/// 1e-3; an oracle independent of the jet recurrences with ~1e-9 accuracy.
pub struct FdDerivs {
    pub h: f64,
    pub hx: f64,
    pub hy: f64,
    pub hxx: f64,
    pub hxy: f64,
    pub hyy: f64,
}

pub fn fd_derivs(f: &Expr, z: Complex64) -> Option<FdDerivs> {
    let center = height(f, z)?;
    let stencil = |s: f64| -> Option<[f64; 5]> {
        let v = |dx: f64, dy: f64| height(f, z + Complex64::new(dx, dy));
        let px = v(s, 0.0)?;
        let mx = v(-s, 0.0)?;
        let py = v(0.0, s)?;
        let my = v(0.0, -s)?;
        let pp = v(s, s)?;
        let pm = v(s, -s)?;
        let mp = v(-s, s)?;
        let mm = v(-s, -s)?;
        Some([
            (px - 2.0 * center + mx) / (s * s),
            (py - 2.0 * center + my) / (s * s),
            (pp - pm - mp + mm) / (4.0 * s * s),
            (px - mx) / (2.0 * s),
            (py - my) / (2.0 * s),
        ])
    };
    let full = stencil(1e-3)?;
    let half = stencil(5e-4)?;
    let rich = |a: f64, b: f64| (4.0 * b - a) / 3.0;
    Some(FdDerivs {
        h: center,
        hx: rich(full[3], half[3]),
        hy: rich(full[4], half[4]),
        hxx: rich(full[0], half[0]),
        hxy: rich(full[2], half[2]),
        hyy: rich(full[1], half[1]),
    })
}
