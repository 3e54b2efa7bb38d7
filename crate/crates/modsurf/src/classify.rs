//! Local sign-of-curvature taxonomy around a degenerate point.
//!
//! [`predict`] maps a [`ZeroProfile`] to the tabulated local picture: the
//! curvature value at the point and how many positive/negative-curvature
//! sectors surround it. [`census`] verifies the picture empirically by
//! sampling the sign of the curvature numerator on small circles.
//!
//! The taxonomy is reproduced as printed even where direct evaluation
//! disagrees: the double-zero row (F = F' = 0, F'' != 0) is carried with a
//! `disputed` flag, since the square-root limit gives K -> -4|f'|^4 < 0
//! there while the printed row claims a positive sector.

use crate::error::{DegeneracyError, EvalError};
use crate::expr::Expr;
use crate::geometry;
use crate::jet::{eval_jet, BranchPolicy, ZeroProfile, DEFAULT_ZERO_TOL};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::TAU;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Degenerate(#[from] DegeneracyError),
    #[error("profile matches no classification row: {0}")]
    Unclassified(String),
}

/// Row of the local classification keyed by the zero pattern of F, F', F''.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TableRow {
    /// F, F' nonzero; F'' ... F^(n-1) zero, n >= 3.
    TailOnly,
    /// F nonzero; F' = F'' = 0, n >= 3.
    FirstTwoDerivativesZero,
    /// F = 0, F' nonzero; F'' ... F^(n-1) zero, n >= 3.
    SimpleZeroTail,
    /// F ... F^(n-1) all zero, n >= 3.
    FullZero,
    /// F nonzero, F' = 0, F'' nonzero.
    CriticalNondegenerate,
    /// F = 0, F' nonzero, F'' nonzero.
    SimpleZeroNondegenerate,
    /// F = F' = 0, F'' nonzero. Printed with a positive sector; disputed.
    DoubleZero,
}

/// Gaussian curvature at the point itself, as the taxonomy states it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KAtPoint {
    Zero,
    Positive,
    Undefined,
}

/// Predicted local picture around a degenerate point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalPrediction {
    pub k_at_point: KAtPoint,
    pub n_plus: usize,
    pub n_minus: usize,
    /// Zero-curvature curves emanating from the point.
    pub zero_curves: usize,
    pub source: TableRow,
    /// True for the double-zero row, where the printed entry conflicts with
    /// the square-root limit; the census carries the ground truth.
    pub disputed: bool,
}

fn curves(n_plus: usize, n_minus: usize) -> usize {
    if n_plus > 0 && n_minus > 0 {
        n_plus + n_minus
    } else {
        0
    }
}

/// Look up the taxonomy row for a zero profile.
pub fn predict(p: &ZeroProfile) -> Result<LocalPrediction, ClassifyError> {
    if !p.well_defined {
        return Err(ClassifyError::Unclassified(
            "every derivative up to the inspected order vanishes (affine or constant tail)"
                .into(),
        ));
    }
    let mk = |k, n_plus, n_minus, source, disputed| LocalPrediction {
        k_at_point: k,
        n_plus,
        n_minus,
        zero_curves: curves(n_plus, n_minus),
        source,
        disputed,
    };
    let n = p.n;
    let pred = match (p.f_zero, p.f1_zero, p.f2_zero) {
        (false, false, true) => mk(KAtPoint::Zero, n - 2, n - 2, TableRow::TailOnly, false),
        (false, true, true) => mk(
            KAtPoint::Zero,
            1,
            0,
            TableRow::FirstTwoDerivativesZero,
            false,
        ),
        (true, false, true) => mk(
            KAtPoint::Undefined,
            n - 1,
            n - 1,
            TableRow::SimpleZeroTail,
            false,
        ),
        (true, true, true) => mk(KAtPoint::Undefined, 0, 1, TableRow::FullZero, false),
        (false, true, false) => mk(
            KAtPoint::Positive,
            1,
            0,
            TableRow::CriticalNondegenerate,
            false,
        ),
        (true, false, false) => mk(
            KAtPoint::Undefined,
            1,
            1,
            TableRow::SimpleZeroNondegenerate,
            false,
        ),
        (true, true, false) => mk(KAtPoint::Undefined, 1, 0, TableRow::DoubleZero, true),
        (false, false, false) => {
            return Err(ClassifyError::Unclassified(
                "regular point: the curvature sign is carried by alpha, not the zero profile"
                    .into(),
            ))
        }
    };
    Ok(pred)
}

/// Counts of sign-constant arcs of the Gaussian curvature on a circle.
#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    /// Smallest radius that produced the reported counts.
    pub radius: f64,
    pub sign_changes: usize,
    pub pos_arcs: usize,
    pub neg_arcs: usize,
    /// True when the two smallest radii agreed.
    pub stable: bool,
    /// Per-radius history `(radius, pos_arcs, neg_arcs)`, largest first.
    pub history: Vec<(f64, usize, usize)>,
}

/// Default census radii: geometric sequence from 0.1 downward.
pub fn default_radii() -> Vec<f64> {
    (0..6).map(|j| 0.1 * 0.5f64.powi(j)).collect()
}

const CENSUS_START_SAMPLES: usize = 720;
const CENSUS_MAX_SAMPLES: usize = 5760;
const AMBIGUOUS_REL: f64 = 1e-12;

/// Signs of the curvature (`-` numerator) at `m` equally spaced angles.
/// Samples within tolerance of a zero numerator are dropped.
fn circle_signs(
    f: &Expr,
    z0: Complex64,
    r: f64,
    m: usize,
    policy: &BranchPolicy,
) -> Result<(Vec<i8>, usize), EvalError> {
    let mut nums = Vec::with_capacity(m);
    for t in 0..m {
        let theta = TAU * t as f64 / m as f64;
        let z = z0 + Complex64::new(r * theta.cos(), r * theta.sin());
        nums.push(geometry::k_numerator(f, z, policy)?);
    }
    let scale = nums.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let mut signs = Vec::with_capacity(m);
    let mut ambiguous = 0;
    for v in nums {
        if v.abs() <= AMBIGUOUS_REL * scale {
            ambiguous += 1;
        } else {
            // K has the opposite sign of the numerator (positive formula
            // denominator)
            signs.push(if v > 0.0 { -1i8 } else { 1i8 });
        }
    }
    Ok((signs, ambiguous))
}

fn arcs_from_signs(signs: &[i8]) -> (usize, usize, usize) {
    let n = signs.len();
    let changes = (0..n)
        .filter(|&i| signs[i] != signs[(i + 1) % n])
        .count();
    if changes == 0 {
        if signs[0] > 0 {
            (1, 0, 0)
        } else {
            (0, 1, 0)
        }
    } else {
        // sectors alternate around the circle
        (changes / 2, changes / 2, changes)
    }
}

fn arcs_at_radius(
    f: &Expr,
    z0: Complex64,
    r: f64,
    policy: &BranchPolicy,
) -> Result<Option<(usize, usize, usize)>, EvalError> {
    let mut m = CENSUS_START_SAMPLES;
    loop {
        let (signs, ambiguous) = circle_signs(f, z0, r, m, policy)?;
        if ambiguous == 0 && !signs.is_empty() {
            return Ok(Some(arcs_from_signs(&signs)));
        }
        if m >= CENSUS_MAX_SAMPLES {
            // persistent near-zero samples at this radius
            return Ok(None);
        }
        m *= 2;
    }
}

/// Count positive/negative-curvature sectors on shrinking circles around an
/// isolated degeneracy of `f`.
pub fn census(
    f: &Expr,
    z0: Complex64,
    radii: &[f64],
    policy: &BranchPolicy,
) -> Result<CensusReport, ClassifyError> {
    let mut history: Vec<(f64, usize, usize)> = Vec::new();
    let mut changes_last = 0;
    for &r in radii {
        if let Some((pos, neg, changes)) = arcs_at_radius(f, z0, r, policy)? {
            history.push((r, pos, neg));
            changes_last = changes;
        }
    }
    if history.is_empty() {
        return Err(DegeneracyError(format!(
            "curvature numerator within tolerance of zero on every circle around {z0}"
        ))
        .into());
    }
    let last = *history.last().expect("nonempty history");
    let stable = history.len() >= 2 && {
        let prev = history[history.len() - 2];
        prev.1 == last.1 && prev.2 == last.2
    };
    Ok(CensusReport {
        radius: last.0,
        sign_changes: changes_last,
        pos_arcs: last.1,
        neg_arcs: last.2,
        stable,
        history,
    })
}

/// Angles (radians in `[0, 2pi)`) where the curvature numerator changes sign
/// on the circle of radius `r`, located at sample-midpoint resolution.
pub fn zero_crossing_angles(
    f: &Expr,
    z0: Complex64,
    r: f64,
    policy: &BranchPolicy,
) -> Result<Vec<f64>, ClassifyError> {
    let m = CENSUS_MAX_SAMPLES;
    let (signs, ambiguous) = circle_signs(f, z0, r, m, policy)?;
    if ambiguous > 0 || signs.is_empty() {
        return Err(DegeneracyError("ambiguous samples on the crossing circle".into()).into());
    }
    let n = signs.len();
    let step = TAU / n as f64;
    Ok((0..n)
        .filter(|&i| signs[i] != signs[(i + 1) % n])
        .map(|i| (i as f64 + 0.5) * step)
        .collect())
}

/// Sign of the mean curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HSign {
    Positive,
    Zero,
    Negative,
    Undefined,
}

/// The matched mean-curvature row and its verdict.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "row", rename_all = "kebab-case")]
pub enum MeanCurvatureRow {
    /// F, F', F'' all nonzero: H's sign flips with
    /// `Re(FF''/F'^2)` against `1 - 1/|F'|^2`.
    Generic {
        re_w: f64,
        threshold: f64,
        h_sign: HSign,
    },
    /// F, F' nonzero, F'' = 0: sign of `|F'| - 1` decides.
    NoSecondDerivative { grad_sq: f64, h_sign: HSign },
    /// F nonzero, F' = 0, F'' nonzero: H = 0.
    CriticalPoint,
    /// F nonzero, F' = F'' = 0: H = 0.
    HigherCritical,
    /// F = 0, F' nonzero: cone point, H undefined.
    ConePoint,
    /// F = F' = 0, F'' nonzero: smooth double zero; H = -|F''| < 0.
    /// (Not present in the printed taxonomy.)
    DoubleZeroSmooth { h_value: f64 },
    /// F = F' = F'' = 0: H = 0.
    AllVanish,
    /// `|F'| = 1`: the mean-curvature denominator vanishes.
    LightlikeDegenerate,
}

impl MeanCurvatureRow {
    pub fn h_sign(&self) -> HSign {
        match self {
            MeanCurvatureRow::Generic { h_sign, .. }
            | MeanCurvatureRow::NoSecondDerivative { h_sign, .. } => *h_sign,
            MeanCurvatureRow::CriticalPoint
            | MeanCurvatureRow::HigherCritical
            | MeanCurvatureRow::AllVanish => HSign::Zero,
            MeanCurvatureRow::ConePoint | MeanCurvatureRow::LightlikeDegenerate => {
                HSign::Undefined
            }
            MeanCurvatureRow::DoubleZeroSmooth { .. } => HSign::Negative,
        }
    }
}

/// Match a point to its mean-curvature row. Every zero pattern matches one.
pub fn mean_curvature_row(
    f: &Expr,
    z0: Complex64,
    policy: &BranchPolicy,
) -> Result<MeanCurvatureRow, EvalError> {
    let jet = eval_jet(f, z0, 2, policy)?;
    let f0 = jet.derivative(0);
    let f1 = jet.derivative(1);
    let f2 = jet.derivative(2);
    let scale = [f0, f1, f2].iter().map(|v| v.norm()).fold(1.0, f64::max);
    let z = |v: Complex64| v.norm() <= DEFAULT_ZERO_TOL * scale;
    let grad_sq = f1.norm_sqr();
    let lightlike = (grad_sq - 1.0).abs() <= geometry::LIGHTLIKE_BAND;

    Ok(match (z(f0), z(f1), z(f2)) {
        (false, false, false) => {
            if lightlike {
                MeanCurvatureRow::LightlikeDegenerate
            } else {
                let re_w = ((f0 * f2) / (f1 * f1)).re;
                let threshold = 1.0 - 1.0 / grad_sq;
                let bracket = 1.0 - grad_sq * (1.0 - re_w);
                let h_sign = if bracket.abs() <= 1e-12 * (1.0 + grad_sq * (1.0 + re_w.abs())) {
                    HSign::Zero
                } else if bracket > 0.0 {
                    HSign::Negative
                } else {
                    HSign::Positive
                };
                MeanCurvatureRow::Generic {
                    re_w,
                    threshold,
                    h_sign,
                }
            }
        }
        (false, false, true) => {
            if lightlike {
                MeanCurvatureRow::LightlikeDegenerate
            } else {
                let h_sign = if grad_sq > 1.0 {
                    HSign::Positive
                } else {
                    HSign::Negative
                };
                MeanCurvatureRow::NoSecondDerivative { grad_sq, h_sign }
            }
        }
        (false, true, false) => MeanCurvatureRow::CriticalPoint,
        (false, true, true) => MeanCurvatureRow::HigherCritical,
        (true, false, _) => MeanCurvatureRow::ConePoint,
        (true, true, false) => MeanCurvatureRow::DoubleZeroSmooth {
            h_value: -f2.norm(),
        },
        (true, true, true) => MeanCurvatureRow::AllVanish,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::jet::zero_profile;

    const P: BranchPolicy = BranchPolicy::Principal;

    fn profile(src: &str) -> ZeroProfile {
        zero_profile(
            &parse(src).unwrap(),
            Complex64::new(0.0, 0.0),
            8,
            DEFAULT_ZERO_TOL,
            &P,
        )
        .unwrap()
    }

    #[test]
    fn predictions_match_the_taxonomy() {
        let p = predict(&profile("1+z+z^4")).unwrap();
        assert_eq!(
            (p.k_at_point, p.n_plus, p.n_minus, p.zero_curves),
            (KAtPoint::Zero, 2, 2, 4)
        );

        let p = predict(&profile("1+z^3")).unwrap();
        assert_eq!((p.k_at_point, p.n_plus, p.n_minus), (KAtPoint::Zero, 1, 0));
        assert_eq!(p.zero_curves, 0);

        let p = predict(&profile("z+z^3")).unwrap();
        assert_eq!(
            (p.k_at_point, p.n_plus, p.n_minus, p.zero_curves),
            (KAtPoint::Undefined, 2, 2, 4)
        );

        let p = predict(&profile("z^3")).unwrap();
        assert_eq!((p.k_at_point, p.n_plus, p.n_minus), (KAtPoint::Undefined, 0, 1));

        let p = predict(&profile("z^2")).unwrap();
        assert_eq!(p.source, TableRow::DoubleZero);
        assert!(p.disputed);

        assert!(matches!(
            predict(&profile("z+1")),
            Err(ClassifyError::Unclassified(_))
        ));
        assert!(matches!(
            predict(&profile("exp(z)")),
            Err(ClassifyError::Unclassified(_))
        ));
    }

    #[test]
    fn census_counts_sectors() {
        let radii = default_radii();
        let origin = Complex64::new(0.0, 0.0);

        let r = census(&parse("1+z+z^4").unwrap(), origin, &radii, &P).unwrap();
        assert!(r.stable);
        assert_eq!((r.pos_arcs, r.neg_arcs, r.sign_changes), (2, 2, 4));

        let r = census(&parse("z+z^3").unwrap(), origin, &radii, &P).unwrap();
        assert_eq!((r.pos_arcs, r.neg_arcs), (2, 2));

        let r = census(&parse("1+z^3").unwrap(), origin, &radii, &P).unwrap();
        assert_eq!((r.pos_arcs, r.neg_arcs, r.sign_changes), (1, 0, 0));
    }

    #[test]
    fn census_of_a_flat_function_is_degenerate() {
        // a constant has an identically zero curvature numerator: every
        // circle sample is ambiguous at every radius
        let err = census(
            &parse("3").unwrap(),
            Complex64::new(0.0, 0.0),
            &default_radii(),
            &P,
        )
        .unwrap_err();
        assert!(matches!(err, ClassifyError::Degenerate(_)));
    }

    #[test]
    fn census_of_the_disputed_row_sides_with_the_limit() {
        let r = census(
            &parse("z^2").unwrap(),
            Complex64::new(0.0, 0.0),
            &default_radii(),
            &P,
        )
        .unwrap();
        assert_eq!((r.pos_arcs, r.neg_arcs), (0, 1));
    }

    #[test]
    fn mean_curvature_rows() {
        let origin = Complex64::new(0.0, 0.0);
        let r = mean_curvature_row(&parse("0.5*z+1").unwrap(), origin, &P).unwrap();
        match r {
            MeanCurvatureRow::NoSecondDerivative { h_sign, .. } => {
                assert_eq!(h_sign, HSign::Negative)
            }
            other => panic!("wrong row: {other:?}"),
        }

        let r = mean_curvature_row(&parse("1+z^2").unwrap(), origin, &P).unwrap();
        assert!(matches!(r, MeanCurvatureRow::CriticalPoint));
        assert_eq!(r.h_sign(), HSign::Zero);

        let r = mean_curvature_row(&parse("z").unwrap(), origin, &P).unwrap();
        assert!(matches!(r, MeanCurvatureRow::ConePoint));
        assert_eq!(r.h_sign(), HSign::Undefined);

        // generic row agrees with the sampled mean curvature
        let z = Complex64::new(0.3, -0.2);
        let e = parse("exp(z)*(1+0.25*z^2)").unwrap();
        let row = mean_curvature_row(&e, z, &P).unwrap();
        let s = geometry::sample_point(&e, z, &P).unwrap();
        match (row.h_sign(), s.h_mean) {
            (HSign::Negative, Some(h)) => assert!(h < 0.0),
            (HSign::Positive, Some(h)) => assert!(h > 0.0),
            (HSign::Zero, Some(h)) => assert!(h.abs() < 1e-10),
            other => panic!("inconsistent row/sample: {other:?}"),
        }
    }
}
