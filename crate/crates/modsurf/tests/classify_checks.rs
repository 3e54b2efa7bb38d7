//! Prediction-vs-census consistency for the local taxonomy, the disputed
//! double-zero row, and equispacing of the zero-curvature directions.

mod common;

use common::PRINCIPAL;
use modsurf::classify::{census, default_radii, predict, zero_crossing_angles, TableRow};
use modsurf::geometry::sample_point;
use modsurf::jet::{zero_profile, DEFAULT_ZERO_TOL};
use modsurf::parse;
use num_complex::Complex64;
use std::f64::consts::TAU;

const ORIGIN: Complex64 = Complex64::new(0.0, 0.0);

fn profile_of(src: &str) -> modsurf::ZeroProfile {
    zero_profile(&parse(src).unwrap(), ORIGIN, 10, DEFAULT_ZERO_TOL, &PRINCIPAL).unwrap()
}

#[test]
fn census_counts_match_predictions() {
    // every taxonomy member with at least two sectors, except the disputed
    // double-zero row which is covered by its own witness below
    let cases = [
        "1+z+z^4", "1+z+z^5", "1+z^3", "z+z^3", "z+z^4", "z^3", "z^4", "1+z^2", "z+z^2",
    ];
    for src in cases {
        let e = parse(src).unwrap();
        let pred = predict(&profile_of(src)).unwrap();
        assert_ne!(pred.source, TableRow::DoubleZero);
        let c = census(&e, ORIGIN, &default_radii(), &PRINCIPAL).unwrap();
        assert!(c.stable, "{src}: census unstable: {:?}", c.history);
        assert_eq!(
            (c.pos_arcs, c.neg_arcs),
            (pred.n_plus, pred.n_minus),
            "{src}: census {:?} disagrees with prediction {:?}",
            (c.pos_arcs, c.neg_arcs),
            (pred.n_plus, pred.n_minus)
        );
    }
}

#[test]
fn double_zero_witness_sides_with_the_square_root_limit() {
    // the printed row says one positive sector; the limit value
    // K -> -4|f'|^4 = -4 and the circle census both say negative
    let e = parse("z^2").unwrap();
    let pred = predict(&profile_of("z^2")).unwrap();
    assert_eq!(pred.source, TableRow::DoubleZero);
    assert!(pred.disputed);
    assert_eq!((pred.n_plus, pred.n_minus), (1, 0)); // as printed

    let c = census(&e, ORIGIN, &default_radii(), &PRINCIPAL).unwrap();
    assert_eq!((c.pos_arcs, c.neg_arcs), (0, 1));

    let s = sample_point(&e, ORIGIN, &PRINCIPAL).unwrap();
    assert!((s.k.defined().unwrap() + 4.0).abs() < 1e-9);
}

#[test]
fn zero_curves_are_equispaced() {
    for (src, n) in [("1+z+z^4", 4usize), ("1+z+z^5", 5)] {
        let e = parse(src).unwrap();
        let expected_gap = TAU / (2 * n - 4) as f64;
        let angles = zero_crossing_angles(&e, ORIGIN, 0.01, &PRINCIPAL).unwrap();
        assert_eq!(angles.len(), 2 * n - 4, "{src}: wrong crossing count");
        for w in 0..angles.len() {
            let next = angles[(w + 1) % angles.len()];
            let gap = if w + 1 == angles.len() {
                next + TAU - angles[w]
            } else {
                next - angles[w]
            };
            assert!(
                (gap - expected_gap).abs() <= 0.1 * expected_gap,
                "{src}: gap {gap} vs expected {expected_gap}"
            );
        }
    }
}
