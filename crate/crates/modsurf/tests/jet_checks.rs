//! Cross-validation of the jet recurrences against the contour-integral
//! oracle, and the algebraic structure of jet arithmetic.

mod common;

use common::{corpus, rand_in, rng, PRINCIPAL};
use modsurf::expr::Expr;
use modsurf::jet::{eval_jet, fd_oracle};
use num_complex::Complex64;
use rand::RngCore;

#[test]
fn jets_agree_with_the_contour_oracle() {
    let mut r = rng(0x4a3f);
    for entry in corpus() {
        let mut checked = 0;
        let mut attempts = 0;
        while checked < 50 && attempts < 500 {
            attempts += 1;
            let z = rand_in(&mut r, entry.window);
            let Ok(jet) = eval_jet(&entry.expr, z, 3, &PRINCIPAL) else {
                continue;
            };
            for j in 0..=3 {
                let Ok(oracle) = fd_oracle(&entry.expr, z, j) else {
                    continue;
                };
                let diff = (jet.derivative(j) - oracle).norm();
                assert!(
                    diff <= 1e-7 * (1.0 + oracle.norm()),
                    "{} at {z}, order {j}: jet {} vs oracle {} (diff {diff:.3e})",
                    entry.text,
                    jet.derivative(j),
                    oracle
                );
            }
            checked += 1;
        }
        assert!(checked == 50, "{}: only {checked} points sampled", entry.text);
    }
}

#[test]
fn jet_evaluation_is_linear() {
    let mut r = rng(0x11c1);
    let entries = corpus();
    let box_small = modsurf::geometry::Rect::centered_square(0.3);
    // members whose windows all cover the small box
    let usable = [0usize, 1, 2, 4, 5, 7];
    for _ in 0..40 {
        let e1 = &entries[usable[(r.next_u32() as usize) % usable.len()]];
        let e2 = &entries[usable[(r.next_u32() as usize) % usable.len()]];
        let a = rand_in(&mut r, box_small);
        let b = rand_in(&mut r, box_small);
        let z = rand_in(&mut r, box_small);
        let combo = Expr::add(
            Expr::mul(Expr::constant(a), e1.expr.clone()),
            Expr::mul(Expr::constant(b), e2.expr.clone()),
        );
        let j = eval_jet(&combo, z, 4, &PRINCIPAL).unwrap();
        let j1 = eval_jet(&e1.expr, z, 4, &PRINCIPAL).unwrap();
        let j2 = eval_jet(&e2.expr, z, 4, &PRINCIPAL).unwrap();
        let lin = j1.scale(a).add(&j2.scale(b));
        for (x, y) in j.coeffs().iter().zip(lin.coeffs()) {
            assert!(
                (x - y).norm() <= 1e-12 * (1.0 + y.norm()),
                "linearity violated: {x} vs {y}"
            );
        }
    }
}

#[test]
fn product_jets_are_cauchy_products() {
    let mut r = rng(0x7e1b);
    let entries = corpus();
    let box_small = modsurf::geometry::Rect::centered_square(0.3);
    let usable = [1usize, 2, 4, 5, 7];
    for _ in 0..40 {
        let e1 = &entries[usable[(r.next_u32() as usize) % usable.len()]];
        let e2 = &entries[usable[(r.next_u32() as usize) % usable.len()]];
        let z = rand_in(&mut r, box_small);
        let product = Expr::mul(e1.expr.clone(), e2.expr.clone());
        let j = eval_jet(&product, z, 5, &PRINCIPAL).unwrap();
        let structural = eval_jet(&e1.expr, z, 5, &PRINCIPAL)
            .unwrap()
            .mul(&eval_jet(&e2.expr, z, 5, &PRINCIPAL).unwrap());
        for (x, y) in j.coeffs().iter().zip(structural.coeffs()) {
            assert!((x - y).norm() <= 1e-13 * (1.0 + y.norm()));
        }
    }
}

#[test]
fn anchored_branch_reproduces_the_worked_value() {
    // F(0) = (-1/2)^(2/3), principal value, via the anchored policy
    let e = modsurf::parse("((z-1)/(z+2))^(0.6666666666666666)").unwrap();
    let anchor = Complex64::new(-0.5, 0.0).powc(Complex64::new(2.0 / 3.0, 0.0));
    let policy = modsurf::BranchPolicy::anchored(Complex64::new(0.0, 0.0), anchor);
    let jet = eval_jet(&e, Complex64::new(0.0, 0.0), 2, &policy).unwrap();
    assert!((jet.value() - anchor).norm() < 1e-12);
}
