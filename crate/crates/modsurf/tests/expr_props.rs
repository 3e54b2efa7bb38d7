//! Property tests for the expression language: print/parse round-trip on
//! randomized trees and parser totality on arbitrary input.

use modsurf::expr::{parse, Expr, Func};
use num_complex::Complex64;
use proptest::prelude::*;

fn finite_component() -> impl Strategy<Value = f64> {
    prop_oneof![
        (-10.0..10.0f64),
        Just(0.0),
        Just(1.0),
        Just(-1.0),
        Just(0.5),
        (-1e6..1e6f64),
    ]
}

fn literal() -> impl Strategy<Value = Complex64> {
    (finite_component(), finite_component()).prop_map(|(re, im)| Complex64::new(re, im))
}

fn func() -> impl Strategy<Value = Func> {
    prop_oneof![
        Just(Func::Exp),
        Just(Func::Log),
        Just(Func::Sqrt),
        Just(Func::Sin),
        Just(Func::Cos),
        Just(Func::Sinh),
        Just(Func::Cosh),
    ]
}

/// Trees in parser-canonical form: the parser folds negation and addition
/// of constant pairs, so the generator never produces those shapes.
fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        Just(Expr::Var),
        literal().prop_map(Expr::constant),
    ];
    leaf.prop_recursive(6, 64, 8, |inner| {
        let not_const = |e: &Expr| !matches!(e, Expr::Const(_));
        let pair = (inner.clone(), inner.clone());
        prop_oneof![
            inner
                .clone()
                .prop_filter("negation of a constant folds", not_const)
                .prop_map(Expr::neg),
            pair.clone()
                .prop_filter("constant sums fold", |(a, b)| {
                    !(matches!(a, Expr::Const(_)) && matches!(b, Expr::Const(_)))
                })
                .prop_map(|(a, b)| Expr::add(a, b)),
            pair.clone()
                .prop_filter("constant differences fold", |(a, b)| {
                    !(matches!(a, Expr::Const(_)) && matches!(b, Expr::Const(_)))
                })
                .prop_map(|(a, b)| Expr::sub(a, b)),
            pair.clone().prop_map(|(a, b)| Expr::mul(a, b)),
            pair.prop_map(|(a, b)| Expr::div(a, b)),
            (inner.clone(), -9i32..9).prop_map(|(b, n)| Expr::pow_int(b, n)),
            (inner.clone(), literal()).prop_map(|(b, c)| Expr::Pow(b.into(), c)),
            (func(), inner).prop_map(|(f, a)| Expr::app(f, a)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn print_parse_round_trip(e in expr_tree()) {
        let text = e.to_string();
        let back = parse(&text)
            .unwrap_or_else(|d| panic!("printed form {text:?} failed to parse: {d}"));
        prop_assert_eq!(back, e);
    }

    #[test]
    fn parser_never_panics_on_ascii(s in "[ -~]{0,64}") {
        let _ = parse(&s);
    }

    #[test]
    fn parser_never_panics_on_unicode(s in "\\PC{0,32}") {
        let _ = parse(&s);
    }

    #[test]
    fn parse_is_idempotent_through_printing(e in expr_tree()) {
        let once = parse(&e.to_string()).unwrap();
        let twice = parse(&once.to_string()).unwrap();
        prop_assert_eq!(once, twice);
    }
}
