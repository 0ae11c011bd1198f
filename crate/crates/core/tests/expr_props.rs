use proptest::prelude::*;
use torint::expr::{parse, Expr, Point};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0.0..10.0f64).prop_map(|v| Expr::num((v * 100.0).round() / 100.0)),
        Just(Expr::x()),
        Just(Expr::y()),
        Just(Expr::fiber(0)),
        Just(parse("pi", 0).unwrap()),
        Just(parse("sqrt2", 0).unwrap()),
    ]
}

/// Arbitrary trees, including ones whose evaluation may fail.
fn any_expr() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / b),
            (inner.clone(), 0..4i32).prop_map(|(a, n)| a.powi(n)),
            inner.clone().prop_map(|a| -a),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(Expr::exp),
            inner.prop_map(Expr::sqrt),
        ]
    })
}

/// Smooth and bounded on the torus, so finite differences are well conditioned.
fn smooth() -> impl Strategy<Value = Expr> {
    let base = prop_oneof![
        (-2.0..2.0f64).prop_map(Expr::num),
        Just(Expr::x()),
        Just(Expr::y()),
    ];
    base.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            inner.clone().prop_map(Expr::sin),
            inner.clone().prop_map(Expr::cos),
            inner.clone().prop_map(|a| a.sin().exp()),
            inner.clone().prop_map(|a| Expr::one() / (Expr::num(2.0) + a.cos())),
            inner.prop_map(|a| (Expr::num(2.0) + a.sin()).sqrt()),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn print_parse_round_trip(e in any_expr()) {
        let once = parse(&e.to_string(), 1).unwrap();
        let twice = parse(&once.to_string(), 1).unwrap();
        prop_assert_eq!(&once, &twice);
        prop_assert_eq!(once.to_string(), twice.to_string());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn derivatives_match_central_differences(
        e in smooth(),
        x in 0.0..6.283f64,
        y in 0.0..6.283f64,
    ) {
        let h = 1e-5;
        let at = |x: f64, y: f64| e.eval(&Point::new(&[], x, y)).unwrap();
        let p = Point::new(&[], x, y);
        let fd_x = (at(x + h, y) - at(x - h, y)) / (2.0 * h);
        let fd_y = (at(x, y + h) - at(x, y - h)) / (2.0 * h);
        let dx = e.dx().eval(&p).unwrap();
        let dy = e.dy().eval(&p).unwrap();
        prop_assert!((dx - fd_x).abs() <= 1e-7, "{e}: {dx} vs {fd_x}");
        prop_assert!((dy - fd_y).abs() <= 1e-7, "{e}: {dy} vs {fd_y}");
    }
}
