mod common;

use common::*;
use proptest::prelude::*;
use torint::constructions::{
    first_integral_from_pair, pair_class, symmetry_from_one_form, ConstructionOptions, PairClass,
};
use torint::expr::Expr;
use torint::flow::{drift_check, integrate};
use torint::fourier::Grid2;
use torint::geometry::{
    lie_bracket, lie_derivative_scalar, FiberedSystem, OneForm2, VectorField2, VolumeForm2,
};
use torint::search::drift_seeds;

fn opts() -> ConstructionOptions {
    ConstructionOptions {
        grid: 32,
        ..Default::default()
    }
}

/// Trig polynomial in `u = p x + q y` alone, shifted to be at least `floor`
/// when `floor` is given.
fn in_u(p: i32, q: i32, c0: f64, m: &[(i32, f64, f64)], floor: Option<f64>) -> Expr {
    let amp: f64 = m.iter().map(|(_, a, b)| a.abs() + b.abs()).sum();
    let s = if floor.is_some() { 0.5 / amp.max(1e-12) } else { 1.0 };
    let modes: Vec<Mode> = m.iter().map(|&(k, a, b)| (k * p, k * q, a * s, b * s)).collect();
    trig(floor.map_or(c0, |f| f + 0.5), &modes)
}

fn u_modes() -> impl Strategy<Value = Vec<(i32, f64, f64)>> {
    prop::collection::vec((1..=3i32, -1.0..1.0f64, -1.0..1.0f64), 1..=3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    /// `X = (a d_x + b d_y) / rho` preserves `rho dx^dy`, and `d phi(b x - a y)`
    /// plus any multiple of `i_X mu = a dy - b dx` is invariant.
    #[test]
    fn one_form_symmetry_commutes(
        a in 1..=3i32,
        b in 1..=3i32,
        rho_modes in modes(2, 3),
        phi in u_modes(),
        s in -1.0..1.0f64,
    ) {
        let amp: f64 = rho_modes.iter().map(|(_, _, p, q)| p.abs() + q.abs()).sum();
        let k = 0.5 / amp.max(1e-12);
        let scaled: Vec<Mode> = rho_modes.iter().map(|&(j, l, p, q)| (j, l, p * k, q * k)).collect();
        let rho = trig(1.5, &scaled);
        let x = VectorField2::new(Expr::num(a as f64) / rho.clone(), Expr::num(b as f64) / rho.clone());
        let f = in_u(b, -a, 0.0, &phi, None);
        let alpha = OneForm2::new(f.dx(), f.dy()).plus(&OneForm2::new(
            Expr::num(-(b as f64) * s),
            Expr::num(a as f64 * s),
        ));
        let sys = FiberedSystem::on_torus(x);
        let out = symmetry_from_one_form(&sys, &alpha, &VolumeForm2::new(rho), &opts()).unwrap();
        for h in &out.hypotheses {
            if h.name.starts_with("L_X") {
                prop_assert!(h.value <= 1e-10, "{h:?}");
            }
        }
        let r = out.residual("[X,Y] = 0").unwrap();
        prop_assert!(r.value <= 1e-8, "{r:?}");
    }

    #[test]
    fn lie_point_bracket_identities(x in field(2), y in field(2), h in poly(2)) {
        let g = grid(16);
        // [X, X + hY] = X(h) Y + h [X,Y]
        let lhs = lie_bracket(&x, &x.plus(&y.scaled(&h)));
        let xh = lie_derivative_scalar(&x, &h);
        let rhs = y.scaled(&xh).plus(&lie_bracket(&x, &y).scaled(&h));
        prop_assert!(sup_field(&g, &lhs.minus(&rhs)) <= 1e-11);
        // [X, hX + Y] = X(h) X + [X,Y]
        let lhs = lie_bracket(&x, &x.scaled(&h).plus(&y));
        let rhs = x.scaled(&xh).plus(&lie_bracket(&x, &y));
        prop_assert!(sup_field(&g, &lhs.minus(&rhs)) <= 1e-11);
    }

    #[test]
    fn constant_pairs_are_never_circle_only(a in -2.0..2.0f64, b in 0.5..2.0f64, c in -2.0..2.0f64) {
        // X = a d_x + b d_y and Y = d_x + c d_y commute
        prop_assume!((a * c - b).abs() > 0.1);
        let x = VectorField2::new(Expr::num(a), Expr::num(b));
        let y = VectorField2::new(Expr::one(), Expr::num(c));
        let out = first_integral_from_pair(
            &FiberedSystem::on_torus(x),
            &y,
            &VolumeForm2::standard(),
            None,
            &opts(),
        )
        .unwrap();
        prop_assert!(out.pass());
        prop_assert_eq!(pair_class(&out), Some(PairClass::BOnT2));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    /// `X = F(x - y)(d_x + d_y)` and `Y = d_x` preserve `dx^dy` with
    /// `[X,Y] = -(F'/F) X`; the pair integral is conserved along the flow.
    #[test]
    fn pair_integral_is_conserved(m in u_modes()) {
        let f = in_u(1, -1, 0.0, &m, Some(1.0));
        let x = VectorField2::new(f.clone(), f);
        let sys = FiberedSystem::on_torus(x.clone());
        let out = first_integral_from_pair(&sys, &VectorField2::d_x(), &VolumeForm2::standard(), None, &opts())
            .unwrap();
        prop_assert!(out.pass(), "{out:?}");
        prop_assert_eq!(pair_class(&out), Some(PairClass::BOnS1));
        let i = out.integral().unwrap().clone();
        let g = Grid2::new(32).unwrap();
        for p in drift_seeds(10) {
            let traj = integrate(&x, &[], p, 100.0, 1e-10).unwrap();
            let d = drift_check(&i, &traj, &g).unwrap();
            prop_assert!(d <= 1e-5, "{d}");
        }
    }
}
