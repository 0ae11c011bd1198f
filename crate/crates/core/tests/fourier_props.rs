mod common;

use std::collections::BTreeMap;

use common::*;
use faer::Mat;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use torint::expr::Expr;
use torint::fourier::{
    advection_matrix, kernel_of_matrix, multiply, sample_to_grid, spectral_derivative, Axis, Grid2,
};

const N: usize = 16;

/// Exact complex coefficients of a list of real modes.
fn coefficients(c0: f64, modes: &[Mode]) -> BTreeMap<(i64, i64), Complex64> {
    let mut out = BTreeMap::new();
    *out.entry((0, 0)).or_insert(Complex64::new(0.0, 0.0)) += c0;
    for &(j, k, a, b) in modes {
        let (j, k) = (j as i64, k as i64);
        *out.entry((j, k)).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(a, -b) * 0.5;
        *out.entry((-j, -k)).or_insert(Complex64::new(0.0, 0.0)) += Complex64::new(a, b) * 0.5;
    }
    out
}

fn convolve(
    f: &BTreeMap<(i64, i64), Complex64>,
    g: &BTreeMap<(i64, i64), Complex64>,
) -> BTreeMap<(i64, i64), Complex64> {
    let mut out = BTreeMap::new();
    for (&(j1, k1), a) in f {
        for (&(j2, k2), b) in g {
            *out.entry((j1 + j2, k1 + k2)).or_insert(Complex64::new(0.0, 0.0)) += a * b;
        }
    }
    out
}

fn shifted(c0: f64, modes: &[Mode], s: f64, t: f64) -> Expr {
    let mut e = Expr::num(c0);
    for &(j, k, a, b) in modes {
        let phase = Expr::num(j as f64) * (Expr::x() + Expr::num(s))
            + Expr::num(k as f64) * (Expr::y() + Expr::num(t));
        e = e + Expr::num(a) * phase.clone().cos() + Expr::num(b) * phase.sin();
    }
    e
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn transform_round_trip(c0 in -1.0..1.0f64, m in modes(7, 6)) {
        let g = Grid2::new(N).unwrap();
        let e = trig(c0, &m);
        let values = g.sample(&e, &[]).unwrap();
        let back = sample_to_grid(&e, &[], &g).unwrap().to_grid(N);
        let norm = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let err = values.iter().zip(&back).fold(0.0f64, |a, (u, v)| a.max((u - v).abs()));
        prop_assert!(err <= 1e-12 * norm.max(1e-300), "{err}");
    }

    #[test]
    fn derivative_commutes_with_translation(
        c0 in -1.0..1.0f64,
        m in modes(6, 5),
        s in 0.0..6.3f64,
        t in 0.0..6.3f64,
    ) {
        let g = Grid2::new(N).unwrap();
        let f = sample_to_grid(&trig(c0, &m), &[], &g).unwrap();
        let tf = sample_to_grid(&shifted(c0, &m, s, t), &[], &g).unwrap();
        for axis in [Axis::X, Axis::Y] {
            let d_tf = spectral_derivative(&tf, axis).to_grid(N);
            let df = spectral_derivative(&f, axis);
            for (i, (x, y)) in g.nodes().enumerate() {
                let expect = df.eval(x + s, y + t).re;
                prop_assert!((d_tf[i] - expect).abs() <= 1e-11, "{} vs {}", d_tf[i], expect);
            }
        }
    }

    #[test]
    fn product_matches_hand_expansion(
        c1 in -1.0..1.0f64,
        m1 in modes(4, 4),
        c2 in -1.0..1.0f64,
        m2 in modes(4, 4),
    ) {
        let g = Grid2::new(N).unwrap();
        let f = sample_to_grid(&trig(c1, &m1), &[], &g).unwrap();
        let h = sample_to_grid(&trig(c2, &m2), &[], &g).unwrap();
        let p = multiply(&f, &h);
        let exact = convolve(&coefficients(c1, &m1), &coefficients(c2, &m2));
        let b = p.band() as i64;
        for j in -b..=b {
            for k in -b..=b {
                let want = exact.get(&(j, k)).copied().unwrap_or(Complex64::new(0.0, 0.0));
                prop_assert!((p.coeff(j, k) - want).norm() <= 1e-12, "({j},{k})");
            }
        }
    }

    #[test]
    fn constant_advection_is_diagonal(a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = Grid2::new(16).unwrap();
        let op = advection_matrix([&Expr::num(a), &Expr::num(b)], &[], &g, 6).unwrap();
        let mat = op.matrix();
        for j in -6..=6i64 {
            for k in -6..=6i64 {
                let c = op.trial_index(0, j, k);
                for r in 0..mat.nrows() {
                    let want = if r == op.test_index(0, j, k) {
                        Complex64::new(0.0, a * j as f64 + b * k as f64)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    prop_assert!((mat[(r, c)] - want).norm() <= 1e-13);
                }
            }
        }
    }
}

fn orthogonal(n: usize, rng: &mut ChaCha8Rng) -> Mat<f64> {
    let g = Mat::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().compute_Q()
}

/// `U diag(s) V^T` with `nullity` planted zero singular values.
fn planted(rows: usize, cols: usize, nullity: usize, rng: &mut ChaCha8Rng) -> (Mat<f64>, Mat<f64>) {
    let u = orthogonal(rows, rng);
    let v = orthogonal(cols, rng);
    let rank = cols - nullity;
    let s: Vec<f64> = (0..rank).map(|_| rng.gen_range(0.1..10.0)).collect();
    let a = Mat::<f64>::from_fn(rows, cols, |i, j| {
        (0..rank).map(|r| u[(i, r)] * s[r] * v[(j, r)]).sum()
    });
    (a, v)
}

#[test]
fn kernel_recovers_planted_nullities() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..20 {
        let cols = rng.gen_range(8..40);
        let rows = cols + rng.gen_range(0..10);
        let nullity = rng.gen_range(0..cols.min(8));
        let (a, v) = planted(rows, cols, nullity, &mut rng);
        let rep = kernel_of_matrix(a.as_ref(), &[], 1e-10).unwrap();
        assert_eq!(rep.dimension, nullity, "case {case}");
        // each planted null vector lies in the returned span
        for c in cols - nullity..cols {
            let mut rest: Vec<f64> = (0..cols).map(|i| v[(i, c)]).collect();
            for b in &rep.basis {
                let d: f64 = b.iter().zip(&rest).map(|(p, q)| p * q).sum();
                rest.iter_mut().zip(b).for_each(|(r, p)| *r -= d * p);
            }
            let res = rest.iter().map(|r| r * r).sum::<f64>().sqrt();
            assert!(res <= 1e-10, "case {case}: {res}");
        }
    }
}
