//! Random trigonometric polynomials shared by the property suites.
#![allow(dead_code)]

use proptest::prelude::*;
use torint::expr::Expr;
use torint::fourier::Grid2;
use torint::geometry::{FiberGrid, OneForm2, VectorField2};

/// `(j, k, a, b)` stands for `a cos(jx + ky) + b sin(jx + ky)`.
pub type Mode = (i32, i32, f64, f64);

pub fn trig(c0: f64, modes: &[Mode]) -> Expr {
    let mut e = Expr::num(c0);
    for &(j, k, a, b) in modes {
        let phase = Expr::num(j as f64) * Expr::x() + Expr::num(k as f64) * Expr::y();
        e = e + Expr::num(a) * phase.clone().cos() + Expr::num(b) * phase.sin();
    }
    e
}

pub fn modes(degree: i32, max_terms: usize) -> impl Strategy<Value = Vec<Mode>> {
    prop::collection::vec(
        (-degree..=degree, -degree..=degree, -1.0..1.0f64, -1.0..1.0f64),
        1..=max_terms,
    )
}

pub fn poly(degree: i32) -> impl Strategy<Value = Expr> {
    (-1.0..1.0f64, modes(degree, 3)).prop_map(|(c, m)| trig(c, &m))
}

/// A trig polynomial bounded below by `floor`: the constant dominates the modes.
pub fn positive_poly(degree: i32, floor: f64) -> impl Strategy<Value = Expr> {
    modes(degree, 3).prop_map(move |m| {
        let amp: f64 = m.iter().map(|(_, _, a, b)| a.abs() + b.abs()).sum();
        let s = 0.5 / amp.max(1e-12);
        let scaled: Vec<Mode> = m.iter().map(|&(j, k, a, b)| (j, k, a * s, b * s)).collect();
        trig(floor + 0.5, &scaled)
    })
}

pub fn field(degree: i32) -> impl Strategy<Value = VectorField2> {
    (poly(degree), poly(degree)).prop_map(|(a, b)| VectorField2::new(a, b))
}

pub fn form(degree: i32) -> impl Strategy<Value = OneForm2> {
    (poly(degree), poly(degree)).prop_map(|(a, b)| OneForm2::new(a, b))
}

pub fn grid(n: usize) -> FiberGrid {
    FiberGrid::new(Grid2::new(n).unwrap(), &[])
}

pub fn sup(g: &FiberGrid, e: &Expr) -> f64 {
    g.sup_norm(e).unwrap()
}

pub fn sup_field(g: &FiberGrid, v: &VectorField2) -> f64 {
    g.sup_norm_field(v).unwrap()
}

pub fn sup_form(g: &FiberGrid, a: &OneForm2) -> f64 {
    g.sup_norm_form(a).unwrap()
}
