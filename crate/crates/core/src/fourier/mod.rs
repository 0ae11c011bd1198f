//! Truncated Fourier series on the 2-torus.
//!
//! A [`SpectralField`] stores the complex coefficients `c[j,k]` of
//! `f(x, y) = sum c[j,k] exp(i(jx + ky))` for `|j|, |k| <= band`. Fields
//! sampled from an `N x N` grid carry `band = N/2`, with the Nyquist
//! coefficient split evenly between `+N/2` and `-N/2` so that real data
//! keep exact conjugate symmetry.

mod galerkin;
mod kernel;

use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use thiserror::Error;

use crate::expr::{EvalError, Expr, Point};

pub use galerkin::{advection_matrix, GalerkinOperator, RealBasis, Term, TrialOp};
pub use kernel::{kernel_basis, kernel_of_matrix, Constraint, KernelError, KernelReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FourierError {
    #[error("grid resolution {0} must be a power of two and at least 8")]
    InvalidGrid(usize),
}

/// Equispaced `N x N` nodes on `[0, 2pi)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Grid2 {
    n: usize,
}

impl Grid2 {
    pub fn new(n: usize) -> Result<Self, FourierError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(FourierError::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> f64 {
        TAU / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        TAU * i as f64 / self.n as f64
    }

    /// Nodes in storage order: `x` major, `y` minor.
    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        (0..self.n).flat_map(move |i| (0..self.n).map(move |l| (self.node(i), self.node(l))))
    }

    /// Evaluate `e` at every node of the fiber over `fiber`.
    pub fn sample(&self, e: &Expr, fiber: &[f64]) -> Result<Vec<f64>, EvalError> {
        self.nodes()
            .map(|(x, y)| e.eval(&Point::new(fiber, x, y)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    band: usize,
    coeffs: Vec<Complex64>,
    real: bool,
}

fn fft2(buf: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    for row in buf.chunks_mut(n) {
        fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for l in 0..n {
        for i in 0..n {
            col[i] = buf[i * n + l];
        }
        fft.process(&mut col);
        for i in 0..n {
            buf[i * n + l] = col[i];
        }
    }
}

fn wrap(j: i64, n: usize) -> usize {
    j.rem_euclid(n as i64) as usize
}

impl SpectralField {
    pub fn zeros(band: usize) -> Self {
        let side = 2 * band + 1;
        Self {
            band,
            coeffs: vec![Complex64::new(0.0, 0.0); side * side],
            real: true,
        }
    }

    pub fn constant(value: f64, band: usize) -> Self {
        let mut f = Self::zeros(band);
        f.set(0, 0, Complex64::new(value, 0.0));
        f
    }

    /// Build from an explicit coefficient table (`(2 band + 1)^2` entries, `j` major).
    pub fn from_coeffs(band: usize, coeffs: Vec<Complex64>, real: bool) -> Self {
        assert_eq!(coeffs.len(), (2 * band + 1).pow(2), "coefficient table size");
        let mut f = Self { band, coeffs, real };
        if real {
            f.symmetrize();
        }
        f
    }

    /// Transform real samples on an `n x n` grid (`x` major).
    pub fn from_grid(values: &[f64], n: usize) -> Self {
        assert_eq!(values.len(), n * n, "grid sample count");
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft2(&mut buf, n, false);
        let band = n / 2;
        let scale = 1.0 / (n * n) as f64;
        let mut f = Self::zeros(band);
        let b = band as i64;
        for j in -b..=b {
            for k in -b..=b {
                let mut w = scale;
                if j.abs() == b {
                    w *= 0.5;
                }
                if k.abs() == b {
                    w *= 0.5;
                }
                f.set(j, k, buf[wrap(j, n) * n + wrap(k, n)] * w);
            }
        }
        f.symmetrize();
        f
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn index(&self, j: i64, k: i64) -> Option<usize> {
        let b = self.band as i64;
        if j.abs() > b || k.abs() > b {
            return None;
        }
        Some(((j + b) * (2 * b + 1) + (k + b)) as usize)
    }

    pub fn coeff(&self, j: i64, k: i64) -> Complex64 {
        self.index(j, k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn set(&mut self, j: i64, k: i64, v: Complex64) {
        let i = self.index(j, k).expect("mode inside band");
        self.coeffs[i] = v;
    }

    fn symmetrize(&mut self) {
        let b = self.band as i64;
        for j in -b..=b {
            for k in -b..=b {
                let a = self.coeff(j, k);
                let c = self.coeff(-j, -k).conj();
                self.set(j, k, (a + c) * 0.5);
            }
        }
    }

    /// Largest deviation from `c[-j,-k] = conj(c[j,k])`.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let b = self.band as i64;
        let mut worst = 0.0f64;
        for j in -b..=b {
            for k in -b..=b {
                worst = worst.max((self.coeff(j, k) - self.coeff(-j, -k).conj()).norm());
            }
        }
        worst
    }

    /// Pad with zeros or truncate to a new band.
    pub fn with_band(&self, band: usize) -> Self {
        let mut out = Self::zeros(band);
        out.real = self.real;
        let b = band.min(self.band) as i64;
        for j in -b..=b {
            for k in -b..=b {
                out.set(j, k, self.coeff(j, k));
            }
        }
        out
    }

    /// Smallest band outside of which every coefficient is below `rel_tol * max|c|`.
    pub fn effective_band(&self, rel_tol: f64) -> usize {
        let max = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        if max == 0.0 {
            return 0;
        }
        let b = self.band as i64;
        let mut eff = 0;
        for j in -b..=b {
            for k in -b..=b {
                if self.coeff(j, k).norm() > rel_tol * max {
                    eff = eff.max(j.unsigned_abs().max(k.unsigned_abs()) as usize);
                }
            }
        }
        eff
    }

    pub fn mean(&self) -> f64 {
        self.coeff(0, 0).re
    }

    /// Euclidean norm of the coefficient table (equals the L2 mean-square norm on the torus).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            band: self.band,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            real: self.real,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let band = self.band.max(other.band);
        let (a, b) = (self.with_band(band), other.with_band(band));
        Self {
            band,
            coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect(),
            real: self.real && other.real,
        }
    }

    pub fn derivative(&self, axis: Axis) -> Self {
        let b = self.band as i64;
        let mut out = self.clone();
        for j in -b..=b {
            for k in -b..=b {
                let m = match axis {
                    Axis::X => j,
                    Axis::Y => k,
                } as f64;
                out.set(j, k, self.coeff(j, k) * Complex64::new(0.0, m));
            }
        }
        out
    }

    /// Complex values on an `m x m` grid. Modes congruent mod `m` are summed.
    pub fn to_grid_complex(&self, m: usize) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); m * m];
        let b = self.band as i64;
        for j in -b..=b {
            for k in -b..=b {
                buf[wrap(j, m) * m + wrap(k, m)] += self.coeff(j, k);
            }
        }
        fft2(&mut buf, m, true);
        buf
    }

    /// Real part of the values on an `m x m` grid.
    pub fn to_grid(&self, m: usize) -> Vec<f64> {
        self.to_grid_complex(m).into_iter().map(|c| c.re).collect()
    }

    /// Dealiased product: both factors are evaluated on a zero-padded grid
    /// large enough that no retained mode is contaminated, then truncated to
    /// the larger of the two bands.
    pub fn multiply(&self, other: &Self) -> Self {
        let out_band = self.band.max(other.band);
        let m = (self.band + other.band + out_band + 1).next_power_of_two().max(8);
        let a = self.to_grid_complex(m);
        let b = other.to_grid_complex(m);
        let mut prod: Vec<Complex64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
        fft2(&mut prod, m, false);
        let scale = 1.0 / (m * m) as f64;
        let mut out = Self::zeros(out_band);
        out.real = self.real && other.real;
        let ob = out_band as i64;
        for j in -ob..=ob {
            for k in -ob..=ob {
                out.set(j, k, prod[wrap(j, m) * m + wrap(k, m)] * scale);
            }
        }
        if out.real {
            out.symmetrize();
        }
        out
    }

    /// Pointwise evaluation of the series.
    pub fn eval(&self, x: f64, y: f64) -> Complex64 {
        let b = self.band as i64;
        let ex: Vec<Complex64> = (-b..=b).map(|j| Complex64::from_polar(1.0, j as f64 * x)).collect();
        let ey: Vec<Complex64> = (-b..=b).map(|k| Complex64::from_polar(1.0, k as f64 * y)).collect();
        let side = (2 * b + 1) as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for (jj, exj) in ex.iter().enumerate() {
            let row = &self.coeffs[jj * side..(jj + 1) * side];
            let inner: Complex64 = row.iter().zip(&ey).map(|(c, e)| c * e).sum();
            acc += exj * inner;
        }
        acc
    }

    /// Real trigonometric polynomial as an expression, dropping coefficients with `|c| <= cutoff`.
    pub fn to_expr(&self, cutoff: f64) -> Expr {
        let mut e = Expr::num(self.mean());
        let b = self.band as i64;
        for j in 0..=b {
            let k_start = if j == 0 { 1 } else { -b };
            for k in k_start..=b {
                let c = self.coeff(j, k);
                if c.norm() <= cutoff {
                    continue;
                }
                let phase = Expr::num(j as f64) * Expr::x() + Expr::num(k as f64) * Expr::y();
                if c.re.abs() > cutoff {
                    e = e + Expr::num(2.0 * c.re) * phase.clone().cos();
                }
                if c.im.abs() > cutoff {
                    e = e - Expr::num(2.0 * c.im) * phase.sin();
                }
            }
        }
        e
    }
}

/// Sample an expression on `grid` over the fiber point and transform it.
pub fn sample_to_grid(e: &Expr, fiber: &[f64], grid: &Grid2) -> Result<SpectralField, EvalError> {
    let values = grid.sample(e, fiber)?;
    Ok(SpectralField::from_grid(&values, grid.n()))
}

/// `f * g`, dealiased.
pub fn multiply(f: &SpectralField, g: &SpectralField) -> SpectralField {
    f.multiply(g)
}

pub fn spectral_derivative(f: &SpectralField, axis: Axis) -> SpectralField {
    f.derivative(axis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn field(src: &str, n: usize) -> SpectralField {
        sample_to_grid(&parse(src, 0).unwrap(), &[], &Grid2::new(n).unwrap()).unwrap()
    }

    fn nonzero_modes(f: &SpectralField, tol: f64) -> Vec<(i64, i64, Complex64)> {
        let b = f.band() as i64;
        let mut out = Vec::new();
        for j in -b..=b {
            for k in -b..=b {
                if f.coeff(j, k).norm() > tol {
                    out.push((j, k, f.coeff(j, k)));
                }
            }
        }
        out
    }

    #[test]
    fn grid_validation() {
        assert!(Grid2::new(64).is_ok());
        assert_eq!(Grid2::new(4), Err(FourierError::InvalidGrid(4)));
        assert_eq!(Grid2::new(48), Err(FourierError::InvalidGrid(48)));
        let g = Grid2::new(8).unwrap();
        assert_eq!(g.spacing(), TAU / 8.0);
    }

    #[test]
    fn sine_has_one_pair() {
        let f = field("sin(y)", 32);
        let modes = nonzero_modes(&f, 1e-14);
        assert_eq!(modes.len(), 2);
        for (j, k, c) in modes {
            assert_eq!(j, 0);
            assert_eq!(k.abs(), 1);
            assert!((c.norm() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn constant_is_mean_only() {
        let f = field("1", 16);
        let modes = nonzero_modes(&f, 1e-15);
        assert_eq!(modes.len(), 1);
        assert_eq!((modes[0].0, modes[0].1), (0, 0));
        assert!((modes[0].2.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn product_of_sines_has_four_quarter_modes() {
        // sin x sin y = (cos(x-y) - cos(x+y))/2: four modes of magnitude 1/4
        let f = field("sin(x)*sin(y)", 32);
        let modes = nonzero_modes(&f, 1e-14);
        assert_eq!(modes.len(), 4);
        for (j, k, c) in modes {
            assert_eq!((j.abs(), k.abs()), (1, 1));
            assert!((c.norm() - 0.25).abs() < 1e-15);
            // (1,1) and (-1,-1) carry -1/4, the mixed pair +1/4
            let expect = if j == k { -0.25 } else { 0.25 };
            assert!((c.re - expect).abs() < 1e-15 && c.im.abs() < 1e-15);
        }
    }

    #[test]
    fn derivative_matches_closed_forms() {
        let n = 64;
        let d = field("sin(y)", n).derivative(Axis::Y).to_grid(n);
        let g = Grid2::new(n).unwrap();
        for ((x, y), v) in g.nodes().zip(&d) {
            assert!((v - y.cos()).abs() < 1e-13, "at ({x},{y})");
        }
        let d = field("3", n).derivative(Axis::X);
        assert!(d.coeff_norm() == 0.0);
    }

    #[test]
    fn derivative_matches_symbolic() {
        let n = 64;
        let e = parse("-cos(y)+cos(x)", 0).unwrap();
        let g = Grid2::new(n).unwrap();
        let oracle = g.sample(&e.dy(), &[]).unwrap();
        let d = sample_to_grid(&e, &[], &g).unwrap().derivative(Axis::Y).to_grid(n);
        for (a, b) in d.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn multiply_identities() {
        let s = field("sin(y)", 32);
        let one = field("1", 32);
        let p = s.multiply(&one);
        assert!(p.add(&s.scale(-1.0)).coeff_norm() < 1e-15);
        let sq = s.multiply(&s);
        let expect = field("(1-cos(2*y))/2", 32);
        assert!(sq.add(&expect.scale(-1.0)).coeff_norm() < 1e-15);
    }

    #[test]
    fn multiply_matches_pointwise_product() {
        let n = 32;
        let a = field("sin(y)+2", n);
        let b = field("sin(x)", n);
        let oracle = field("(sin(y)+2)*sin(x)", n);
        assert!(a.multiply(&b).add(&oracle.scale(-1.0)).coeff_norm() < 1e-14);
    }

    #[test]
    fn eval_and_to_expr_agree_with_grid() {
        let f = field("cos(2*x - y) + 0.5*sin(x)^2 + 0.25", 16);
        let e = f.to_expr(1e-15);
        for (x, y) in [(0.3f64, 1.1f64), (2.0, 5.5), (4.4, 0.0)] {
            let direct = (2.0 * x - y).cos() + 0.5 * x.sin().powi(2) + 0.25;
            assert!((f.eval(x, y).re - direct).abs() < 1e-14);
            assert!((e.eval_xy(x, y).unwrap() - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn nyquist_split_keeps_symmetry() {
        let f = field("cos(8*x)", 16);
        assert!((f.coeff(8, 0).re - 0.5).abs() < 1e-15);
        assert!((f.coeff(-8, 0).re - 0.5).abs() < 1e-15);
        assert!(f.conjugate_symmetry_defect() < 1e-15);
        let back = f.to_grid(16);
        let g = Grid2::new(16).unwrap();
        for ((x, _), v) in g.nodes().zip(&back) {
            assert!((v - (8.0 * x).cos()).abs() < 1e-13);
        }
    }
}
