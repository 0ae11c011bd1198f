//! Galerkin truncations of first-order linear differential operators on T^2.
//!
//! An operator is a block matrix of terms `g * D u`, with `g` a spectral
//! coefficient field and `D` one of identity, `d/dx`, `d/dy`. Trial functions
//! live in the band `|j|, |k| <= K`; test functions in a wider band `L`, so
//! the rectangular matrix is the exact image of the trial space whenever the
//! coefficient fields have band at most `L - K`.

use std::f64::consts::FRAC_1_SQRT_2;

use faer::{c64, Mat, MatRef};
use num_complex::Complex64;

use super::{sample_to_grid, Grid2, SpectralField};
use crate::expr::{EvalError, Expr};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrialOp {
    Identity,
    Dx,
    Dy,
}

#[derive(Clone, Debug)]
pub struct Term {
    pub coeff: SpectralField,
    pub op: TrialOp,
}

impl Term {
    pub fn new(coeff: SpectralField, op: TrialOp) -> Self {
        Self { coeff, op }
    }
}

/// Coefficients below this fraction of the largest one do not widen the test band.
const BAND_CUTOFF: f64 = 1e-15;

#[derive(Clone, Debug)]
pub struct GalerkinOperator {
    trial_band: usize,
    test_band: usize,
    inputs: usize,
    outputs: usize,
    matrix: Mat<c64>,
}

fn side(band: usize) -> usize {
    2 * band + 1
}

fn mode_index(band: usize, j: i64, k: i64) -> usize {
    let b = band as i64;
    ((j + b) * (2 * b + 1) + (k + b)) as usize
}

impl GalerkinOperator {
    /// `blocks[out][in]` lists the terms mapping input component `in` to output `out`.
    /// The test band is `min(2K, K + effective coefficient band)`.
    pub fn assemble(blocks: &[Vec<Vec<Term>>], trial_band: usize) -> Self {
        let coeff_band = blocks
            .iter()
            .flatten()
            .flatten()
            .map(|t| t.coeff.effective_band(BAND_CUTOFF))
            .max()
            .unwrap_or(0);
        let test_band = (trial_band + coeff_band).min(2 * trial_band);
        Self::assemble_with_test_band(blocks, trial_band, test_band)
    }

    pub fn assemble_with_test_band(
        blocks: &[Vec<Vec<Term>>],
        trial_band: usize,
        test_band: usize,
    ) -> Self {
        let outputs = blocks.len();
        let inputs = blocks.first().map_or(0, Vec::len);
        assert!(blocks.iter().all(|row| row.len() == inputs), "ragged block layout");
        let (ts, ls) = (side(trial_band).pow(2), side(test_band).pow(2));
        let mut matrix = Mat::<c64>::zeros(outputs * ls, inputs * ts);
        let (kb, lb) = (trial_band as i64, test_band as i64);
        for (o, row) in blocks.iter().enumerate() {
            for (i, terms) in row.iter().enumerate() {
                for term in terms {
                    let cb = term.coeff.effective_band(BAND_CUTOFF) as i64;
                    for j in -kb..=kb {
                        for k in -kb..=kb {
                            let factor = match term.op {
                                TrialOp::Identity => Complex64::new(1.0, 0.0),
                                TrialOp::Dx => Complex64::new(0.0, j as f64),
                                TrialOp::Dy => Complex64::new(0.0, k as f64),
                            };
                            if factor == Complex64::new(0.0, 0.0) {
                                continue;
                            }
                            let col = i * ts + mode_index(trial_band, j, k);
                            for p in (j - cb).max(-lb)..=(j + cb).min(lb) {
                                for q in (k - cb).max(-lb)..=(k + cb).min(lb) {
                                    let c = term.coeff.coeff(p - j, q - k);
                                    if c.re == 0.0 && c.im == 0.0 {
                                        continue;
                                    }
                                    let r = o * ls + mode_index(test_band, p, q);
                                    matrix[(r, col)] += c * factor;
                                }
                            }
                        }
                    }
                }
            }
        }
        Self {
            trial_band,
            test_band,
            inputs,
            outputs,
            matrix,
        }
    }

    pub fn trial_band(&self) -> usize {
        self.trial_band
    }

    pub fn test_band(&self) -> usize {
        self.test_band
    }

    pub fn inputs(&self) -> usize {
        self.inputs
    }

    pub fn outputs(&self) -> usize {
        self.outputs
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.matrix.as_ref()
    }

    /// Column of mode `(j, k)` of input component `component`.
    pub fn trial_index(&self, component: usize, j: i64, k: i64) -> usize {
        component * side(self.trial_band).pow(2) + mode_index(self.trial_band, j, k)
    }

    pub fn test_index(&self, component: usize, j: i64, k: i64) -> usize {
        component * side(self.test_band).pow(2) + mode_index(self.test_band, j, k)
    }

    /// Apply the matrix to trial fields (each truncated to the trial band).
    pub fn apply(&self, fields: &[SpectralField]) -> Vec<SpectralField> {
        assert_eq!(fields.len(), self.inputs);
        let ts = side(self.trial_band).pow(2);
        let mut v = Mat::<c64>::zeros(self.inputs * ts, 1);
        for (i, f) in fields.iter().enumerate() {
            let f = f.with_band(self.trial_band);
            for (idx, c) in f.coeffs().iter().enumerate() {
                v[(i * ts + idx, 0)] = *c;
            }
        }
        let w = &self.matrix * &v;
        let ls = side(self.test_band).pow(2);
        let real = fields.iter().all(SpectralField::is_real);
        (0..self.outputs)
            .map(|o| {
                let coeffs = (0..ls).map(|r| w[(o * ls + r, 0)]).collect();
                SpectralField::from_coeffs(self.test_band, coeffs, real)
            })
            .collect()
    }

    /// The operator in the orthonormal real basis of [`RealBasis`] on every
    /// component. Exact (up to roundoff) for operators with real coefficients.
    pub fn real_matrix(&self) -> Mat<f64> {
        let trial = RealBasis::new(self.trial_band);
        let test = RealBasis::new(self.test_band);
        let (ts, ls) = (trial.dim(), test.dim());
        let rows_c = self.matrix.nrows();
        let mut half = Mat::<c64>::zeros(rows_c, self.inputs * ts);
        for comp in 0..self.inputs {
            for r in 0..ts {
                let col = comp * ts + r;
                for (idx, w) in trial.column(r) {
                    let src = comp * ts + idx;
                    for row in 0..rows_c {
                        half[(row, col)] += self.matrix[(row, src)] * w;
                    }
                }
            }
        }
        let mut out = Mat::<f64>::zeros(self.outputs * ls, self.inputs * ts);
        for comp in 0..self.outputs {
            for r in 0..ls {
                let row = comp * ls + r;
                for (idx, w) in test.column(r) {
                    let src = comp * ls + idx;
                    for col in 0..half.ncols() {
                        out[(row, col)] += (w.conj() * half[(src, col)]).re;
                    }
                }
            }
        }
        out
    }
}

/// Galerkin matrix of `f -> X(f) = X1 df/dx + X2 df/dy` at one fiber point.
pub fn advection_matrix(
    components: [&Expr; 2],
    fiber: &[f64],
    grid: &Grid2,
    trial_band: usize,
) -> Result<GalerkinOperator, EvalError> {
    let x1 = sample_to_grid(components[0], fiber, grid)?;
    let x2 = sample_to_grid(components[1], fiber, grid)?;
    Ok(GalerkinOperator::assemble(
        &[vec![vec![Term::new(x1, TrialOp::Dx), Term::new(x2, TrialOp::Dy)]]],
        trial_band,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RealMode {
    Mean,
    /// `sqrt(2) cos(jx + ky)`
    Cos(i64, i64),
    /// `sqrt(2) sin(jx + ky)`
    Sin(i64, i64),
}

/// Orthonormal real basis of the band-`K` trigonometric polynomials,
/// expressed in the complex coefficient space: the mean, then a cosine and
/// a sine for every mode of the half plane `j > 0 or (j = 0, k > 0)`.
#[derive(Clone, Debug)]
pub struct RealBasis {
    band: usize,
    modes: Vec<RealMode>,
}

impl RealBasis {
    pub fn new(band: usize) -> Self {
        let b = band as i64;
        let mut modes = vec![RealMode::Mean];
        for j in 0..=b {
            let start = if j == 0 { 1 } else { -b };
            for k in start..=b {
                modes.push(RealMode::Cos(j, k));
                modes.push(RealMode::Sin(j, k));
            }
        }
        Self { band, modes }
    }

    pub fn band(&self) -> usize {
        self.band
    }

    pub fn dim(&self) -> usize {
        self.modes.len()
    }

    pub fn modes(&self) -> &[RealMode] {
        &self.modes
    }

    /// Complex coefficient entries of basis vector `r`.
    fn column(&self, r: usize) -> Vec<(usize, Complex64)> {
        let s = FRAC_1_SQRT_2;
        match self.modes[r] {
            RealMode::Mean => vec![(mode_index(self.band, 0, 0), Complex64::new(1.0, 0.0))],
            RealMode::Cos(j, k) => vec![
                (mode_index(self.band, j, k), Complex64::new(s, 0.0)),
                (mode_index(self.band, -j, -k), Complex64::new(s, 0.0)),
            ],
            RealMode::Sin(j, k) => vec![
                (mode_index(self.band, j, k), Complex64::new(0.0, -s)),
                (mode_index(self.band, -j, -k), Complex64::new(0.0, s)),
            ],
        }
    }

    pub fn to_real(&self, f: &SpectralField) -> Vec<f64> {
        let f = f.with_band(self.band);
        (0..self.dim())
            .map(|r| {
                self.column(r)
                    .into_iter()
                    .map(|(idx, w)| (w.conj() * f.coeffs()[idx]).re)
                    .sum()
            })
            .collect()
    }

    pub fn from_real(&self, v: &[f64]) -> SpectralField {
        assert_eq!(v.len(), self.dim());
        let mut coeffs = vec![Complex64::new(0.0, 0.0); side(self.band).pow(2)];
        for (r, &a) in v.iter().enumerate() {
            for (idx, w) in self.column(r) {
                coeffs[idx] += w * a;
            }
        }
        SpectralField::from_coeffs(self.band, coeffs, true)
    }

    /// Index of the mean in this basis.
    pub fn mean_index(&self) -> usize {
        0
    }
}
