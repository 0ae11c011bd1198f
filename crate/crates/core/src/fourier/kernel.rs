//! Numerical kernels from the singular value decomposition.

use faer::{c64, Mat, MatRef};
use serde::Serialize;
use thiserror::Error;

use super::galerkin::{GalerkinOperator, RealBasis};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KernelError {
    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),
    #[error("matrix has non-finite entries")]
    NonFinite,
    #[error("singular value decomposition did not converge")]
    NoConvergence,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Project out the constant mode before solving.
    MeanZero,
}

/// Singular values straddling the threshold: the strict count uses
/// `threshold`, the loose count `10 * threshold`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RankAmbiguity {
    pub strict: usize,
    pub loose: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct KernelReport<T> {
    /// All singular values, descending. Wide matrices are padded with zeros.
    pub singular_values: Vec<f64>,
    /// Relative threshold; the absolute cutoff is `threshold * sigma_max`.
    pub threshold: f64,
    pub sigma_max: f64,
    pub dimension: usize,
    /// Kernel vectors in order of increasing singular value.
    #[serde(skip)]
    pub basis: Vec<Vec<T>>,
    pub basis_singular_values: Vec<f64>,
    pub ambiguity: Option<RankAmbiguity>,
}

impl<T> KernelReport<T> {
    pub fn cutoff(&self) -> f64 {
        self.threshold * self.sigma_max
    }

    /// Smallest singular value that is not in the kernel, relative to `sigma_max`.
    pub fn gap(&self) -> Option<f64> {
        let n = self.singular_values.len();
        if self.dimension >= n || self.sigma_max == 0.0 {
            return None;
        }
        Some(self.singular_values[n - self.dimension - 1] / self.sigma_max)
    }
}

/// Scalars we can take a kernel over.
pub trait KernelScalar: Copy + Default + 'static {
    fn is_finite(self) -> bool;
    /// Singular values (any order) and the matching right singular vectors as columns.
    fn right_singular(a: MatRef<'_, Self>) -> Result<(Vec<f64>, Mat<Self>), KernelError>;
}

macro_rules! impl_kernel_scalar {
    ($t:ty, $finite:expr, $re:expr) => {
        impl KernelScalar for $t {
            fn is_finite(self) -> bool {
                $finite(self)
            }

            fn right_singular(a: MatRef<'_, Self>) -> Result<(Vec<f64>, Mat<Self>), KernelError> {
                let (m, n) = (a.nrows(), a.ncols());
                if n == 0 {
                    return Ok((Vec::new(), Mat::zeros(0, 0)));
                }
                if m == 0 {
                    return Ok((vec![0.0; n], Mat::identity(n, n)));
                }
                // Tall problems go through a thin QR first: same V, much smaller SVD.
                let svd = if m > n {
                    let r = a.qr().thin_R().to_owned();
                    r.svd().map_err(|_| KernelError::NoConvergence)?
                } else {
                    a.svd().map_err(|_| KernelError::NoConvergence)?
                };
                let s = svd.S().column_vector();
                let mut sigma: Vec<f64> = (0..s.nrows()).map(|i| $re(s[i]).abs()).collect();
                sigma.resize(n, 0.0);
                Ok((sigma, svd.V().to_owned()))
            }
        }
    };
}

impl_kernel_scalar!(f64, |v: f64| v.is_finite(), |v: f64| v);
impl_kernel_scalar!(c64, |v: c64| v.re.is_finite() && v.im.is_finite(), |v: c64| v.re);

/// Right singular vectors of `a` with singular value `<= threshold * sigma_max`.
///
/// Columns listed in `excluded` are removed first; the returned vectors carry
/// zeros there. When some singular value falls in
/// `(threshold, 10 * threshold] * sigma_max` both counts are reported in
/// [`KernelReport::ambiguity`].
pub fn kernel_of_matrix<T: KernelScalar>(
    a: MatRef<'_, T>,
    excluded: &[usize],
    threshold: f64,
) -> Result<KernelReport<T>, KernelError> {
    if !(threshold > 0.0 && threshold.is_finite()) {
        return Err(KernelError::InvalidThreshold(threshold));
    }
    let keep: Vec<usize> = (0..a.ncols()).filter(|c| !excluded.contains(c)).collect();
    let sub = Mat::<T>::from_fn(a.nrows(), keep.len(), |i, j| a[(i, keep[j])]);
    for j in 0..sub.ncols() {
        for i in 0..sub.nrows() {
            if !sub[(i, j)].is_finite() {
                return Err(KernelError::NonFinite);
            }
        }
    }
    let (sigma, v) = T::right_singular(sub.as_ref())?;
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    let singular_values: Vec<f64> = order.iter().map(|&i| sigma[i]).collect();
    let sigma_max = singular_values.first().copied().unwrap_or(0.0);
    let cutoff = threshold * sigma_max;
    let strict = singular_values.iter().filter(|&&s| s <= cutoff).count();
    let loose = singular_values.iter().filter(|&&s| s <= 10.0 * cutoff).count();

    let mut basis = Vec::with_capacity(strict);
    let mut basis_singular_values = Vec::with_capacity(strict);
    for &col in order.iter().rev().take(strict) {
        let mut full = vec![T::default(); a.ncols()];
        for (row, &target) in keep.iter().enumerate() {
            full[target] = v[(row, col)];
        }
        basis.push(full);
        basis_singular_values.push(sigma[col]);
    }
    Ok(KernelReport {
        singular_values,
        threshold,
        sigma_max,
        dimension: strict,
        basis,
        basis_singular_values,
        ambiguity: (loose > strict).then_some(RankAmbiguity { strict, loose }),
    })
}

/// Kernel of a Galerkin operator in the real basis of each input component.
pub fn kernel_basis(
    op: &GalerkinOperator,
    constraint: Constraint,
    threshold: f64,
) -> Result<KernelReport<f64>, KernelError> {
    let real = op.real_matrix();
    let excluded: Vec<usize> = match constraint {
        Constraint::None => Vec::new(),
        Constraint::MeanZero => {
            let basis = RealBasis::new(op.trial_band());
            (0..op.inputs()).map(|c| c * basis.dim() + basis.mean_index()).collect()
        }
    };
    kernel_of_matrix(real.as_ref(), &excluded, threshold)
}
