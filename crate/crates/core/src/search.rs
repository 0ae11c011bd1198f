//! Galerkin searches for invariant densities, first integrals, dynamical
//! symmetries and invariant one-forms of a field at one fiber point.
//!
//! Unknowns are trigonometric polynomials of degree at most `K`. Each search
//! assembles the linear operator whose kernel is the object sought, takes
//! its numerical kernel, and then checks every candidate pointwise on a grid
//! twice as fine as the one the coefficients were sampled on.

use faer::Mat;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::flow::{self, FlowError, Trajectory};
use crate::fourier::{
    kernel_of_matrix, sample_to_grid, Axis, FourierError, GalerkinOperator, Grid2, KernelError,
    KernelReport, RealBasis, SpectralField, Term, TrialOp,
};
use crate::geometry::{FiberGrid, VectorField2, EPS_INDEP, EPS_VANISH};

pub const DEFAULT_GRID: usize = 64;
pub const DEFAULT_BAND: usize = 16;
pub const DEFAULT_THRESHOLD: f64 = 1e-8;
/// Relative residual below which a candidate counts as verified.
pub const RESIDUAL_TOL: f64 = 1e-6;
pub const DRIFT_HORIZON: f64 = 100.0;
pub const DRIFT_SEEDS: usize = 10;
/// Largest relative drift of a validated first integral.
pub const DRIFT_TOL: f64 = 1e-6;
/// A preferred direction counts as present in the kernel above this alignment.
const ALIGNMENT_MIN: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("field nearly vanishes on the fiber grid: min |X| = {0:e}")]
    Vanishing(f64),
    #[error("band {band} does not fit a grid of size {grid}")]
    Band { band: usize, grid: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchOptions {
    pub grid: usize,
    pub band: usize,
    pub threshold: f64,
    pub integrator_tol: f64,
    pub drift_horizon: f64,
    pub drift_seeds: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_GRID,
            band: DEFAULT_BAND,
            threshold: DEFAULT_THRESHOLD,
            integrator_tol: flow::DEFAULT_TOL,
            drift_horizon: DRIFT_HORIZON,
            drift_seeds: DRIFT_SEEDS,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    Density,
    FirstIntegral,
    Symmetry,
    OneForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Independence {
    pub min_abs_det: f64,
    pub independent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Candidate {
    /// One spectral field per component.
    #[serde(skip)]
    pub components: Vec<SpectralField>,
    /// `|A v|` for the unit coefficient vector `v` of the candidate.
    pub singular_value: f64,
    /// Sup-norm of the defining equation on the verification grid.
    pub residual: f64,
    /// `|X| |candidate|` (plus first-derivative terms of `X` where the
    /// equation has them); verified means `residual <= 1e-6 * scale`.
    pub residual_scale: f64,
    pub verified: bool,
    /// The field itself, reported first by symmetry searches.
    pub is_field: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub positive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub independence: Option<Independence>,
}

impl Candidate {
    pub fn scalar(&self) -> &SpectralField {
        &self.components[0]
    }

    /// Grid values of component `c` on an `m x m` grid.
    pub fn values(&self, c: usize, m: usize) -> Vec<f64> {
        self.components[c].to_grid(m)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub kind: SearchKind,
    pub fiber: Vec<f64>,
    pub options: SearchOptions,
    pub function_class: String,
    pub kernel: KernelReport<f64>,
    pub candidates: Vec<Candidate>,
    /// Orthonormal kernel vectors in the real basis, components concatenated.
    #[serde(skip)]
    pub basis: Vec<Vec<f64>>,
}

impl SearchResult {
    /// Whether the search produced the object it was looking for: a positive
    /// density, a validated first integral, an independent symmetry, or any
    /// invariant one-form.
    pub fn found(&self) -> bool {
        let ok = |c: &&Candidate| c.verified;
        match self.kind {
            SearchKind::Density => self
                .candidates
                .iter()
                .filter(ok)
                .any(|c| c.positive == Some(true)),
            SearchKind::FirstIntegral => self
                .candidates
                .iter()
                .filter(ok)
                .any(|c| c.drift.is_some_and(|d| d <= DRIFT_TOL)),
            SearchKind::Symmetry => self
                .candidates
                .iter()
                .filter(ok)
                .any(|c| !c.is_field && c.independence.is_some_and(|i| i.independent)),
            SearchKind::OneForm => self.candidates.iter().any(|c| c.verified),
        }
    }

    /// Fraction of the target captured by the kernel span:
    /// `|P t_K| / |t|`, where `t_K` is the target truncated to the search
    /// band and `|t|` its full coefficient norm. First-integral targets have
    /// their mean removed first.
    pub fn span_correlation(&self, target: &[SpectralField]) -> f64 {
        let rb = RealBasis::new(self.options.band);
        let mut t = Vec::new();
        let mut full = 0.0;
        for f in target {
            let mut v = rb.to_real(f);
            let mut n2 = f.coeff_norm().powi(2);
            if self.kind == SearchKind::FirstIntegral {
                v[rb.mean_index()] = 0.0;
                n2 -= f.mean().powi(2);
            }
            t.extend(v);
            full += n2;
        }
        if full <= 0.0 {
            return 0.0;
        }
        let proj: f64 = self.basis.iter().map(|b| dot(b, &t).powi(2)).sum();
        (proj / full).sqrt()
    }
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let nab = dot(a, a).sqrt() * dot(b, b).sqrt();
    if nab == 0.0 {
        0.0
    } else {
        dot(a, b) / nab
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// The field, its partials and its flat divergence sampled on a grid.
struct Pointwise {
    x1: Vec<f64>,
    x2: Vec<f64>,
    x1x: Vec<f64>,
    x1y: Vec<f64>,
    x2x: Vec<f64>,
    x2y: Vec<f64>,
}

impl Pointwise {
    fn new(x: &VectorField2, g: &FiberGrid) -> Result<Self, EvalError> {
        Ok(Self {
            x1: g.values(&x.vx)?,
            x2: g.values(&x.vy)?,
            x1x: g.values(&x.vx.dx())?,
            x1y: g.values(&x.vx.dy())?,
            x2x: g.values(&x.vy.dx())?,
            x2y: g.values(&x.vy.dy())?,
        })
    }

    fn sup_field(&self) -> f64 {
        sup(&self.x1).max(sup(&self.x2))
    }

    fn sup_jacobian(&self) -> f64 {
        sup(&self.x1x).max(sup(&self.x1y)).max(sup(&self.x2x)).max(sup(&self.x2y))
    }
}

fn sup(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Values, x-derivative and y-derivative of a spectral field on an `m` grid.
fn jet(f: &SpectralField, m: usize) -> [Vec<f64>; 3] {
    [
        f.to_grid(m),
        f.derivative(Axis::X).to_grid(m),
        f.derivative(Axis::Y).to_grid(m),
    ]
}

struct Setup {
    fiber: Vec<f64>,
    grid: Grid2,
    verify: FiberGrid,
}

impl Setup {
    fn new(x: &VectorField2, fiber: &[f64], opts: SearchOptions) -> Result<Self, SearchError> {
        let grid = Grid2::new(opts.grid)?;
        if 2 * opts.band > opts.grid {
            return Err(SearchError::Band {
                band: opts.band,
                grid: opts.grid,
            });
        }
        let min = FiberGrid::new(grid, fiber).min_length(x)?;
        if min <= EPS_VANISH {
            return Err(SearchError::Vanishing(min));
        }
        Ok(Self {
            fiber: fiber.to_vec(),
            grid,
            verify: FiberGrid::new(Grid2::new(2 * opts.grid)?, fiber),
        })
    }

    fn term(&self, e: Expr, op: TrialOp) -> Result<Option<Term>, EvalError> {
        if e.is_zero() {
            return Ok(None);
        }
        Ok(Some(Term::new(sample_to_grid(&e, &self.fiber, &self.grid)?, op)))
    }

    fn terms(&self, list: Vec<(Expr, TrialOp)>) -> Result<Vec<Term>, EvalError> {
        let mut out = Vec::new();
        for (e, op) in list {
            out.extend(self.term(e, op)?);
        }
        Ok(out)
    }

    /// `X1 d/dx + X2 d/dy + extra * I`.
    fn transport(&self, x: &VectorField2, extra: Expr) -> Result<Vec<Term>, EvalError> {
        self.terms(vec![
            (x.vx.clone(), TrialOp::Dx),
            (x.vy.clone(), TrialOp::Dy),
            (extra, TrialOp::Identity),
        ])
    }
}

struct Kernel {
    report: KernelReport<f64>,
    real: Mat<f64>,
    band: usize,
    dim: usize,
    inputs: usize,
}

impl Kernel {
    fn compute(op: &GalerkinOperator, mean_zero: bool, threshold: f64) -> Result<Self, KernelError> {
        let real = op.real_matrix();
        let basis = RealBasis::new(op.trial_band());
        let dim = basis.dim();
        let excluded: Vec<usize> = if mean_zero {
            (0..op.inputs())
                .map(|c| c * dim + basis.mean_index())
                .collect()
        } else {
            Vec::new()
        };
        let report = kernel_of_matrix(real.as_ref(), &excluded, threshold)?;
        Ok(Self {
            report,
            real,
            band: op.trial_band(),
            dim,
            inputs: op.inputs(),
        })
    }

    fn apply_norm(&self, v: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..self.real.nrows() {
            let mut acc = 0.0;
            for (j, vj) in v.iter().enumerate() {
                acc += self.real[(i, j)] * vj;
            }
            s += acc * acc;
        }
        s.sqrt()
    }

    fn fields(&self, v: &[f64]) -> Vec<SpectralField> {
        let rb = RealBasis::new(self.band);
        (0..self.inputs)
            .map(|c| rb.from_real(&v[c * self.dim..(c + 1) * self.dim]))
            .collect()
    }

    /// Kernel vectors, optionally rotated so the first one is the unit
    /// projection of `preferred` onto the kernel. Returns the preferred
    /// vector (when it is present in the kernel) and the rest, sorted by
    /// increasing `|A v|`.
    fn split(&self, preferred: Option<&[f64]>) -> (Option<Vec<f64>>, Vec<Vec<f64>>) {
        let basis = &self.report.basis;
        let mut rest: Vec<Vec<f64>> = basis.clone();
        let mut first = None;
        if let Some(d) = preferred {
            let mut u: Vec<f64> = basis.iter().map(|b| dot(b, d)).collect();
            let align = normalize(&mut u) / dot(d, d).sqrt();
            if align >= ALIGNMENT_MIN && !basis.is_empty() {
                // Householder reflection taking e_1 to u; its other columns
                // span the complement of u.
                let n = u.len();
                let mut w = u.clone();
                w[0] -= 1.0;
                let wn = normalize(&mut w);
                let h = |i: usize, j: usize| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    if wn < 1e-14 {
                        delta
                    } else {
                        delta - 2.0 * w[i] * w[j]
                    }
                };
                let combine = |j: usize| {
                    let mut v = vec![0.0; basis[0].len()];
                    for (i, b) in basis.iter().enumerate() {
                        let c = h(i, j);
                        v.iter_mut().zip(b).for_each(|(a, x)| *a += c * x);
                    }
                    v
                };
                first = Some(combine(0));
                rest = (1..n).map(combine).collect();
            }
        }
        let mut keyed: Vec<(f64, Vec<f64>)> =
            rest.into_iter().map(|v| (self.apply_norm(&v), v)).collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0));
        (first, keyed.into_iter().map(|(_, v)| v).collect())
    }

    fn all_vectors(&self, first: &Option<Vec<f64>>, rest: &[Vec<f64>]) -> Vec<Vec<f64>> {
        first.iter().cloned().chain(rest.iter().cloned()).collect()
    }
}

fn function_class(band: usize) -> String {
    format!("trigonometric polynomials of degree <= {band} in each variable")
}

fn blank(components: Vec<SpectralField>, singular_value: f64) -> Candidate {
    Candidate {
        components,
        singular_value,
        residual: 0.0,
        residual_scale: 0.0,
        verified: false,
        is_field: false,
        positive: None,
        min_value: None,
        drift: None,
        independence: None,
    }
}

fn verdict(residual: f64, scale: f64) -> bool {
    residual <= RESIDUAL_TOL * scale
}

/// Densities `rho` with `d(rho X1)/dx + d(rho X2)/dy = 0`.
///
/// The kernel is rotated so that the first candidate carries the largest
/// mean; it is normalized to mean 1. Remaining candidates are mean-free and
/// are reported as non-positive.
pub fn find_invariant_density(
    x: &VectorField2,
    fiber: &[f64],
    opts: SearchOptions,
) -> Result<SearchResult, SearchError> {
    let s = Setup::new(x, fiber, opts)?;
    let op = GalerkinOperator::assemble(&[vec![s.transport(x, x.flat_divergence())?]], opts.band);
    let k = Kernel::compute(&op, false, opts.threshold)?;
    let mut e0 = vec![0.0; k.dim];
    e0[RealBasis::new(opts.band).mean_index()] = 1.0;
    let (first, rest) = k.split(Some(&e0));
    let pw = Pointwise::new(x, &s.verify)?;
    let m = s.verify.grid.n();
    let div: Vec<f64> = pw.x1x.iter().zip(&pw.x2y).map(|(a, b)| a + b).collect();

    let mut candidates = Vec::new();
    for v in first.iter().chain(rest.iter()) {
        let sigma = k.apply_norm(v);
        let mut f = k.fields(v).remove(0);
        let mean = f.mean();
        if mean.abs() > 1e-8 {
            f = f.scale(1.0 / mean);
        }
        let [r, rx, ry] = jet(&f, m);
        let mut res = 0.0f64;
        for i in 0..r.len() {
            res = res.max((pw.x1[i] * rx[i] + pw.x2[i] * ry[i] + div[i] * r[i]).abs());
        }
        let scale = (pw.sup_field() + sup(&div)) * sup(&r);
        let min = r.iter().copied().fold(f64::INFINITY, f64::min);
        let mut cand = blank(vec![f], sigma);
        cand.residual = res;
        cand.residual_scale = scale;
        cand.verified = verdict(res, scale);
        cand.positive = Some(mean.abs() > 1e-8 && min > 0.0);
        cand.min_value = Some(min);
        candidates.push(cand);
    }
    Ok(SearchResult {
        kind: SearchKind::Density,
        fiber: fiber.to_vec(),
        options: opts,
        function_class: function_class(opts.band),
        basis: k.all_vectors(&first, &rest),
        kernel: k.report,
        candidates,
    })
}

/// Deterministic, well spread initial points for drift validation.
pub fn drift_seeds(count: usize) -> Vec<[f64; 2]> {
    const A1: f64 = 0.754_877_666_246_692_7;
    const A2: f64 = 0.569_840_290_998_053_3;
    (0..count)
        .map(|i| {
            let i = i as f64 + 0.5;
            [
                std::f64::consts::TAU * (i * A1).fract(),
                std::f64::consts::TAU * (i * A2).fract(),
            ]
        })
        .collect()
}

/// Largest relative drift of `f` along the trajectories.
pub fn spectral_drift(f: &SpectralField, trajectories: &[Trajectory], grid_n: usize) -> f64 {
    let values = f.to_grid(grid_n);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = (max - min).max(1e-12);
    let mut drift = 0.0f64;
    for t in trajectories {
        let s0 = t.start();
        let f0 = f.eval(s0[0], s0[1]).re;
        for s in &t.states {
            drift = drift.max((f.eval(s[0], s[1]).re - f0).abs());
        }
    }
    drift / scale
}

/// Mean-free `f` with `X(f) = 0`, each validated by its drift along
/// trajectories of `X`.
pub fn find_first_integrals(
    x: &VectorField2,
    fiber: &[f64],
    opts: SearchOptions,
) -> Result<SearchResult, SearchError> {
    let s = Setup::new(x, fiber, opts)?;
    let op = GalerkinOperator::assemble(&[vec![s.transport(x, Expr::zero())?]], opts.band);
    let k = Kernel::compute(&op, true, opts.threshold)?;
    let (first, rest) = k.split(None);
    let pw = Pointwise::new(x, &s.verify)?;
    let m = s.verify.grid.n();

    let trajectories = if rest.is_empty() {
        Vec::new()
    } else {
        drift_seeds(opts.drift_seeds)
            .into_iter()
            .map(|p| flow::integrate(x, fiber, p, opts.drift_horizon, opts.integrator_tol))
            .collect::<Result<Vec<_>, _>>()?
    };

    let mut candidates = Vec::new();
    for v in &rest {
        let f = k.fields(v).remove(0);
        let [fv, fx, fy] = jet(&f, m);
        let mut res = 0.0f64;
        for i in 0..fx.len() {
            res = res.max((pw.x1[i] * fx[i] + pw.x2[i] * fy[i]).abs());
        }
        let scale = pw.sup_field() * sup(&fv);
        let drift = spectral_drift(&f, &trajectories, m);
        let mut cand = blank(vec![f], k.apply_norm(v));
        cand.residual = res;
        cand.residual_scale = scale;
        cand.verified = verdict(res, scale) && drift <= DRIFT_TOL;
        cand.drift = Some(drift);
        candidates.push(cand);
    }
    Ok(SearchResult {
        kind: SearchKind::FirstIntegral,
        fiber: fiber.to_vec(),
        options: opts,
        function_class: function_class(opts.band),
        basis: k.all_vectors(&first, &rest),
        kernel: k.report,
        candidates,
    })
}

/// Fields `Y = a d_x + b d_y` with `[X, Y] = 0`.
///
/// `X` is reported first; the other candidates are orthogonal to it in
/// coefficient space and carry an independence verdict from
/// `min |det(X|Y)|` on the verification grid.
pub fn find_symmetries(
    x: &VectorField2,
    fiber: &[f64],
    opts: SearchOptions,
) -> Result<SearchResult, SearchError> {
    let s = Setup::new(x, fiber, opts)?;
    let blocks = vec![
        vec![
            s.transport(x, -x.vx.dx())?,
            s.terms(vec![(-x.vx.dy(), TrialOp::Identity)])?,
        ],
        vec![
            s.terms(vec![(-x.vy.dx(), TrialOp::Identity)])?,
            s.transport(x, -x.vy.dy())?,
        ],
    ];
    let op = GalerkinOperator::assemble(&blocks, opts.band);
    let k = Kernel::compute(&op, false, opts.threshold)?;
    let rb = RealBasis::new(opts.band);
    let mut xv = rb.to_real(&sample_to_grid(&x.vx, fiber, &s.grid)?);
    xv.extend(rb.to_real(&sample_to_grid(&x.vy, fiber, &s.grid)?));
    let (first, rest) = k.split(Some(&xv));
    let pw = Pointwise::new(x, &s.verify)?;
    let m = s.verify.grid.n();
    let sup_x = pw.sup_field();

    let mut candidates = Vec::new();
    let mut field = blank(
        vec![
            sample_to_grid(&x.vx, fiber, &s.grid)?.with_band(opts.band),
            sample_to_grid(&x.vy, fiber, &s.grid)?.with_band(opts.band),
        ],
        first.as_ref().map_or(0.0, |v| k.apply_norm(v)),
    );
    field.is_field = true;
    field.verified = true;
    field.residual_scale = sup_x * sup_x;
    candidates.push(field);

    for v in &rest {
        let comps = k.fields(v);
        let [a, ax, ay] = jet(&comps[0], m);
        let [b, bx, by] = jet(&comps[1], m);
        let mut res = 0.0f64;
        let mut min_det = f64::INFINITY;
        for i in 0..a.len() {
            let c1 = pw.x1[i] * ax[i] + pw.x2[i] * ay[i] - a[i] * pw.x1x[i] - b[i] * pw.x1y[i];
            let c2 = pw.x1[i] * bx[i] + pw.x2[i] * by[i] - a[i] * pw.x2x[i] - b[i] * pw.x2y[i];
            res = res.max(c1.abs()).max(c2.abs());
            min_det = min_det.min((pw.x1[i] * b[i] - pw.x2[i] * a[i]).abs());
        }
        let scale = sup_x * sup(&a).max(sup(&b));
        let mut cand = blank(comps, k.apply_norm(v));
        cand.residual = res;
        cand.residual_scale = scale;
        cand.verified = verdict(res, scale);
        cand.independence = Some(Independence {
            min_abs_det: min_det,
            independent: min_det > EPS_INDEP,
        });
        candidates.push(cand);
    }
    Ok(SearchResult {
        kind: SearchKind::Symmetry,
        fiber: fiber.to_vec(),
        options: opts,
        function_class: function_class(opts.band),
        basis: k.all_vectors(&first, &rest),
        kernel: k.report,
        candidates,
    })
}

/// One-forms `alpha = A dx + B dy` with `L_X alpha = 0`.
pub fn find_invariant_one_forms(
    x: &VectorField2,
    fiber: &[f64],
    opts: SearchOptions,
) -> Result<SearchResult, SearchError> {
    let s = Setup::new(x, fiber, opts)?;
    let blocks = vec![
        vec![
            s.transport(x, x.vx.dx())?,
            s.terms(vec![(x.vy.dx(), TrialOp::Identity)])?,
        ],
        vec![
            s.terms(vec![(x.vx.dy(), TrialOp::Identity)])?,
            s.transport(x, x.vy.dy())?,
        ],
    ];
    let op = GalerkinOperator::assemble(&blocks, opts.band);
    let k = Kernel::compute(&op, false, opts.threshold)?;
    let (first, rest) = k.split(None);
    let pw = Pointwise::new(x, &s.verify)?;
    let m = s.verify.grid.n();

    let mut candidates = Vec::new();
    for v in &rest {
        let comps = k.fields(v);
        let [a, ax, ay] = jet(&comps[0], m);
        let [b, bx, by] = jet(&comps[1], m);
        let mut res = 0.0f64;
        for i in 0..a.len() {
            let c1 = pw.x1[i] * ax[i] + pw.x2[i] * ay[i] + a[i] * pw.x1x[i] + b[i] * pw.x2x[i];
            let c2 = pw.x1[i] * bx[i] + pw.x2[i] * by[i] + a[i] * pw.x1y[i] + b[i] * pw.x2y[i];
            res = res.max(c1.abs()).max(c2.abs());
        }
        let scale = (pw.sup_field() + pw.sup_jacobian()) * sup(&a).max(sup(&b));
        let mut cand = blank(comps, k.apply_norm(v));
        cand.residual = res;
        cand.residual_scale = scale;
        cand.verified = verdict(res, scale);
        candidates.push(cand);
    }
    Ok(SearchResult {
        kind: SearchKind::OneForm,
        fiber: fiber.to_vec(),
        options: opts,
        function_class: function_class(opts.band),
        basis: k.all_vectors(&first, &rest),
        kernel: k.report,
        candidates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn field(a: &str, b: &str) -> VectorField2 {
        VectorField2::new(parse(a, 0).unwrap(), parse(b, 0).unwrap())
    }

    fn small() -> SearchOptions {
        SearchOptions {
            grid: 32,
            band: 6,
            ..Default::default()
        }
    }

    #[test]
    fn d_x_has_y_only_densities_and_integrals() {
        let x = field("1", "0");
        let r = find_invariant_density(&x, &[], small()).unwrap();
        assert_eq!(r.kernel.dimension, 13);
        assert_eq!(r.candidates[0].positive, Some(true));
        assert!((r.candidates[0].scalar().mean() - 1.0).abs() < 1e-12);
        assert!(r.candidates[1..].iter().all(|c| c.positive == Some(false)));
        assert!(r.found());

        let r = find_first_integrals(&x, &[], small()).unwrap();
        assert_eq!(r.kernel.dimension, 12);
        for c in &r.candidates {
            let f = c.scalar();
            for j in 1..=6 {
                for k in -6..=6 {
                    assert!(f.coeff(j, k).norm() < 1e-12);
                }
            }
            assert!(c.drift.unwrap() < 1e-12);
        }
        assert!(r.found());
    }

    #[test]
    fn constant_incommensurable_field_has_constant_symmetries() {
        let r = find_symmetries(&field("1", "sqrt2"), &[], small()).unwrap();
        assert_eq!(r.kernel.dimension, 2);
        assert!(r.candidates[0].is_field);
        assert_eq!(r.candidates.len(), 2);
        let y = &r.candidates[1];
        assert!(y.independence.unwrap().independent);
        assert!(r.found());
        let r = find_first_integrals(&field("1", "sqrt2"), &[], small()).unwrap();
        assert_eq!(r.kernel.dimension, 0);
        assert!(!r.found());
    }

    #[test]
    fn example1_symmetries_span_field_and_d_x() {
        let x = field("sin(y)+sqrt2", "1");
        let r = find_symmetries(&x, &[], small()).unwrap();
        assert_eq!(r.kernel.dimension, 2);
        let dx = [SpectralField::constant(1.0, 6), SpectralField::zeros(6)];
        assert!((r.span_correlation(&dx) - 1.0).abs() < 1e-10);
        let y = &r.candidates[1];
        assert!(y.verified && y.independence.unwrap().independent);
        let r = find_invariant_density(&x, &[], small()).unwrap();
        assert!(r.candidates[0].residual <= 1e-10);
        assert!(r.found());
    }

    #[test]
    fn vanishing_field_is_rejected() {
        assert!(matches!(
            find_symmetries(&field("sin(x)", "0"), &[], small()),
            Err(SearchError::Vanishing(_))
        ));
    }

    #[test]
    fn drift_seeds_are_distinct() {
        let s = drift_seeds(10);
        for i in 0..10 {
            for j in 0..i {
                assert!((s[i][0] - s[j][0]).abs() + (s[i][1] - s[j][1]).abs() > 0.1);
            }
        }
    }
}
