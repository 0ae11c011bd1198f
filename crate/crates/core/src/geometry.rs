//! Tensor calculus on the fibers of `U x T^2`.
//!
//! Fields are symbolic: components are [`Expr`]s and every identity is
//! assembled with exact derivatives. Grids only enter when a norm, a sign or
//! a pointwise inverse is needed. The reference volume is
//! `dc_1 ^ ... ^ dc_m ^ dx ^ dy` and `i_X (dx ^ dy) = X1 dy - X2 dx`.

use thiserror::Error;

use crate::expr::{EvalError, Expr, Point};
use crate::fourier::Grid2;

/// Pointwise linear-independence margin for `det(X|Y)`.
pub const EPS_INDEP: f64 = 1e-8;
/// Smallest admissible `|X|` for a never-vanishing field.
pub const EPS_VANISH: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("density not positive at (x={x:.6}, y={y:.6}): {value:e}")]
    NonPositiveDensity { x: f64, y: f64, value: f64 },
    #[error("fields dependent at (x={x:.6}, y={y:.6}): |det| = {det:e} at {count} grid nodes")]
    Dependent {
        x: f64,
        y: f64,
        det: f64,
        count: usize,
    },
    #[error("expression uses c_{used} but the system has {m} fiber parameters")]
    FiberIndex { used: usize, m: usize },
    #[error("fiber box needs {m} intervals with lo <= hi, got {got:?}")]
    Bounds { m: usize, got: Vec<(f64, f64)> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct VectorField2 {
    pub vx: Expr,
    pub vy: Expr,
}

impl VectorField2 {
    pub fn new(vx: Expr, vy: Expr) -> Self {
        Self { vx, vy }
    }

    pub fn d_x() -> Self {
        Self::new(Expr::one(), Expr::zero())
    }

    pub fn d_y() -> Self {
        Self::new(Expr::zero(), Expr::one())
    }

    /// `X(f) = X1 df/dx + X2 df/dy`; fiber variables are inert.
    pub fn apply(&self, f: &Expr) -> Expr {
        self.vx.clone() * f.dx() + self.vy.clone() * f.dy()
    }

    pub fn scaled(&self, s: &Expr) -> Self {
        Self::new(s * &self.vx, s * &self.vy)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(&self.vx + &other.vx, &self.vy + &other.vy)
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::new(&self.vx - &other.vx, &self.vy - &other.vy)
    }

    /// Divergence against `dx ^ dy`.
    pub fn flat_divergence(&self) -> Expr {
        self.vx.dx() + self.vy.dy()
    }

    pub fn max_fiber_index(&self) -> Option<usize> {
        self.vx.max_fiber_index().max(self.vy.max_fiber_index())
    }
}

/// `Ax dx + Ay dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneForm2 {
    pub ax: Expr,
    pub ay: Expr,
}

impl OneForm2 {
    pub fn new(ax: Expr, ay: Expr) -> Self {
        Self { ax, ay }
    }

    pub fn dx() -> Self {
        Self::new(Expr::one(), Expr::zero())
    }

    pub fn dy() -> Self {
        Self::new(Expr::zero(), Expr::one())
    }

    pub fn scaled(&self, s: &Expr) -> Self {
        Self::new(s * &self.ax, s * &self.ay)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::new(&self.ax + &other.ax, &self.ay + &other.ay)
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::new(&self.ax - &other.ax, &self.ay - &other.ay)
    }

    pub fn contract(&self, v: &VectorField2) -> Expr {
        &self.ax * &v.vx + &self.ay * &v.vy
    }
}

/// `rho dc_1 ^ ... ^ dc_m ^ dx ^ dy`.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeForm2 {
    pub rho: Expr,
}

impl VolumeForm2 {
    pub fn new(rho: Expr) -> Self {
        Self { rho }
    }

    pub fn standard() -> Self {
        Self::new(Expr::one())
    }

    /// Strict positivity of the density at every node of the fiber grid.
    pub fn ensure_positive(&self, grid: &FiberGrid) -> Result<(), GeometryError> {
        for (x, y) in grid.grid.nodes() {
            let value = self.rho.eval(&grid.point(x, y))?;
            if value <= 0.0 || !value.is_finite() {
                return Err(GeometryError::NonPositiveDensity { x, y, value });
            }
        }
        Ok(())
    }
}

/// `M = U x T^2` with `U` a box, the vector field tangent to the fibers and
/// the declared first integrals beyond the fiber projections.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedSystem {
    pub m: usize,
    pub bounds: Vec<(f64, f64)>,
    pub field: VectorField2,
    pub extra_integrals: Vec<Expr>,
    pub volume: Option<VolumeForm2>,
}

impl FiberedSystem {
    pub fn new(
        m: usize,
        bounds: Vec<(f64, f64)>,
        field: VectorField2,
        extra_integrals: Vec<Expr>,
        volume: Option<VolumeForm2>,
    ) -> Result<Self, GeometryError> {
        if bounds.len() != m || bounds.iter().any(|(lo, hi)| !(lo <= hi)) {
            return Err(GeometryError::Bounds { m, got: bounds });
        }
        let used = std::iter::once(field.max_fiber_index())
            .chain(extra_integrals.iter().map(Expr::max_fiber_index))
            .chain(volume.iter().map(|v| v.rho.max_fiber_index()))
            .flatten()
            .max();
        if let Some(i) = used {
            if i >= m {
                return Err(GeometryError::FiberIndex { used: i + 1, m });
            }
        }
        Ok(Self {
            m,
            bounds,
            field,
            extra_integrals,
            volume,
        })
    }

    /// A system on a single torus (`m = 0`).
    pub fn on_torus(field: VectorField2) -> Self {
        Self {
            m: 0,
            bounds: Vec::new(),
            field,
            extra_integrals: Vec::new(),
            volume: None,
        }
    }

    pub fn with_volume(mut self, volume: VolumeForm2) -> Self {
        self.volume = Some(volume);
        self
    }

    pub fn with_integrals(mut self, integrals: Vec<Expr>) -> Self {
        self.extra_integrals = integrals;
        self
    }

    /// Projections `c_1..c_m` followed by the extra integrals.
    pub fn first_integrals(&self) -> Vec<Expr> {
        (0..self.m)
            .map(Expr::fiber)
            .chain(self.extra_integrals.iter().cloned())
            .collect()
    }

    pub fn center(&self) -> Vec<f64> {
        self.bounds.iter().map(|(lo, hi)| 0.5 * (lo + hi)).collect()
    }

    /// The `3^m` lattice of corners, edge midpoints and center of `U`.
    pub fn fiber_lattice(&self) -> Vec<Vec<f64>> {
        let mut points = vec![Vec::new()];
        for &(lo, hi) in &self.bounds {
            let levels = [lo, 0.5 * (lo + hi), hi];
            points = points
                .into_iter()
                .flat_map(|p| {
                    levels.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

/// The fiber grid over one point of `U`.
#[derive(Clone, Debug)]
pub struct FiberGrid {
    pub grid: Grid2,
    pub fiber: Vec<f64>,
}

impl FiberGrid {
    pub fn new(grid: Grid2, fiber: &[f64]) -> Self {
        Self {
            grid,
            fiber: fiber.to_vec(),
        }
    }

    pub fn point(&self, x: f64, y: f64) -> Point<'_> {
        Point::new(&self.fiber, x, y)
    }

    pub fn values(&self, e: &Expr) -> Result<Vec<f64>, EvalError> {
        self.grid.sample(e, &self.fiber)
    }

    pub fn sup_norm(&self, e: &Expr) -> Result<f64, EvalError> {
        Ok(self.values(e)?.into_iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    pub fn min_abs(&self, e: &Expr) -> Result<f64, EvalError> {
        Ok(self
            .values(e)?
            .into_iter()
            .fold(f64::INFINITY, |m, v| m.min(v.abs())))
    }

    /// `max - min` over the grid.
    pub fn oscillation(&self, e: &Expr) -> Result<f64, EvalError> {
        let v = self.values(e)?;
        let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(max - min)
    }

    /// Largest component magnitude of a vector field.
    pub fn sup_norm_field(&self, v: &VectorField2) -> Result<f64, EvalError> {
        Ok(self.sup_norm(&v.vx)?.max(self.sup_norm(&v.vy)?))
    }

    pub fn sup_norm_form(&self, a: &OneForm2) -> Result<f64, EvalError> {
        Ok(self.sup_norm(&a.ax)?.max(self.sup_norm(&a.ay)?))
    }

    /// Smallest Euclidean length of the field over the grid.
    pub fn min_length(&self, v: &VectorField2) -> Result<f64, EvalError> {
        let (a, b) = (self.values(&v.vx)?, self.values(&v.vy)?);
        Ok(a.iter()
            .zip(&b)
            .fold(f64::INFINITY, |m, (p, q)| m.min(p.hypot(*q))))
    }
}

/// `[X,Y]^i = X(Y^i) - Y(X^i)`.
pub fn lie_bracket(x: &VectorField2, y: &VectorField2) -> VectorField2 {
    VectorField2::new(
        x.apply(&y.vx) - y.apply(&x.vx),
        x.apply(&y.vy) - y.apply(&x.vy),
    )
}

pub fn lie_derivative_scalar(x: &VectorField2, f: &Expr) -> Expr {
    x.apply(f)
}

/// `L_X alpha = i_X d alpha + d(i_X alpha)`.
pub fn lie_derivative_oneform(x: &VectorField2, alpha: &OneForm2) -> OneForm2 {
    let w = exterior_derivative_oneform(alpha);
    let s = alpha.contract(x);
    OneForm2::new(
        -(&w * &x.vy) + s.dx(),
        &w * &x.vx + s.dy(),
    )
}

/// Coordinate formula `(L_X alpha)_i = X(alpha_i) + alpha_j d_i X^j`.
pub fn lie_derivative_oneform_coordinates(x: &VectorField2, alpha: &OneForm2) -> OneForm2 {
    OneForm2::new(
        x.apply(&alpha.ax) + &alpha.ax * &x.vx.dx() + &alpha.ay * &x.vy.dx(),
        x.apply(&alpha.ay) + &alpha.ax * &x.vx.dy() + &alpha.ay * &x.vy.dy(),
    )
}

/// Fiber part of `i_X mu`: `rho (X1 dy - X2 dx)`.
pub fn interior_volume(x: &VectorField2, mu: &VolumeForm2) -> OneForm2 {
    OneForm2::new(-(&mu.rho * &x.vy), &mu.rho * &x.vx)
}

/// Density of `d alpha` against `dx ^ dy`.
pub fn exterior_derivative_oneform(alpha: &OneForm2) -> Expr {
    alpha.ay.dx() - alpha.ax.dy()
}

/// `L_X mu` as a density: `d(rho X1)/dx + d(rho X2)/dy`.
pub fn lie_derivative_volume(x: &VectorField2, mu: &VolumeForm2) -> VolumeForm2 {
    VolumeForm2::new((&mu.rho * &x.vx).dx() + (&mu.rho * &x.vy).dy())
}

/// `div_mu X = (d(rho X1)/dx + d(rho X2)/dy) / rho`. Positivity of `rho` is
/// checked separately with [`VolumeForm2::ensure_positive`].
pub fn divergence(x: &VectorField2, mu: &VolumeForm2) -> Expr {
    if mu.rho.as_num().is_some_and(|r| r != 0.0) {
        return x.flat_divergence();
    }
    lie_derivative_volume(x, mu).rho / mu.rho.clone()
}

/// `det(X|Y) = X1 Y2 - X2 Y1`.
pub fn determinant(x: &VectorField2, y: &VectorField2) -> Expr {
    &x.vx * &y.vy - &x.vy * &y.vx
}

/// A one-form sampled on a fiber grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridOneForm {
    pub ax: Vec<f64>,
    pub ay: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct GridCoframe {
    pub n: usize,
    pub alpha_x: GridOneForm,
    pub alpha_y: GridOneForm,
}

impl GridCoframe {
    /// Density of `alpha_X ^ alpha_Y` against `dx ^ dy` at every node.
    pub fn wedge_density(&self) -> Vec<f64> {
        (0..self.alpha_x.ax.len())
            .map(|i| {
                self.alpha_x.ax[i] * self.alpha_y.ay[i] - self.alpha_x.ay[i] * self.alpha_y.ax[i]
            })
            .collect()
    }
}

/// The coframe dual to `(X, Y)` at every grid node of the fiber.
pub fn dual_coframe(
    x: &VectorField2,
    y: &VectorField2,
    grid: &FiberGrid,
) -> Result<GridCoframe, GeometryError> {
    let (x1, x2) = (grid.values(&x.vx)?, grid.values(&x.vy)?);
    let (y1, y2) = (grid.values(&y.vx)?, grid.values(&y.vy)?);
    let nodes: Vec<(f64, f64)> = grid.grid.nodes().collect();
    let mut first_bad = None;
    let mut bad = 0;
    let len = nodes.len();
    let mut alpha_x = GridOneForm {
        ax: vec![0.0; len],
        ay: vec![0.0; len],
    };
    let mut alpha_y = alpha_x.clone();
    for i in 0..len {
        let det = x1[i] * y2[i] - x2[i] * y1[i];
        if det.abs() <= EPS_INDEP {
            bad += 1;
            first_bad.get_or_insert((nodes[i], det));
            continue;
        }
        alpha_x.ax[i] = y2[i] / det;
        alpha_x.ay[i] = -y1[i] / det;
        alpha_y.ax[i] = -x2[i] / det;
        alpha_y.ay[i] = x1[i] / det;
    }
    if let Some(((px, py), det)) = first_bad {
        return Err(GeometryError::Dependent {
            x: px,
            y: py,
            det: det.abs(),
            count: bad,
        });
    }
    Ok(GridCoframe {
        n: grid.grid.n(),
        alpha_x,
        alpha_y,
    })
}
