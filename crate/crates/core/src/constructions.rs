//! Constructive results linking symmetries, invariant forms and volumes.
//!
//! Every construction first measures its hypotheses, then builds its
//! object symbolically and measures its conclusions. Failed hypotheses are
//! reported in the outcome, never raised, so partially wrong inputs can be
//! audited.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::expr::{EvalError, Expr};
use crate::fourier::{FourierError, Grid2};
use crate::geometry::{
    determinant, divergence, dual_coframe, exterior_derivative_oneform, interior_volume,
    lie_bracket, lie_derivative_oneform, FiberGrid, FiberedSystem, GeometryError, OneForm2,
    VectorField2, VolumeForm2, EPS_INDEP, EPS_VANISH,
};

pub const HYPOTHESIS_TOL: f64 = 1e-8;
pub const CONCLUSION_TOL: f64 = 1e-8;
/// Classification margins are this much looser than the hypothesis tolerance.
pub const CLASSIFICATION_FACTOR: f64 = 10.0;
/// Divergence bound for the volume built from a commuting frame.
pub const FRAME_DIVERGENCE_TOL: f64 = 1e-9;
/// Bound on `X(I)` for the first integral built from a pair.
pub const PAIR_INTEGRAL_TOL: f64 = 1e-9;
/// Oscillation above which a first integral counts as nontrivial.
pub const OSCILLATION_MIN: f64 = 1e-6;
/// `|alpha_z|` bound for a zero of a one-form.
pub const ZERO_TOL: f64 = 1e-8;
/// `|d alpha|` lower bound at a zero for condition (ii).
pub const D_ALPHA_MIN: f64 = 1e-4;
const ZERO_STARTS: usize = 32;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Bound {
    /// Passes when `value <= tol`.
    AtMost,
    /// Passes when `value > tol`.
    Above,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NamedResidual {
    pub name: String,
    pub value: f64,
    pub tol: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl NamedResidual {
    pub fn at_most(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tol,
            bound: Bound::AtMost,
            pass: value <= tol,
        }
    }

    pub fn above(name: &str, value: f64, tol: f64) -> Self {
        Self {
            name: name.to_string(),
            value,
            tol,
            bound: Bound::Above,
            pass: value > tol,
        }
    }
}

/// The object a construction produced.
#[derive(Clone, Debug, PartialEq)]
pub enum Produced {
    Volume(VolumeForm2),
    Field(VectorField2),
    Integral(Expr),
}

impl Serialize for Produced {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Produced::Volume(v) => {
                let mut st = s.serialize_struct("Volume", 2)?;
                st.serialize_field("kind", "volume")?;
                st.serialize_field("density", &v.rho.to_string())?;
                st.end()
            }
            Produced::Field(f) => {
                let mut st = s.serialize_struct("Field", 3)?;
                st.serialize_field("kind", "vector-field")?;
                st.serialize_field("dx", &f.vx.to_string())?;
                st.serialize_field("dy", &f.vy.to_string())?;
                st.end()
            }
            Produced::Integral(e) => {
                let mut st = s.serialize_struct("Integral", 2)?;
                st.serialize_field("kind", "first-integral")?;
                st.serialize_field("expr", &e.to_string())?;
                st.end()
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConstructionOutcome {
    pub construction: &'static str,
    pub hypotheses: Vec<NamedResidual>,
    pub conclusions: Vec<NamedResidual>,
    pub produced: Option<Produced>,
    pub classification: Option<String>,
    pub inconsistent: bool,
    pub notes: Vec<String>,
}

impl ConstructionOutcome {
    fn new(construction: &'static str) -> Self {
        Self {
            construction,
            hypotheses: Vec::new(),
            conclusions: Vec::new(),
            produced: None,
            classification: None,
            inconsistent: false,
            notes: Vec::new(),
        }
    }

    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|r| r.pass)
    }

    pub fn conclusions_hold(&self) -> bool {
        !self.conclusions.is_empty() && self.conclusions.iter().all(|r| r.pass)
    }

    pub fn pass(&self) -> bool {
        self.hypotheses_hold() && self.conclusions_hold() && !self.inconsistent
    }

    pub fn failed_hypotheses(&self) -> Vec<&str> {
        self.hypotheses
            .iter()
            .filter(|r| !r.pass)
            .map(|r| r.name.as_str())
            .collect()
    }

    pub fn residual(&self, name: &str) -> Option<&NamedResidual> {
        self.hypotheses
            .iter()
            .chain(&self.conclusions)
            .find(|r| r.name == name)
    }

    pub fn field(&self) -> Option<&VectorField2> {
        match &self.produced {
            Some(Produced::Field(f)) => Some(f),
            _ => None,
        }
    }

    pub fn volume(&self) -> Option<&VolumeForm2> {
        match &self.produced {
            Some(Produced::Volume(v)) => Some(v),
            _ => None,
        }
    }

    pub fn integral(&self) -> Option<&Expr> {
        match &self.produced {
            Some(Produced::Integral(e)) => Some(e),
            _ => None,
        }
    }
}

/// Grid size, tolerances and the fiber points at which everything is checked.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstructionOptions {
    pub grid: usize,
    pub hypothesis_tol: f64,
    pub conclusion_tol: f64,
    /// Fiber points; `None` means the `3^m` lattice of the system's box.
    pub fibers: Option<Vec<Vec<f64>>>,
}

impl Default for ConstructionOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            hypothesis_tol: HYPOTHESIS_TOL,
            conclusion_tol: CONCLUSION_TOL,
            fibers: None,
        }
    }
}

/// Fiber grids over every sample point of `U`.
struct Sampler {
    grids: Vec<FiberGrid>,
}

impl Sampler {
    fn new(sys: &FiberedSystem, opts: &ConstructionOptions) -> Result<Self, ConstructionError> {
        let grid = Grid2::new(opts.grid)?;
        let fibers = opts.fibers.clone().unwrap_or_else(|| sys.fiber_lattice());
        Ok(Self {
            grids: fibers.iter().map(|c| FiberGrid::new(grid, c)).collect(),
        })
    }

    fn sup(&self, e: &Expr) -> Result<f64, EvalError> {
        let mut m = 0.0f64;
        for g in &self.grids {
            m = m.max(g.sup_norm(e)?);
        }
        Ok(m)
    }

    fn sup_field(&self, v: &VectorField2) -> Result<f64, EvalError> {
        Ok(self.sup(&v.vx)?.max(self.sup(&v.vy)?))
    }

    fn sup_form(&self, a: &OneForm2) -> Result<f64, EvalError> {
        Ok(self.sup(&a.ax)?.max(self.sup(&a.ay)?))
    }

    fn min_abs(&self, e: &Expr) -> Result<f64, EvalError> {
        let mut m = f64::INFINITY;
        for g in &self.grids {
            m = m.min(g.min_abs(e)?);
        }
        Ok(m)
    }

    fn min_value(&self, e: &Expr) -> Result<f64, EvalError> {
        let mut m = f64::INFINITY;
        for g in &self.grids {
            m = g.values(e)?.into_iter().fold(m, f64::min);
        }
        Ok(m)
    }

    /// Largest oscillation over a single fiber.
    fn oscillation(&self, e: &Expr) -> Result<f64, EvalError> {
        let mut m = 0.0f64;
        for g in &self.grids {
            m = m.max(g.oscillation(e)?);
        }
        Ok(m)
    }
}

fn divergence_residual(
    s: &Sampler,
    x: &VectorField2,
    mu: &VolumeForm2,
) -> Result<Result<f64, f64>, EvalError> {
    let min = s.min_value(&mu.rho)?;
    if !(min > 0.0) {
        return Ok(Err(min));
    }
    Ok(Ok(s.sup(&divergence(x, mu))?))
}

/// Volume from a commuting, independent pair: `rho` is the `dx ^ dy`
/// density of `alpha_X ^ alpha_Y` for the dual coframe, `1 / det(X|Y)`,
/// with the sign chosen to make it positive.
pub fn volume_from_frame(
    sys: &FiberedSystem,
    y: &VectorField2,
    opts: &ConstructionOptions,
) -> Result<ConstructionOutcome, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let x = &sys.field;
    let mut out = ConstructionOutcome::new("volume-from-frame");
    out.hypotheses.push(NamedResidual::at_most(
        "B2: [X,Y] = 0",
        s.sup_field(&lie_bracket(x, y))?,
        opts.hypothesis_tol,
    ));
    let det = determinant(x, y);
    out.hypotheses.push(NamedResidual::above(
        "independence: min |det(X|Y)|",
        s.min_abs(&det)?,
        EPS_INDEP,
    ));
    out.notes
        .push("B4 holds structurally: Y is tangent to the fibers".to_string());
    if !out.hypotheses_hold() {
        return Ok(out);
    }

    let mut rho = 1.0 / det.clone();
    let first = &s.grids[0];
    let (x0, y0) = first.grid.nodes().next().unwrap();
    if rho.eval(&first.point(x0, y0))? < 0.0 {
        rho = -rho;
        out.notes
            .push("orientation reversed: alpha_X ^ alpha_Y = -rho dx ^ dy".to_string());
    }
    let mu = VolumeForm2::new(rho);

    // independent route: invert (X|Y) node by node and wedge the coframe
    let mut mismatch = 0.0f64;
    for g in &s.grids {
        let cf = match dual_coframe(x, y, g) {
            Ok(cf) => cf,
            Err(GeometryError::Eval(e)) => return Err(e.into()),
            Err(e) => {
                out.notes.push(e.to_string());
                return Ok(out);
            }
        };
        let sym = g.values(&mu.rho)?;
        for (w, r) in cf.wedge_density().iter().zip(&sym) {
            mismatch = mismatch.max((w.abs() - r).abs());
        }
    }
    out.conclusions.push(NamedResidual::at_most(
        "coframe wedge matches rho",
        mismatch,
        opts.conclusion_tol,
    ));
    out.conclusions.push(NamedResidual::above(
        "rho > 0",
        s.min_value(&mu.rho)?,
        0.0,
    ));
    out.conclusions.push(NamedResidual::at_most(
        "L_X mu = 0: div_mu X",
        s.sup(&divergence(x, &mu))?,
        FRAME_DIVERGENCE_TOL,
    ));
    out.produced = Some(Produced::Volume(mu));
    Ok(out)
}

/// Verdict of condition (i): `alpha` is somewhere not proportional to `i_X mu`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionI {
    pub holds: bool,
    pub max_det: f64,
    pub threshold: f64,
}

/// Condition (i) by the pointwise determinant of `alpha` against `i_X mu`.
pub fn check_condition_i(
    sys: &FiberedSystem,
    alpha: &OneForm2,
    mu: &VolumeForm2,
    opts: &ConstructionOptions,
) -> Result<ConditionI, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let flux = interior_volume(&sys.field, mu);
    let det = &alpha.ax * &flux.ay - &alpha.ay * &flux.ax;
    let max_det = s.sup(&det)?;
    let threshold = EPS_INDEP * s.sup_form(alpha)? * s.sup_form(&flux)?;
    Ok(ConditionI {
        holds: max_det > threshold,
        max_det,
        threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Witness {
    pub fiber: Vec<f64>,
    pub x: f64,
    pub y: f64,
    pub alpha_norm: f64,
    pub d_alpha: f64,
}

/// Verdict of condition (ii): a zero of `alpha` where `d alpha` does not vanish.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionII {
    pub holds: bool,
    pub witness: Option<Witness>,
    /// Zeros located (to `ZERO_TOL`) while searching.
    pub zeros_found: usize,
    pub note: String,
}

/// Search the grid for zeros of `alpha`, refine each start with damped
/// Newton steps on `(A_x, A_y)`, and test `|d alpha|` at converged zeros.
pub fn check_condition_ii(
    sys: &FiberedSystem,
    alpha: &OneForm2,
    opts: &ConstructionOptions,
) -> Result<ConditionII, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let d_alpha = exterior_derivative_oneform(alpha);
    let jac = [
        [alpha.ax.dx(), alpha.ax.dy()],
        [alpha.ay.dx(), alpha.ay.dy()],
    ];
    let mut zeros = 0;
    let mut best: Option<Witness> = None;
    for g in &s.grids {
        let ax = g.values(&alpha.ax)?;
        let ay = g.values(&alpha.ay)?;
        let nodes: Vec<(f64, f64)> = g.grid.nodes().collect();
        let mut order: Vec<usize> = (0..nodes.len()).collect();
        order.sort_by(|&i, &j| {
            ax[i].hypot(ay[i])
                .total_cmp(&ax[j].hypot(ay[j]))
                .then(i.cmp(&j))
        });
        for &i in order.iter().take(ZERO_STARTS) {
            let Some((zx, zy, norm)) = refine_zero(alpha, &jac, g, nodes[i])? else {
                continue;
            };
            zeros += 1;
            let d = d_alpha.eval(&g.point(zx, zy))?.abs();
            if best.as_ref().is_none_or(|w| d > w.d_alpha) {
                best = Some(Witness {
                    fiber: g.fiber.clone(),
                    x: zx,
                    y: zy,
                    alpha_norm: norm,
                    d_alpha: d,
                });
            }
        }
    }
    let holds = best.as_ref().is_some_and(|w| w.d_alpha >= D_ALPHA_MIN);
    let note = if holds {
        "witness found on sampled set"
    } else if zeros > 0 {
        "zeros found on sampled set, but d alpha vanishes there"
    } else {
        "no witness found on grid"
    };
    Ok(ConditionII {
        holds,
        witness: if holds { best } else { None },
        zeros_found: zeros,
        note: note.to_string(),
    })
}

/// Levenberg-Marquardt iterations for `alpha(z) = 0` from a grid node.
fn refine_zero(
    alpha: &OneForm2,
    jac: &[[Expr; 2]; 2],
    g: &FiberGrid,
    start: (f64, f64),
) -> Result<Option<(f64, f64, f64)>, EvalError> {
    let eval = |x: f64, y: f64| -> Result<[f64; 2], EvalError> {
        let p = g.point(x, y);
        Ok([alpha.ax.eval(&p)?, alpha.ay.eval(&p)?])
    };
    let (mut x, mut y) = start;
    let mut f = eval(x, y)?;
    let mut lambda = 1e-6;
    for _ in 0..60 {
        let norm = f[0].hypot(f[1]);
        if norm <= ZERO_TOL {
            return Ok(Some((x, y, norm)));
        }
        let p = g.point(x, y);
        let j = [
            [jac[0][0].eval(&p)?, jac[0][1].eval(&p)?],
            [jac[1][0].eval(&p)?, jac[1][1].eval(&p)?],
        ];
        // (J^T J + lambda I) d = -J^T f
        let a = j[0][0] * j[0][0] + j[1][0] * j[1][0] + lambda;
        let b = j[0][0] * j[0][1] + j[1][0] * j[1][1];
        let c = j[0][1] * j[0][1] + j[1][1] * j[1][1] + lambda;
        let r0 = -(j[0][0] * f[0] + j[1][0] * f[1]);
        let r1 = -(j[0][1] * f[0] + j[1][1] * f[1]);
        let det = a * c - b * b;
        if det == 0.0 || !det.is_finite() {
            return Ok(None);
        }
        let (dx, dy) = ((c * r0 - b * r1) / det, (a * r1 - b * r0) / det);
        let trial = eval(x + dx, y + dy)?;
        if trial[0].hypot(trial[1]) < norm {
            x += dx;
            y += dy;
            f = trial;
            lambda = (lambda * 0.1).max(1e-15);
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                return Ok(None);
            }
        }
    }
    let norm = f[0].hypot(f[1]);
    Ok((norm <= ZERO_TOL).then_some((x, y, norm)))
}

/// The field `Y` with `i_Y mu = alpha`: `Y = (A_y / rho) d_x - (A_x / rho) d_y`.
pub fn symmetry_from_one_form(
    sys: &FiberedSystem,
    alpha: &OneForm2,
    mu: &VolumeForm2,
    opts: &ConstructionOptions,
) -> Result<ConstructionOutcome, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let x = &sys.field;
    let mut out = ConstructionOutcome::new("symmetry-from-one-form");
    out.hypotheses.push(NamedResidual::at_most(
        "L_X alpha = 0",
        s.sup_form(&lie_derivative_oneform(x, alpha))?,
        opts.hypothesis_tol,
    ));
    match divergence_residual(&s, x, mu)? {
        Ok(d) => out.hypotheses.push(NamedResidual::at_most(
            "L_X mu = 0: div_mu X",
            d,
            opts.hypothesis_tol,
        )),
        Err(min) => {
            out.hypotheses
                .push(NamedResidual::above("mu positive: min rho", min, 0.0));
        }
    }
    if !out.hypotheses_hold() {
        return Ok(out);
    }
    let y = VectorField2::new(&alpha.ay / &mu.rho, -(&alpha.ax / &mu.rho));
    out.conclusions.push(NamedResidual::at_most(
        "[X,Y] = 0",
        s.sup_field(&lie_bracket(x, &y))?,
        opts.conclusion_tol,
    ));
    let back = interior_volume(&y, mu);
    out.conclusions.push(NamedResidual::at_most(
        "i_Y mu = alpha",
        s.sup_form(&back.minus(alpha))?,
        opts.conclusion_tol,
    ));
    let margin = s.min_abs(&determinant(x, &y))?;
    let independent = margin > EPS_INDEP;
    out.notes.push(format!(
        "independence margin min |det(X|Y)| = {margin:e}"
    ));
    out.classification = Some(
        if independent {
            "independent dynamical symmetry"
        } else {
            "symmetry not independent of X"
        }
        .to_string(),
    );
    out.produced = Some(Produced::Field(y));
    Ok(out)
}

fn combine_common(
    out: &mut ConstructionOutcome,
    s: &Sampler,
    x: &VectorField2,
    h: &Expr,
    z: VectorField2,
    opts: &ConstructionOptions,
) -> Result<(), ConstructionError> {
    out.conclusions.push(NamedResidual::at_most(
        "[X,Z] = 0",
        s.sup_field(&lie_bracket(x, &z))?,
        opts.conclusion_tol,
    ));
    out.conclusions.push(NamedResidual::above(
        "independence: min |det(X|Z)|",
        s.min_abs(&determinant(x, &z))?,
        EPS_INDEP,
    ));
    out.classification = Some(
        if out.conclusions_hold() {
            "Z is an independent dynamical symmetry"
        } else {
            "Z is not an independent dynamical symmetry"
        }
        .to_string(),
    );
    out.notes.push(format!("h = {h}"));
    out.produced = Some(Produced::Field(z));
    Ok(())
}

/// Case `[X,Y] = gY`, `X(h) = -gh`: `Z = X + hY` commutes with `X`.
pub fn lie_point_combine_i(
    sys: &FiberedSystem,
    y: &VectorField2,
    g: &Expr,
    h: &Expr,
    opts: &ConstructionOptions,
) -> Result<ConstructionOutcome, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let x = &sys.field;
    let mut out = ConstructionOutcome::new("lie-point-i");
    out.hypotheses.push(NamedResidual::above(
        "h != 0: min |h|",
        s.min_abs(h)?,
        EPS_VANISH,
    ));
    out.hypotheses.push(NamedResidual::at_most(
        "[X,Y] = gY",
        s.sup_field(&lie_bracket(x, y).minus(&y.scaled(g)))?,
        opts.hypothesis_tol,
    ));
    out.hypotheses.push(NamedResidual::at_most(
        "X(h) = -gh",
        s.sup(&(x.apply(h) + g * h))?,
        opts.hypothesis_tol,
    ));
    if !out.hypotheses_hold() {
        return Ok(out);
    }
    combine_common(&mut out, &s, x, h, x.plus(&y.scaled(h)), opts)?;
    Ok(out)
}

/// Case `[X,Y] = gX`, `X(h) = -g`: `Z = hX + Y` commutes with `X`.
pub fn lie_point_combine_ii(
    sys: &FiberedSystem,
    y: &VectorField2,
    g: &Expr,
    h: &Expr,
    opts: &ConstructionOptions,
) -> Result<ConstructionOutcome, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let x = &sys.field;
    let mut out = ConstructionOutcome::new("lie-point-ii");
    out.hypotheses.push(NamedResidual::above(
        "h != 0: min |h|",
        s.min_abs(h)?,
        EPS_VANISH,
    ));
    out.hypotheses.push(NamedResidual::at_most(
        "[X,Y] = gX",
        s.sup_field(&lie_bracket(x, y).minus(&x.scaled(g)))?,
        opts.hypothesis_tol,
    ));
    out.hypotheses.push(NamedResidual::at_most(
        "X(h) = -g",
        s.sup(&(x.apply(h) + g.clone()))?,
        opts.hypothesis_tol,
    ));
    if !out.hypotheses_hold() {
        return Ok(out);
    }
    combine_common(&mut out, &s, x, h, x.scaled(h).plus(y), opts)?;
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    /// `lambda = 0`: `Y` is a dynamical symmetry.
    BOnT2,
    /// `I = omega(X, Y)` is a nontrivial first integral.
    BOnS1,
}

impl PairClass {
    pub fn label(self) -> &'static str {
        match self {
            PairClass::BOnT2 => "B on T^2 (Y is a dynamical symmetry)",
            PairClass::BOnS1 => "B on S^1 (nontrivial first integral)",
        }
    }
}

/// Pointwise least-squares multiplier `<[X,Y], X> / <X, X>`.
pub fn fit_lambda(x: &VectorField2, y: &VectorField2) -> Expr {
    let b = lie_bracket(x, y);
    (&b.vx * &x.vx + &b.vy * &x.vy) / (&x.vx * &x.vx + &x.vy * &x.vy)
}

/// For `mu`-preserving `X, Y` with `[X,Y] = lambda X`, the function
/// `I = rho (X1 Y2 - X2 Y1)` is a first integral of `X`; it is constant
/// exactly when `lambda = 0`.
pub fn first_integral_from_pair(
    sys: &FiberedSystem,
    y: &VectorField2,
    mu: &VolumeForm2,
    lambda: Option<&Expr>,
    opts: &ConstructionOptions,
) -> Result<ConstructionOutcome, ConstructionError> {
    let s = Sampler::new(sys, opts)?;
    let x = &sys.field;
    let mut out = ConstructionOutcome::new("integral-from-pair");
    for (name, v) in [("L_X mu = 0: div_mu X", x), ("L_Y mu = 0: div_mu Y", y)] {
        match divergence_residual(&s, v, mu)? {
            Ok(d) => out
                .hypotheses
                .push(NamedResidual::at_most(name, d, opts.hypothesis_tol)),
            Err(min) => {
                out.hypotheses
                    .push(NamedResidual::above("mu positive: min rho", min, 0.0));
            }
        }
    }
    out.hypotheses.push(NamedResidual::above(
        "independence: min |det(X|Y)|",
        s.min_abs(&determinant(x, y))?,
        EPS_INDEP,
    ));
    let lambda = match lambda {
        Some(l) => l.clone(),
        None => {
            out.notes
                .push("lambda fitted pointwise as <[X,Y],X>/<X,X>".to_string());
            fit_lambda(x, y)
        }
    };
    out.hypotheses.push(NamedResidual::at_most(
        "[X,Y] = lambda X",
        s.sup_field(&lie_bracket(x, y).minus(&x.scaled(&lambda)))?,
        opts.hypothesis_tol,
    ));
    if !out.hypotheses_hold() {
        return Ok(out);
    }

    let integral = &mu.rho * &determinant(x, y);
    out.conclusions.push(NamedResidual::at_most(
        "X(I) = 0",
        s.sup(&x.apply(&integral))?,
        PAIR_INTEGRAL_TOL,
    ));
    let lambda_sup = s.sup(&lambda)?;
    let osc = s.oscillation(&integral)?;
    out.notes.push(format!(
        "sup |lambda| = {lambda_sup:e}, osc I = {osc:e}"
    ));
    let class = if lambda_sup <= opts.hypothesis_tol {
        Some(PairClass::BOnT2)
    } else if osc > OSCILLATION_MIN {
        Some(PairClass::BOnS1)
    } else {
        None
    };
    // lambda clearly nonzero forces I to be nonconstant
    out.inconsistent = class.is_none()
        || (lambda_sup > CLASSIFICATION_FACTOR * opts.hypothesis_tol && osc <= OSCILLATION_MIN);
    out.classification = Some(match class {
        Some(c) => c.label().to_string(),
        None => "inconsistent: lambda nonzero but I constant".to_string(),
    });
    out.produced = Some(Produced::Integral(integral));
    Ok(out)
}

/// Classification tag of a pair outcome, if any.
pub fn pair_class(outcome: &ConstructionOutcome) -> Option<PairClass> {
    match outcome.classification.as_deref() {
        Some(s) if s == PairClass::BOnT2.label() => Some(PairClass::BOnT2),
        Some(s) if s == PairClass::BOnS1.label() => Some(PairClass::BOnS1),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s, 0).unwrap()
    }

    fn vf(a: &str, b: &str) -> VectorField2 {
        VectorField2::new(e(a), e(b))
    }

    fn torus(a: &str, b: &str) -> FiberedSystem {
        FiberedSystem::on_torus(vf(a, b))
    }

    fn opts() -> ConstructionOptions {
        ConstructionOptions::default()
    }

    #[test]
    fn frame_volumes() {
        let out = volume_from_frame(&torus("sin(y)+sqrt2", "1"), &vf("1", "0"), &opts()).unwrap();
        assert!(out.pass(), "{out:?}");
        let rho = &out.volume().unwrap().rho;
        assert_eq!(rho.as_num(), Some(1.0));
        assert!(out.notes.iter().any(|n| n.starts_with("orientation reversed")));

        let out = volume_from_frame(&torus("1", "0"), &vf("0", "1"), &opts()).unwrap();
        assert!(out.pass());
        assert_eq!(out.volume().unwrap().rho.as_num(), Some(1.0));

        let out = volume_from_frame(&torus("0", "1"), &vf("1+0.5*sin(y)", "0"), &opts()).unwrap();
        assert!(!out.hypotheses_hold());
        assert_eq!(out.failed_hypotheses(), vec!["B2: [X,Y] = 0"]);
        assert!(out.produced.is_none());
    }

    #[test]
    fn one_form_symmetry() {
        let sys = torus("sin(y)+sqrt2", "1");
        let out =
            symmetry_from_one_form(&sys, &OneForm2::dy(), &VolumeForm2::standard(), &opts()).unwrap();
        assert!(out.pass());
        let y = out.field().unwrap();
        assert_eq!(y.vx.as_num(), Some(1.0));
        assert!(y.vy.is_zero());
        assert!(out.residual("[X,Y] = 0").unwrap().value <= 1e-12);

        let flux = interior_volume(&sys.field, &VolumeForm2::standard());
        let out = symmetry_from_one_form(&sys, &flux, &VolumeForm2::standard(), &opts()).unwrap();
        let g = FiberGrid::new(Grid2::new(32).unwrap(), &[]);
        assert!(g.sup_norm_field(&out.field().unwrap().minus(&sys.field)).unwrap() < 1e-14);
        assert_eq!(out.classification.as_deref(), Some("symmetry not independent of X"));
    }

    #[test]
    fn condition_one() {
        let sys = torus("sin(y)+sqrt2", "1");
        let mu = VolumeForm2::standard();
        let c = check_condition_i(&sys, &OneForm2::dy(), &mu, &opts()).unwrap();
        assert!(c.holds);
        assert!((c.max_det - 1.0).abs() < 1e-15);
        let flux = interior_volume(&sys.field, &mu);
        let c = check_condition_i(&sys, &flux.scaled(&Expr::num(3.0)), &mu, &opts()).unwrap();
        assert!(!c.holds);
        let c = check_condition_i(&sys, &flux.plus(&OneForm2::dy()), &mu, &opts()).unwrap();
        assert!(c.holds);
    }

    #[test]
    fn condition_two() {
        let sys = torus("1", "sqrt2");
        let c = check_condition_ii(&sys, &OneForm2::new(e("sin(x)"), e("sin(y)")), &opts()).unwrap();
        assert!(!c.holds && c.zeros_found > 0);
        let c = check_condition_ii(&sys, &OneForm2::new(Expr::zero(), e("sin(x)")), &opts()).unwrap();
        assert!(c.holds);
        let w = c.witness.unwrap();
        assert!(w.x.sin().abs() <= 1e-8 && (w.d_alpha - 1.0).abs() < 1e-8);
        let c = check_condition_ii(&sys, &OneForm2::dy(), &opts()).unwrap();
        assert!(!c.holds && c.zeros_found == 0);
        assert_eq!(c.note, "no witness found on grid");
        // zeros between grid nodes are found by refinement
        let c = check_condition_ii(&sys, &OneForm2::new(Expr::zero(), e("sin(x-0.01)")), &opts())
            .unwrap();
        assert!(c.holds);
    }

    #[test]
    fn lie_point_case_one() {
        let sys = torus("0", "1");
        let y = vf("1+0.5*sin(y)", "0");
        let g = e("0.5*cos(y)/(1+0.5*sin(y))");
        let h = e("1/(1+0.5*sin(y))");
        let out = lie_point_combine_i(&sys, &y, &g, &h, &opts()).unwrap();
        assert!(out.pass(), "{out:?}");
        let z = out.field().unwrap();
        let grid = FiberGrid::new(Grid2::new(64).unwrap(), &[]);
        assert!(grid.sup_norm_field(&z.minus(&vf("1", "1"))).unwrap() < 1e-14);
        assert!(out.residual("independence: min |det(X|Z)|").unwrap().value >= 0.9);

        let out = lie_point_combine_i(&sys, &y, &g, &Expr::one(), &opts()).unwrap();
        assert_eq!(out.failed_hypotheses(), vec!["X(h) = -gh"]);

        let out = lie_point_combine_i(&torus("1", "sqrt2"), &vf("0", "1"), &Expr::zero(), &Expr::one(), &opts())
            .unwrap();
        assert!(out.pass());
    }

    #[test]
    fn lie_point_case_two() {
        let sys = torus("0", "1");
        let y = vf("1", "0.3*sin(y)");
        let out = lie_point_combine_ii(&sys, &y, &e("0.3*cos(y)"), &e("2-0.3*sin(y)"), &opts()).unwrap();
        assert!(out.pass(), "{out:?}");
        let grid = FiberGrid::new(Grid2::new(64).unwrap(), &[]);
        let z = out.field().unwrap();
        assert!(grid.sup_norm_field(&z.minus(&vf("1", "2"))).unwrap() <= 1e-10);

        let out = lie_point_combine_ii(&sys, &y, &e("0.3*cos(y)"), &e("sin(x)"), &opts()).unwrap();
        assert!(out.failed_hypotheses().contains(&"h != 0: min |h|"));
    }

    #[test]
    fn pair_integrals() {
        let mu = VolumeForm2::standard();
        let sys = torus("2+sin(y)", "0");
        let l = e("-cos(y)/(2+sin(y))");
        let out = first_integral_from_pair(&sys, &vf("0", "1"), &mu, Some(&l), &opts()).unwrap();
        assert!(out.pass(), "{out:?}");
        assert_eq!(pair_class(&out), Some(PairClass::BOnS1));
        let grid = FiberGrid::new(Grid2::new(64).unwrap(), &[]);
        let i = out.integral().unwrap();
        assert!(grid.oscillation(i).unwrap() >= 1.9);
        assert!(grid.sup_norm(&(i - &e("2+sin(y)"))).unwrap() < 1e-15);
        // fitted multiplier gives the same answer
        let fitted = first_integral_from_pair(&sys, &vf("0", "1"), &mu, None, &opts()).unwrap();
        assert_eq!(pair_class(&fitted), Some(PairClass::BOnS1));

        let out =
            first_integral_from_pair(&torus("sqrt2", "1"), &vf("1", "0"), &mu, Some(&Expr::zero()), &opts())
                .unwrap();
        assert!(out.pass());
        assert_eq!(pair_class(&out), Some(PairClass::BOnT2));
        assert_eq!(out.integral().unwrap().as_num(), Some(-1.0));

        let out = first_integral_from_pair(&torus("sqrt2", "1"), &vf("1", "sin(y)"), &mu, None, &opts())
            .unwrap();
        assert!(out.failed_hypotheses().contains(&"L_Y mu = 0: div_mu Y"));
    }
}
