//! Hypothesis checks for invariant-volume and commuting-symmetry
//! integrability, and the classification pipeline built on the searches.
//!
//! Checks are pointwise on the fiber grids over the `3^m` lattice of `U`
//! plus the chosen fiber point. Grid positivity does not imply positivity
//! between nodes; every certificate says so.

use serde::Serialize;
use thiserror::Error;

use crate::constructions::{Bound, NamedResidual, OSCILLATION_MIN};
use crate::expr::{EvalError, Expr};
use crate::flow::{
    constant_return_time_test, poincare_section, rotation_vector, ReturnTimeClass,
    ReturnTimeVerdict, RotationEstimate, SectionData, CONSTANT_RETURN_TOL, ROTATION_HORIZON,
    SECTION_RETURNS, SECTION_SEEDS,
};
use crate::fourier::{Axis, FourierError, Grid2};
use crate::geometry::{
    determinant, divergence, lie_bracket, lie_derivative_scalar, FiberGrid, FiberedSystem,
    VectorField2, VolumeForm2, EPS_INDEP, EPS_VANISH,
};
use crate::search::{
    find_first_integrals, find_invariant_density, find_symmetries, SearchError, SearchOptions,
    SearchResult,
};

/// Absolute tolerance for residuals of supplied objects.
pub const CHECK_TOL: f64 = 1e-8;
/// Coefficients below this are dropped when a found density becomes an expression.
const DENSITY_CUTOFF: f64 = 1e-14;

const GRID_NOTE: &str =
    "positivity and independence are certified at grid nodes only, not between them";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CertifyError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Fourier(#[from] FourierError),
    #[error(transparent)]
    Search(#[from] SearchError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertifyOptions {
    pub grid: usize,
    pub tol: f64,
    /// Primary fiber point; the center of `U` when `None`.
    pub fiber: Option<Vec<f64>>,
    pub search: SearchOptions,
    pub rotation_horizon: f64,
    pub section_seeds: usize,
    pub section_returns: usize,
    pub return_tol: f64,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            grid: 64,
            tol: CHECK_TOL,
            fiber: None,
            search: SearchOptions::default(),
            rotation_horizon: ROTATION_HORIZON,
            section_seeds: SECTION_SEEDS,
            section_returns: SECTION_RETURNS,
            return_tol: CONSTANT_RETURN_TOL,
        }
    }
}

impl CertifyOptions {
    pub fn primary_fiber(&self, sys: &FiberedSystem) -> Vec<f64> {
        self.fiber.clone().unwrap_or_else(|| sys.center())
    }

    /// Lattice points of `U` followed by the primary fiber point.
    pub fn fibers(&self, sys: &FiberedSystem) -> Vec<Vec<f64>> {
        let mut f = sys.fiber_lattice();
        let p = self.primary_fiber(sys);
        if !f.contains(&p) {
            f.push(p);
        }
        f
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    EulerJacobi,
    Bogoyavlensky,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldClaim {
    pub dx: String,
    pub dy: String,
}

impl From<&VectorField2> for FieldClaim {
    fn from(v: &VectorField2) -> Self {
        Self {
            dx: v.vx.to_string(),
            dy: v.vy.to_string(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Claims {
    pub first_integrals: Vec<String>,
    pub symmetries: Vec<FieldClaim>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub volume_density: Option<String>,
}

/// One row of the residual table: a hypothesis evaluated on one claim.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub hypothesis: &'static str,
    pub claim: String,
    pub value: f64,
    pub tol: f64,
    pub bound: Bound,
    pub pass: bool,
}

impl ResidualRow {
    fn new(hypothesis: &'static str, claim: String, r: NamedResidual) -> Self {
        Self {
            hypothesis,
            claim,
            value: r.value,
            tol: r.tol,
            bound: r.bound,
            pass: r.pass,
        }
    }
}

/// Worst row of one hypothesis.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HypothesisVerdict {
    pub hypothesis: &'static str,
    pub residual: f64,
    pub tol: f64,
    pub bound: Bound,
    pub pass: bool,
    /// Holds trivially, e.g. pairwise brackets with a single symmetry.
    pub vacuous: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Certificate {
    pub theorem: Theorem,
    pub system: String,
    pub claims: Claims,
    pub grid: usize,
    pub fibers: Vec<Vec<f64>>,
    pub residuals: Vec<ResidualRow>,
    pub verdicts: Vec<HypothesisVerdict>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn verdict(&self, hypothesis: &str) -> Option<&HypothesisVerdict> {
        self.verdicts.iter().find(|v| v.hypothesis == hypothesis)
    }

    fn finish(mut self, order: &[&'static str], vacuous: &[&'static str]) -> Self {
        for &h in order {
            let rows: Vec<&ResidualRow> = self.residuals.iter().filter(|r| r.hypothesis == h).collect();
            let v = if let Some(first) = rows.first() {
                let worst = rows
                    .iter()
                    .copied()
                    .reduce(|a, b| match first.bound {
                        Bound::AtMost if b.value > a.value || b.value.is_nan() => b,
                        Bound::Above if b.value < a.value || b.value.is_nan() => b,
                        _ => a,
                    })
                    .unwrap();
                HypothesisVerdict {
                    hypothesis: h,
                    residual: worst.value,
                    tol: worst.tol,
                    bound: worst.bound,
                    pass: rows.iter().all(|r| r.pass),
                    vacuous: false,
                }
            } else if vacuous.contains(&h) {
                HypothesisVerdict {
                    hypothesis: h,
                    residual: 0.0,
                    tol: self_tol(&self.residuals),
                    bound: Bound::AtMost,
                    pass: true,
                    vacuous: true,
                }
            } else {
                continue;
            };
            self.verdicts.push(v);
        }
        self.pass = self.verdicts.iter().all(|v| v.pass);
        self.notes.push(GRID_NOTE.to_string());
        self
    }
}

fn self_tol(rows: &[ResidualRow]) -> f64 {
    rows.iter()
        .find(|r| r.bound == Bound::AtMost)
        .map_or(CHECK_TOL, |r| r.tol)
}

/// Fiber grids over every checked fiber point.
struct Grids(Vec<FiberGrid>);

impl Grids {
    fn new(sys: &FiberedSystem, opts: &CertifyOptions) -> Result<Self, CertifyError> {
        let g = Grid2::new(opts.grid)?;
        Ok(Self(opts.fibers(sys).iter().map(|c| FiberGrid::new(g, c)).collect()))
    }

    fn fibers(&self) -> Vec<Vec<f64>> {
        self.0.iter().map(|g| g.fiber.clone()).collect()
    }

    fn sup(&self, e: &Expr) -> Result<f64, EvalError> {
        self.0.iter().try_fold(0.0f64, |m, g| Ok(m.max(g.sup_norm(e)?)))
    }

    fn sup_field(&self, v: &VectorField2) -> Result<f64, EvalError> {
        Ok(self.sup(&v.vx)?.max(self.sup(&v.vy)?))
    }

    fn min_abs(&self, e: &Expr) -> Result<f64, EvalError> {
        self.0.iter().try_fold(f64::INFINITY, |m, g| Ok(m.min(g.min_abs(e)?)))
    }

    fn min_value(&self, e: &Expr) -> Result<f64, EvalError> {
        self.0.iter().try_fold(f64::INFINITY, |m, g| {
            Ok(g.values(e)?.into_iter().fold(m, f64::min))
        })
    }

    fn min_length(&self, v: &VectorField2) -> Result<f64, EvalError> {
        self.0.iter().try_fold(f64::INFINITY, |m, g| Ok(m.min(g.min_length(v)?)))
    }

    fn oscillation(&self, e: &Expr) -> Result<f64, EvalError> {
        self.0.iter().try_fold(0.0f64, |m, g| Ok(m.max(g.oscillation(e)?)))
    }
}

fn integral_name(sys: &FiberedSystem, i: usize) -> String {
    if i < sys.m {
        format!("c_{}", i + 1)
    } else {
        sys.extra_integrals[i - sys.m].to_string()
    }
}

fn claims(sys: &FiberedSystem, ys: &[VectorField2], mu: Option<&VolumeForm2>) -> Claims {
    Claims {
        first_integrals: sys.extra_integrals.iter().map(|e| e.to_string()).collect(),
        symmetries: ys.iter().map(FieldClaim::from).collect(),
        volume_density: mu.map(|m| m.rho.to_string()),
    }
}

/// Hypotheses of invariant-volume integrability: every first integral is
/// conserved, `mu` is positive and invariant, and `X` never vanishes.
pub fn check_ej(
    sys: &FiberedSystem,
    mu: &VolumeForm2,
    opts: &CertifyOptions,
) -> Result<Certificate, CertifyError> {
    let g = Grids::new(sys, opts)?;
    let x = &sys.field;
    let mut rows = Vec::new();
    for (i, f) in sys.first_integrals().iter().enumerate() {
        let r = g.sup(&lie_derivative_scalar(x, f))?;
        rows.push(ResidualRow::new(
            "EJ1",
            integral_name(sys, i),
            NamedResidual::at_most("X(f)", r, opts.tol),
        ));
    }
    let min_rho = g.min_value(&mu.rho)?;
    rows.push(ResidualRow::new(
        "volume positive",
        format!("min rho, rho = {}", mu.rho),
        NamedResidual::above("rho", min_rho, 0.0),
    ));
    let div = if min_rho > 0.0 {
        g.sup(&divergence(x, mu))?
    } else {
        f64::NAN
    };
    rows.push(ResidualRow::new(
        "L_X mu = 0",
        "sup |div_mu X|".to_string(),
        NamedResidual::at_most("div", div, opts.tol),
    ));
    rows.push(ResidualRow::new(
        "never-vanishing",
        "min |X|".to_string(),
        NamedResidual::above("|X|", g.min_length(x)?, EPS_VANISH),
    ));
    let cert = Certificate {
        theorem: Theorem::EulerJacobi,
        system: String::new(),
        claims: claims(sys, &[], Some(mu)),
        grid: opts.grid,
        fibers: g.fibers(),
        residuals: rows,
        verdicts: Vec::new(),
        pass: false,
        notes: Vec::new(),
    };
    Ok(cert.finish(&["EJ1", "volume positive", "L_X mu = 0", "never-vanishing"], &[]))
}

/// Hypotheses of commuting-symmetry integrability with `k = 1 + ys.len()`.
///
/// `k = 1` needs a nontrivial extra first integral and a nowhere vanishing
/// `X`; `k = 2` needs a single symmetry independent of `X`, which makes the
/// pairwise-bracket condition vacuous.
pub fn check_b(
    sys: &FiberedSystem,
    ys: &[VectorField2],
    opts: &CertifyOptions,
) -> Result<Certificate, CertifyError> {
    let g = Grids::new(sys, opts)?;
    let x = &sys.field;
    let ints = sys.first_integrals();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    let k = 1 + ys.len();
    rows.push(ResidualRow::new(
        "scope",
        "k = 1 + number of symmetries".to_string(),
        NamedResidual::at_most("k", k as f64, 2.0),
    ));
    for (i, f) in ints.iter().enumerate() {
        rows.push(ResidualRow::new(
            "B1",
            integral_name(sys, i),
            NamedResidual::at_most("X(f)", g.sup(&lie_derivative_scalar(x, f))?, opts.tol),
        ));
    }
    for (j, y) in ys.iter().enumerate() {
        rows.push(ResidualRow::new(
            "B2",
            format!("Y_{}", j + 1),
            NamedResidual::at_most("[Y,X]", g.sup_field(&lie_bracket(y, x))?, opts.tol),
        ));
    }
    for a in 0..ys.len() {
        for b in a + 1..ys.len() {
            rows.push(ResidualRow::new(
                "B3",
                format!("Y_{}, Y_{}", a + 1, b + 1),
                NamedResidual::at_most(
                    "[Y_i,Y_j]",
                    g.sup_field(&lie_bracket(&ys[a], &ys[b]))?,
                    opts.tol,
                ),
            ));
        }
    }
    for (j, y) in ys.iter().enumerate() {
        for (i, f) in ints.iter().enumerate() {
            rows.push(ResidualRow::new(
                "B4",
                format!("Y_{}, {}", j + 1, integral_name(sys, i)),
                NamedResidual::at_most("Y(f)", g.sup(&lie_derivative_scalar(y, f))?, opts.tol),
            ));
        }
    }
    match ys {
        [] => {
            rows.push(ResidualRow::new(
                "independence",
                "min |X|".to_string(),
                NamedResidual::above("|X|", g.min_length(x)?, EPS_VANISH),
            ));
            let mut osc = 0.0f64;
            let mut best = "none declared".to_string();
            for f in &sys.extra_integrals {
                let o = g.oscillation(f)?;
                if o > osc || best == "none declared" {
                    osc = o;
                    best = f.to_string();
                }
            }
            rows.push(ResidualRow::new(
                "nontrivial integral",
                format!("osc {best}"),
                NamedResidual::above("osc", osc, OSCILLATION_MIN),
            ));
        }
        [y] => {
            rows.push(ResidualRow::new(
                "independence",
                "min |det(X|Y_1)|".to_string(),
                NamedResidual::above("det", g.min_abs(&determinant(x, y))?, EPS_INDEP),
            ));
            notes.push("B3 is vacuous with a single symmetry".to_string());
        }
        _ => notes.push(format!("k = {k} is outside the 2-torus scope")),
    }
    let cert = Certificate {
        theorem: Theorem::Bogoyavlensky,
        system: String::new(),
        claims: claims(sys, ys, None),
        grid: opts.grid,
        fibers: g.fibers(),
        residuals: rows,
        verdicts: Vec::new(),
        pass: false,
        notes,
    };
    let vacuous: &[&str] = if ys.len() <= 1 { &["B3"] } else { &[] };
    Ok(cert.finish(
        &["scope", "B1", "B2", "B3", "B4", "independence", "nontrivial integral"],
        vacuous,
    ))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Tag {
    #[serde(rename = "B-on-T2")]
    BOnT2,
    #[serde(rename = "B-on-S1")]
    BOnS1,
    #[serde(rename = "EJ-only-within-truncation")]
    EjOnlyWithinTruncation,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Tag {
    pub fn label(self) -> &'static str {
        match self {
            Tag::BOnT2 => "B-on-T2",
            Tag::BOnS1 => "B-on-S1",
            Tag::EjOnlyWithinTruncation => "EJ-only-within-truncation",
            Tag::Inconclusive => "inconclusive",
        }
    }
}

impl std::fmt::Display for Tag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SectionEvidence {
    pub axis: Axis,
    pub level: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<ReturnTimeVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip)]
    pub data: Option<SectionData>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationEvidence {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimate: Option<RotationEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub density: SearchResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ej: Option<Certificate>,
    pub first_integrals: SearchResult,
    pub symmetries: SearchResult,
    pub sections: Vec<SectionEvidence>,
    pub rotation: RotationEvidence,
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub tag: Tag,
    pub fiber: Vec<f64>,
    /// Band of the searches; "within truncation" refers to it.
    pub band: usize,
    pub reason: String,
    /// False when a symmetry was found but no checked section has constant
    /// return time; flagged, not failed.
    pub cross_consistent: bool,
    pub notes: Vec<String>,
    pub evidence: Evidence,
}

/// Searches at the primary fiber point, then sections and rotation data,
/// then the tag:
/// - `B-on-T2`: a verified symmetry independent of `X`;
/// - `B-on-S1`: otherwise, a verified nontrivial first integral;
/// - `EJ-only-within-truncation`: otherwise, a verified positive invariant
///   density with both other searches empty;
/// - `inconclusive`: anything else.
pub fn classify(sys: &FiberedSystem, opts: &CertifyOptions) -> Result<Classification, CertifyError> {
    let fiber = opts.primary_fiber(sys);
    let x = &sys.field;
    let s = opts.search;
    let mut notes = Vec::new();

    let density = find_invariant_density(x, &fiber, s)?;
    let ej = match &sys.volume {
        Some(mu) => Some(check_ej(sys, mu, opts)?),
        None if density.found() => {
            let rho = density.candidates[0].scalar().to_expr(DENSITY_CUTOFF);
            let single = CertifyOptions {
                fiber: Some(fiber.clone()),
                ..opts.clone()
            };
            let on_fiber = FiberedSystem {
                bounds: fiber.iter().map(|&c| (c, c)).collect(),
                ..sys.clone()
            };
            notes.push("volume check uses the density found at the primary fiber point".into());
            Some(check_ej(&on_fiber, &VolumeForm2::new(rho), &single)?)
        }
        None => None,
    };
    let first_integrals = find_first_integrals(x, &fiber, s)?;
    let symmetries = find_symmetries(x, &fiber, s)?;

    let mut sections = Vec::new();
    for axis in [Axis::Y, Axis::X] {
        let r = poincare_section(
            x,
            &fiber,
            axis,
            0.0,
            opts.section_seeds,
            opts.section_returns,
            s.integrator_tol,
        );
        sections.push(match r {
            Ok(sd) => SectionEvidence {
                axis,
                level: 0.0,
                verdict: Some(constant_return_time_test(&sd, opts.return_tol)),
                error: None,
                data: Some(sd),
            },
            Err(e) => SectionEvidence {
                axis,
                level: 0.0,
                verdict: None,
                error: Some(e.to_string()),
                data: None,
            },
        });
    }
    let rotation = match rotation_vector(x, &fiber, [0.0, 0.0], opts.rotation_horizon, s.integrator_tol) {
        Ok(r) => RotationEvidence {
            estimate: Some(r),
            error: None,
        },
        Err(e) => RotationEvidence {
            estimate: None,
            error: Some(e.to_string()),
        },
    };

    let ej_ok = ej.as_ref().is_some_and(|c| c.pass);
    let (tag, reason) = if symmetries.found() {
        (Tag::BOnT2, "verified symmetry independent of X".to_string())
    } else if first_integrals.found() {
        (Tag::BOnS1, "verified nontrivial first integral".to_string())
    } else if density.found()
        && ej_ok
        && symmetries.candidates.iter().all(|c| c.is_field)
        && first_integrals.kernel.dimension == 0
    {
        (
            Tag::EjOnlyWithinTruncation,
            format!(
                "invariant density verified; no symmetry beyond X and no first integral up to band {}",
                s.band
            ),
        )
    } else {
        (Tag::Inconclusive, inconclusive_reason(&density, &first_integrals, &symmetries, ej_ok))
    };

    let any_constant = sections.iter().any(|sec| {
        sec.verdict
            .is_some_and(|v| v.class == ReturnTimeClass::Constant)
    });
    let cross_consistent = tag != Tag::BOnT2 || any_constant;
    if !cross_consistent {
        notes.push("symmetry found but neither y = 0 nor x = 0 has constant return time".into());
    }
    Ok(Classification {
        tag,
        fiber,
        band: s.band,
        reason,
        cross_consistent,
        notes,
        evidence: Evidence {
            density,
            ej,
            first_integrals,
            symmetries,
            sections,
            rotation,
        },
    })
}

fn inconclusive_reason(
    density: &SearchResult,
    ints: &SearchResult,
    syms: &SearchResult,
    ej_ok: bool,
) -> String {
    let mut why = Vec::new();
    if !density.found() {
        why.push("no verified positive density");
    } else if !ej_ok {
        why.push("volume check failed");
    }
    if ints.kernel.dimension > 0 {
        why.push("unverified first-integral candidates");
    }
    if syms.candidates.iter().any(|c| !c.is_field) {
        why.push("symmetry candidates without a verified independent one");
    }
    if why.is_empty() {
        why.push("no verified object");
    }
    why.join("; ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn e(s: &str) -> Expr {
        parse(s, 0).unwrap()
    }

    fn example1() -> FiberedSystem {
        FiberedSystem::on_torus(VectorField2::new(e("sin(y)+sqrt2"), e("1")))
    }

    fn example3() -> FiberedSystem {
        FiberedSystem::on_torus(VectorField2::new(
            e("2+0.5*sin(x+y)"),
            e("(2+0.5*sin(x+y))*sqrt2"),
        ))
    }

    #[test]
    fn ej_checks() {
        let o = CertifyOptions::default();
        let c = check_ej(&example1(), &VolumeForm2::standard(), &o).unwrap();
        assert!(c.pass, "{c:#?}");
        let c = check_ej(&example3(), &VolumeForm2::new(e("1/(2+0.5*sin(x+y))")), &o).unwrap();
        assert!(c.pass);
        let c = check_ej(&example3(), &VolumeForm2::standard(), &o).unwrap();
        assert!(!c.pass);
        let v = c.verdict("L_X mu = 0").unwrap();
        assert!(!v.pass);
        // div X = X0(f) = (1 + sqrt2) cos(x+y) / 2
        let oracle = 0.5 * (1.0 + std::f64::consts::SQRT_2);
        assert!((v.residual - oracle).abs() < 1e-3);
        assert!(c.verdict("EJ1").is_none());
    }

    #[test]
    fn b_checks() {
        let o = CertifyOptions::default();
        let y0 = VectorField2::new(e("sin(y)"), e("1"));
        let c = check_b(&example1(), &[y0], &o).unwrap();
        assert!(c.pass);
        let ind = c.verdict("independence").unwrap();
        assert!((ind.residual - std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!(c.verdict("B3").unwrap().vacuous);
        let ys = VectorField2::new(e("sin(y)+sqrt2"), e("1"));
        let c = check_b(&example1(), &[ys], &o).unwrap();
        assert!(!c.pass);
        assert!(c.verdict("B2").unwrap().pass);
        assert!(!c.verdict("independence").unwrap().pass);

        let ex2 = FiberedSystem::on_torus(VectorField2::new(e("sin(y)+2"), e("sin(x)")))
            .with_integrals(vec![e("sin(-cos(y)+2*y+cos(x))")]);
        let c = check_b(&ex2, &[], &o).unwrap();
        assert!(c.pass);
        assert!(c.verdict("B1").unwrap().residual <= 1e-8);
        let c = check_b(&example1(), &[], &o).unwrap();
        assert!(!c.verdict("nontrivial integral").unwrap().pass);
    }

    #[test]
    fn fiber_dependent_failure_is_caught_on_the_lattice() {
        // X(c_1 y) = c_1, which vanishes only at c_1 = 0
        let x = VectorField2::new(e("0"), parse("1", 1).unwrap());
        let sys = FiberedSystem::new(1, vec![(-1.0, 1.0)], x, vec![parse("c_1*y", 1).unwrap()], None)
            .unwrap();
        let o = CertifyOptions {
            fiber: Some(vec![0.0]),
            ..Default::default()
        };
        let c = check_b(&sys, &[], &o).unwrap();
        assert_eq!(c.fibers.len(), 3);
        assert!(!c.verdict("B1").unwrap().pass);
    }

    #[test]
    fn too_many_symmetries_fail_scope() {
        let o = CertifyOptions::default();
        let c = check_b(&example1(), &[VectorField2::d_x(), VectorField2::d_x()], &o).unwrap();
        assert!(!c.verdict("scope").unwrap().pass);
        assert!(!c.pass);
    }
}
