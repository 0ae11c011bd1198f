//! Trajectories on the torus: rotation vectors, sections, return times and
//! first-integral drift.

mod integrate;

use std::f64::consts::TAU;
use std::io::{self, Write};

use serde::Serialize;
use thiserror::Error;

pub use integrate::{
    integrate, integrate_fixed, wrap, FiberFlow, IntegratorStats, State, Trajectory, DEFAULT_TOL,
};
use integrate::{hermite, Stepper};

use crate::expr::{EvalError, Expr, Point};
use crate::fourier::{Axis, Grid2};
use crate::geometry::VectorField2;

/// Default horizon for rotation vectors.
pub const ROTATION_HORIZON: f64 = 1000.0;
pub const MIN_ROTATION_HORIZON: f64 = 100.0;
pub const SECTION_SEEDS: usize = 8;
pub const SECTION_RETURNS: usize = 64;
/// Smallest admissible normal speed on a section.
pub const EPS_TRANSVERSAL: f64 = 1e-8;
pub const CONSTANT_RETURN_TOL: f64 = 1e-6;
pub const MIN_RETURN_SAMPLES: usize = 16;
const DRIFT_FLOOR: f64 = 1e-12;
const SECTION_PROBES: usize = 256;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("step size underflow at t={t}, state ({x}, {y}), h={h:e}")]
    StepUnderflow { t: f64, x: f64, y: f64, h: f64 },
    #[error("section not transversal near ({x:.6}, {y:.6}): normal speed {speed:e}")]
    NonTransversal { x: f64, y: f64, speed: f64 },
    #[error("horizon must be finite and greater than {min}, got {got}")]
    InvalidHorizon { got: f64, min: f64 },
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("seed {seed} made only {found} returns before t={t}")]
    NoReturn { seed: usize, found: usize, t: f64 },
    #[error("need at least one seed and one return")]
    EmptySection,
}

fn coord(axis: Axis) -> usize {
    match axis {
        Axis::X => 0,
        Axis::Y => 1,
    }
}

/// Time in `[t0, t1]` where component `c` reaches `target`, located by
/// bisection on the cubic interpolant and polished with single steps of the
/// fifth-order scheme.
#[allow(clippy::too_many_arguments)]
fn locate(
    flow: &FiberFlow<'_>,
    t0: f64,
    y0: State,
    f0: State,
    t1: f64,
    y1: State,
    f1: State,
    c: usize,
    target: f64,
) -> Result<(f64, State), FlowError> {
    let g = |t: f64| hermite(t0, t1, y0, y1, f0, f1, t)[c] - target;
    let (mut lo, mut hi) = (t0, t1);
    let g_lo = y0[c] - target;
    for _ in 0..200 {
        if hi - lo <= 1e-13 * t1.abs().max(1.0) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) == (g_lo > 0.0) && g(mid) != 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut t = 0.5 * (lo + hi);
    let mut y = flow_step(flow, y0, f0, t - t0)?;
    for _ in 0..4 {
        let f = flow.eval(y)?;
        if f[c] == 0.0 {
            break;
        }
        let delta = (y[c] - target) / f[c];
        if !delta.is_finite() || delta.abs() > (t1 - t0) {
            break;
        }
        t -= delta;
        y = flow_step(flow, y0, f0, t - t0)?;
        if delta.abs() <= 1e-15 * t.abs().max(1.0) {
            break;
        }
    }
    Ok((t, y))
}

fn flow_step(flow: &FiberFlow<'_>, y0: State, f0: State, s: f64) -> Result<State, FlowError> {
    if s == 0.0 {
        return Ok(y0);
    }
    Ok(flow.step(y0, f0, s)?.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct RotationEstimate {
    pub horizon: f64,
    pub initial: State,
    /// Mean velocity of the lift, `(lift(T) - lift(0)) / T`.
    pub w: [f64; 2],
    /// `|w(T) - w(T/2)|` per component.
    pub half_width: [f64; 2],
    /// `dx/dy` of the lift over the largest number of complete `y` turns;
    /// absent when `y` completes fewer than two.
    pub ratio: Option<f64>,
    pub ratio_half_width: Option<f64>,
    pub turns: usize,
    pub stats: IntegratorStats,
}

/// Rotation vector of the lift from `initial` over `horizon`.
///
/// The ratio `w_x / w_y` is measured at the last time the `y` lift completes a
/// full turn, where it depends only on the orbit and not on its
/// parametrization. The half-width compares `n` turns with `n/2`.
pub fn rotation_vector(
    field: &VectorField2,
    fiber: &[f64],
    initial: State,
    horizon: f64,
    tol: f64,
) -> Result<RotationEstimate, FlowError> {
    if !(horizon >= MIN_ROTATION_HORIZON && horizon.is_finite()) {
        return Err(FlowError::InvalidHorizon {
            got: horizon,
            min: MIN_ROTATION_HORIZON,
        });
    }
    let traj = integrate(field, fiber, initial, horizon, tol)?;
    let start = traj.start();
    let end = traj.end();
    let mid = traj.dense(0.5 * horizon);
    let w = [(end[0] - start[0]) / horizon, (end[1] - start[1]) / horizon];
    let w_half = [
        (mid[0] - start[0]) / (0.5 * horizon),
        (mid[1] - start[1]) / (0.5 * horizon),
    ];
    let half_width = [(w[0] - w_half[0]).abs(), (w[1] - w_half[1]).abs()];

    let dy = end[1] - start[1];
    let turns = (dy.abs() / TAU).floor() as usize;
    let flow = FiberFlow::new(field, fiber);
    let (ratio, ratio_half_width) = if turns >= 2 {
        let r = synchronized_ratio(&flow, &traj, dy.signum(), turns)?;
        let r_half = synchronized_ratio(&flow, &traj, dy.signum(), turns / 2)?;
        (Some(r), Some((r - r_half).abs()))
    } else {
        // |w_y| <= 4 pi / horizon: no ratio can be resolved
        (None, None)
    };
    Ok(RotationEstimate {
        horizon,
        initial,
        w,
        half_width,
        ratio,
        ratio_half_width,
        turns,
        stats: traj.stats,
    })
}

fn synchronized_ratio(
    flow: &FiberFlow<'_>,
    traj: &Trajectory,
    dir: f64,
    turns: usize,
) -> Result<f64, FlowError> {
    let start = traj.start();
    let target = start[1] + dir * TAU * turns as f64;
    let s = &traj.states;
    let i = (0..s.len() - 1)
        .rev()
        .find(|&i| (s[i][1] - target) * (s[i + 1][1] - target) <= 0.0)
        .expect("the lift reaches the requested number of turns");
    let (_, y) = locate(
        flow,
        traj.times[i],
        s[i],
        traj.derivatives[i],
        traj.times[i + 1],
        s[i + 1],
        traj.derivatives[i + 1],
        1,
        target,
    )?;
    Ok((y[0] - start[0]) / (target - start[1]))
}

/// Returns of one seed to the section.
#[derive(Clone, Debug, Serialize)]
pub struct SeedReturns {
    /// Position of the seed on the section.
    pub start: f64,
    /// Positions of successive crossings, reduced to `[0, 2*pi)`.
    pub positions: Vec<f64>,
    pub crossing_times: Vec<f64>,
    pub return_times: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ReturnTimeSummary {
    pub count: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// `(max - min) / mean`.
    pub spread: f64,
}

/// Section `{axis = level}` with the returns of every seed.
#[derive(Clone, Debug, Serialize)]
pub struct SectionData {
    pub axis: Axis,
    pub level: f64,
    pub min_normal_speed: f64,
    pub seeds: Vec<SeedReturns>,
}

impl SectionData {
    pub fn return_times(&self) -> Vec<f64> {
        self.seeds
            .iter()
            .flat_map(|s| s.return_times.iter().copied())
            .collect()
    }

    pub fn summary(&self) -> ReturnTimeSummary {
        summarize(&self.return_times())
    }

    /// Samples `(p_i, p_{i+1})` of the return map.
    pub fn return_map(&self) -> Vec<(f64, f64)> {
        self.seeds
            .iter()
            .flat_map(|s| {
                std::iter::once(wrap(s.start))
                    .chain(s.positions.iter().copied())
                    .collect::<Vec<_>>()
                    .windows(2)
                    .map(|w| (w[0], w[1]))
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    /// Columns `i, x_i, T_i`: crossing position and the return time ending there.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "i,x_i,T_i")?;
        let mut i = 0;
        for seed in &self.seeds {
            for (p, t) in seed.positions.iter().zip(&seed.return_times) {
                writeln!(w, "{i},{p:.17e},{t:.17e}")?;
                i += 1;
            }
        }
        Ok(())
    }
}

pub fn summarize(times: &[f64]) -> ReturnTimeSummary {
    let count = times.len();
    if count == 0 {
        return ReturnTimeSummary {
            count,
            min: f64::NAN,
            max: f64::NAN,
            mean: f64::NAN,
            spread: f64::NAN,
        };
    }
    let min = times.iter().copied().fold(f64::INFINITY, f64::min);
    let max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = times.iter().sum::<f64>() / count as f64;
    ReturnTimeSummary {
        count,
        min,
        max,
        mean,
        spread: (max - min) / mean.abs(),
    }
}

/// Poincare section `{axis = level}`: `returns` consecutive returns from each
/// of `seeds` equispaced starting points on the section.
pub fn poincare_section(
    field: &VectorField2,
    fiber: &[f64],
    axis: Axis,
    level: f64,
    seeds: usize,
    returns: usize,
    tol: f64,
) -> Result<SectionData, FlowError> {
    if seeds == 0 || returns == 0 {
        return Err(FlowError::EmptySection);
    }
    let c = coord(axis);
    let along = 1 - c;
    let state = |p: f64| {
        let mut s = [0.0; 2];
        s[c] = level;
        s[along] = p;
        s
    };
    let speed = |p: f64| -> Result<f64, FlowError> {
        let s = state(p);
        let comp = if c == 0 { &field.vx } else { &field.vy };
        Ok(comp.eval(&Point::new(fiber, s[0], s[1]))?)
    };

    let mut min_speed = f64::INFINITY;
    let sign = speed(0.0)?.signum();
    for i in 0..SECTION_PROBES {
        let p = TAU * i as f64 / SECTION_PROBES as f64;
        let v = speed(p)?;
        if v.abs() <= EPS_TRANSVERSAL || v.signum() != sign {
            let s = state(p);
            return Err(FlowError::NonTransversal {
                x: s[0],
                y: s[1],
                speed: v,
            });
        }
        min_speed = min_speed.min(v.abs());
    }

    let t_cap = 1e3 * TAU * (returns + 1) as f64 / min_speed;
    let mut out = Vec::with_capacity(seeds);
    for seed in 0..seeds {
        let p0 = TAU * seed as f64 / seeds as f64;
        let mut st = Stepper::new(FiberFlow::new(field, fiber), state(p0), tol)?;
        let mut target = level + sign * TAU;
        let mut times = Vec::with_capacity(returns);
        let mut positions = Vec::with_capacity(returns);
        while times.len() < returns {
            if st.t > t_cap {
                return Err(FlowError::NoReturn {
                    seed,
                    found: times.len(),
                    t: st.t,
                });
            }
            let (t0, y0, f0) = (st.t, st.y, st.f);
            st.advance(f64::INFINITY)?;
            while times.len() < returns && (st.y[c] - target) * sign >= 0.0 {
                let (t, y) = locate(&st.flow, t0, y0, f0, st.t, st.y, st.f, c, target)?;
                let v = st.flow.eval(y)?[c];
                if v.abs() <= EPS_TRANSVERSAL {
                    return Err(FlowError::NonTransversal {
                        x: wrap(y[0]),
                        y: wrap(y[1]),
                        speed: v,
                    });
                }
                times.push(t);
                positions.push(wrap(y[along]));
                target += sign * TAU;
            }
        }
        let return_times = std::iter::once(0.0)
            .chain(times.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .collect();
        out.push(SeedReturns {
            start: p0,
            positions,
            crossing_times: times,
            return_times,
        });
    }
    Ok(SectionData {
        axis,
        level,
        min_normal_speed: min_speed,
        seeds: out,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReturnTimeClass {
    Constant,
    NotConstant,
    InsufficientData,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct ReturnTimeVerdict {
    pub class: ReturnTimeClass,
    pub rel_tol: f64,
    pub summary: ReturnTimeSummary,
}

/// Constant iff `(max - min) / mean <= rel_tol` over at least
/// [`MIN_RETURN_SAMPLES`] return times.
pub fn constant_return_time_test(sd: &SectionData, rel_tol: f64) -> ReturnTimeVerdict {
    classify_return_times(&sd.return_times(), rel_tol)
}

pub fn classify_return_times(times: &[f64], rel_tol: f64) -> ReturnTimeVerdict {
    let summary = summarize(times);
    let class = if summary.count < MIN_RETURN_SAMPLES {
        ReturnTimeClass::InsufficientData
    } else if summary.spread <= rel_tol {
        ReturnTimeClass::Constant
    } else {
        ReturnTimeClass::NotConstant
    };
    ReturnTimeVerdict {
        class,
        rel_tol,
        summary,
    }
}

/// `max_t |f(g(t)) - f(g(0))| / max(osc f, eps)` over the accepted steps,
/// with the oscillation of `f` taken over the fiber grid.
pub fn drift_check(f: &Expr, traj: &Trajectory, grid: &Grid2) -> Result<f64, EvalError> {
    let values = grid.sample(f, &traj.fiber)?;
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let scale = (max - min).max(DRIFT_FLOOR);
    let at = |s: &State| f.eval(&Point::new(&traj.fiber, s[0], s[1]));
    let f0 = at(&traj.states[0])?;
    let mut drift = 0.0f64;
    for s in &traj.states {
        drift = drift.max((at(s)? - f0).abs());
    }
    Ok(drift / scale)
}
