//! Embedded Runge-Kutta 5(4) with PI step control and cubic dense output.

use std::io::{self, Write};

use serde::Serialize;

use super::FlowError;
use crate::expr::{EvalError, Point};
use crate::geometry::VectorField2;

/// Default local error bound per step.
pub const DEFAULT_TOL: f64 = 1e-10;
const MAX_STEPS: usize = 20_000_000;
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

pub type State = [f64; 2];

/// A vector field frozen at one fiber point, ready for evaluation.
#[derive(Clone, Debug)]
pub struct FiberFlow<'a> {
    field: &'a VectorField2,
    fiber: Vec<f64>,
    evaluations: std::cell::Cell<usize>,
}

impl<'a> FiberFlow<'a> {
    pub fn new(field: &'a VectorField2, fiber: &[f64]) -> Self {
        Self {
            field,
            fiber: fiber.to_vec(),
            evaluations: std::cell::Cell::new(0),
        }
    }

    pub fn fiber(&self) -> &[f64] {
        &self.fiber
    }

    pub fn eval(&self, s: State) -> Result<State, EvalError> {
        self.evaluations.set(self.evaluations.get() + 1);
        let p = Point::new(&self.fiber, s[0], s[1]);
        Ok([self.field.vx.eval(&p)?, self.field.vy.eval(&p)?])
    }

    /// One step of the fifth-order solution with its error estimate.
    pub(crate) fn step(&self, y: State, f0: State, h: f64) -> Result<(State, State, f64), EvalError> {
        let mut k = [[0.0; 2]; 7];
        k[0] = f0;
        for s in 1..7 {
            let mut z = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                z[0] += h * A[s][j] * kj[0];
                z[1] += h * A[s][j] * kj[1];
            }
            if s == 6 {
                // the last stage is evaluated at the new solution
                k[6] = self.eval(z)?;
                let mut err = 0.0f64;
                for i in 0..2 {
                    let e: f64 = (0..7).map(|j| E[j] * k[j][i]).sum();
                    err = err.max((h * e).abs());
                }
                return Ok((z, k[6], err));
            }
            k[s] = self.eval(z)?;
        }
        unreachable!()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct IntegratorStats {
    pub steps: usize,
    pub rejected: usize,
    pub evaluations: usize,
    pub tol: f64,
}

/// Accepted steps of a lifted trajectory; states are never reduced mod 2*pi.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub fiber: Vec<f64>,
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub derivatives: Vec<State>,
    pub stats: IntegratorStats,
}

impl Trajectory {
    pub fn start(&self) -> State {
        self.states[0]
    }

    pub fn end(&self) -> State {
        *self.states.last().expect("trajectory has at least one point")
    }

    pub fn duration(&self) -> f64 {
        self.times.last().unwrap() - self.times[0]
    }

    /// Index `i` of the step `[t_i, t_{i+1}]` containing `t`.
    fn segment(&self, t: f64) -> usize {
        let i = self.times.partition_point(|&s| s <= t);
        i.saturating_sub(1).min(self.times.len().saturating_sub(2))
    }

    /// Cubic Hermite interpolation of the accepted steps.
    pub fn dense(&self, t: f64) -> State {
        if self.times.len() == 1 {
            return self.states[0];
        }
        let i = self.segment(t);
        hermite(
            self.times[i],
            self.times[i + 1],
            self.states[i],
            self.states[i + 1],
            self.derivatives[i],
            self.derivatives[i + 1],
            t,
        )
    }

    /// States reduced to `[0, 2*pi)`.
    pub fn reduced(&self) -> impl Iterator<Item = State> + '_ {
        self.states.iter().map(|s| [wrap(s[0]), wrap(s[1])])
    }

    /// Columns `t, x_lift, y_lift`, one row per accepted step.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "t,x_lift,y_lift")?;
        for (t, s) in self.times.iter().zip(&self.states) {
            writeln!(w, "{t:.17e},{:.17e},{:.17e}", s[0], s[1])?;
        }
        Ok(())
    }
}

pub(crate) fn hermite(t0: f64, t1: f64, y0: State, y1: State, f0: State, f1: State, t: f64) -> State {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    let h10 = s * (1.0 - s) * (1.0 - s);
    let h01 = s * s * (3.0 - 2.0 * s);
    let h11 = s * s * (s - 1.0);
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    }
    out
}

pub fn wrap(v: f64) -> f64 {
    v.rem_euclid(std::f64::consts::TAU)
}

/// Adaptive stepper; callers drive it one accepted step at a time.
pub(crate) struct Stepper<'a> {
    pub flow: FiberFlow<'a>,
    pub t: f64,
    pub y: State,
    pub f: State,
    pub h: f64,
    pub tol: f64,
    err_old: f64,
    pub stats: IntegratorStats,
}

impl<'a> Stepper<'a> {
    pub fn new(flow: FiberFlow<'a>, y0: State, tol: f64) -> Result<Self, FlowError> {
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(FlowError::InvalidTolerance(tol));
        }
        let f = flow.eval(y0)?;
        let speed = f[0].abs().max(f[1].abs()).max(1e-3);
        let h = 0.5 * tol.powf(0.2) / speed;
        Ok(Self {
            flow,
            t: 0.0,
            y: y0,
            f,
            h,
            tol,
            err_old: 1e-4,
            stats: IntegratorStats {
                tol,
                ..Default::default()
            },
        })
    }

    /// Take one accepted step, never stepping past `t_max`.
    pub fn advance(&mut self, t_max: f64) -> Result<(), FlowError> {
        loop {
            let h = self.h.min(t_max - self.t);
            if h <= 1e-14 * self.t.abs().max(1.0) && h < t_max - self.t {
                return Err(FlowError::StepUnderflow {
                    t: self.t,
                    x: self.y[0],
                    y: self.y[1],
                    h,
                });
            }
            let (y1, f1, err) = self.flow.step(self.y, self.f, h)?;
            let ratio = err / self.tol;
            if !ratio.is_finite() {
                self.stats.rejected += 1;
                self.h = h * 0.1;
                continue;
            }
            if ratio <= 1.0 {
                let fac = (ratio.max(1e-10).powf(ALPHA) / self.err_old.powf(BETA) / SAFETY)
                    .clamp(0.2, 10.0);
                self.err_old = ratio.max(1e-4);
                self.t += h;
                self.y = y1;
                self.f = f1;
                self.h = h / fac;
                self.stats.steps += 1;
                if self.stats.steps > MAX_STEPS {
                    return Err(FlowError::StepUnderflow {
                        t: self.t,
                        x: self.y[0],
                        y: self.y[1],
                        h,
                    });
                }
                return Ok(());
            }
            self.stats.rejected += 1;
            self.h = h / (ratio.powf(ALPHA) / SAFETY).min(10.0);
        }
    }
}

/// Integrate `X` at `fiber` from `initial` for time `duration` with local error
/// bound `tol` per step.
pub fn integrate(
    field: &VectorField2,
    fiber: &[f64],
    initial: State,
    duration: f64,
    tol: f64,
) -> Result<Trajectory, FlowError> {
    if !(duration > 0.0 && duration.is_finite()) {
        return Err(FlowError::InvalidHorizon { got: duration, min: 0.0 });
    }
    let mut st = Stepper::new(FiberFlow::new(field, fiber), initial, tol)?;
    let mut times = vec![0.0];
    let mut states = vec![initial];
    let mut derivatives = vec![st.f];
    while st.t < duration {
        st.advance(duration)?;
        times.push(st.t);
        states.push(st.y);
        derivatives.push(st.f);
    }
    let mut stats = st.stats;
    stats.evaluations = st.flow.evaluations.get();
    Ok(Trajectory {
        fiber: fiber.to_vec(),
        times,
        states,
        derivatives,
        stats,
    })
}

/// Fixed-step integration with the fifth-order solution; used to measure the
/// convergence order.
pub fn integrate_fixed(
    field: &VectorField2,
    fiber: &[f64],
    initial: State,
    duration: f64,
    steps: usize,
) -> Result<State, FlowError> {
    let flow = FiberFlow::new(field, fiber);
    let h = duration / steps as f64;
    let mut y = initial;
    let mut f = flow.eval(y)?;
    for _ in 0..steps {
        let (y1, f1, _) = flow.step(y, f, h)?;
        y = y1;
        f = f1;
    }
    Ok(y)
}
