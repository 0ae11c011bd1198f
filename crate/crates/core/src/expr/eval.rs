use thiserror::Error;

use super::{BinOp, Expr, Func, Var};

/// Denominators smaller than this in magnitude are treated as poles.
pub const EPS_DIV: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("square root of negative value {0}")]
    SqrtDomain(f64),
    #[error("division by near-zero denominator {0:e}")]
    DivisionByZero(f64),
    #[error("variable c_{} not supplied (point has {supplied} fiber coordinates)", index + 1)]
    MissingFiber { index: usize, supplied: usize },
}

/// A point of `U x T^2`: fiber coordinates plus the two angles (radians).
#[derive(Clone, Copy, Debug)]
pub struct Point<'a> {
    pub fiber: &'a [f64],
    pub x: f64,
    pub y: f64,
}

impl<'a> Point<'a> {
    pub fn new(fiber: &'a [f64], x: f64, y: f64) -> Self {
        Self { fiber, x, y }
    }

    pub fn on_torus(x: f64, y: f64) -> Point<'static> {
        Point { fiber: &[], x, y }
    }
}

impl Expr {
    pub fn eval(&self, p: &Point<'_>) -> Result<f64, EvalError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Const(c) => c.value(),
            Expr::Var(Var::X) => p.x,
            Expr::Var(Var::Y) => p.y,
            Expr::Var(Var::Fiber(i)) => *p.fiber.get(*i).ok_or(EvalError::MissingFiber {
                index: *i,
                supplied: p.fiber.len(),
            })?,
            Expr::Neg(a) => -a.eval(p)?,
            Expr::Call(f, a) => {
                let v = a.eval(p)?;
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => {
                        if v < 0.0 {
                            return Err(EvalError::SqrtDomain(v));
                        }
                        v.sqrt()
                    }
                }
            }
            Expr::Binary(op, a, b) => {
                let l = a.eval(p)?;
                let r = b.eval(p)?;
                match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                    BinOp::Div => {
                        if r.abs() < EPS_DIV {
                            return Err(EvalError::DivisionByZero(r));
                        }
                        l / r
                    }
                }
            }
            Expr::Pow(a, n) => {
                let v = a.eval(p)?;
                if *n < 0 && v.abs() < EPS_DIV {
                    return Err(EvalError::DivisionByZero(v));
                }
                v.powi(*n)
            }
        })
    }

    /// Evaluate on the torus with no fiber coordinates.
    pub fn eval_xy(&self, x: f64, y: f64) -> Result<f64, EvalError> {
        self.eval(&Point::on_torus(x, y))
    }
}
