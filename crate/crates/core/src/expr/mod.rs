//! Scalar expressions over the fiber coordinates `c_1..c_m` and the angles `x`, `y`.
//!
//! Every field in the crate (vector field components, densities, one-forms,
//! first integrals) is an [`Expr`]. Expressions are immutable trees; the
//! constructors on this type fold constants and the 0/1 identities, nothing
//! more, so structural equality is not semantic equality.

mod diff;
mod eval;
mod parse;
mod print;

use std::fmt;
use std::ops;

pub use eval::{EvalError, Point, EPS_DIV};
pub use parse::{parse, ParseError};

/// A coordinate of `U x T^2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    /// Fiber parameter `c_{i+1}` (zero-based index).
    Fiber(usize),
    X,
    Y,
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Fiber(i) => write!(f, "c_{}", i + 1),
            Var::X => f.write_str("x"),
            Var::Y => f.write_str("y"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Constant {
    Pi,
    Sqrt2,
}

impl Constant {
    pub fn value(self) -> f64 {
        match self {
            Constant::Pi => std::f64::consts::PI,
            Constant::Sqrt2 => std::f64::consts::SQRT_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Constant::Pi => "pi",
            Constant::Sqrt2 => "sqrt2",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
        }
    }

    pub(crate) fn from_name(name: &str) -> Option<Func> {
        match name {
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            "exp" => Some(Func::Exp),
            "sqrt" => Some(Func::Sqrt),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Const(Constant),
    Var(Var),
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    /// Integer power.
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn zero() -> Expr {
        Expr::Num(0.0)
    }

    pub fn one() -> Expr {
        Expr::Num(1.0)
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    /// Fiber coordinate `c_{index+1}`.
    pub fn fiber(index: usize) -> Expr {
        Expr::Var(Var::Fiber(index))
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Expr::Num(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_num() == Some(0.0)
    }

    pub fn is_one(&self) -> bool {
        self.as_num() == Some(1.0)
    }

    pub fn call(func: Func, arg: Expr) -> Expr {
        if let Expr::Num(v) = arg {
            let folded = match func {
                Func::Sin => Some(v.sin()),
                Func::Cos => Some(v.cos()),
                Func::Exp => Some(v.exp()),
                Func::Sqrt if v >= 0.0 => Some(v.sqrt()),
                Func::Sqrt => None,
            };
            if let Some(v) = folded {
                return Expr::Num(v);
            }
        }
        Expr::Call(func, Box::new(arg))
    }

    pub fn sin(self) -> Expr {
        Expr::call(Func::Sin, self)
    }

    pub fn cos(self) -> Expr {
        Expr::call(Func::Cos, self)
    }

    pub fn exp(self) -> Expr {
        Expr::call(Func::Exp, self)
    }

    pub fn sqrt(self) -> Expr {
        Expr::call(Func::Sqrt, self)
    }

    pub fn powi(self, n: i32) -> Expr {
        match (n, &self) {
            (0, _) => Expr::one(),
            (1, _) => self,
            (_, Expr::Num(v)) => Expr::Num(v.powi(n)),
            _ => Expr::Pow(Box::new(self), n),
        }
    }

    /// Largest fiber index referenced, if any.
    pub fn max_fiber_index(&self) -> Option<usize> {
        match self {
            Expr::Var(Var::Fiber(i)) => Some(*i),
            Expr::Num(_) | Expr::Const(_) | Expr::Var(_) => None,
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => a.max_fiber_index(),
            Expr::Binary(_, a, b) => a.max_fiber_index().max(b.max_fiber_index()),
        }
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Var(v) => *v == var,
            Expr::Num(_) | Expr::Const(_) => false,
            Expr::Neg(a) | Expr::Call(_, a) | Expr::Pow(a, _) => a.depends_on(var),
            Expr::Binary(_, a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    fn binary(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::Binary(op, Box::new(a), Box::new(b))
    }
}

impl From<f64> for Expr {
    fn from(v: f64) -> Self {
        Expr::Num(v)
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        match self {
            Expr::Num(v) => Expr::Num(-v),
            Expr::Neg(a) => *a,
            other => Expr::Neg(Box::new(other)),
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a + b),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => b,
            (a, Expr::Neg(b)) => Expr::binary(BinOp::Sub, a, *b),
            (a, b) => Expr::binary(BinOp::Add, a, b),
        }
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a - b),
            (a, b) if b.is_zero() => a,
            (a, b) if a.is_zero() => -b,
            (a, Expr::Neg(b)) => Expr::binary(BinOp::Add, a, *b),
            (a, b) => Expr::binary(BinOp::Sub, a, b),
        }
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Num(a), Expr::Num(b)) => Expr::Num(a * b),
            (a, b) if a.is_zero() || b.is_zero() => Expr::zero(),
            (a, b) if a.is_one() => b,
            (a, b) if b.is_one() => a,
            (Expr::Num(v), b) if v == -1.0 => -b,
            (a, Expr::Num(v)) if v == -1.0 => -a,
            (a, b) => Expr::binary(BinOp::Mul, a, b),
        }
    }
}

impl ops::Div for Expr {
    type Output = Expr;
    fn div(self, rhs: Expr) -> Expr {
        match (self, rhs) {
            (Expr::Num(a), Expr::Num(b)) if b != 0.0 => Expr::Num(a / b),
            (a, b) if a.is_zero() => {
                // keep the pole visible to evaluation when the denominator is a literal zero
                if b.is_zero() {
                    Expr::binary(BinOp::Div, a, b)
                } else {
                    Expr::zero()
                }
            }
            (a, b) if b.is_one() => a,
            (a, b) => Expr::binary(BinOp::Div, a, b),
        }
    }
}

macro_rules! ref_ops {
    ($($trait:ident $method:ident),*) => {$(
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                ops::$trait::$method(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                ops::$trait::$method(self, Expr::Num(rhs))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                ops::$trait::$method(Expr::Num(self), rhs)
            }
        }
    )*};
}

ref_ops!(Add add, Sub sub, Mul mul, Div div);

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        -self.clone()
    }
}
