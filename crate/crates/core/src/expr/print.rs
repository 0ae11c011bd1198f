//! Canonical printer: minimal parentheses such that re-parsing yields the same tree.

use std::fmt;

use super::{BinOp, Expr};

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_ATOM: u8 = 5;

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Binary(BinOp::Add | BinOp::Sub, ..) => PREC_SUM,
        Expr::Binary(BinOp::Mul | BinOp::Div, ..) => PREC_PRODUCT,
        Expr::Neg(_) => PREC_UNARY,
        Expr::Pow(..) => 4,
        Expr::Num(v) if *v < 0.0 || v.is_sign_negative() => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if precedence(e) < min_prec {
        f.write_str("(")?;
        write_expr(f, e)?;
        f.write_str(")")
    } else {
        write_expr(f, e)
    }
}

fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr) -> fmt::Result {
    match e {
        Expr::Num(v) => {
            if v.is_sign_negative() {
                write!(f, "-{}", -v)
            } else {
                write!(f, "{v}")
            }
        }
        Expr::Const(c) => f.write_str(c.name()),
        Expr::Var(v) => write!(f, "{v}"),
        Expr::Neg(a) => {
            f.write_str("-")?;
            write_at(f, a, PREC_UNARY)
        }
        Expr::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a)?;
            f.write_str(")")
        }
        Expr::Binary(op, a, b) => {
            let (sym, prec) = match op {
                BinOp::Add => (" + ", PREC_SUM),
                BinOp::Sub => (" - ", PREC_SUM),
                BinOp::Mul => ("*", PREC_PRODUCT),
                BinOp::Div => ("/", PREC_PRODUCT),
            };
            write_at(f, a, prec)?;
            f.write_str(sym)?;
            write_at(f, b, prec + 1)
        }
        Expr::Pow(a, n) => {
            write_at(f, a, PREC_ATOM)?;
            write!(f, "^{n}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}
