use super::{BinOp, Expr, Func, Var};

impl Expr {
    /// Symbolic partial derivative with respect to `var`.
    pub fn differentiate(&self, var: Var) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) => Expr::zero(),
            Expr::Var(v) => {
                if *v == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Neg(a) => -a.differentiate(var),
            Expr::Binary(op, a, b) => {
                let da = a.differentiate(var);
                let db = b.differentiate(var);
                let (a, b) = (a.as_ref().clone(), b.as_ref().clone());
                match op {
                    BinOp::Add => da + db,
                    BinOp::Sub => da - db,
                    BinOp::Mul => da * b + a * db,
                    BinOp::Div => {
                        if db.is_zero() {
                            da / b
                        } else {
                            da / b.clone() - a * db / b.powi(2)
                        }
                    }
                }
            }
            Expr::Pow(a, n) => {
                let da = a.differentiate(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                Expr::num(f64::from(*n)) * a.as_ref().clone().powi(n - 1) * da
            }
            Expr::Call(f, a) => {
                let da = a.differentiate(var);
                if da.is_zero() {
                    return Expr::zero();
                }
                let a = a.as_ref().clone();
                match f {
                    Func::Sin => a.cos() * da,
                    Func::Cos => -(a.sin() * da),
                    Func::Exp => a.exp() * da,
                    Func::Sqrt => da / (Expr::num(2.0) * Expr::call(Func::Sqrt, a)),
                }
            }
        }
    }

    pub fn dx(&self) -> Expr {
        self.differentiate(Var::X)
    }

    pub fn dy(&self) -> Expr {
        self.differentiate(Var::Y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn close_everywhere(a: &Expr, b: &Expr) {
        for i in 0..17 {
            for j in 0..13 {
                let (x, y) = (0.37 * i as f64, 0.51 * j as f64);
                let (va, vb) = (a.eval_xy(x, y).unwrap(), b.eval_xy(x, y).unwrap());
                assert!((va - vb).abs() < 1e-13, "{a} vs {b} at ({x},{y})");
            }
        }
    }

    #[test]
    fn no_dependence_gives_literal_zero() {
        assert!(parse("sin(y)", 0).unwrap().dx().is_zero());
    }

    #[test]
    fn standard_rules() {
        let d = parse("sin(y)+sqrt(2)", 0).unwrap().dy();
        close_everywhere(&d, &parse("cos(y)", 0).unwrap());
        let d = parse("-cos(y)+2*y+cos(x)", 0).unwrap().dy();
        close_everywhere(&d, &parse("sin(y)+2", 0).unwrap());
    }

    #[test]
    fn quotient_power_exp() {
        let e = parse("exp(sin(x))/(2+cos(y))^3", 0).unwrap();
        let expect = parse("cos(x)*exp(sin(x))/(2+cos(y))^3", 0).unwrap();
        close_everywhere(&e.dx(), &expect);
        let expect = parse("3*sin(y)*exp(sin(x))/(2+cos(y))^4", 0).unwrap();
        close_everywhere(&e.dy(), &expect);
    }

    #[test]
    fn fiber_derivative() {
        let e = parse("c_1^2*sin(x)", 1).unwrap();
        let d = e.differentiate(Var::Fiber(0));
        let p = crate::expr::Point::new(&[1.5], 0.7, 0.0);
        assert!((d.eval(&p).unwrap() - 3.0 * 0.7f64.sin()).abs() < 1e-15);
    }
}
