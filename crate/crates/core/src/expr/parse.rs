//! Recursive-descent parser.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` binds tighter than unary minus, so `-x^2` is `-(x^2)`.

use thiserror::Error;

use super::{BinOp, Constant, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("at byte {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("at byte {position}: unknown identifier `{name}` (declared variables: {})", declared.join(", "))]
    UnknownIdentifier {
        position: usize,
        name: String,
        declared: Vec<String>,
    },
}

impl ParseError {
    pub fn position(&self) -> usize {
        match self {
            ParseError::Syntax { position, .. } | ParseError::UnknownIdentifier { position, .. } => {
                *position
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' | b'.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "a number".into(),
                    found: format!("`{text}`"),
                })?;
                out.push((start, Tok::Num(v)));
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(src[start..i].to_string())));
                continue;
            }
            _ => {
                let ch = src[start..].chars().next().unwrap_or('?');
                return Err(ParseError::Syntax {
                    position: start,
                    expected: "an expression token".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    fiber_dim: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax {
            position: self.offset(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&tok.describe())
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Expr::binary(op, lhs, rhs);
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        match self.peek().clone() {
            Tok::Num(v) if v.fract() == 0.0 && v <= i32::MAX as f64 => {
                self.bump();
                let n = v as i32;
                Ok(Expr::Pow(Box::new(base), if negative { -n } else { n }))
            }
            _ => self.error("an integer exponent"),
        }
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let at = self.offset();
        match self.bump() {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    if *self.peek() != Tok::LParen {
                        return self.error(&format!("`(` after function `{name}`"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(Tok::RParen)?;
                    return Ok(Expr::Call(func, Box::new(arg)));
                }
                let atom = self.identifier(&name, at)?;
                if *self.peek() == Tok::LParen {
                    return self.error("an operator (only sin, cos, exp, sqrt can be applied)");
                }
                Ok(atom)
            }
            other => Err(ParseError::Syntax {
                    position: at,
                    expected: "a number, identifier or `(`".into(),
                found: other.describe(),
            }),
        }
    }

    fn identifier(&self, name: &str, at: usize) -> Result<Expr, ParseError> {
        match name {
            "x" => return Ok(Expr::Var(Var::X)),
            "y" => return Ok(Expr::Var(Var::Y)),
            "pi" => return Ok(Expr::Const(Constant::Pi)),
            "sqrt2" => return Ok(Expr::Const(Constant::Sqrt2)),
            _ => {}
        }
        if let Some(idx) = name.strip_prefix("c_").and_then(|s| s.parse::<usize>().ok()) {
            if idx >= 1 && idx <= self.fiber_dim {
                return Ok(Expr::Var(Var::Fiber(idx - 1)));
            }
        }
        let mut declared: Vec<String> = (1..=self.fiber_dim).map(|i| format!("c_{i}")).collect();
        declared.push("x".into());
        declared.push("y".into());
        Err(ParseError::UnknownIdentifier {
            position: at,
            name: name.to_string(),
            declared,
        })
    }
}

/// Parse `source` with fiber variables `c_1..c_{fiber_dim}` in scope.
pub fn parse(source: &str, fiber_dim: usize) -> Result<Expr, ParseError> {
    let toks = lex(source)?;
    let mut p = Parser {
        toks,
        pos: 0,
        fiber_dim,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return p.error("an operator or end of input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn example_one_component() {
        let e = parse("sin(y)+sqrt(2)", 0).unwrap();
        assert_eq!(
            e,
            Expr::Binary(
                BinOp::Add,
                b(Expr::Call(Func::Sin, b(Expr::Var(Var::Y)))),
                b(Expr::Call(Func::Sqrt, b(Expr::Num(2.0))))
            )
        );
    }

    #[test]
    fn atom() {
        assert_eq!(parse("x", 0).unwrap(), Expr::Var(Var::X));
    }

    #[test]
    fn three_summands() {
        let e = parse("-cos(y)+2*y+cos(x)", 0).unwrap();
        let Expr::Binary(BinOp::Add, lhs, third) = e else {
            panic!("top node should be a sum");
        };
        assert_eq!(*third, Expr::Call(Func::Cos, b(Expr::Var(Var::X))));
        let Expr::Binary(BinOp::Add, first, second) = *lhs else {
            panic!("left-associative sum expected");
        };
        assert_eq!(*first, Expr::Neg(b(Expr::Call(Func::Cos, b(Expr::Var(Var::Y))))));
        assert_eq!(
            *second,
            Expr::Binary(BinOp::Mul, b(Expr::Num(2.0)), b(Expr::Var(Var::Y)))
        );
    }

    #[test]
    fn precedence() {
        assert_eq!(
            parse("-x^2", 0).unwrap(),
            Expr::Neg(b(Expr::Pow(b(Expr::Var(Var::X)), 2)))
        );
        assert_eq!(
            parse("x-y-1", 0).unwrap(),
            Expr::Binary(
                BinOp::Sub,
                b(Expr::Binary(BinOp::Sub, b(Expr::Var(Var::X)), b(Expr::Var(Var::Y)))),
                b(Expr::Num(1.0))
            )
        );
        assert_eq!(
            parse("x/y*2", 0).unwrap(),
            Expr::Binary(
                BinOp::Mul,
                b(Expr::Binary(BinOp::Div, b(Expr::Var(Var::X)), b(Expr::Var(Var::Y)))),
                b(Expr::Num(2.0))
            )
        );
        assert_eq!(parse("x^-1", 0).unwrap(), Expr::Pow(b(Expr::Var(Var::X)), -1));
    }

    #[test]
    fn fiber_and_constants() {
        assert_eq!(parse("c_2", 2).unwrap(), Expr::Var(Var::Fiber(1)));
        assert_eq!(parse("pi", 0).unwrap(), Expr::Const(Constant::Pi));
        assert_eq!(parse("1.5e-3", 0).unwrap(), Expr::Num(1.5e-3));
    }

    #[test]
    fn unknown_identifier_lists_declared() {
        let err = parse("x + c_3", 2).unwrap_err();
        match &err {
            ParseError::UnknownIdentifier {
                position,
                name,
                declared,
            } => {
                assert_eq!(*position, 4);
                assert_eq!(name, "c_3");
                assert_eq!(declared, &["c_1", "c_2", "x", "y"]);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(err.to_string().contains("c_1, c_2, x, y"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let cases = [
            ("sin(y", 5),
            ("x +", 3),
            ("sin y", 4),
            ("x ^ 1.5", 4),
            ("(x))", 3),
            ("x $ y", 2),
            ("", 0),
            ("x(2)", 1),
        ];
        for (src, pos) in cases {
            let err = parse(src, 0).unwrap_err();
            assert_eq!(err.position(), pos, "{src}: {err}");
            assert!(err.position() <= src.len());
        }
    }
}
