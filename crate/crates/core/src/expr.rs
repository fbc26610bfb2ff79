//! Closed-form scalar expressions over the box coordinates.
//!
//! Used for body-force and velocity potentials in scenario configs. The
//! grammar is deliberately small:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | 'x' | 'y' | 'z' | 'pi' | ('sin' | 'cos') '(' expr ')' | '(' expr ')'
//! ```
//!
//! Expressions can be differentiated symbolically, so gradients and Laplacians
//! of non-periodic potentials (e.g. polynomials) are sampled exactly instead of
//! through the periodic spectral derivative.

use std::fmt;

use crate::fieldcalc::{Axis, Grid, ScalarField, VectorField};
use crate::{Error, Result};

pub const MAX_INPUT_LEN: usize = 4096;
pub const MAX_DEPTH: usize = 64;
pub const MAX_EXPONENT: u32 = 32;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Axis),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        if src.len() > MAX_INPUT_LEN {
            return Err(Error::Expr {
                pos: MAX_INPUT_LEN,
                msg: format!("expression longer than {MAX_INPUT_LEN} bytes"),
            });
        }
        let mut p = Parser {
            src: src.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let e = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return p.fail("unexpected trailing input");
        }
        Ok(e)
    }

    pub fn eval(&self, p: [f64; 3]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(a) => p[a.index()],
            Expr::Neg(e) => -e.eval(p),
            Expr::Add(a, b) => a.eval(p) + b.eval(p),
            Expr::Sub(a, b) => a.eval(p) - b.eval(p),
            Expr::Mul(a, b) => a.eval(p) * b.eval(p),
            Expr::Div(a, b) => a.eval(p) / b.eval(p),
            Expr::Pow(e, k) => e.eval(p).powi(*k as i32),
            Expr::Sin(e) => e.eval(p).sin(),
            Expr::Cos(e) => e.eval(p).cos(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Expr::Const(c) if *c == 0.0)
    }

    /// Symbolic partial derivative.
    pub fn derivative(&self, axis: Axis) -> Expr {
        use Expr::*;
        match self {
            Const(_) => Const(0.0),
            Var(a) => Const(if *a == axis { 1.0 } else { 0.0 }),
            Neg(e) => neg(e.derivative(axis)),
            Add(a, b) => add(a.derivative(axis), b.derivative(axis)),
            Sub(a, b) => sub(a.derivative(axis), b.derivative(axis)),
            Mul(a, b) => add(
                mul(a.derivative(axis), (**b).clone()),
                mul((**a).clone(), b.derivative(axis)),
            ),
            Div(a, b) => Div(
                Box::new(sub(
                    mul(a.derivative(axis), (**b).clone()),
                    mul((**a).clone(), b.derivative(axis)),
                )),
                Box::new(Pow(b.clone(), 2)),
            ),
            Pow(e, k) => match k {
                0 => Const(0.0),
                1 => e.derivative(axis),
                _ => mul(
                    mul(Const(*k as f64), Pow(e.clone(), k - 1)),
                    e.derivative(axis),
                ),
            },
            Sin(e) => mul(Cos(e.clone()), e.derivative(axis)),
            Cos(e) => neg(mul(Sin(e.clone()), e.derivative(axis))),
        }
    }

    pub fn laplacian(&self) -> Expr {
        Axis::ALL
            .iter()
            .map(|&a| self.derivative(a).derivative(a))
            .fold(Expr::Const(0.0), add)
    }

    /// Samples the expression on the grid; fails if any sample is non-finite.
    pub fn sample(&self, grid: Grid) -> Result<ScalarField> {
        let f = ScalarField::from_fn(grid, |x, y, z| self.eval([x, y, z]));
        if !f.is_finite() {
            return Err(Error::Expr {
                pos: 0,
                msg: format!("expression `{self}` is not finite on the grid"),
            });
        }
        Ok(f)
    }

    /// Samples the exact gradient.
    pub fn sample_gradient(&self, grid: Grid) -> Result<VectorField> {
        let [gx, gy, gz] = Axis::ALL.map(|a| self.derivative(a).sample(grid));
        VectorField::new(gx?, gy?, gz?)
    }
}

fn neg(e: Expr) -> Expr {
    match e {
        Expr::Const(c) => Expr::Const(-c),
        e => Expr::Neg(Box::new(e)),
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
        (a, b) if b.is_zero() => a,
        (a, b) if a.is_zero() => b,
        (a, b) => Expr::Add(Box::new(a), Box::new(b)),
    }
}

fn sub(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
        (a, b) if b.is_zero() => a,
        (a, b) if a.is_zero() => neg(b),
        (a, b) => Expr::Sub(Box::new(a), Box::new(b)),
    }
}

fn mul(a: Expr, b: Expr) -> Expr {
    match (a, b) {
        (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
        (a, b) if a.is_zero() || b.is_zero() => Expr::Const(0.0),
        (Expr::Const(1.0), b) => b,
        (a, Expr::Const(1.0)) => a,
        (a, b) => Expr::Mul(Box::new(a), Box::new(b)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if c.is_sign_negative() => write!(f, "({c:?})"),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Var(Axis::X) => write!(f, "x"),
            Expr::Var(Axis::Y) => write!(f, "y"),
            Expr::Var(Axis::Z) => write!(f, "z"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(e, k) => write!(f, "({e}^{k})"),
            Expr::Sin(e) => write!(f, "sin({e})"),
            Expr::Cos(e) => write!(f, "cos({e})"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn fail<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Expr {
            pos: self.pos,
            msg: msg.to_string(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn enter(&mut self) -> Result<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail("expression nested too deeply");
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr> {
        self.enter()?;
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                break;
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        self.enter()?;
        let e = if self.eat(b'-') {
            Expr::Neg(Box::new(self.unary()?))
        } else if self.eat(b'+') {
            self.unary()?
        } else {
            self.power()?
        };
        self.depth -= 1;
        Ok(e)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.fail("exponent must be a non-negative integer literal");
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match digits.parse::<u32>() {
            Ok(k) if k <= MAX_EXPONENT => Ok(Expr::Pow(Box::new(base), k)),
            _ => self.fail(&format!("exponent exceeds {MAX_EXPONENT}")),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => self.fail("unexpected end of expression"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.fail("expected `)`");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let ident = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match ident {
                    "x" => Ok(Expr::Var(Axis::X)),
                    "y" => Ok(Expr::Var(Axis::Y)),
                    "z" => Ok(Expr::Var(Axis::Z)),
                    "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                    "sin" | "cos" => {
                        if !self.eat(b'(') {
                            return self.fail("expected `(` after function name");
                        }
                        let arg = Box::new(self.expr()?);
                        if !self.eat(b')') {
                            return self.fail("expected `)`");
                        }
                        Ok(if ident == "sin" {
                            Expr::Sin(arg)
                        } else {
                            Expr::Cos(arg)
                        })
                    }
                    _ => {
                        self.pos = start;
                        self.fail(&format!("unknown identifier `{ident}`"))
                    }
                }
            }
            Some(_) => self.fail("unexpected character"),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
        };
        digits(self);
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            digits(self);
        }
        if self.pos < self.src.len() && matches!(self.src[self.pos], b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && matches!(self.src[self.pos], b'+' | b'-') {
                self.pos += 1;
            }
            let exp_start = self.pos;
            digits(self);
            if exp_start == self.pos {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expr::Const(v)),
            _ => {
                self.pos = start;
                self.fail("malformed number")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ev(src: &str, p: [f64; 3]) -> f64 {
        Expr::parse(src).unwrap().eval(p)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", [0.0; 3]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", [0.0; 3]), 9.0);
        assert_eq!(ev("8 - 3 - 2", [0.0; 3]), 3.0);
        assert_eq!(ev("8 / 4 / 2", [0.0; 3]), 1.0);
        assert_eq!(ev("-x^2", [3.0, 0.0, 0.0]), -9.0);
        assert_eq!(ev("2*x*y - z", [1.0, 2.0, 3.0]), 1.0);
        assert_eq!(ev("1.5e1 + .5", [0.0; 3]), 15.5);
        assert!((ev("sin(pi/2) + cos(0)", [0.0; 3]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in [
            "", "x +", "sin x", "foo(x)", "x^-1", "x^99", "(x", "x)", "1..2", "exp(x)", "x y",
            "2^x",
        ] {
            assert!(Expr::parse(bad).is_err(), "accepted {bad:?}");
        }
        let deep = "(".repeat(200) + "x" + &")".repeat(200);
        assert!(Expr::parse(&deep).is_err());
        let long = "x+".repeat(3000) + "x";
        assert!(Expr::parse(&long).is_err());
    }

    #[test]
    fn derivatives() {
        let e = Expr::parse("x^2*y - sin(z)/2 + cos(x*y)").unwrap();
        let p = [0.7, -1.1, 0.3];
        let [x, y, z] = p;
        let dx = e.derivative(Axis::X).eval(p);
        let dy = e.derivative(Axis::Y).eval(p);
        let dz = e.derivative(Axis::Z).eval(p);
        assert!((dx - (2.0 * x * y - y * (x * y).sin())).abs() < 1e-14);
        assert!((dy - (x * x - x * (x * y).sin())).abs() < 1e-14);
        assert!((dz - (-z.cos() / 2.0)).abs() < 1e-14);
    }

    #[test]
    fn harmonic_polynomial_has_zero_laplacian() {
        let e = Expr::parse("x^2 - y^2 + 3*x*y*z").unwrap();
        let lap = e.laplacian();
        assert_eq!(lap.eval([0.3, 1.4, -2.0]), 0.0);
        let q = Expr::parse("sin(x)*sin(y)").unwrap();
        let p = [0.4, 0.9, 0.0];
        assert!((q.laplacian().eval(p) + 2.0 * p[0].sin() * p[1].sin()).abs() < 1e-14);
    }

    #[test]
    fn quotient_rule() {
        let e = Expr::parse("x/(2 + cos(y))").unwrap();
        let p = [1.3, 0.4, 0.0];
        let d = e.derivative(Axis::Y).eval(p);
        let expected = p[0] * p[1].sin() / (2.0 + p[1].cos()).powi(2);
        assert!((d - expected).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn parser_never_panics(s in ".{0,64}") {
            let _ = Expr::parse(&s);
        }

        #[test]
        fn display_round_trips(a in -5.0f64..5.0, b in 0u32..4, x in -3.0f64..3.0) {
            let src = format!("{a} * sin(x)^{b} - cos(y*{a}) / (3 + x^2)");
            let e = Expr::parse(&src).unwrap();
            let again = Expr::parse(&e.to_string()).unwrap();
            let p = [x, 0.5, -0.25];
            prop_assert_eq!(e.eval(p).to_bits(), again.eval(p).to_bits());
        }
    }
}
