//! Recursive-descent parser.
//!
//! Precedence, loosest first: `+ -`, `* /`, unary `-`, `^` (right
//! associative). So `-x^2` is `-(x^2)` and `x^-2` is `x^(-2)`.

use super::{BinOp, Expr, Func};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown function `{name}` at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownFunction { offset, .. } => *offset,
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> ParseError {
        ParseError::Syntax { offset: self.pos, message: message.to_string() }
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

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Some(b'+') => BinOp::Add,
                Some(b'-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(b'*') => BinOp::Mul,
                Some(b'/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::neg(self.unary()?));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exponent = self.unary()?;
            return Ok(Expr::pow(base, exponent));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.ident(),
            Some(c) => Err(self.error(&format!("unexpected character `{}`", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut n = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            n += digits(self);
        }
        if n == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mark = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| ParseError::Syntax { offset: start, message: format!("malformed number `{text}`") })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        if self.peek() == Some(b'(') {
            let func = Func::from_name(name)
                .ok_or_else(|| ParseError::UnknownFunction { name: name.to_string(), offset: start })?;
            self.pos += 1;
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.error("expected `)` after function argument"));
            }
            return Ok(Expr::apply(func, arg));
        }
        match name {
            "pi" => Ok(Expr::Pi),
            "inf" => Err(ParseError::Syntax {
                offset: start,
                message: "`inf` is only allowed as an integration bound".into(),
            }),
            _ => Ok(Expr::sym(name)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Bindings;

    #[test]
    fn atoms() {
        assert_eq!(parse("x").unwrap(), Expr::sym("x"));
        assert_eq!(parse(" 2.5e-1 ").unwrap(), Expr::Const(0.25));
        assert_eq!(parse("pi").unwrap(), Expr::Pi);
    }

    #[test]
    fn sinc_shape() {
        assert_eq!(parse("sin(x)/x").unwrap(), Expr::div(Expr::apply(Func::Sin, Expr::sym("x")), Expr::sym("x")));
    }

    #[test]
    fn arctan_over_sqrt_shape() {
        let e = parse("atan(l*x)/(x*sqrt(1-x^2))").unwrap();
        let expected = Expr::div(
            Expr::apply(Func::Atan, Expr::mul(Expr::sym("l"), Expr::sym("x"))),
            Expr::mul(
                Expr::sym("x"),
                Expr::apply(Func::Sqrt, Expr::sub(Expr::num(1.0), Expr::pow(Expr::sym("x"), Expr::num(2.0)))),
            ),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn precedence() {
        let b = Bindings::new().with("x", 3.0);
        let v = |s: &str| parse(s).unwrap().eval(&b).unwrap();
        assert_eq!(v("-x^2"), -9.0);
        assert_eq!(v("2^3^2"), 512.0);
        assert_eq!(v("x^-1"), 1.0 / 3.0);
        assert_eq!(v("1-2-3"), -4.0);
        assert_eq!(v("8/2/2"), 2.0);
        assert_eq!(v("2+3*x"), 11.0);
        assert_eq!(v("exp(-x^2)"), (-9.0f64).exp());
        assert_eq!(v("2*-x"), -6.0);
    }

    #[test]
    fn errors_carry_offsets() {
        match parse("1 + foo(x)").unwrap_err() {
            ParseError::UnknownFunction { name, offset } => {
                assert_eq!(name, "foo");
                assert_eq!(offset, 4);
            }
            e => panic!("unexpected {e:?}"),
        }
        assert_eq!(parse("(x+1").unwrap_err().offset(), 4);
        assert_eq!(parse("x+").unwrap_err().offset(), 2);
        assert_eq!(parse("x $").unwrap_err().offset(), 2);
        assert!(parse("").is_err());
        assert!(parse("inf").is_err());
        assert!(parse("x y").is_err());
    }
}
