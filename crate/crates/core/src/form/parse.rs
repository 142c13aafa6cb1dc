//! Recursive-descent parser for the expression grammar (see `docs/grammar.md`).

use num_complex::Complex64;

use super::expr::{Expr, Func, Var};
use super::ParseError;

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: text,
        bytes: text.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn syntax(&self, message: &str) -> ParseError {
        ParseError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
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
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if !self.eat(b'^') {
            return Ok(base);
        }
        let paren = self.eat(b'(');
        let neg = self.eat(b'-');
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.syntax("expected integer exponent"));
        }
        let n: i32 = self.src[start..self.pos]
            .parse()
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: "exponent out of range".into(),
            })?;
        if paren && !self.eat(b')') {
            return Err(self.syntax("expected `)`"));
        }
        Ok(Expr::Pow(Box::new(base), if neg { -n } else { n }))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.syntax("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(_) => Err(self.syntax("unexpected character")),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let save = self.pos;
            self.pos += 1;
            if self.pos < b.len() && (b[self.pos] == b'+' || b[self.pos] == b'-') {
                self.pos += 1;
            }
            let digits = self.pos;
            while self.pos < b.len() && b[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits == self.pos {
                self.pos = save;
            }
        }
        let text = &self.src[start..self.pos];
        text.parse::<f64>()
            .map(Expr::num)
            .map_err(|_| ParseError::Syntax {
                offset: start,
                message: format!("malformed number `{}`", text),
            })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        let func = match name {
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "sin" => Some(Func::Sin),
            "cos" => Some(Func::Cos),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat(b'(') {
                return Err(self.syntax("expected `(` after function name"));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return Err(self.syntax("expected `)`"));
            }
            return Ok(Expr::Call(f, Box::new(arg)));
        }
        let unknown = || ParseError::UnknownSymbol {
            name: name.to_string(),
            offset: start,
        };
        match name {
            "pi" => Ok(Expr::pi()),
            "i" => Ok(Expr::Num(Complex64::new(0.0, 1.0))),
            "t" => Ok(Expr::Var(Var::T)),
            "s" => Ok(Expr::Var(Var::S(0))),
            _ => {
                let (head, digits) = name.split_at(1);
                let k: usize = match digits.parse() {
                    Ok(k) if k >= 1 && !digits.starts_with('0') => k,
                    _ => return Err(unknown()),
                };
                match head {
                    "x" => Ok(Expr::Var(Var::X(k - 1))),
                    "s" => Ok(Expr::Var(Var::S(k - 1))),
                    _ => Err(unknown()),
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::form::expr::Env;

    fn ev(text: &str, x: &[f64]) -> Complex64 {
        parse_expr(text).unwrap().eval(&Env::at(x))
    }

    #[test]
    fn euler_identity() {
        let z = ev("exp(i*pi)", &[]);
        assert!((z - Complex64::new(-1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn precedence() {
        assert_eq!(ev("2*x1^2 - x2", &[3.0, 1.0]), Complex64::new(17.0, 0.0));
        assert_eq!(ev("-x1^2", &[3.0]), Complex64::new(-9.0, 0.0));
        assert_eq!(ev("2*-3", &[]), Complex64::new(-6.0, 0.0));
        assert_eq!(ev("1 - 2 - 3", &[]), Complex64::new(-4.0, 0.0));
        assert_eq!(ev("8/2/2", &[]), Complex64::new(2.0, 0.0));
        assert_eq!(ev("2^-1", &[]), Complex64::new(0.5, 0.0));
        assert_eq!(ev("1.5e1 + .5", &[]), Complex64::new(15.5, 0.0));
    }

    #[test]
    fn syntax_error_offsets() {
        assert_eq!(
            parse_expr("x1 +"),
            Err(ParseError::Syntax {
                offset: 4,
                message: "unexpected end of input".into()
            })
        );
        match parse_expr("(x1") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{:?}", other),
        }
        match parse_expr("x1 x2") {
            Err(ParseError::Syntax { offset, .. }) => assert_eq!(offset, 3),
            other => panic!("{:?}", other),
        }
    }

    #[test]
    fn unknown_symbols() {
        assert_eq!(
            parse_expr("x1 + y"),
            Err(ParseError::UnknownSymbol {
                name: "y".into(),
                offset: 5
            })
        );
        assert!(matches!(parse_expr("x0"), Err(ParseError::UnknownSymbol { .. })));
        assert!(matches!(parse_expr("tan(x1)"), Err(ParseError::UnknownSymbol { .. })));
    }

    #[test]
    fn display_roundtrips() {
        for text in [
            "2*x1^2 - x2",
            "exp(2*pi*i*x1)",
            "-(x1 + x2)*sin(t)",
            "x1/(x2*x3)",
            "(1 + 2*i)*x1^(-2)",
            "cos(x1) - -x2",
        ] {
            let e = parse_expr(text).unwrap();
            let again = parse_expr(&e.to_string()).unwrap();
            let pt = [0.3, 0.7, 1.1];
            let env = Env::with_t(&pt, 0.4);
            assert!((e.eval(&env) - again.eval(&env)).norm() < 1e-12, "{}", e);
        }
    }
}
