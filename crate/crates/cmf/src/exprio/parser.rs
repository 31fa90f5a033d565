//! Recursive-descent parser for rational-function expressions.
//!
//! Grammar (left-associative, `^` > unary `-` > `* /` > `+ -`):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' '-'? INT)*
//! atom  := INT | IDENT | '(' expr ')'
//! ```

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratfunc::RationalFunction;
use crate::scalar::Coeff;
use crate::BigRat;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Sym(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let end = t.0 == Tok::End;
            out.push(t);
            if end {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize)> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if b.is_ascii_digit() {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let v = BigInt::from_str(&self.src[start..self.pos]).expect("digits");
            return Ok((Tok::Int(v), start));
        }
        if b.is_ascii_alphabetic() || b == b'_' {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if b"+-*/^()".contains(&b) {
            self.pos += 1;
            return Ok((Tok::Sym(b as char), start));
        }
        let ch = self.src[start..].chars().next().unwrap_or('?');
        Err(Error::Syntax { pos: start, msg: format!("unexpected character `{ch}`") })
    }
}

struct Parser<'v> {
    toks: Vec<(Tok, usize)>,
    i: usize,
    vars: &'v [String],
}

/// Parses `text` over the variable names `vars` (index = position).
pub fn parse_expr<T: Coeff>(text: &str, vars: &[String]) -> Result<RationalFunction<T>> {
    let mut p = Parser { toks: Lexer::tokens(text)?, i: 0, vars };
    let e = p.expr::<T>()?;
    match p.peek() {
        Tok::End => Ok(e),
        t => Err(Error::Syntax { pos: p.pos(), msg: format!("unexpected {}", describe(t)) }),
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(v) => format!("number `{v}`"),
        Tok::Ident(s) => format!("name `{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn expr<T: Coeff>(&mut self) -> Result<RationalFunction<T>> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Sym('+') => {
                    self.bump();
                    acc = acc + self.term()?;
                }
                Tok::Sym('-') => {
                    self.bump();
                    acc = acc - self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term<T: Coeff>(&mut self) -> Result<RationalFunction<T>> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Sym('*') => {
                    self.bump();
                    acc = acc * self.unary()?;
                }
                Tok::Sym('/') => {
                    self.bump();
                    let literal_zero = matches!(self.peek(), Tok::Int(v) if v.is_zero());
                    let rhs = self.unary()?;
                    if rhs.is_zero() {
                        return Err(if literal_zero { Error::ZeroDenominator } else { Error::DivisionByZero });
                    }
                    acc = acc.checked_div(&rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary<T: Coeff>(&mut self) -> Result<RationalFunction<T>> {
        if let Tok::Sym('-') = self.peek() {
            self.bump();
            return Ok(-self.unary()?);
        }
        self.power()
    }

    fn power<T: Coeff>(&mut self) -> Result<RationalFunction<T>> {
        let mut base = self.atom()?;
        while let Tok::Sym('^') = self.peek() {
            self.bump();
            let neg = if let Tok::Sym('-') = self.peek() {
                self.bump();
                true
            } else {
                false
            };
            let pos = self.pos();
            let e = match self.bump() {
                Tok::Int(v) => i32::try_from(v).map_err(|_| Error::Syntax { pos, msg: "exponent too large".into() })?,
                t => return Err(Error::Syntax { pos, msg: format!("expected integer exponent, found {}", describe(&t)) }),
            };
            let e = if neg { -e } else { e };
            if e < 0 && base.is_zero() {
                return Err(Error::DivisionByZero);
            }
            base = base.pow_i(e);
        }
        Ok(base)
    }

    fn atom<T: Coeff>(&mut self) -> Result<RationalFunction<T>> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(v) => Ok(RationalFunction::constant(T::from_rational(&BigRat::from_integer(v)))),
            Tok::Ident(name) => match self.vars.iter().position(|v| *v == name) {
                Some(i) => Ok(RationalFunction::var(i)),
                None => Err(Error::UnknownVariable { name, pos }),
            },
            Tok::Sym('(') => {
                let e = self.expr()?;
                match self.bump() {
                    Tok::Sym(')') => Ok(e),
                    t => Err(Error::Syntax { pos: self.toks[self.i.saturating_sub(1)].1, msg: format!("expected `)`, found {}", describe(&t)) }),
                }
            }
            t => Err(Error::Syntax { pos, msg: format!("unexpected {}", describe(&t)) }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::RatFunc;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn p(s: &str) -> Result<RatFunc> {
        parse_expr(s, &names(&["x1", "x2", "z"]))
    }

    #[test]
    fn precedence_golden() {
        assert_eq!(p("1+2*3^2").unwrap(), RatFunc::from_i64(19));
        assert_eq!(p("-2^2").unwrap(), RatFunc::from_i64(-4));
        assert_eq!(p("2-3-4").unwrap(), RatFunc::from_i64(-5));
        assert_eq!(p("12/3/2").unwrap(), RatFunc::from_i64(2));
        assert_eq!(p("2^-1*4").unwrap(), RatFunc::from_i64(2));
        assert!(p("0").unwrap().is_zero());
    }

    #[test]
    fn expressions() {
        let f = p("(x1+1)^3/x1^3").unwrap();
        let x = RatFunc::var(0);
        assert_eq!(f, (x.clone() + RatFunc::from_i64(1)).pow_i(3) / x.pow_i(3));
        let g = p("1/(1-z)").unwrap();
        assert_eq!(g.den().total_degree(), 1);
        assert!(g.num().is_constant());
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(p("x1 + y"), Err(Error::UnknownVariable { pos: 5, .. })));
        assert!(matches!(p("1/0"), Err(Error::ZeroDenominator)));
        assert!(matches!(p("1/(x1-x1)"), Err(Error::DivisionByZero)));
        assert!(matches!(p("(x1+1"), Err(Error::Syntax { .. })));
        assert!(matches!(p("x1 $ 2"), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(p("x1^x2"), Err(Error::Syntax { .. })));
        assert!(matches!(p("x1 x2"), Err(Error::Syntax { pos: 3, .. })));
    }
}
