//! Recursive-descent parser for the scalar token grammar.
//!
//! Grammar (see docs/scalar-grammar.md):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := '-' factor | atom ('^' sint)?
//! atom   := UINT | 'i' | 'r2' | 'L' | '(' expr ')'
//! sint   := '-'? UINT
//! ```
//!
//! Every token string the engine prints is an expression in this grammar and
//! parses back to a structurally equal scalar.

use super::{Scalar, ScalarError};
use num_bigint::BigInt;
use num_rational::BigRational;

struct P<'a> {
    s: &'a [u8],
    pos: usize,
}

pub fn parse_scalar(input: &str) -> Result<Scalar, ScalarError> {
    let mut p = P { s: input.as_bytes(), pos: 0 };
    p.ws();
    let v = p.expr()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

impl<'a> P<'a> {
    fn err(&self, msg: &str) -> ScalarError {
        ScalarError::Parse { pos: self.pos, msg: msg.into() }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && (self.s[self.pos] as char).is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.term()?;
        loop {
            self.ws();
            if self.eat(b'+') {
                self.ws();
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                self.ws();
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Scalar, ScalarError> {
        let mut acc = self.factor()?;
        loop {
            self.ws();
            if self.eat(b'*') {
                self.ws();
                acc = &acc * &self.factor()?;
            } else if self.eat(b'/') {
                self.ws();
                let d = self.factor()?;
                acc = &acc * &d.inv()?;
            } else if matches!(self.peek(), Some(b'i') | Some(b'r') | Some(b'L')) {
                // implicit product in forms like "(1/2)i" or "(0+0i)r2"
                acc = &acc * &self.factor()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Scalar, ScalarError> {
        self.ws();
        if self.eat(b'-') {
            let v = self.factor()?;
            return Ok(-&v);
        }
        let base = self.atom()?;
        self.ws();
        if self.eat(b'^') {
            self.ws();
            let neg = self.eat(b'-');
            let n = self.uint()?;
            use num_traits::ToPrimitive;
            let n = n.to_i64().ok_or_else(|| self.err("exponent out of range"))?;
            let k = if neg { -n } else { n };
            return base.pow(k);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Scalar, ScalarError> {
        self.ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.ws();
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(b'L') => {
                self.pos += 1;
                Ok(Scalar::lambda())
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(Scalar::i())
            }
            Some(b'r') => {
                self.pos += 1;
                if !self.eat(b'2') {
                    return Err(self.err("expected 'r2'"));
                }
                Ok(Scalar::sqrt2())
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                // adjacency like "2i" or "2r2" is handled as implicit
                // multiplication at the term level, binding like '*'
                Ok(Scalar::from_rat(BigRational::from_integer(n)))
            }
            _ => Err(self.err("expected a number, 'i', 'r2', 'L' or '('")),
        }
    }

    fn uint(&mut self) -> Result<BigInt, ScalarError> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
        txt.parse::<BigInt>().map_err(|e| ScalarError::Parse { pos: start, msg: e.to_string() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_frac;

    #[test]
    fn shorthand_forms() {
        assert_eq!(parse_scalar("3/2").unwrap(), Scalar::from_rat(rat_frac(3, 2)));
        assert_eq!(parse_scalar("-i").unwrap(), -&Scalar::i());
        assert_eq!(parse_scalar("r2*L^-2").unwrap(), &Scalar::sqrt2() * &Scalar::lambda_pow(-2));
        assert_eq!(parse_scalar("2i").unwrap(), &Scalar::from_int(2) * &Scalar::i());
        assert_eq!(
            parse_scalar("(1+L)/(1-L+L^2)").unwrap(),
            (&(&Scalar::one() + &Scalar::lambda())
                * &(&(&Scalar::one() - &Scalar::lambda()) + &Scalar::lambda_pow(2)).inv().unwrap())
        );
    }

    #[test]
    fn sample_token_form() {
        let s = "((3/2)+(1/2)i+((0)+(0)i)r2)*L^-1";
        let v = parse_scalar(s).unwrap();
        let expect = &(&Scalar::from_rat(rat_frac(3, 2)) + &(&Scalar::from_rat(rat_frac(1, 2)) * &Scalar::i()))
            * &Scalar::lambda_pow(-1);
        assert_eq!(v, expect);
        assert_eq!(parse_scalar(&v.to_string()).unwrap(), v);
    }
}
