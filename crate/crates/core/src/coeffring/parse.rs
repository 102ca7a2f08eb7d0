use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// One summand of a parsed polynomial: a rational coefficient times named
/// factors raised to integer powers. Each factor records its column.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedTerm {
    pub coeff: Rational,
    pub factors: Vec<(String, i64, usize)>,
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(|c| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
    }

    fn err(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.pos + 1,
            message: message.into(),
        }
    }

    fn digits(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        (self.pos > start).then(|| {
            std::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .unwrap()
        })
    }

    fn number(&mut self) -> Result<Option<Rational>> {
        let Some(n) = self.digits() else { return Ok(None) };
        if self.peek() == Some(b'.') {
            return Err(Error::DecimalInput(
                String::from_utf8_lossy(self.src).trim().to_string(),
            ));
        }
        self.skip_ws();
        if self.peek() == Some(b'/') {
            self.pos += 1;
            self.skip_ws();
            let d = self.digits().ok_or_else(|| self.err("expected a denominator"))?;
            if d == BigInt::from(0) {
                return Err(self.err("zero denominator"));
            }
            return Ok(Some(Rational::new(n, d)));
        }
        Ok(Some(Rational::from_integer(n)))
    }

    fn ident(&mut self) -> Option<(String, usize)> {
        let start = self.pos;
        if !self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
            return None;
        }
        while self.peek().is_some_and(|c| c.is_ascii_alphanumeric() || c == b'_') {
            self.pos += 1;
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        Some((s, start + 1))
    }

    fn exponent(&mut self) -> Result<i64> {
        self.skip_ws();
        if self.peek() != Some(b'^') {
            return Ok(1);
        }
        self.pos += 1;
        self.skip_ws();
        let paren = self.peek() == Some(b'(');
        if paren {
            self.pos += 1;
            self.skip_ws();
        }
        let neg = self.peek() == Some(b'-');
        if neg {
            self.pos += 1;
        }
        let d = self.digits().ok_or_else(|| self.err("expected an integer exponent"))?;
        if paren {
            self.skip_ws();
            if self.peek() != Some(b')') {
                return Err(self.err("expected `)`"));
            }
            self.pos += 1;
        }
        let e: i64 = d.try_into().map_err(|_| self.err("exponent out of range"))?;
        Ok(if neg { -e } else { e })
    }

    fn term(&mut self, sign: i64) -> Result<ParsedTerm> {
        self.skip_ws();
        let mut coeff = Rational::from_integer(BigInt::from(sign));
        let mut factors = Vec::new();
        let mut expect_factor = false;
        if let Some(c) = self.number()? {
            coeff *= c;
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                expect_factor = true;
            }
        } else {
            expect_factor = true;
        }
        loop {
            self.skip_ws();
            match self.ident() {
                Some((name, col)) => {
                    let e = self.exponent()?;
                    factors.push((name, e, col));
                }
                None if expect_factor => return Err(self.err("expected a number or a variable")),
                None => break,
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.pos += 1;
                expect_factor = true;
            } else {
                break;
            }
        }
        Ok(ParsedTerm { coeff, factors })
    }
}

/// Parses a sum of terms such as `3/2*x^2 - u2*u3_x1 + 5`.
pub fn parse_terms(text: &str) -> Result<Vec<ParsedTerm>> {
    let mut cur = Cursor {
        src: text.as_bytes(),
        pos: 0,
    };
    let mut out = Vec::new();
    cur.skip_ws();
    if cur.peek().is_none() {
        return Err(cur.err("empty expression"));
    }
    let mut sign = 1;
    match cur.peek() {
        Some(b'-') => {
            sign = -1;
            cur.pos += 1;
        }
        Some(b'+') => cur.pos += 1,
        _ => {}
    }
    loop {
        out.push(cur.term(sign)?);
        cur.skip_ws();
        match cur.peek() {
            None => break,
            Some(b'+') => sign = 1,
            Some(b'-') => sign = -1,
            Some(c) => return Err(cur.err(format!("unexpected character `{}`", c as char))),
        }
        cur.pos += 1;
    }
    out.retain(|t| !num_traits::Zero::is_zero(&t.coeff));
    Ok(out)
}
