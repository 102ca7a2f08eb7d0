use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{parse_terms, render_term, Coeff, ParseCoeff};
use crate::error::{Error, Result};
use crate::exactnum::{int, qint, QValue, Rational};

/// An exact Laurent polynomial in x. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct XLaurent {
    terms: BTreeMap<i64, Rational>,
}

impl XLaurent {
    pub fn monomial(c: Rational, e: i64) -> Self {
        let mut f = XLaurent::default();
        f.add_term(e, c);
        f
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, Rational)>>(terms: I) -> Self {
        let mut f = XLaurent::default();
        for (e, c) in terms {
            f.add_term(e, c);
        }
        f
    }

    pub fn add_term(&mut self, e: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> Rational {
        self.terms.get(&e).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &Rational)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_degree(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn map_terms(&self, f: impl Fn(i64, &Rational) -> Option<(i64, Rational)>) -> Self {
        XLaurent::from_terms(self.terms.iter().filter_map(|(e, c)| f(*e, c)))
    }

    /// Jackson derivative: x^n -> (n)_q x^(n-1).
    pub fn dq(&self, q: &QValue) -> Self {
        self.map_terms(|e, c| Some((e - 1, c * qint(e, q))))
    }

    /// f(x) -> f(q^k x).
    pub fn tau_scale(&self, q: &QValue, k: i64) -> Self {
        self.map_terms(|e, c| Some((e, c * q.pow(k * e))))
    }

    /// f(x) -> f(s x) for a non-zero rational s.
    pub fn scale_arg(&self, s: &Rational) -> Self {
        self.map_terms(|e, c| Some((e, c * crate::exactnum::rpow(s, e))))
    }

    /// Right inverse of [`XLaurent::dq`] on monomials: x^n -> x^(n+1)/(n+1)_q.
    pub fn dq_inverse_monomial(&self, q: &QValue) -> Result<Self> {
        if !self.coeff(-1).is_zero() {
            return Err(Error::NonIntegrable);
        }
        Ok(self.map_terms(|e, c| Some((e + 1, c / qint(e + 1, q)))))
    }

    /// Classical antiderivative; fails on an x^-1 term.
    pub fn integrate(&self) -> Result<Self> {
        if !self.coeff(-1).is_zero() {
            return Err(Error::NonIntegrable);
        }
        Ok(self.map_terms(|e, c| Some((e + 1, c / int(e + 1)))))
    }

    /// Multiplication by x^k.
    pub fn shift(&self, k: i64) -> Self {
        self.map_terms(|e, c| Some((e + k, c.clone())))
    }

    /// Drops every term of degree above `d`.
    pub fn truncate_above(&self, d: i64) -> Self {
        self.map_terms(|e, c| (e <= d).then(|| (e, c.clone())))
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| c * crate::exactnum::rpow(x, *e))
            .fold(Rational::zero(), |a, b| a + b)
    }
}

impl Coeff for XLaurent {
    fn zero() -> Self {
        XLaurent::default()
    }

    fn constant(c: Rational) -> Self {
        XLaurent::monomial(c, 0)
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c.clone());
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = XLaurent::default();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return XLaurent::default();
        }
        self.map_terms(|e, v| Some((e, v * c)))
    }

    fn ddx(&self) -> Self {
        self.map_terms(|e, c| (e != 0).then(|| (e - 1, c * int(e))))
    }

    fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let factor = match e {
                0 => String::new(),
                1 => "x".into(),
                _ => format!("x^{e}"),
            };
            render_term(c, &factor, i == 0, &mut out);
        }
        out
    }
}

impl ParseCoeff for XLaurent {
    fn parse(text: &str) -> Result<Self> {
        let mut out = XLaurent::default();
        for t in parse_terms(text)? {
            let mut e = 0;
            for (name, pow, col) in t.factors {
                if name != "x" {
                    return Err(Error::Parse {
                        column: col,
                        message: format!("unknown variable `{name}`; expected `x`"),
                    });
                }
                e += pow;
            }
            out.add_term(e, t.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for XLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
