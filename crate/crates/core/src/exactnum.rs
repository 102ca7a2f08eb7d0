//! Exact rational arithmetic and q-combinatorics.
//!
//! Every coefficient in the crate lives in [`Rational`], an arbitrary-precision
//! fraction kept in lowest terms with a positive denominator. The deformation
//! parameter `q` is a concrete rational wrapped in [`QValue`], never a symbol.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `base^exp` for any integer exponent. Panics on `0^negative`.
pub fn rpow(base: &Rational, exp: i64) -> Rational {
    if exp == 0 {
        return Rational::one();
    }
    let mut acc = Rational::one();
    let mut b = if exp < 0 { base.recip() } else { base.clone() };
    let mut e = exp.unsigned_abs();
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    acc
}

/// Parses `p/r` or an integer. Decimal notation is rejected.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    if t.contains('.') || t.contains('e') || t.contains('E') {
        return Err(Error::DecimalInput(t.to_string()));
    }
    let parsed = if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok();
        let d = BigInt::from_str(d.trim()).ok();
        match (n, d) {
            (Some(n), Some(d)) if !d.is_zero() => Some(Rational::new(n, d)),
            _ => None,
        }
    } else {
        BigInt::from_str(t).ok().map(Rational::from_integer)
    };
    parsed.ok_or_else(|| Error::Parse {
        column: 0,
        message: format!("`{t}` is not a rational number"),
    })
}

/// Canonical text for a rational: `n` or `n/d`.
pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// n(n-1)...(n-k+1), valid for negative n.
pub fn falling_factorial(n: i64, k: u32) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i))
}

/// Generalised binomial coefficient n(n-1)...(n-k+1)/k!.
pub fn binom_generalized(n: i64, k: u32) -> Rational {
    Rational::new(falling_factorial(n, k), factorial(k))
}

/// The deformation parameter. Guaranteed to differ from 0, 1 and -1, which
/// keeps every q-integer (k)_q with k >= 1 non-zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QValue(Rational);

impl QValue {
    pub fn new(q: Rational) -> Result<Self> {
        if q.is_zero() || q.is_one() || q == -Rational::one() {
            return Err(Error::InvalidQ(render_rational(&q)));
        }
        Ok(QValue(q))
    }

    pub fn from_ratio(n: i64, d: i64) -> Result<Self> {
        Self::new(rat(n, d))
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_rational(text)?)
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn pow(&self, k: i64) -> Rational {
        rpow(&self.0, k)
    }

    /// The mirrored parameter 1/q.
    pub fn inverse(&self) -> QValue {
        QValue(self.0.recip())
    }

    /// Exact square root, when q is the square of a rational.
    pub fn sqrt(&self) -> Option<Rational> {
        if self.0.is_negative() {
            return None;
        }
        let n = self.0.numer().sqrt();
        let d = self.0.denom().sqrt();
        (&n * &n == *self.0.numer() && &d * &d == *self.0.denom()).then(|| Rational::new(n, d))
    }
}

impl fmt::Display for QValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_rational(&self.0))
    }
}

impl FromStr for QValue {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        QValue::parse(s)
    }
}

/// The q-integer (n)_q = (q^n - 1)/(q - 1), for any integer n.
pub fn qint(n: i64, q: &QValue) -> Rational {
    (q.pow(n) - Rational::one()) / (q.value() - Rational::one())
}

/// (k)_q! = (1)_q (2)_q ... (k)_q.
pub fn qfactorial(k: u32, q: &QValue) -> Rational {
    (1..=k as i64).fold(Rational::one(), |acc, i| acc * qint(i, q))
}

/// Bracket q-binomial: (m)_q (m-1)_q ... (m-k+1)_q / (k)_q!, for any integer m.
pub fn qbinom_bracket(m: i64, k: u32, q: &QValue) -> Rational {
    let num = (0..k as i64).fold(Rational::one(), |acc, i| acc * qint(m - i, q));
    num / qfactorial(k, q)
}

/// (a; q)_k = prod_{s=0}^{k-1} (1 - a q^s).
pub fn qpochhammer(a: &Rational, q: &QValue, k: u32) -> Rational {
    (0..k as i64).fold(Rational::one(), |acc, s| acc * (Rational::one() - a * q.pow(s)))
}

/// Gaussian binomial (q;q)_n / ((q;q)_k (q;q)_{n-k}).
pub fn qbinom_gauss(n: u32, k: u32, q: &QValue) -> Result<Rational> {
    if k > n {
        return Err(Error::BinomialRange {
            n: n as i64,
            k: k as i64,
        });
    }
    let qq = q.value();
    Ok(qpochhammer(qq, q, n) / (qpochhammer(qq, q, k) * qpochhammer(qq, q, n - k)))
}

/// Checks C(n,g) C(n+r-g, m) = sum_{a+b=g+m} C(b,g) C(n,b) C(r,a) exactly.
///
/// This is the binomial identity behind associativity of the symbol product.
pub fn check_shifted_binomial_identity(n: i64, r: i64, gamma: u32, mu: u32) -> bool {
    let lhs = binom_generalized(n, gamma) * binom_generalized(n + r - gamma as i64, mu);
    let total = gamma + mu;
    let rhs = (0..=total).fold(Rational::zero(), |acc, beta| {
        let alpha = total - beta;
        acc + binom_generalized(beta as i64, gamma) * binom_generalized(n, beta) * binom_generalized(r, alpha)
    });
    lhs == rhs
}

/// Coefficients c_0..c_N of exp_q(y) = sum (1-q)^k y^k / (q;q)_k.
pub fn qexp_coeffs(n: usize, q: &QValue) -> Vec<Rational> {
    let one_minus_q = Rational::one() - q.value();
    (0..=n as u32)
        .map(|k| rpow(&one_minus_q, k as i64) / qpochhammer(q.value(), q, k))
        .collect()
}

/// Coefficients of exp_{1/q}(-y).
pub fn qexp_recip_coeffs(n: usize, q: &QValue) -> Vec<Rational> {
    qexp_coeffs(n, &q.inverse())
        .into_iter()
        .enumerate()
        .map(|(k, c)| if k % 2 == 1 { -c } else { c })
        .collect()
}

/// Coefficients of exp_q(y) computed from its exponential form
/// exp( sum_{k>=1} (1-q)^k y^k / (k (1-q^k)) ).
pub fn qexp_coeffs_exponential_form(n: usize, q: &QValue) -> Vec<Rational> {
    let one_minus_q = Rational::one() - q.value();
    let mut log = vec![Rational::zero(); n + 1];
    for (k, slot) in log.iter_mut().enumerate().skip(1) {
        let k = k as i64;
        *slot = rpow(&one_minus_q, k) / (int(k) * (Rational::one() - q.pow(k)));
    }
    series_exp(&log)
}

/// exp of a power series with zero constant term, truncated to the same length.
/// Uses n f_n = sum_{k=1}^n k g_k f_{n-k}.
pub fn series_exp(g: &[Rational]) -> Vec<Rational> {
    debug_assert!(g.first().is_none_or(Zero::is_zero));
    let len = g.len();
    let mut f = vec![Rational::zero(); len];
    if len == 0 {
        return f;
    }
    f[0] = Rational::one();
    for n in 1..len {
        let mut acc = Rational::zero();
        for k in 1..=n {
            acc += int(k as i64) * &g[k] * &f[n - k];
        }
        f[n] = acc / int(n as i64);
    }
    f
}

/// Product of two power series truncated to `len` terms.
pub fn series_mul(a: &[Rational], b: &[Rational], len: usize) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate().take(len - i) {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Dense one-variable polynomial in q, used to cross-check q-binomials as
/// polynomials rather than as evaluated numbers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QPoly(Vec<Rational>);

impl QPoly {
    pub fn constant(c: Rational) -> Self {
        QPoly(vec![c]).normalized()
    }

    pub fn from_coeffs(c: Vec<Rational>) -> Self {
        QPoly(c).normalized()
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.0
    }

    fn normalized(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn add(&self, other: &QPoly) -> QPoly {
        let len = self.0.len().max(other.0.len());
        let c = (0..len)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(Rational::zero);
                let b = other.0.get(i).cloned().unwrap_or_else(Rational::zero);
                a + b
            })
            .collect();
        QPoly(c).normalized()
    }

    /// Multiplication by q^k.
    pub fn shift(&self, k: usize) -> QPoly {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut c = vec![Rational::zero(); k];
        c.extend(self.0.iter().cloned());
        QPoly(c)
    }

    pub fn eval(&self, q: &Rational) -> Rational {
        self.0.iter().rev().fold(Rational::zero(), |acc, c| acc * q + c)
    }

    /// The Gaussian binomial as a polynomial in q, built from the q-Pascal rule
    /// [n,k] = [n-1,k-1] + q^k [n-1,k].
    pub fn gaussian_binomial(n: u32, k: u32) -> QPoly {
        if k > n {
            return QPoly(Vec::new());
        }
        let mut row: Vec<QPoly> = vec![QPoly::constant(Rational::one())];
        for m in 1..=n {
            let mut next = Vec::with_capacity(m as usize + 1);
            for j in 0..=m {
                let left = if j == 0 {
                    QPoly(Vec::new())
                } else {
                    row[j as usize - 1].clone()
                };
                let right = if j == m {
                    QPoly(Vec::new())
                } else {
                    row[j as usize].shift(j as usize)
                };
                next.push(left.add(&right));
            }
            row = next;
        }
        row.swap_remove(k as usize)
    }
}
