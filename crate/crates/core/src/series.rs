//! Truncated formal series in one symbol with coefficients in a [`Coeff`] ring.
//!
//! A series stores the powers `lo..=top` of its symbol. Powers above `top`
//! are zero; powers below `lo` are unknown (the tail). Two series are equal
//! modulo tail when they agree on every power both of them know.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::coeffring::Coeff;
use crate::error::{Error, Result};
use crate::exactnum::Rational;

/// Default and maximum window depth for series built from user input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub depth: u32,
    pub max_depth: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            depth: 6,
            max_depth: 10,
        }
    }
}

impl TruncationPolicy {
    pub fn new(depth: u32) -> Result<Self> {
        let p = TruncationPolicy {
            depth,
            ..Self::default()
        };
        if depth == 0 || depth > p.max_depth {
            return Err(Error::InvalidArgument(format!(
                "depth must lie in 1..={}, got {depth}",
                p.max_depth
            )));
        }
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolSeries<C> {
    top: i64,
    lo: i64,
    coeffs: BTreeMap<i64, C>,
}

impl<C: Coeff> SymbolSeries<C> {
    /// The zero series on the window `[top - depth + 1, top]`.
    pub fn zero(top: i64, depth: u32) -> Self {
        assert!(depth >= 1, "depth must be positive");
        SymbolSeries {
            top,
            lo: top - depth as i64 + 1,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(top: i64, depth: u32, terms: I) -> Result<Self> {
        let mut s = Self::zero(top, depth);
        for (i, c) in terms {
            s.add_at(i, c)?;
        }
        Ok(s)
    }

    /// A single term `c * symbol^power`, with the given depth below it.
    pub fn monomial(c: C, power: i64, depth: u32) -> Self {
        let mut s = Self::zero(power, depth);
        s.add_at(power, c).expect("power is the window top");
        s
    }

    /// The identity series with the given depth.
    pub fn identity(depth: u32) -> Self {
        Self::monomial(C::one(), 0, depth)
    }

    pub fn top(&self) -> i64 {
        self.top
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn depth(&self) -> u32 {
        (self.top - self.lo + 1) as u32
    }

    pub fn in_window(&self, power: i64) -> bool {
        power >= self.lo && power <= self.top
    }

    fn outside(&self, power: i64) -> Error {
        Error::OutsideWindow {
            power,
            lo: self.lo,
            top: self.top,
        }
    }

    pub fn add_at(&mut self, power: i64, c: C) -> Result<()> {
        if !self.in_window(power) {
            return Err(self.outside(power));
        }
        self.add_in_window(power, &c);
        Ok(())
    }

    pub(crate) fn add_in_window(&mut self, power: i64, c: &C) {
        if c.is_zero() {
            return;
        }
        let next = match self.coeffs.get(&power) {
            Some(old) => old.add(c),
            None => c.clone(),
        };
        if next.is_zero() {
            self.coeffs.remove(&power);
        } else {
            self.coeffs.insert(power, next);
        }
    }

    /// Coefficient of `symbol^power`; zero above the top, an error below the window.
    pub fn get(&self, power: i64) -> Result<C> {
        if power < self.lo {
            return Err(self.outside(power));
        }
        Ok(self.coeff(power))
    }

    /// Coefficient of `symbol^power`, zero when absent.
    pub fn coeff(&self, power: i64) -> C {
        self.coeffs.get(&power).cloned().unwrap_or_else(C::zero)
    }

    /// Stored non-zero terms in ascending power order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &C)> + '_ {
        self.coeffs.iter().map(|(i, c)| (*i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(i64, &C) -> D) -> SymbolSeries<D> {
        let mut out = SymbolSeries {
            top: self.top,
            lo: self.lo,
            coeffs: BTreeMap::new(),
        };
        for (i, c) in &self.coeffs {
            out.add_in_window(*i, &f(*i, c));
        }
        out
    }

    pub fn try_map_coeffs<D: Coeff>(&self, f: impl Fn(i64, &C) -> Result<D>) -> Result<SymbolSeries<D>> {
        let mut out = SymbolSeries {
            top: self.top,
            lo: self.lo,
            coeffs: BTreeMap::new(),
        };
        for (i, c) in &self.coeffs {
            out.add_in_window(*i, &f(*i, c)?);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map_coeffs(|_, v| v.scale(c))
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|_, v| v.neg())
    }

    /// Sum on the common known window.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = SymbolSeries {
            top: self.top.max(other.top),
            lo: self.lo.max(other.lo),
            coeffs: BTreeMap::new(),
        };
        for (i, c) in self.coeffs.iter().chain(other.coeffs.iter()) {
            if *i >= out.lo {
                out.add_in_window(*i, c);
            }
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Powers >= 0, on the same window.
    pub fn plus_part(&self) -> Self {
        self.filter(|i| i >= 0)
    }

    /// Powers < 0, on the same window.
    pub fn minus_part(&self) -> Self {
        self.filter(|i| i < 0)
    }

    fn filter(&self, keep: impl Fn(i64) -> bool) -> Self {
        SymbolSeries {
            top: self.top,
            lo: self.lo,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(i, _)| keep(**i))
                .map(|(i, c)| (*i, c.clone()))
                .collect(),
        }
    }

    /// Raises the bottom of the window to `lo`, discarding the terms below it.
    pub fn truncate(&self, lo: i64) -> Self {
        let lo = lo.max(self.lo).min(self.top);
        let mut out = self.filter(|i| i >= lo);
        out.lo = lo;
        out
    }

    /// Lowers the bottom of the window to `lo`, declaring the new powers zero.
    /// Only valid for series that are exact (finite) down to `lo`.
    pub fn extend_exact(&self, lo: i64) -> Self {
        let mut out = self.clone();
        out.lo = out.lo.min(lo);
        out
    }

    /// Lowers the stored top power. Fails if a non-zero term would be lost.
    pub fn lower_top(&self, top: i64) -> Result<Self> {
        if let Some((i, _)) = self.coeffs.iter().next_back() {
            if *i > top {
                return Err(Error::InvalidArgument(format!(
                    "cannot lower the top to {top}: non-zero term at power {i}"
                )));
            }
        }
        let mut out = self.clone();
        out.top = top.min(out.top);
        out.lo = out.lo.min(out.top);
        Ok(out)
    }

    /// Raises the top power without changing the terms.
    pub fn raise_top(&self, top: i64) -> Self {
        let mut out = self.clone();
        out.top = out.top.max(top);
        out
    }

    /// Equality on every power known to both series.
    pub fn eq_mod_tail(&self, other: &Self) -> bool {
        let lo = self.lo.max(other.lo);
        let top = self.top.max(other.top);
        (lo..=top).all(|i| match (self.coeffs.get(&i), other.coeffs.get(&i)) {
            (None, None) => true,
            (Some(a), Some(b)) => a == b,
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
        })
    }

    /// Leading coefficient at `top` (possibly zero).
    pub fn leading(&self) -> C {
        self.coeff(self.top)
    }
}

/// The window `(top, lo)` of a product whose k-th correction lowers the power
/// by k: the output keeps every power that no unknown tail term can reach.
pub fn product_window<C: Coeff, D: Coeff>(a: &SymbolSeries<C>, b: &SymbolSeries<D>) -> (i64, i64) {
    let top = a.top + b.top;
    let lo = (a.lo + b.top).max(a.top + b.lo);
    (top, lo)
}

pub(crate) fn empty_window<C: Coeff>(top: i64, lo: i64) -> SymbolSeries<C> {
    SymbolSeries {
        top,
        lo,
        coeffs: BTreeMap::new(),
    }
}
