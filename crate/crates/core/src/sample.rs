//! Seeded generators for random test operands.
//!
//! Every generator draws from a ChaCha8 stream keyed by a seed and a stream
//! name, so one seed reproduces every suite independently of run order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeffring::{Coeff, XLaurent};
use crate::exactnum::{QValue, Rational};
use crate::psdo::OperatorSeries;
use crate::qpsdo::QOperatorSeries;
use crate::series::SymbolSeries;
use crate::starcalc::{PhaseSymbol, TorusElement};

pub struct Sampler {
    rng: ChaCha8Rng,
}

/// FNV-1a, used only to turn a stream name into a seed offset.
fn stream_key(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0100_0000_01b3)
    })
}

impl Sampler {
    pub fn new(seed: u64, stream: &str) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed ^ stream_key(stream)),
        }
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.gen_range(lo..=hi)
    }

    /// A non-zero rational with numerator in ±1..=5 and denominator in 1..=3.
    pub fn rational(&mut self) -> Rational {
        let n = self.int(1, 5) * if self.rng.gen_bool(0.5) { 1 } else { -1 };
        Rational::new(n.into(), self.int(1, 3).into())
    }

    /// A Laurent polynomial with up to `terms` monomials of degree in `lo..=hi`.
    pub fn laurent(&mut self, lo: i64, hi: i64, terms: usize) -> XLaurent {
        let mut out = XLaurent::zero();
        for _ in 0..self.int(1, terms as i64) {
            let e = self.int(lo, hi);
            out.add_term(e, self.rational());
        }
        out
    }

    /// A polynomial of degree at most `deg`.
    pub fn polynomial(&mut self, deg: i64) -> XLaurent {
        self.laurent(0, deg, 3)
    }

    fn series(&mut self, top: i64, depth: u32, deg: i64) -> SymbolSeries<XLaurent> {
        let mut s = SymbolSeries::zero(top, depth);
        s.add_at(top, self.polynomial(deg)).expect("top of the window");
        for i in (s.lo()..top).rev() {
            if self.rng.gen_bool(0.6) {
                s.add_at(i, self.polynomial(deg)).expect("inside the window");
            }
        }
        s
    }

    /// A classical operator of order `top` with polynomial coefficients.
    pub fn operator(&mut self, top: i64, depth: u32, deg: i64, kappa: &Rational) -> OperatorSeries<XLaurent> {
        OperatorSeries::new(self.series(top, depth, deg), kappa.clone())
    }

    /// A q-operator of order `top` with polynomial coefficients.
    pub fn qoperator(&mut self, top: i64, depth: u32, deg: i64, q: &QValue) -> QOperatorSeries {
        QOperatorSeries::new(self.series(top, depth, deg), q.clone())
    }

    /// A polynomial in x and p of total degree in each variable at most `deg`.
    pub fn phase_polynomial(&mut self, deg: i64) -> PhaseSymbol {
        let mut out = PhaseSymbol::zero();
        for _ in 0..self.int(1, 4) {
            let (m, n) = (self.int(0, deg), self.int(0, deg));
            out.add_term(m, n, self.rational());
        }
        out
    }

    /// A single monomial with exponents in `-range..=range`.
    pub fn phase_monomial(&mut self, range: i64) -> PhaseSymbol {
        let (m, n) = (self.int(-range, range), self.int(-range, range));
        PhaseSymbol::monomial(self.rational(), m, n)
    }

    pub fn torus_monomial(&mut self, range: i64) -> TorusElement {
        let (m, n) = (self.int(-range, range), self.int(-range, range));
        TorusElement::monomial(self.rational(), m, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<i64> = {
            let mut s = Sampler::new(7, "dickey");
            (0..20).map(|_| s.int(-9, 9)).collect()
        };
        let b: Vec<i64> = {
            let mut s = Sampler::new(7, "dickey");
            (0..20).map(|_| s.int(-9, 9)).collect()
        };
        let c: Vec<i64> = {
            let mut s = Sampler::new(7, "adjoint");
            (0..20).map(|_| s.int(-9, 9)).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn operator_shape() {
        let mut s = Sampler::new(1, "shape");
        let k = Rational::from_integer(1.into());
        for _ in 0..10 {
            let p = s.operator(2, 5, 3, &k);
            assert_eq!((p.top(), p.lo()), (2, -2));
            assert!(!p.coeff(2).is_zero());
            assert!(p
                .terms()
                .all(|(_, c)| c.max_degree().unwrap() <= 3 && c.min_degree().unwrap() >= 0));
        }
    }
}
