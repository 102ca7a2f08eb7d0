//! Coefficient rings for operator series.
//!
//! [`XLaurent`] holds exact Laurent polynomials in `x`, [`DPoly`] holds
//! differential polynomials in abstract generators and [`TimesPoly`] holds
//! polynomials in the KP times with Hirota derivatives.

mod dpoly;
mod parse;
mod times;
mod xlaurent;

pub use dpoly::{DPoly, FlowDerivation, Gen, Monomial};
pub use parse::{parse_terms, ParsedTerm};
pub use times::{jacobi_trudi_21, kp_hirota_residual, qtau_components, schur_p, TimesPoly};
pub use xlaurent::XLaurent;

use std::fmt::Debug;

use crate::exactnum::Rational;

/// A commutative coefficient ring carrying the derivation d/dx.
pub trait Coeff: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn constant(c: Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
    fn ddx(&self) -> Self;
    fn render(&self) -> String;

    fn one() -> Self {
        Self::constant(crate::exactnum::int(1))
    }

    fn neg(&self) -> Self {
        self.scale(&crate::exactnum::int(-1))
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// The k-th x-derivative.
    fn ddx_n(&self, k: u32) -> Self {
        let mut out = self.clone();
        for _ in 0..k {
            if out.is_zero() {
                break;
            }
            out = out.ddx();
        }
        out
    }
}

/// Coefficient types that can be read back from their canonical rendering.
pub trait ParseCoeff: Coeff {
    fn parse(text: &str) -> crate::Result<Self>;
}

pub(crate) fn render_term(c: &Rational, factors: &str, first: bool, out: &mut String) {
    use num_traits::{One, Signed};
    let neg = c.is_negative();
    let abs = c.abs();
    if first {
        if neg {
            out.push('-');
        }
    } else {
        out.push_str(if neg { " - " } else { " + " });
    }
    if factors.is_empty() {
        out.push_str(&crate::exactnum::render_rational(&abs));
    } else if abs.is_one() {
        out.push_str(factors);
    } else {
        out.push_str(&crate::exactnum::render_rational(&abs));
        out.push('*');
        out.push_str(factors);
    }
}
