//! Classical pseudodifferential symbols with the κ-weighted Leibniz product.
//!
//! The symbol ξ stands for the derivative; composition follows
//! `A ∘ B = Σ_k κ^k/k! ∂_ξ^k A ∂_x^k B`, which for a single pair of terms is
//! `a ξ^i ∘ b ξ^j = Σ_k κ^k C(i,k) a b^(k) ξ^(i+j-k)`.

use std::collections::HashMap;
use std::ops::Deref;

use num_traits::{One, Zero};

use crate::coeffring::{Coeff, DPoly, FlowDerivation, XLaurent};
use crate::error::{Error, Result};
use crate::exactnum::{binom_generalized, render_rational, rpow, Rational};
use crate::series::{empty_window, product_window, SymbolSeries};

/// Caches successive x-derivatives of the coefficients of one series.
pub(crate) struct DerivCache<'a, C> {
    series: &'a SymbolSeries<C>,
    table: HashMap<i64, Vec<C>>,
}

impl<'a, C: Coeff> DerivCache<'a, C> {
    pub(crate) fn new(series: &'a SymbolSeries<C>) -> Self {
        DerivCache {
            series,
            table: HashMap::new(),
        }
    }

    pub(crate) fn get(&mut self, power: i64, k: usize) -> &C {
        let series = self.series;
        let v = self.table.entry(power).or_insert_with(|| vec![series.coeff(power)]);
        while v.len() <= k {
            let next = v.last().unwrap().ddx();
            v.push(next);
        }
        &v[k]
    }
}

/// The κ-weighted symbol product on raw series.
pub fn compose_series<C: Coeff>(a: &SymbolSeries<C>, b: &SymbolSeries<C>, kappa: &Rational) -> SymbolSeries<C> {
    let (top, lo) = product_window(a, b);
    let mut out = empty_window(top, lo);
    let mut db = DerivCache::new(b);
    let max_k = (top - lo).max(0) as usize;
    let kpow: Vec<Rational> = (0..=max_k).map(|k| rpow(kappa, k as i64)).collect();
    for (i, ai) in a.terms() {
        for (j, _) in b.terms() {
            for (k, kp) in kpow.iter().enumerate() {
                let p = i + j - k as i64;
                if p < lo || (i >= 0 && k as i64 > i) {
                    break;
                }
                let c = binom_generalized(i, k as u32) * kp;
                if c.is_zero() {
                    continue;
                }
                let d = db.get(j, k);
                if d.is_zero() {
                    break;
                }
                out.add_in_window(p, &ai.mul(d).scale(&c));
            }
        }
    }
    out
}

/// A truncated symbol series together with its composition weight κ.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSeries<C> {
    series: SymbolSeries<C>,
    kappa: Rational,
}

impl<C> Deref for OperatorSeries<C> {
    type Target = SymbolSeries<C>;
    fn deref(&self) -> &SymbolSeries<C> {
        &self.series
    }
}

impl<C: Coeff> OperatorSeries<C> {
    pub fn new(series: SymbolSeries<C>, kappa: Rational) -> Self {
        OperatorSeries { series, kappa }
    }

    /// A series with the classical weight κ = 1.
    pub fn classical(series: SymbolSeries<C>) -> Self {
        Self::new(series, Rational::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, C)>>(
        top: i64,
        depth: u32,
        terms: I,
        kappa: Rational,
    ) -> Result<Self> {
        Ok(Self::new(SymbolSeries::from_terms(top, depth, terms)?, kappa))
    }

    pub fn series(&self) -> &SymbolSeries<C> {
        &self.series
    }

    pub fn into_series(self) -> SymbolSeries<C> {
        self.series
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    fn same_kappa(&self, other: &Self) -> Result<()> {
        if self.kappa != other.kappa {
            return Err(Error::KappaMismatch {
                left: render_rational(&self.kappa),
                right: render_rational(&other.kappa),
            });
        }
        Ok(())
    }

    fn wrap(&self, series: SymbolSeries<C>) -> Self {
        OperatorSeries {
            series,
            kappa: self.kappa.clone(),
        }
    }

    pub fn map_series(&self, f: impl FnOnce(&SymbolSeries<C>) -> SymbolSeries<C>) -> Self {
        self.wrap(f(&self.series))
    }

    pub fn compose(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        Ok(self.wrap(compose_series(&self.series, &other.series, &self.kappa)))
    }

    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.wrap(self.compose(other)?.series.sub(&other.compose(self)?.series)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        Ok(self.wrap(self.series.add(&other.series)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        Ok(self.wrap(self.series.sub(&other.series)))
    }

    /// Formal adjoint with x* = x and ξ* = -ξ, normal-ordered back to
    /// coefficients on the left: (a ξ^i)* = (-1)^i Σ_k κ^k C(i,k) a^(k) ξ^(i-k).
    pub fn adjoint(&self) -> Self {
        let s = &self.series;
        let mut out = empty_window(s.top(), s.lo());
        for (i, a) in s.terms() {
            let sign = if i.rem_euclid(2) == 1 {
                -Rational::one()
            } else {
                Rational::one()
            };
            let mut d = a.clone();
            let mut k: i64 = 0;
            while i - k >= s.lo() && !(i >= 0 && k > i) {
                let c = &sign * binom_generalized(i, k as u32) * rpow(&self.kappa, k);
                out.add_in_window(i - k, &d.scale(&c));
                d = d.ddx();
                if d.is_zero() {
                    break;
                }
                k += 1;
            }
        }
        self.wrap(out)
    }

    /// Coefficient of ξ^-1.
    pub fn res_partial(&self) -> Result<C> {
        self.series.get(-1)
    }

    pub fn plus_part(&self) -> Self {
        self.wrap(self.series.plus_part())
    }

    pub fn minus_part(&self) -> Self {
        self.wrap(self.series.minus_part())
    }

    /// Repeated composition; `power(0)` is the identity with the same depth.
    pub fn power(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Ok(self.wrap(SymbolSeries::identity(self.depth())));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    pub fn eq_mod_tail(&self, other: &Self) -> bool {
        self.kappa == other.kappa && self.series.eq_mod_tail(&other.series)
    }
}

/// The KP Lax operator L = ξ + Σ_{n>=1} u_{n+1} ξ^-n with generic coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxKP {
    op: OperatorSeries<DPoly>,
}

impl LaxKP {
    /// The generic Lax operator on a window of `depth` powers below and
    /// including ξ^1, so it carries u_2 .. u_depth-1.
    pub fn generic(depth: u32) -> Self {
        assert!(depth >= 3, "a Lax window needs at least ξ, ξ^0 and ξ^-1");
        let mut s = SymbolSeries::zero(1, depth);
        s.add_at(1, DPoly::one()).unwrap();
        for n in 1..=(depth as i64 - 2) {
            s.add_at(-n, DPoly::gen(n as u32 + 1, 0)).unwrap();
        }
        LaxKP {
            op: OperatorSeries::classical(s),
        }
    }

    /// A generic Lax operator deep enough to check `depth` coefficients of
    /// the commutator of the m-th and n-th flows.
    pub fn for_commutativity(m: u32, n: u32, depth: u32) -> Self {
        Self::generic(depth + m + n + 1)
    }

    /// Wraps a series of the right shape: top 1, leading 1, no ξ^0 term.
    pub fn from_series(op: OperatorSeries<DPoly>) -> Result<Self> {
        if op.top() != 1 || op.coeff(1) != DPoly::one() || !op.coeff(0).is_zero() {
            return Err(Error::InvalidArgument(
                "a Lax operator has top ξ^1 with coefficient 1 and no ξ^0 term".into(),
            ));
        }
        Ok(LaxKP { op })
    }

    pub fn op(&self) -> &OperatorSeries<DPoly> {
        &self.op
    }
}

/// Max flow index accepted by [`kp_flow_rhs`].
pub const MAX_FLOW: u32 = 4;

/// [(L^n)_+, L], with top power lowered to ξ^-1.
pub fn kp_flow_rhs(lax: &LaxKP, n: u32) -> Result<OperatorSeries<DPoly>> {
    if n == 0 || n > MAX_FLOW {
        return Err(Error::InvalidArgument(format!(
            "flow index must lie in 1..={MAX_FLOW}, got {n}"
        )));
    }
    let l = &lax.op;
    let ln = l.power(n)?;
    if ln.lo() > 0 {
        return Err(Error::InvalidArgument(format!(
            "the Lax window is too shallow to form (L^{n})_+"
        )));
    }
    let b = ln.plus_part().map_series(|s| s.extend_exact(l.lo() - 2));
    let rhs = b.commutator(l)?;
    let lowered = rhs.series.lower_top(-1)?;
    Ok(rhs.wrap(lowered))
}

/// The time derivation ∂_n on generators read off from a flow right-hand side:
/// ∂_n u_{k+1} is the coefficient of ξ^-k.
pub fn flow_derivation(rhs: &OperatorSeries<DPoly>) -> FlowDerivation {
    let table = (1..=-rhs.lo()).map(|k| (k as u32 + 1, rhs.coeff(-k))).collect();
    FlowDerivation::new(table)
}

/// Checks ∂_m(∂_n L) = ∂_n(∂_m L) on the coefficients ξ^-1 .. ξ^-depth.
pub fn flow_commutativity_check(lax: &LaxKP, m: u32, n: u32, depth: u32) -> Result<bool> {
    let fm = kp_flow_rhs(lax, m)?;
    let fn_ = kp_flow_rhs(lax, n)?;
    let mut dm = flow_derivation(&fm);
    let mut dn = flow_derivation(&fn_);
    for k in 1..=depth as i64 {
        let lhs = dm.apply(&fn_.get(-k)?)?;
        let rhs = dn.apply(&fm.get(-k)?)?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Both sides of the classical residue lemma
/// res_λ P(x,λ) Q(x,-λ) = res_ξ (P ∘ Q*), for P and Q read as finite operators.
pub fn dickey_sides(p: &OperatorSeries<XLaurent>, q: &OperatorSeries<XLaurent>) -> Result<(XLaurent, XLaurent)> {
    if !p.kappa().is_one() || !q.kappa().is_one() {
        return Err(Error::InvalidArgument(
            "the residue lemma is stated for weight κ = 1".into(),
        ));
    }
    let mut lhs = XLaurent::zero();
    for (i, pi) in p.terms() {
        for (j, qj) in q.terms() {
            if i + j == -1 {
                let t = pi.mul(qj);
                lhs = lhs.add(&if j.rem_euclid(2) == 1 { t.neg() } else { t });
            }
        }
    }
    let pe = p.map_series(|s| s.extend_exact(-1 - q.top()));
    let qe = q.map_series(|s| s.extend_exact(-1 - p.top()));
    let rhs = pe.compose(&qe.adjoint())?.res_partial()?;
    Ok((lhs, rhs))
}

pub fn dickey_lemma_check(p: &OperatorSeries<XLaurent>, q: &OperatorSeries<XLaurent>) -> Result<bool> {
    let (lhs, rhs) = dickey_sides(p, q)?;
    Ok(lhs == rhs)
}

/// ξ as a series of the given depth.
pub fn xi<C: Coeff>(depth: u32, kappa: Rational) -> OperatorSeries<C> {
    OperatorSeries::new(SymbolSeries::monomial(C::one(), 1, depth), kappa)
}

/// A coefficient as a multiplication operator of the given depth.
pub fn mult<C: Coeff>(c: C, depth: u32, kappa: Rational) -> OperatorSeries<C> {
    OperatorSeries::new(SymbolSeries::monomial(c, 0, depth), kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::ParseCoeff;
    use crate::exactnum::{int, rat};

    fn xl(s: &str) -> XLaurent {
        XLaurent::parse(s).unwrap()
    }

    fn dp(s: &str) -> DPoly {
        DPoly::parse(s).unwrap()
    }

    fn op(top: i64, depth: u32, terms: &[(i64, &str)], kappa: Rational) -> OperatorSeries<XLaurent> {
        OperatorSeries::from_terms(top, depth, terms.iter().map(|(i, s)| (*i, xl(s))), kappa).unwrap()
    }

    #[test]
    fn leibniz_basics() {
        for kappa in [int(1), rat(1, 2)] {
            let xi = op(1, 3, &[(1, "1")], kappa.clone());
            let x = op(0, 3, &[(0, "x")], kappa.clone());
            let kx = kappa.clone();
            let got = xi.compose(&x).unwrap();
            assert!(got.eq_mod_tail(&op(1, 3, &[(1, "x"), (0, &render_rational(&kx))], kappa.clone())));
            assert!(x
                .compose(&xi)
                .unwrap()
                .eq_mod_tail(&op(1, 3, &[(1, "x")], kappa.clone())));
        }
    }

    #[test]
    fn commutators() {
        let xi = op(1, 4, &[(1, "1")], int(1));
        let x = op(0, 4, &[(0, "x")], int(1));
        assert!(xi.commutator(&x).unwrap().eq_mod_tail(&op(1, 4, &[(0, "1")], int(1))));
        let xi2 = op(2, 4, &[(2, "1")], int(1));
        assert!(xi2.commutator(&x).unwrap().eq_mod_tail(&op(2, 4, &[(1, "2")], int(1))));
        assert!(xi.commutator(&xi).unwrap().is_zero());
        let half = op(0, 4, &[(0, "x")], rat(1, 2));
        assert!(matches!(xi.compose(&half), Err(Error::KappaMismatch { .. })));
    }

    #[test]
    fn inverse_derivative_expansion() {
        // ξ^-1 ∘ u = u ξ^-1 - u' ξ^-2 + u'' ξ^-3 - ...
        let depth = 6;
        let inv = OperatorSeries::<DPoly>::from_terms(-1, depth, [(-1, DPoly::one())], int(1)).unwrap();
        let u = mult(dp("u2"), depth, int(1));
        let got = inv.compose(&u).unwrap();
        let mut expect = SymbolSeries::zero(-1, depth);
        for k in 0..depth as i64 {
            let c = dp("u2").ddx_n(k as u32);
            expect.add_at(-1 - k, if k % 2 == 1 { c.neg() } else { c }).unwrap();
        }
        assert!(got.series().eq_mod_tail(&expect));
        let back = xi::<DPoly>(depth + 1, int(1)).compose(&got).unwrap();
        assert!(back.eq_mod_tail(&mult(dp("u2"), 1, int(1))));
    }

    #[test]
    fn adjoint_examples() {
        let xi = op(1, 3, &[(1, "1")], int(1));
        assert_eq!(xi.adjoint(), op(1, 3, &[(1, "-1")], int(1)));
        let u = op(0, 3, &[(0, "x^2 + 1")], int(1));
        assert_eq!(u.adjoint(), u);
        let a = op(1, 5, &[(1, "x^2"), (-1, "x"), (-2, "3*x^3")], rat(1, 2));
        assert!(a.adjoint().adjoint().eq_mod_tail(&a));
    }

    #[test]
    fn residue_and_power() {
        let inv = op(-1, 2, &[(-1, "1")], int(1));
        assert_eq!(inv.res_partial().unwrap(), xl("1"));
        assert!(op(2, 2, &[(2, "1")], int(1)).res_partial().is_err());
        let a = op(1, 4, &[(1, "1"), (-1, "x")], int(1));
        assert_eq!(a.power(0).unwrap(), op(0, 4, &[(0, "1")], int(1)));
        assert_eq!(a.power(1).unwrap(), a);
        let l = OperatorSeries::from_terms(1, 4, [(1, dp("1")), (-1, dp("u2")), (-2, dp("u3"))], int(1)).unwrap();
        let l2 = l.power(2).unwrap();
        // ξ∘u2ξ^-1 gives u2' and the two cross terms with u3 give 2 u3
        assert_eq!(l2.res_partial().unwrap(), dp("2*u3 + u2_x1"));
        assert_eq!(l2.get(0).unwrap(), dp("2*u2"));
    }

    #[test]
    fn flows() {
        let lax = LaxKP::generic(7);
        let f1 = kp_flow_rhs(&lax, 1).unwrap();
        for k in 1..=(-f1.lo()) {
            assert_eq!(f1.coeff(-k), DPoly::gen(k as u32 + 1, 1));
        }
        for n in 1..=3 {
            assert!(kp_flow_rhs(&lax, n).unwrap().top() <= -1);
        }
        let f2 = kp_flow_rhs(&lax, 2).unwrap();
        // ∂_2 u_2 = u_2'' + 2 u_3'
        assert_eq!(f2.coeff(-1), dp("u2_x2 + 2*u3_x1"));
        assert!(kp_flow_rhs(&lax, 5).is_err());
    }

    #[test]
    fn commuting_flows() {
        for (m, n) in [(1, 2), (1, 3), (2, 2), (2, 3)] {
            let lax = LaxKP::for_commutativity(m, n, 3);
            assert!(flow_commutativity_check(&lax, m, n, 3).unwrap(), "({m},{n})");
        }
        let shallow = LaxKP::generic(5);
        assert!(flow_commutativity_check(&shallow, 2, 3, 3).is_err());
    }

    #[test]
    fn dickey_examples() {
        let one = op(0, 1, &[(0, "1")], int(1));
        assert_eq!(dickey_sides(&one, &one).unwrap(), (xl("0"), xl("0")));
        let inv = op(-1, 1, &[(-1, "1")], int(1));
        assert_eq!(dickey_sides(&inv, &one).unwrap(), (xl("1"), xl("1")));
        let p = op(2, 5, &[(2, "x"), (1, "x^2 + 1"), (-1, "3"), (-2, "x")], int(1));
        let q = op(1, 4, &[(1, "2*x"), (0, "1"), (-1, "x^2"), (-2, "1/2")], int(1));
        assert!(dickey_lemma_check(&p, &q).unwrap());
    }
}
