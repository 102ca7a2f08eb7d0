//! q-deformed pseudodifferential operators in the Jackson derivative D_q.
//!
//! Coefficients are Laurent polynomials in x. The normal-ordering rule is
//! `D_q^n ∘ b = Σ_k [n k]_q τ^(n-k)(D_q^k b) D_q^(n-k)` for every integer n,
//! with τ f(x) = f(qx) and the bracket q-binomial of [`qbinom_bracket`].

use std::collections::{BTreeMap, HashMap};
use std::ops::Deref;

use num_traits::{One, Zero};

use crate::coeffring::{Coeff, XLaurent};
use crate::error::{Error, Result};
use crate::exactnum::{qbinom_bracket, qexp_coeffs, rpow, QValue, Rational};
use crate::series::{empty_window, product_window, SymbolSeries};

/// A truncated series in D_q with Laurent coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct QOperatorSeries {
    series: SymbolSeries<XLaurent>,
    q: QValue,
}

impl Deref for QOperatorSeries {
    type Target = SymbolSeries<XLaurent>;
    fn deref(&self) -> &SymbolSeries<XLaurent> {
        &self.series
    }
}

fn compose_q_series(a: &SymbolSeries<XLaurent>, b: &SymbolSeries<XLaurent>, q: &QValue) -> SymbolSeries<XLaurent> {
    let (top, lo) = product_window(a, b);
    let mut out = empty_window(top, lo);
    let mut dq_cache: HashMap<i64, Vec<XLaurent>> = HashMap::new();
    let mut binom_cache: HashMap<(i64, i64), Rational> = HashMap::new();
    for (i, ai) in a.terms() {
        for (j, bj) in b.terms() {
            let mut k: i64 = 0;
            loop {
                let p = i + j - k;
                if p < lo || (i >= 0 && k > i) {
                    break;
                }
                let derivs = dq_cache.entry(j).or_insert_with(|| vec![bj.clone()]);
                while derivs.len() as i64 <= k {
                    let next = derivs.last().unwrap().dq(q);
                    derivs.push(next);
                }
                let d = &derivs[k as usize];
                if d.is_zero() {
                    break;
                }
                let c = binom_cache
                    .entry((i, k))
                    .or_insert_with(|| qbinom_bracket(i, k as u32, q))
                    .clone();
                let term = ai.mul(&d.tau_scale(q, i - k)).scale(&c);
                out.add_in_window(p, &term);
                k += 1;
            }
        }
    }
    out
}

impl QOperatorSeries {
    pub fn new(series: SymbolSeries<XLaurent>, q: QValue) -> Self {
        QOperatorSeries { series, q }
    }

    pub fn from_terms<I: IntoIterator<Item = (i64, XLaurent)>>(
        top: i64,
        depth: u32,
        terms: I,
        q: QValue,
    ) -> Result<Self> {
        Ok(Self::new(SymbolSeries::from_terms(top, depth, terms)?, q))
    }

    /// D_q^n as a series of the given depth.
    pub fn dq_power(n: i64, depth: u32, q: QValue) -> Self {
        Self::new(SymbolSeries::monomial(XLaurent::one(), n, depth), q)
    }

    pub fn identity(depth: u32, q: QValue) -> Self {
        Self::dq_power(0, depth, q)
    }

    pub fn q(&self) -> &QValue {
        &self.q
    }

    pub fn series(&self) -> &SymbolSeries<XLaurent> {
        &self.series
    }

    fn same_q(&self, other: &Self) -> Result<()> {
        if self.q != other.q {
            return Err(Error::QMismatch {
                left: self.q.to_string(),
                right: other.q.to_string(),
            });
        }
        Ok(())
    }

    fn wrap(&self, series: SymbolSeries<XLaurent>) -> Self {
        QOperatorSeries {
            series,
            q: self.q.clone(),
        }
    }

    pub fn map_series(&self, f: impl FnOnce(&SymbolSeries<XLaurent>) -> SymbolSeries<XLaurent>) -> Self {
        self.wrap(f(&self.series))
    }

    pub fn compose_q(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        Ok(self.wrap(compose_q_series(&self.series, &other.series, &self.q)))
    }

    pub fn commutator_q(&self, other: &Self) -> Result<Self> {
        Ok(self.wrap(self.compose_q(other)?.series.sub(&other.compose_q(self)?.series)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        Ok(self.wrap(self.series.add(&other.series)))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.same_q(other)?;
        Ok(self.wrap(self.series.sub(&other.series)))
    }

    /// Formal adjoint P* = Σ (D_q*)^i a_i with D_q* = -(1/q) D_{1/q}. The
    /// result is normal-ordered in the mirrored algebra with parameter 1/q.
    pub fn adjoint_q(&self) -> QOperatorSeries {
        let inv = self.q.inverse();
        let minus_inv_q = -self.q.value().recip();
        let mut out = empty_window(self.top(), self.lo());
        for (i, a) in self.terms() {
            let depth = (i - self.lo() + 1) as u32;
            let expanded = q_leibniz_expand(i, a, &inv, depth);
            let c = rpow(&minus_inv_q, i);
            for (p, v) in expanded.terms() {
                out.add_in_window(p, &v.scale(&c));
            }
        }
        QOperatorSeries { series: out, q: inv }
    }

    /// P|_{x/t}: p_i(x) D^i -> p_i(x/t) t^i D^i.
    pub fn substitute_x_over(&self, t: &Rational) -> QOperatorSeries {
        let tinv = t.recip();
        self.map_series(|s| s.map_coeffs(|i, c| c.scale_arg(&tinv).scale(&rpow(t, i))))
    }

    /// Coefficient of D_q^-1.
    pub fn res_dq(&self) -> Result<XLaurent> {
        self.series.get(-1)
    }

    pub fn plus_part_q(&self) -> Self {
        self.wrap(self.series.plus_part())
    }

    pub fn minus_part_q(&self) -> Self {
        self.wrap(self.series.minus_part())
    }

    pub fn power_q(&self, n: u32) -> Result<Self> {
        if n == 0 {
            return Ok(Self::identity(self.depth(), self.q.clone()));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = acc.compose_q(self)?;
        }
        Ok(acc)
    }

    pub fn eq_mod_tail(&self, other: &Self) -> bool {
        self.q == other.q && self.series.eq_mod_tail(&other.series)
    }

    /// Applies the stored terms to f, with D_q^-1 realised as the monomial
    /// q-antiderivative.
    pub fn apply_to(&self, f: &XLaurent) -> Result<XLaurent> {
        let mut out = XLaurent::zero();
        for (i, a) in self.terms() {
            out = out.add(&a.mul(&dq_pow_apply(f, i, &self.q)?));
        }
        Ok(out)
    }
}

/// D_q^n f for any integer n, with negative powers via the q-antiderivative.
pub fn dq_pow_apply(f: &XLaurent, n: i64, q: &QValue) -> Result<XLaurent> {
    let mut g = f.clone();
    if n >= 0 {
        for _ in 0..n {
            g = g.dq(q);
        }
    } else {
        for _ in 0..(-n) {
            g = g.dq_inverse_monomial(q)?;
        }
    }
    Ok(g)
}

/// Normal-ordered D_q^n ∘ b, truncated to `depth` powers below and including n.
pub fn q_leibniz_expand(n: i64, b: &XLaurent, q: &QValue, depth: u32) -> QOperatorSeries {
    let mut s = SymbolSeries::zero(n, depth);
    let mut d = b.clone();
    for k in 0..depth as i64 {
        if d.is_zero() || (n >= 0 && k > n) {
            break;
        }
        let c = qbinom_bracket(n, k as u32, q);
        s.add_in_window(n - k, &d.tau_scale(q, n - k).scale(&c));
        d = d.dq(q);
    }
    QOperatorSeries::new(s, q.clone())
}

/// Bracket order for the q-KP flows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BracketOrder {
    /// [(L^j)_+, L]
    #[default]
    PlusFirst,
    /// [L, (L^j)_+]
    LaxFirst,
}

fn check_qlax(l: &QOperatorSeries) -> Result<()> {
    if l.top() != 1 || l.coeff(1) != XLaurent::one() {
        return Err(Error::InvalidArgument(
            "a q-Lax operator has top D_q with coefficient 1".into(),
        ));
    }
    Ok(())
}

/// [(L^j)_+, L] (or the opposite order), with the top lowered to D_q^0.
pub fn qkp_flow_rhs(l: &QOperatorSeries, j: u32, order: BracketOrder) -> Result<QOperatorSeries> {
    check_qlax(l)?;
    if j == 0 || j > 3 {
        return Err(Error::InvalidArgument(format!(
            "q-KP flow index must lie in 1..=3, got {j}"
        )));
    }
    let lj = l.power_q(j)?;
    if lj.lo() > 0 {
        return Err(Error::InvalidArgument(format!(
            "the Lax window is too shallow to form (L^{j})_+"
        )));
    }
    let b = lj.plus_part_q().map_series(|s| s.extend_exact(l.lo() - 2));
    let rhs = match order {
        BracketOrder::PlusFirst => b.commutator_q(l)?,
        BracketOrder::LaxFirst => l.commutator_q(&b)?,
    };
    let lowered = rhs.series.lower_top(0)?;
    Ok(rhs.wrap(lowered))
}

/// The dressing operator S = 1 + Σ w_k D_q^-k with L ∘ S = S ∘ D_q.
#[derive(Clone, Debug, PartialEq)]
pub struct QDressing {
    s: QOperatorSeries,
}

impl QDressing {
    pub fn from_series(s: QOperatorSeries) -> Result<Self> {
        if s.top() != 0 || s.coeff(0) != XLaurent::one() {
            return Err(Error::InvalidArgument(
                "a dressing operator has top D_q^0 with coefficient 1".into(),
            ));
        }
        Ok(QDressing { s })
    }

    pub fn series(&self) -> &QOperatorSeries {
        &self.s
    }

    /// w_k, the coefficient of D_q^-k.
    pub fn w(&self, k: i64) -> XLaurent {
        self.s.coeff(-k)
    }

    /// S^-1 by geometric inversion within the window.
    pub fn inverse(&self) -> Result<QOperatorSeries> {
        let n = self.s.minus_part_q();
        let id = QOperatorSeries::identity(self.s.depth(), self.s.q().clone());
        let mut acc = id.clone();
        let mut term = id;
        for _ in 0..self.s.depth() {
            term = term.compose_q(&n)?.map_series(|s| s.neg());
            acc = acc.add(&term)?;
        }
        Ok(acc)
    }

    /// L ∘ S - S ∘ D_q.
    pub fn residual(&self, l: &QOperatorSeries) -> Result<QOperatorSeries> {
        let dq = QOperatorSeries::dq_power(1, self.s.depth() + 2, self.s.q().clone());
        l.compose_q(&self.s)?.sub(&self.s.compose_q(&dq)?)
    }

    /// S D_q S^-1, the Lax operator dressed by S.
    pub fn dress(&self) -> Result<QOperatorSeries> {
        let dq = QOperatorSeries::dq_power(1, self.s.depth() + 1, self.s.q().clone());
        self.s.compose_q(&dq)?.compose_q(&self.inverse()?)
    }
}

/// Solves (τ - 1) w = r coefficientwise, with the constant term of w set to 0.
fn solve_tau_minus_one(r: &XLaurent, q: &QValue, step: usize) -> Result<XLaurent> {
    let c0 = r.coeff(0);
    if !c0.is_zero() {
        return Err(Error::Unsolvable {
            step,
            constant: crate::exactnum::render_rational(&c0),
        });
    }
    Ok(XLaurent::from_terms(
        r.terms().map(|(n, c)| (n, c / (q.pow(n) - Rational::one()))),
    ))
}

/// Solves L ∘ S = S ∘ D_q for w_1 .. w_depth.
pub fn dressing_solve(l: &QOperatorSeries, depth: u32) -> Result<QDressing> {
    check_qlax(l)?;
    if l.depth() < depth + 1 {
        return Err(Error::InvalidArgument(format!(
            "solving {depth} dressing steps needs a Lax window of depth {} (got {})",
            depth + 1,
            l.depth()
        )));
    }
    let q = l.q().clone();
    let mut s = SymbolSeries::zero(0, depth + 1);
    s.add_at(0, XLaurent::one())?;
    for m in 1..=depth as i64 {
        let cur = QDressing {
            s: QOperatorSeries::new(s.clone(), q.clone()),
        };
        let r = cur.residual(l)?.get(1 - m)?;
        let w = solve_tau_minus_one(&r.neg(), &q, m as usize)?;
        s.add_at(-m, w)?;
    }
    Ok(QDressing {
        s: QOperatorSeries::new(s, q),
    })
}

/// A bivariate series: z-power -> coefficient Laurent polynomial in x.
pub type ZSeries = BTreeMap<i64, XLaurent>;

fn zs_add_term(s: &mut ZSeries, z: i64, f: &XLaurent) {
    if f.is_zero() {
        return;
    }
    let next = s.get(&z).map_or_else(|| f.clone(), |old| old.add(f));
    if next.is_zero() {
        s.remove(&z);
    } else {
        s.insert(z, next);
    }
}

fn zs_mul(a: &ZSeries, b: &ZSeries) -> ZSeries {
    let mut out = ZSeries::new();
    for (i, f) in a {
        for (j, g) in b {
            zs_add_term(&mut out, i + j, &f.mul(g));
        }
    }
    out
}

/// D^i applied to the truncated q-exponential Σ_{n<=n_max} c_n (s x z)^n,
/// where D is the Jackson derivative for `q` and s = ±1. Negative powers use
/// the monomial antiderivative plus the homogeneous terms it cannot produce.
fn exp_derivative(i: i64, q: &QValue, sign: i64, n_max: usize) -> Result<ZSeries> {
    let c = qexp_coeffs(n_max + i.unsigned_abs() as usize, q);
    let s = Rational::from_integer(sign.into());
    let mut out = ZSeries::new();
    for (n, cn) in c.iter().enumerate().take(n_max + 1) {
        let n = n as i64;
        let base = XLaurent::monomial(cn * rpow(&s, n), n);
        zs_add_term(&mut out, n, &dq_pow_apply(&base, i, q)?);
    }
    if i < 0 {
        let k = -i;
        for (n, cn) in c.iter().enumerate().take(k as usize) {
            let n = n as i64;
            let coeff = cn * rpow(&s, n - k);
            zs_add_term(&mut out, n - k, &XLaurent::monomial(coeff, n));
        }
    }
    Ok(out)
}

/// Applies an operator series (in its own parameter) to the truncated
/// exponential exp(s x z). Returns the bivariate series and the largest
/// exponent n of (xz)^n that is still exact.
fn apply_to_exp(p: &QOperatorSeries, sign: i64, n_max: usize) -> Result<(ZSeries, i64)> {
    let mut out = ZSeries::new();
    for (i, a) in p.terms() {
        let e = exp_derivative(i, p.q(), sign, n_max)?;
        for (z, f) in e {
            zs_add_term(&mut out, z, &a.mul(&f));
        }
    }
    let exact = n_max as i64 - p.top().max(0);
    Ok((out, exact))
}

fn min_degree(p: &SymbolSeries<XLaurent>) -> i64 {
    p.terms().filter_map(|(_, c)| c.min_degree()).min().unwrap_or(0)
}

fn max_degree(p: &SymbolSeries<XLaurent>) -> i64 {
    p.terms().filter_map(|(_, c)| c.max_degree()).max().unwrap_or(0)
}

/// The three evaluations of the q-analogue of the residue lemma
/// res_z(P exp_q(xz) · Q*|_{x/q} exp_{1/q}(-xz)) = res_{D_q}(P Q).
#[derive(Clone, Debug, PartialEq)]
pub struct QDickeyReport {
    /// Σ_{i+j=-1} p_i(x) σ_j(x) (-1)^j with σ the symbol of Q*|_{x/q}.
    pub eigen: XLaurent,
    /// The truncated z-series evaluation, kept up to `safe_degree`.
    pub series: XLaurent,
    /// res_{D_q}(P ∘ Q).
    pub operator: XLaurent,
    /// Largest x-degree at which the series path is exact.
    pub safe_degree: i64,
}

impl QDickeyReport {
    pub fn agree(&self) -> bool {
        self.eigen == self.operator && self.eigen.truncate_above(self.safe_degree) == self.series
    }
}

/// A truncation order for the series path that covers every degree of the
/// exact answer.
pub fn q_dickey_recommended_order(p: &QOperatorSeries, q: &QOperatorSeries) -> usize {
    let qs = q.map_series(|s| s.extend_exact(-1 - p.top())).adjoint_q();
    let spread = max_degree(p) - min_degree(p) + max_degree(&qs) - min_degree(&qs);
    let reach = (-1 - p.lo() - qs.lo()).max(0);
    (spread + reach + p.top().max(0) + qs.top().max(0) + 2) as usize
}

pub fn q_dickey_sides(p: &QOperatorSeries, q: &QOperatorSeries, n: usize) -> Result<QDickeyReport> {
    p.same_q(q)?;
    let qv = p.q().clone();
    // read P and Q as finite operators: every power of Q* that can pair with P is kept
    let qe = q.map_series(|s| s.extend_exact(-1 - p.top()));
    let sigma = qe.adjoint_q().substitute_x_over(qv.value());

    let mut eigen = XLaurent::zero();
    for (i, pi) in p.terms() {
        for (j, sj) in sigma.terms() {
            if i + j == -1 {
                let t = pi.mul(sj);
                eigen = eigen.add(&if j.rem_euclid(2) == 1 { t.neg() } else { t });
            }
        }
    }

    let (left, exact_l) = apply_to_exp(p, 1, n)?;
    let (right, exact_r) = apply_to_exp(&sigma, -1, n)?;
    let safe_degree = min_degree(p) + min_degree(&sigma) + exact_l.min(exact_r);
    let series = zs_mul(&left, &right)
        .remove(&-1)
        .unwrap_or_default()
        .truncate_above(safe_degree);

    let pe = p.map_series(|s| s.extend_exact(-1 - q.top()));
    let operator = pe.compose_q(&qe)?.res_dq()?;
    Ok(QDickeyReport {
        eigen,
        series,
        operator,
        safe_degree,
    })
}

pub fn q_dickey_check(p: &QOperatorSeries, q: &QOperatorSeries, n: usize) -> Result<bool> {
    Ok(q_dickey_sides(p, q, n)?.agree())
}

/// res_z(D_q^n ∂^α w_q · w_q*) with the time derivatives acting on the
/// exponential time factor, evaluated on truncated z-series. Returns the
/// residue kept up to its safe x-degree, and that degree.
pub fn q_bilinear_residual(s: &QDressing, n: u32, alpha: &[u32], order: usize) -> Result<(XLaurent, i64)> {
    let q = s.series().q().clone();
    let weight: i64 = alpha.iter().enumerate().map(|(k, a)| (k as i64 + 1) * *a as i64).sum();
    let depth = s.series().depth();
    let left_op = QOperatorSeries::dq_power(n as i64, depth + n, q.clone())
        .compose_q(s.series())?
        .compose_q(&QOperatorSeries::dq_power(weight, depth + weight as u32, q.clone()))?;
    let sigma = s.inverse()?.adjoint_q().substitute_x_over(q.value());
    let (left, exact_l) = apply_to_exp(&left_op, 1, order)?;
    let (right, exact_r) = apply_to_exp(&sigma, -1, order)?;
    let floor = min_degree(&left_op).min(0) + min_degree(&sigma).min(0);
    // tail terms below either window need at least this many powers of xz
    let tail = (-left_op.lo() - sigma.top()).min(-left_op.top() - sigma.lo());
    let safe = floor + exact_l.min(exact_r).min(tail - 1);
    let res = zs_mul(&left, &right)
        .remove(&-1)
        .unwrap_or_default()
        .truncate_above(safe);
    Ok((res, safe))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::ParseCoeff;
    use crate::exactnum::{int, rat};

    fn xl(s: &str) -> XLaurent {
        XLaurent::parse(s).unwrap()
    }

    fn q32() -> QValue {
        QValue::from_ratio(3, 2).unwrap()
    }

    fn qop(top: i64, depth: u32, terms: &[(i64, &str)], q: &QValue) -> QOperatorSeries {
        QOperatorSeries::from_terms(top, depth, terms.iter().map(|(i, s)| (*i, xl(s))), q.clone()).unwrap()
    }

    #[test]
    fn leibniz_first_order() {
        let q = q32();
        let e = q_leibniz_expand(1, &xl("x"), &q, 3);
        assert_eq!(e, qop(1, 3, &[(1, "3/2*x"), (0, "1")], &q));
        let inv = q_leibniz_expand(-1, &xl("x^2"), &q, 1);
        assert_eq!(inv.coeff(-1), XLaurent::monomial(rat(4, 9), 2));
    }

    #[test]
    fn leibniz_second_order_pointwise() {
        let q = q32();
        let b = xl("x^2 - 3*x + 1/2");
        let e = q_leibniz_expand(2, &b, &q, 3);
        assert_eq!(e.coeff(2), b.tau_scale(&q, 2));
        assert_eq!(e.coeff(1), b.dq(&q).tau_scale(&q, 1).scale(&(int(1) + q.value())));
        assert_eq!(e.coeff(0), b.dq(&q).dq(&q));
        for s in 0..=4 {
            let f = XLaurent::monomial(int(1), s);
            assert_eq!(e.apply_to(&f).unwrap(), b.mul(&f).dq(&q).dq(&q));
        }
    }

    #[test]
    fn inverse_expansion_matches_closed_form() {
        let q = q32();
        let b = xl("x^3 + x");
        let e = q_leibniz_expand(-1, &b, &q, 4);
        let mut d = b.clone();
        for k in 0..4i64 {
            let c = rpow(&int(-1), k) * q.pow(-(k * (k + 1) / 2));
            assert_eq!(e.coeff(-1 - k), d.tau_scale(&q, -1 - k).scale(&c));
            d = d.dq(&q);
        }
    }

    #[test]
    fn composition_examples() {
        let q = q32();
        let d = QOperatorSeries::dq_power(1, 4, q.clone());
        let dinv = QOperatorSeries::dq_power(-1, 4, q.clone());
        assert!(d
            .compose_q(&dinv)
            .unwrap()
            .eq_mod_tail(&QOperatorSeries::identity(4, q.clone())));
        let a = qop(1, 3, &[(1, "x"), (-1, "x^2")], &q);
        assert!(a
            .compose_q(&QOperatorSeries::identity(5, q.clone()))
            .unwrap()
            .eq_mod_tail(&a));
        let xd = qop(1, 3, &[(1, "x")], &q);
        let sq = xd.compose_q(&xd).unwrap();
        let f = xl("x^2");
        assert_eq!(
            sq.apply_to(&f).unwrap(),
            xd.apply_to(&xd.apply_to(&f).unwrap()).unwrap()
        );
        let other = QOperatorSeries::dq_power(1, 4, QValue::from_ratio(2, 1).unwrap());
        assert!(matches!(d.compose_q(&other), Err(Error::QMismatch { .. })));
    }

    #[test]
    fn tau_relation() {
        let q = q32();
        for s in -3..=3 {
            let f = XLaurent::monomial(int(1), s);
            assert_eq!(f.tau_scale(&q, 1).dq(&q), f.dq(&q).tau_scale(&q, 1).scale(q.value()));
        }
    }

    #[test]
    fn adjoint_examples() {
        let q = q32();
        let d = QOperatorSeries::dq_power(1, 3, q.clone());
        let adj = d.adjoint_q();
        assert_eq!(adj.q(), &q.inverse());
        assert_eq!(adj.coeff(1), XLaurent::monomial(rat(-2, 3), 0));
        let a = qop(0, 3, &[(0, "x^2 - 1")], &q);
        assert_eq!(a.adjoint_q().coeff(0), xl("x^2 - 1"));
    }

    #[test]
    fn residues() {
        let q = q32();
        assert_eq!(QOperatorSeries::dq_power(-1, 2, q.clone()).res_dq().unwrap(), xl("1"));
        let u = xl("x^2 + 2");
        let a = QOperatorSeries::dq_power(1, 4, q.clone());
        let b = qop(-2, 4, &[(-2, "x^2 + 2")], &q);
        let r = a.compose_q(&b).unwrap().res_dq().unwrap();
        // D_q ∘ u D^-2 = τ(u) D^-1 + (D_q u) D^-2
        assert_eq!(r, u.tau_scale(&q, 1));
    }

    #[test]
    fn qkp_flows() {
        let q = q32();
        let bare = qop(1, 5, &[(1, "1")], &q);
        assert!(qkp_flow_rhs(&bare, 1, BracketOrder::PlusFirst).unwrap().is_zero());
        let l = qop(1, 6, &[(1, "1"), (0, "x"), (-1, "x^2"), (-2, "1")], &q);
        for j in 1..=3 {
            let r = qkp_flow_rhs(&l, j, BracketOrder::PlusFirst).unwrap();
            assert!(r.top() <= 0);
            let o = qkp_flow_rhs(&l, j, BracketOrder::LaxFirst).unwrap();
            assert!(r.add(&o).unwrap().is_zero());
        }
    }

    #[test]
    fn dressing_hand_step() {
        // with a_0 = x the first step gives (τ - 1) w_1 = -x, so w_1 = -x/(q - 1)
        let q = q32();
        let l = qop(1, 3, &[(1, "1"), (0, "x")], &q);
        let s = dressing_solve(&l, 1).unwrap();
        assert_eq!(s.w(1), XLaurent::monomial(rat(-2, 1), 1));
        let bare = qop(1, 4, &[(1, "1")], &q);
        let s1 = dressing_solve(&bare, 3).unwrap();
        assert!(s1.series().minus_part_q().is_zero());
        let bad = qop(1, 3, &[(1, "1"), (0, "1")], &q);
        assert!(matches!(dressing_solve(&bad, 1), Err(Error::Unsolvable { .. })));
    }

    #[test]
    fn dickey_examples() {
        let q = q32();
        let one = QOperatorSeries::identity(1, q.clone());
        let r = q_dickey_sides(&one, &one, 6).unwrap();
        assert!(r.agree());
        assert!(r.operator.is_zero());
        let inv = QOperatorSeries::dq_power(-1, 1, q.clone());
        let r = q_dickey_sides(&inv, &one, 6).unwrap();
        assert!(r.agree());
        assert_eq!(r.operator, xl("1"));
        assert_eq!(r.series, xl("1"));
        let p = qop(2, 4, &[(2, "x"), (1, "x^2 + 1"), (-1, "3")], &q);
        let qq = qop(1, 4, &[(1, "2*x"), (0, "1"), (-1, "x^2"), (-2, "1/2")], &q);
        let n = q_dickey_recommended_order(&p, &qq);
        let r = q_dickey_sides(&p, &qq, n).unwrap();
        assert!(r.agree(), "{r:?}");
        assert_eq!(r.series, r.eigen);
    }

    #[test]
    fn bilinear_residual_trivial_dressing() {
        let q = q32();
        let s = QDressing::from_series(QOperatorSeries::identity(3, q.clone())).unwrap();
        assert!(q_bilinear_residual(&s, 0, &[0, 0, 0], 8).unwrap().0.is_zero());
        assert!(q_bilinear_residual(&s, 1, &[0, 0, 0], 8).unwrap().0.is_zero());
    }

    #[test]
    fn exp_eigenrelation() {
        let q = q32();
        let n = 10;
        let base = exp_derivative(0, &q, 1, n).unwrap();
        for k in -2..=3i64 {
            let got = exp_derivative(k, &q, 1, n).unwrap();
            // z^k exp_q(xz), compared where both are exact
            for (z, f) in &base {
                let lhs = got.get(&(z + k)).cloned().unwrap_or_default();
                if *z <= n as i64 - k.max(0) {
                    assert_eq!(&lhs, f, "k={k} z={z}");
                }
            }
        }
    }
}
