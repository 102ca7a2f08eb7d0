//! The Sato and Moyal forms of the KP hierarchy and the coefficient map between them.
//!
//! Both sides use the same generators: the Sato operator is
//! `L = ∂ + Σ_n v_n ∂^(-n-1)` with `v_n = u{n+2}`, matching [`LaxKP`], and the
//! Moyal symbol is `Λ = λ + Σ_n u_n λ^(-n-1)` with coefficients in the same ring.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::coeffring::{Coeff, DPoly, FlowDerivation, XLaurent};
use crate::error::{Error, Result};
use crate::exactnum::{binom_generalized, int, rat, QValue, Rational};
use crate::psdo::{flow_derivation, kp_flow_rhs, LaxKP, OperatorSeries};
use crate::qpsdo::{qkp_flow_rhs, BracketOrder, QOperatorSeries};
use crate::series::SymbolSeries;
use crate::starcalc::{moyal_bracket_series, moyal_star_series, poisson_dkp, qplane_star, PhaseSymbol};

/// Largest flow index for the Moyal and dispersionless flows.
pub const MAX_MOYAL_FLOW: u32 = 3;

/// Coefficients `v_0, v_1, ...` of `L = ∂ + Σ v_n ∂^(-n-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SatoCoeffs {
    pub v: Vec<DPoly>,
}

/// Coefficients `u_0, u_1, ...` of `Λ = λ + Σ u_n λ^(-n-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MoyalCoeffs {
    pub u: Vec<DPoly>,
}

impl SatoCoeffs {
    /// `v_n = u{n+2}` for n < count.
    pub fn generic(count: usize) -> Self {
        SatoCoeffs {
            v: (0..count).map(|n| DPoly::gen(n as u32 + 2, 0)).collect(),
        }
    }

    pub fn lax(&self) -> Result<LaxKP> {
        LaxKP::from_series(OperatorSeries::classical(lambda_series(&self.v)?))
    }
}

impl MoyalCoeffs {
    /// `u_n = u{n+2}` for n < count.
    pub fn generic(count: usize) -> Self {
        MoyalCoeffs {
            u: (0..count).map(|n| DPoly::gen(n as u32 + 2, 0)).collect(),
        }
    }

    /// Λ as a series in λ whose window ends at λ^(-count).
    pub fn symbol(&self) -> Result<SymbolSeries<DPoly>> {
        lambda_series(&self.u)
    }
}

/// `λ + Σ c_n λ^(-n-1)` on the window `[-len, 1]`.
fn lambda_series(c: &[DPoly]) -> Result<SymbolSeries<DPoly>> {
    let mut s = SymbolSeries::zero(1, c.len() as u32 + 2);
    s.add_at(1, DPoly::one())?;
    for (n, v) in c.iter().enumerate() {
        s.add_at(-(n as i64) - 1, v.clone())?;
    }
    Ok(s)
}

/// `u_n = Σ_j 2^-j C(n,j) ∂_x^j v_(n-j)`.
pub fn sato_to_moyal(v: &SatoCoeffs) -> MoyalCoeffs {
    let u = (0..v.v.len())
        .map(|n| {
            let mut acc = DPoly::zero();
            for j in 0..=n {
                let c = binom_generalized(n as i64, j as u32) * rat(1, 1 << j);
                acc = acc.add(&v.v[n - j].ddx_n(j as u32).scale(&c));
            }
            acc
        })
        .collect();
    MoyalCoeffs { u }
}

/// Inverse of [`sato_to_moyal`] by forward substitution on the unit diagonal.
pub fn moyal_to_sato(u: &MoyalCoeffs) -> SatoCoeffs {
    let mut v: Vec<DPoly> = Vec::with_capacity(u.u.len());
    for n in 0..u.u.len() {
        let mut acc = u.u[n].clone();
        for j in 1..=n {
            let c = binom_generalized(n as i64, j as u32) * rat(1, 1 << j);
            acc = acc.sub(&v[n - j].ddx_n(j as u32).scale(&c));
        }
        v.push(acc);
    }
    SatoCoeffs { v }
}

fn check_flow(m: u32) -> Result<()> {
    if m == 0 || m > MAX_MOYAL_FLOW {
        return Err(Error::InvalidArgument(format!(
            "flow index must lie in 1..={MAX_MOYAL_FLOW}, got {m}"
        )));
    }
    Ok(())
}

/// `(Λ^{*m})_+`, extended as an exact polynomial in λ.
fn moyal_plus_power(lambda: &SymbolSeries<DPoly>, m: u32, kappa: &Rational) -> Result<SymbolSeries<DPoly>> {
    let mut acc = lambda.clone();
    for _ in 1..m {
        acc = moyal_star_series(&acc, lambda, kappa);
    }
    if acc.lo() > 0 {
        return Err(Error::InvalidArgument(format!(
            "the Λ window is too shallow to form (Λ^{m})_+"
        )));
    }
    Ok(acc.plus_part().extend_exact(lambda.lo() - 2))
}

/// `{(Λ^{*m})_+, Λ}_κ` with the top lowered to λ^-1.
pub fn moyal_kp_flow_rhs(lambda: &SymbolSeries<DPoly>, m: u32, kappa: &Rational) -> Result<SymbolSeries<DPoly>> {
    check_flow(m)?;
    let b = moyal_plus_power(lambda, m, kappa)?;
    moyal_bracket_series(&b, lambda, kappa).lower_top(-1)
}

/// The commutative product of two λ-series.
fn pointwise_series<C: Coeff>(f: &SymbolSeries<C>, g: &SymbolSeries<C>) -> SymbolSeries<C> {
    let top = f.top() + g.top();
    let lo = (f.lo() + g.top()).max(f.top() + g.lo());
    let mut out = SymbolSeries::zero(top, (top - lo + 1) as u32);
    for (i, a) in f.terms() {
        for (k, b) in g.terms() {
            if i + k >= lo {
                out.add_at(i + k, a.mul(b)).expect("inside the product window");
            }
        }
    }
    out
}

fn dlambda<C: Coeff>(f: &SymbolSeries<C>) -> SymbolSeries<C> {
    let mut out = SymbolSeries::zero(f.top() - 1, f.depth());
    for (i, c) in f.terms() {
        if i != 0 {
            out.add_at(i - 1, c.scale(&int(i))).expect("shifted window");
        }
    }
    out
}

fn dx_series<C: Coeff>(f: &SymbolSeries<C>) -> SymbolSeries<C> {
    f.map_coeffs(|_, c| c.ddx())
}

/// `{(Λ^m)_+, Λ}` with the ordinary product and the Poisson bracket
/// `f_λ g_x - f_x g_λ`, top lowered to λ^-1.
pub fn dkp_flow_rhs_series(lambda: &SymbolSeries<DPoly>, m: u32) -> Result<SymbolSeries<DPoly>> {
    check_flow(m)?;
    let mut acc = lambda.clone();
    for _ in 1..m {
        acc = pointwise_series(&acc, lambda);
    }
    let b = acc.plus_part().extend_exact(lambda.lo() - 2);
    let rhs =
        pointwise_series(&dlambda(&b), &dx_series(lambda)).sub(&pointwise_series(&dx_series(&b), &dlambda(lambda)));
    rhs.lower_top(-1)
}

/// `{(λ^n)_+, λ}` for an exact phase-space symbol.
pub fn dkp_flow_rhs(lambda_sym: &PhaseSymbol, n: u32) -> Result<PhaseSymbol> {
    check_flow(n)?;
    Ok(poisson_dkp(&lambda_sym.pow(n).plus_part(), lambda_sym))
}

/// The time derivation `∂ u{n+2} = coefficient of λ^(-n-1)`.
fn lambda_derivation(rhs: &SymbolSeries<DPoly>) -> FlowDerivation {
    FlowDerivation::new((1..=-rhs.lo()).map(|k| (k as u32 + 1, rhs.coeff(-k))).collect())
}

/// A generic Λ deep enough for flows up to `m + n` on `depth` coefficients.
fn generic_lambda(m: u32, n: u32, depth: u32) -> Result<SymbolSeries<DPoly>> {
    MoyalCoeffs::generic((depth + m + n + 2) as usize).symbol()
}

/// Checks `∂_m 𝔅_n - ∂_n 𝔅_m + {𝔅_n, 𝔅_m}_κ = 0` with `𝔅_k = (Λ^{*k})_+`
/// and the time derivatives read off from the Moyal flows.
pub fn zero_curvature_check(m: u32, n: u32, kappa: &Rational, depth: u32) -> Result<bool> {
    check_flow(m)?;
    check_flow(n)?;
    let lambda = generic_lambda(m, n, depth)?;
    let bm = moyal_plus_power(&lambda, m, kappa)?;
    let bn = moyal_plus_power(&lambda, n, kappa)?;
    let mut dm = lambda_derivation(&moyal_kp_flow_rhs(&lambda, m, kappa)?);
    let mut dn = lambda_derivation(&moyal_kp_flow_rhs(&lambda, n, kappa)?);
    let bracket = moyal_bracket_series(&bn, &bm, kappa);
    for k in 0..=(m.max(n) as i64) {
        let lhs = dm
            .apply(&bn.coeff(k))?
            .sub(&dn.apply(&bm.coeff(k))?)
            .add(&bracket.get(k)?);
        if !lhs.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks `∂_m(∂_n Λ) = ∂_n(∂_m Λ)` for the dispersionless flows on `depth` coefficients.
pub fn dkp_flow_commutativity_check(m: u32, n: u32, depth: u32) -> Result<bool> {
    let lambda = generic_lambda(m, n, depth)?;
    let fm = dkp_flow_rhs_series(&lambda, m)?;
    let fn_ = dkp_flow_rhs_series(&lambda, n)?;
    let mut dm = lambda_derivation(&fm);
    let mut dn = lambda_derivation(&fn_);
    for k in 1..=depth as i64 {
        if dm.apply(&fn_.get(-k)?)? != dn.apply(&fm.get(-k)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// One compared coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub index: i64,
    pub lhs: String,
    pub rhs: String,
    pub equal: bool,
}

impl ReportRow {
    fn new<C: Coeff>(index: i64, lhs: &C, rhs: &C) -> Self {
        ReportRow {
            index,
            lhs: lhs.render(),
            rhs: rhs.render(),
            equal: lhs == rhs,
        }
    }
}

/// Renders rows as an aligned text table.
pub fn render_table(rows: &[ReportRow]) -> String {
    let w = rows.iter().map(|r| r.lhs.len()).max().unwrap_or(0).max(3);
    let mut out = format!("{:>5}  {:<w$}  {}  {}\n", "index", "lhs", "equal", "rhs");
    for r in rows {
        out.push_str(&format!("{:>5}  {:<w$}  {:<5}  {}\n", r.index, r.lhs, r.equal, r.rhs));
    }
    out
}

/// Per-coefficient comparison of the Moyal flow with the Sato flow pushed
/// through the coefficient map. Row n compares `∂_m u_n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrespondenceReport {
    pub m: u32,
    pub depth: u32,
    pub rows: Vec<ReportRow>,
}

impl CorrespondenceReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.equal)
    }

    pub fn mismatches(&self) -> impl Iterator<Item = &ReportRow> + '_ {
        self.rows.iter().filter(|r| !r.equal)
    }
}

impl fmt::Display for CorrespondenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "flow {} on {} coefficients (lhs: Moyal flow, rhs: mapped Sato flow)",
            self.m, self.depth
        )?;
        f.write_str(&render_table(&self.rows))
    }
}

/// Compares `∂_m u_n` computed on the Moyal side at κ = 1/2 with the chain-rule
/// image of the Sato flow, for n = 0..depth-1.
pub fn flow_correspondence_check(m: u32, depth: u32) -> Result<CorrespondenceReport> {
    check_flow(m)?;
    let count = (depth + m) as usize;
    let sato = SatoCoeffs::generic(count);
    let sato_rhs = kp_flow_rhs(&sato.lax()?, m)?;
    let mut sato_flow = flow_derivation(&sato_rhs);
    let moyal = sato_to_moyal(&sato);
    let moyal_rhs = moyal_kp_flow_rhs(&moyal.symbol()?, m, &rat(1, 2))?;
    let mut rows = Vec::with_capacity(depth as usize);
    for n in 0..depth as usize {
        let lhs = moyal_rhs.get(-(n as i64) - 1)?;
        let rhs = sato_flow.apply(&moyal.u[n])?;
        rows.push(ReportRow::new(n as i64, &lhs, &rhs));
    }
    Ok(CorrespondenceReport { m, depth, rows })
}

/// Side-by-side second flows of the q-Lax operator and of its phase-space
/// symbol under the q-plane product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QLaxReport {
    /// Whether `a_0`, `a_1` and the coefficients `u_1`, `u_0` of `L^2_+` are constant in x.
    pub restriction_holds: bool,
    pub rows: Vec<ReportRow>,
}

impl fmt::Display for QLaxReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "constant-coefficient restriction holds: {}", self.restriction_holds)?;
        writeln!(
            f,
            "lhs: [L^2_+, L] in D_q powers; rhs: λ^2_+ ⋆ λ - λ ⋆ λ^2_+ in p powers"
        )?;
        f.write_str(&render_table(&self.rows))
    }
}

/// `L = D_q + a_0 + Σ a_i D_q^-i` against `λ = p + a_0 + Σ a_i p^-i`, on a
/// window of `depth` powers.
pub fn qlax_compare(q: &QValue, a: &[XLaurent], depth: u32) -> Result<QLaxReport> {
    if depth < 3 || (a.len() as u32) > depth - 1 {
        return Err(Error::InvalidArgument(format!(
            "need 3 <= depth and at most depth - 1 coefficients, got depth {depth} with {}",
            a.len()
        )));
    }
    let mut s = SymbolSeries::zero(1, depth);
    s.add_at(1, XLaurent::one())?;
    for (i, c) in a.iter().enumerate() {
        s.add_at(-(i as i64), c.clone())?;
    }
    let l = QOperatorSeries::new(s.clone(), q.clone());
    let lhs = qkp_flow_rhs(&l, 2, BracketOrder::PlusFirst)?;
    let l2 = l.power_q(2)?.plus_part_q();

    let lambda = PhaseSymbol::from_p_series(&s);
    let b = qplane_star(&lambda, &lambda, q).plus_part();
    let rhs = qplane_star(&b, &lambda, q).sub(&qplane_star(&lambda, &b, q));

    let lo = lhs.lo().max(2 + s.lo());
    let top = rhs.terms().map(|((_, n), _)| n).max().unwrap_or(0).max(lhs.top());
    let rows = (lo..=top)
        .rev()
        .map(|k| ReportRow::new(k, &lhs.coeff(k), &rhs.p_coeff(k)))
        .collect();
    let constant = |c: &XLaurent| c.terms().all(|(e, _)| e == 0);
    let a0 = a.first().cloned().unwrap_or_else(XLaurent::zero);
    let a1 = a.get(1).cloned().unwrap_or_else(XLaurent::zero);
    let restriction_holds = [a0, a1, l2.coeff(1), l2.coeff(0)].iter().all(constant);
    Ok(QLaxReport {
        restriction_holds,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffring::ParseCoeff;

    fn dp(s: &str) -> DPoly {
        DPoly::parse(s).unwrap()
    }

    #[test]
    fn coefficient_map_low_orders() {
        let u = sato_to_moyal(&SatoCoeffs::generic(3));
        assert_eq!(u.u[0], dp("u2"));
        assert_eq!(u.u[1], dp("u3 + 1/2*u2_x1"));
        assert_eq!(u.u[2], dp("u4 + u3_x1 + 1/4*u2_x2"));
    }

    #[test]
    fn coefficient_map_round_trip() {
        let v = SatoCoeffs {
            v: vec![dp("u2^2 + 3"), dp("u3*u2_x1"), dp("-u5"), dp("u4_x2 - 1/3*u2")],
        };
        assert_eq!(moyal_to_sato(&sato_to_moyal(&v)), v);
        let u = MoyalCoeffs::generic(5);
        assert_eq!(sato_to_moyal(&moyal_to_sato(&u)), u);
    }

    #[test]
    fn first_flows_are_x_derivatives() {
        let lambda = MoyalCoeffs::generic(5).symbol().unwrap();
        for kappa in [rat(1, 2), rat(0, 1), rat(3, 1)] {
            let rhs = moyal_kp_flow_rhs(&lambda, 1, &kappa).unwrap();
            assert!(rhs.top() <= -1);
            for n in 0..5 {
                assert_eq!(rhs.get(-n - 1).unwrap(), DPoly::gen(n as u32 + 2, 1));
            }
        }
        let d = dkp_flow_rhs_series(&lambda, 1).unwrap();
        assert_eq!(d.get(-2).unwrap(), dp("u3_x1"));
        let sym = PhaseSymbol::parse("p + x^2*p^(-1) + 3*x*p^(-2)").unwrap();
        assert_eq!(dkp_flow_rhs(&sym, 1).unwrap(), sym.dx());
    }

    #[test]
    fn second_moyal_flow_by_hand() {
        // (Λ*Λ)_+ = λ² + 2u0 for every κ. In {λ² + 2u0, Λ} only the Poisson
        // term reaches λ^-1: 2λ ∂_x(u1 λ^-2) gives 2 u1_x. The κ² term starts at λ^-4.
        let lambda = MoyalCoeffs::generic(6).symbol().unwrap();
        for kappa in [rat(1, 2), rat(5, 1)] {
            let rhs = moyal_kp_flow_rhs(&lambda, 2, &kappa).unwrap();
            assert_eq!(rhs.get(-1).unwrap(), dp("2*u3_x1"));
        }
        // Sato side for comparison: ∂_2 v0 = v0_xx + 2 v1_x, and u1 = v1 + v0_x/2.
        let sato = kp_flow_rhs(&SatoCoeffs::generic(6).lax().unwrap(), 2).unwrap();
        assert_eq!(sato.get(-1).unwrap(), dp("u2_x2 + 2*u3_x1"));
    }

    #[test]
    fn classical_limit_of_moyal_flows() {
        let lambda = MoyalCoeffs::generic(7).symbol().unwrap();
        for m in 1..=3 {
            let moyal = moyal_kp_flow_rhs(&lambda, m, &rat(0, 1)).unwrap();
            let dkp = dkp_flow_rhs_series(&lambda, m).unwrap();
            assert!(moyal.eq_mod_tail(&dkp), "flow {m}");
        }
    }

    #[test]
    fn zero_curvature() {
        assert!(zero_curvature_check(2, 2, &rat(1, 2), 3).unwrap());
        assert!(zero_curvature_check(2, 3, &rat(1, 2), 5).unwrap());
        assert!(zero_curvature_check(2, 3, &rat(1, 3), 4).unwrap());
        assert!(zero_curvature_check(1, 3, &rat(0, 1), 4).unwrap());
    }

    #[test]
    fn dispersionless_flows_commute() {
        assert!(dkp_flow_commutativity_check(2, 3, 5).unwrap());
    }

    #[test]
    fn correspondence_holds_on_four_coefficients() {
        for m in 1..=3 {
            let r = flow_correspondence_check(m, 4).unwrap();
            assert!(r.passed(), "{r}");
            assert_eq!(r.rows.len(), 4);
        }
    }

    #[test]
    fn qlax_report_shapes() {
        let q = QValue::from_ratio(3, 2).unwrap();
        let zero = qlax_compare(&q, &[], 5).unwrap();
        assert!(zero.restriction_holds);
        assert!(zero.rows.iter().all(|r| r.equal && r.lhs == "0"));
        let a = [
            XLaurent::parse("2").unwrap(),
            XLaurent::parse("0").unwrap(),
            XLaurent::parse("x").unwrap(),
        ];
        let r = qlax_compare(&q, &a, 5).unwrap();
        assert!(r.restriction_holds);
        let general = [XLaurent::parse("x").unwrap(), XLaurent::parse("x^2").unwrap()];
        assert!(!qlax_compare(&q, &general, 5).unwrap().restriction_holds);
    }
}
