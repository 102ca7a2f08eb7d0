//! Phase-space star products and brackets on exact symbols in `(x, p)`.
//!
//! The deformation products act on monomials `x^m p^n`. The Moyal family is
//! bidifferential and terminates on symbols polynomial in `x` (or in `p`); the
//! q-families multiply monomials by integer powers of q.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coeffring::{parse_terms, Coeff, XLaurent};
use crate::error::{Error, Result};
use crate::exactnum::{
    binom_generalized, factorial, falling_factorial, int, parse_rational, qint, render_rational, rpow, QValue, Rational,
};
use crate::psdo::DerivCache;
use crate::series::{empty_window, product_window, SymbolSeries};

/// A finite sum `Σ c x^m p^n` with integer exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PhaseSymbol {
    terms: BTreeMap<(i64, i64), Rational>,
}

impl PhaseSymbol {
    pub fn zero() -> Self {
        PhaseSymbol::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn monomial(c: Rational, x: i64, p: i64) -> Self {
        let mut s = PhaseSymbol::default();
        s.add_term(x, p, c);
        s
    }

    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1, 0)
    }

    pub fn p() -> Self {
        Self::monomial(Rational::one(), 0, 1)
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), Rational)>>(terms: I) -> Self {
        let mut s = PhaseSymbol::default();
        for ((x, p), c) in terms {
            s.add_term(x, p, c);
        }
        s
    }

    /// Folds a series in `p` with Laurent coefficients in `x` into one symbol.
    pub fn from_p_series(s: &SymbolSeries<XLaurent>) -> Self {
        let mut out = PhaseSymbol::default();
        for (n, c) in s.terms() {
            for (m, v) in c.terms() {
                out.add_term(m, n, v.clone());
            }
        }
        out
    }

    /// The coefficient of `p^n` as a Laurent polynomial in `x`.
    pub fn p_coeff(&self, n: i64) -> XLaurent {
        XLaurent::from_terms(
            self.terms
                .iter()
                .filter(|((_, b), _)| *b == n)
                .map(|((a, _), c)| (*a, c.clone())),
        )
    }

    pub fn add_term(&mut self, x: i64, p: i64, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry((x, p)) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coeff(&self, x: i64, p: i64) -> Rational {
        self.terms.get(&(x, p)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Rational)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((x, p), c) in &other.terms {
            out.add_term(*x, *p, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&int(-1))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return PhaseSymbol::default();
        }
        PhaseSymbol {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// The commutative pointwise product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = PhaseSymbol::default();
        for ((a, b), c) in &self.terms {
            for ((m, n), d) in &other.terms {
                out.add_term(a + m, b + n, c * d);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// `∂_x^j ∂_p^k`.
    pub fn partial(&self, j: u32, k: u32) -> Self {
        let mut out = PhaseSymbol::default();
        for ((m, n), c) in &self.terms {
            let f = Rational::from(falling_factorial(*m, j) * falling_factorial(*n, k));
            out.add_term(m - j as i64, n - k as i64, c * f);
        }
        out
    }

    pub fn dx(&self) -> Self {
        self.partial(1, 0)
    }

    pub fn dp(&self) -> Self {
        self.partial(0, 1)
    }

    /// Terms with p-exponent >= 0.
    pub fn plus_part(&self) -> Self {
        PhaseSymbol {
            terms: self
                .terms
                .iter()
                .filter(|((_, n), _)| *n >= 0)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    /// Terms with p-exponent >= `lo`.
    pub fn truncate_p(&self, lo: i64) -> Self {
        PhaseSymbol {
            terms: self
                .terms
                .iter()
                .filter(|((_, n), _)| *n >= lo)
                .map(|(k, c)| (*k, c.clone()))
                .collect(),
        }
    }

    fn x_degree(&self) -> Option<i64> {
        self.terms.keys().map(|(m, _)| *m).max()
    }

    fn p_degree(&self) -> Option<i64> {
        self.terms.keys().map(|(_, n)| *n).max()
    }

    fn min_x(&self) -> i64 {
        self.terms.keys().map(|(m, _)| *m).min().unwrap_or(0)
    }

    fn min_p(&self) -> i64 {
        self.terms.keys().map(|(_, n)| *n).min().unwrap_or(0)
    }

    /// Canonical rendering: terms by descending p-exponent, then descending x-exponent.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut keys: Vec<&(i64, i64)> = self.terms.keys().collect();
        keys.sort_by_key(|k| std::cmp::Reverse((k.1, k.0)));
        let mut out = String::new();
        for (i, k) in keys.into_iter().enumerate() {
            let mut f = Vec::new();
            for (name, e) in [("x", k.0), ("p", k.1)] {
                match e {
                    0 => {}
                    1 => f.push(name.to_string()),
                    e if e < 0 => f.push(format!("{name}^({e})")),
                    e => f.push(format!("{name}^{e}")),
                }
            }
            crate::coeffring::render_term(&self.terms[k], &f.join("*"), i == 0, &mut out);
        }
        out
    }

    /// Parses text in `x` and `p`; `xi` and `lambda` are accepted for `p`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = PhaseSymbol::default();
        for t in parse_terms(text)? {
            let (mut m, mut n) = (0, 0);
            for (name, e, col) in t.factors {
                match name.as_str() {
                    "x" => m += e,
                    "p" | "xi" | "lambda" => n += e,
                    _ => {
                        return Err(Error::Parse {
                            column: col,
                            message: format!("unknown variable `{name}`; expected x or p"),
                        })
                    }
                }
            }
            out.add_term(m, n, t.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl FromStr for PhaseSymbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PhaseSymbol::parse(s)
    }
}

#[derive(Serialize, Deserialize)]
struct PhaseTermDto {
    x: i64,
    p: i64,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct PhaseSymbolDto {
    terms: Vec<PhaseTermDto>,
}

impl Serialize for PhaseSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PhaseSymbolDto {
            terms: self
                .terms
                .iter()
                .map(|((x, p), c)| PhaseTermDto {
                    x: *x,
                    p: *p,
                    c: render_rational(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for PhaseSymbol {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = PhaseSymbolDto::deserialize(d)?;
        let mut out = PhaseSymbol::default();
        for t in dto.terms {
            let c = parse_rational(&t.c).map_err(serde::de::Error::custom)?;
            out.add_term(t.x, t.p, c);
        }
        Ok(out)
    }
}

/// The largest derivative order a bidifferential product of `f` and `g` can need.
fn order_bound(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<u32> {
    if f.is_zero() || g.is_zero() {
        return Ok(0);
    }
    if f.min_x() >= 0 && g.min_x() >= 0 {
        return Ok((f.x_degree().unwrap() + g.x_degree().unwrap()) as u32);
    }
    if f.min_p() >= 0 && g.min_p() >= 0 {
        return Ok((f.p_degree().unwrap() + g.p_degree().unwrap()) as u32);
    }
    Err(Error::NonPolynomialX(f.min_x().min(g.min_x())))
}

/// `(∂_x^j ∂_p^(s-j) f)(∂_x^(s-j) ∂_p^j g)`.
fn bidiff(f: &PhaseSymbol, g: &PhaseSymbol, s: u32, j: u32) -> PhaseSymbol {
    f.partial(j, s - j).mul(&g.partial(s - j, j))
}

fn alternating_sum(f: &PhaseSymbol, g: &PhaseSymbol, s: u32) -> PhaseSymbol {
    let mut out = PhaseSymbol::zero();
    for j in 0..=s {
        let c = binom_generalized(s as i64, j) * int(if j % 2 == 0 { 1 } else { -1 });
        out = out.add(&bidiff(f, g, s, j).scale(&c));
    }
    out
}

fn inv_factorial(k: u32) -> Rational {
    Rational::new(1.into(), factorial(k))
}

fn kappa_sum(orders: &[PhaseSymbol], kappa: &Rational, step: i64) -> PhaseSymbol {
    orders.iter().enumerate().fold(PhaseSymbol::zero(), |acc, (s, c)| {
        acc.add(&c.scale(&rpow(kappa, step * s as i64)))
    })
}

/// Coefficients of κ^s in the Moyal star product, for s = 0, 1, ...
pub fn moyal_star_orders(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<Vec<PhaseSymbol>> {
    let bound = order_bound(f, g)?;
    Ok((0..=bound)
        .map(|s| alternating_sum(f, g, s).scale(&inv_factorial(s)))
        .collect())
}

/// `f * g = Σ_s κ^s/s! Σ_j (-1)^j C(s,j) (∂_x^j ∂_p^(s-j) f)(∂_x^(s-j) ∂_p^j g)`.
pub fn moyal_star(f: &PhaseSymbol, g: &PhaseSymbol, kappa: &Rational) -> Result<PhaseSymbol> {
    Ok(kappa_sum(&moyal_star_orders(f, g)?, kappa, 1))
}

/// Coefficients of κ^(2s) in the Moyal bracket, for s = 0, 1, ...
pub fn moyal_bracket_orders(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<Vec<PhaseSymbol>> {
    let bound = order_bound(f, g)?;
    Ok((0..=bound.saturating_sub(1) / 2)
        .map(|s| alternating_sum(f, g, 2 * s + 1).scale(&inv_factorial(2 * s + 1)))
        .collect())
}

/// The odd part of the star product, `Σ_s κ^(2s)/(2s+1)! Σ_j (-1)^j C(2s+1,j) ...`.
/// Equals `(f*g - g*f)/(2κ)` for κ ≠ 0 and the Poisson bracket at κ = 0.
pub fn moyal_bracket(f: &PhaseSymbol, g: &PhaseSymbol, kappa: &Rational) -> Result<PhaseSymbol> {
    Ok(kappa_sum(&moyal_bracket_orders(f, g)?, kappa, 2))
}

/// `{f, g} = f_p g_x - f_x g_p`.
pub fn poisson_dkp(f: &PhaseSymbol, g: &PhaseSymbol) -> PhaseSymbol {
    f.dp().mul(&g.dx()).sub(&f.dx().mul(&g.dp()))
}

/// `(1/k!)(∂_p^k f ∂_x^k g - ∂_p^k g ∂_x^k f)`.
fn cross_term(f: &PhaseSymbol, g: &PhaseSymbol, k: u32) -> PhaseSymbol {
    f.partial(0, k)
        .mul(&g.partial(k, 0))
        .sub(&g.partial(0, k).mul(&f.partial(k, 0)))
        .scale(&inv_factorial(k))
}

/// `Σ_n κ^(2n+1)/(2n+1)! [∂_p^(2n+1) f ∂_x^(2n+1) g - ∂_p^(2n+1) g ∂_x^(2n+1) f]`.
pub fn bracket_prime_kappa(f: &PhaseSymbol, g: &PhaseSymbol, kappa: &Rational) -> Result<PhaseSymbol> {
    let bound = order_bound(f, g)?;
    let mut out = PhaseSymbol::zero();
    for k in (1..=bound).step_by(2) {
        out = out.add(&cross_term(f, g, k).scale(&rpow(kappa, k as i64)));
    }
    Ok(out)
}

/// `A ∘_κ B = Σ_n κ^n/n! ∂_p^n A ∂_x^n B`.
pub fn circ_kappa(a: &PhaseSymbol, b: &PhaseSymbol, kappa: &Rational) -> Result<PhaseSymbol> {
    let bound = if b.min_x() >= 0 {
        b.x_degree().unwrap_or(0).max(0) as u32
    } else if a.min_p() >= 0 {
        a.p_degree().unwrap_or(0).max(0) as u32
    } else {
        return Err(Error::NonPolynomialX(b.min_x()));
    };
    let mut out = PhaseSymbol::zero();
    for n in 0..=bound {
        let t = a
            .partial(0, n)
            .mul(&b.partial(n, 0))
            .scale(&(rpow(kappa, n as i64) * inv_factorial(n)));
        out = out.add(&t);
    }
    Ok(out)
}

/// `(A ∘_κ B - B ∘_κ A)/κ`.
pub fn circ_bracket(a: &PhaseSymbol, b: &PhaseSymbol, kappa: &Rational) -> Result<PhaseSymbol> {
    if kappa.is_zero() {
        return Err(Error::InvalidArgument(
            "the circle bracket divides by κ; κ must be non-zero".into(),
        ));
    }
    Ok(circ_kappa(a, b, kappa)?
        .sub(&circ_kappa(b, a, kappa)?)
        .scale(&kappa.recip()))
}

/// One κ-order of the comparison between the odd-order bracket and κ times the
/// circle-commutator bracket.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BracketComparisonRow {
    pub order: u32,
    pub prime: PhaseSymbol,
    pub circ: PhaseSymbol,
    pub difference: PhaseSymbol,
}

/// κ-coefficients of `bracket_prime_kappa` and `κ · circ_bracket`, order by order.
pub fn bracket_comparison(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<Vec<BracketComparisonRow>> {
    let bound = order_bound(f, g)?;
    let mut rows = Vec::new();
    for k in 1..=bound {
        let circ = cross_term(f, g, k);
        let prime = if k % 2 == 1 {
            cross_term(f, g, k)
        } else {
            PhaseSymbol::zero()
        };
        let difference = prime.sub(&circ);
        rows.push(BracketComparisonRow {
            order: k,
            prime,
            circ,
            difference,
        });
    }
    Ok(rows)
}

fn phase_product(
    f: &PhaseSymbol,
    g: &PhaseSymbol,
    phase: impl Fn(i64, i64, i64, i64) -> Result<Rational>,
) -> Result<PhaseSymbol> {
    let mut out = PhaseSymbol::zero();
    for ((m, n), c) in &f.terms {
        for ((a, b), d) in &g.terms {
            out.add_term(m + a, n + b, phase(*m, *n, *a, *b)? * c * d);
        }
    }
    Ok(out)
}

/// `x^m p^n ⋆ x^a p^b = q^(-na) x^(m+a) p^(n+b)`: the normal-ordered q-plane product.
pub fn qplane_star(f: &PhaseSymbol, g: &PhaseSymbol, q: &QValue) -> PhaseSymbol {
    phase_product(f, g, |_, n, a, _| Ok(q.pow(-n * a))).expect("integer q-powers")
}

/// Standard ordering, `exp(ν ←∂_p p x →∂_x)`: phase `q^(na)`.
pub fn qstandard_star(f: &PhaseSymbol, g: &PhaseSymbol, q: &QValue) -> PhaseSymbol {
    phase_product(f, g, |_, n, a, _| Ok(q.pow(n * a))).expect("integer q-powers")
}

/// Antistandard ordering, `exp(-ν ←∂_x x p →∂_p)`: phase `q^(-mb)`.
pub fn qantistandard_star(f: &PhaseSymbol, g: &PhaseSymbol, q: &QValue) -> PhaseSymbol {
    phase_product(f, g, |m, _, _, b| Ok(q.pow(-m * b))).expect("integer q-powers")
}

/// Weyl ordering, `exp(-(ν/2)[←∂_x x p →∂_p - ←∂_p p x →∂_x])`: phase `q^(-(mb-na)/2)`.
/// Odd exponents need q to be the square of a rational.
pub fn qweyl_star(f: &PhaseSymbol, g: &PhaseSymbol, q: &QValue) -> Result<PhaseSymbol> {
    let root = q.sqrt();
    phase_product(f, g, |m, n, a, b| {
        let e = n * a - m * b;
        if e % 2 == 0 {
            return Ok(q.pow(e / 2));
        }
        match &root {
            Some(r) => Ok(rpow(r, e)),
            None => Err(Error::NotPerfectSquare(q.to_string())),
        }
    })
}

/// The products that can be selected by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StarKind {
    Moyal,
    Circ,
    QPlane,
    QWeyl,
    QStandard,
    QAntistandard,
}

impl StarKind {
    pub const ALL: [StarKind; 6] = [
        StarKind::Moyal,
        StarKind::Circ,
        StarKind::QPlane,
        StarKind::QWeyl,
        StarKind::QStandard,
        StarKind::QAntistandard,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            StarKind::Moyal => "moyal",
            StarKind::Circ => "circ",
            StarKind::QPlane => "qplane",
            StarKind::QWeyl => "qweyl",
            StarKind::QStandard => "qstandard",
            StarKind::QAntistandard => "qantistandard",
        }
    }
}

impl FromStr for StarKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        StarKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown product `{s}`")))
    }
}

/// A product together with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct StarProduct {
    pub kind: StarKind,
    pub kappa: Rational,
    pub q: QValue,
}

impl StarProduct {
    pub fn new(kind: StarKind, kappa: Rational, q: QValue) -> Self {
        StarProduct { kind, kappa, q }
    }

    pub fn apply(&self, f: &PhaseSymbol, g: &PhaseSymbol) -> Result<PhaseSymbol> {
        match self.kind {
            StarKind::Moyal => moyal_star(f, g, &self.kappa),
            StarKind::Circ => circ_kappa(f, g, &self.kappa),
            StarKind::QPlane => Ok(qplane_star(f, g, &self.q)),
            StarKind::QWeyl => qweyl_star(f, g, &self.q),
            StarKind::QStandard => Ok(qstandard_star(f, g, &self.q)),
            StarKind::QAntistandard => Ok(qantistandard_star(f, g, &self.q)),
        }
    }
}

/// `(f ⋆ g) ⋆ h == f ⋆ (g ⋆ h)`.
pub fn associativity_check(star: &StarProduct, f: &PhaseSymbol, g: &PhaseSymbol, h: &PhaseSymbol) -> Result<bool> {
    let left = star.apply(&star.apply(f, g)?, h)?;
    let right = star.apply(f, &star.apply(g, h)?)?;
    Ok(left == right)
}

/// The brackets that can be selected for a Jacobi check.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BracketKind {
    Poisson,
    Moyal,
    Circ,
    Prime,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bracket {
    pub kind: BracketKind,
    pub kappa: Rational,
}

impl Bracket {
    pub fn new(kind: BracketKind, kappa: Rational) -> Self {
        Bracket { kind, kappa }
    }

    pub fn apply(&self, f: &PhaseSymbol, g: &PhaseSymbol) -> Result<PhaseSymbol> {
        match self.kind {
            BracketKind::Poisson => Ok(poisson_dkp(f, g)),
            BracketKind::Moyal => moyal_bracket(f, g, &self.kappa),
            BracketKind::Circ => circ_bracket(f, g, &self.kappa),
            BracketKind::Prime => bracket_prime_kappa(f, g, &self.kappa),
        }
    }
}

/// `{{f,g},h} + {{h,f},g} + {{g,h},f} == 0`.
pub fn jacobi_check(bracket: &Bracket, f: &PhaseSymbol, g: &PhaseSymbol, h: &PhaseSymbol) -> Result<bool> {
    let a = bracket.apply(&bracket.apply(f, g)?, h)?;
    let b = bracket.apply(&bracket.apply(h, f)?, g)?;
    let c = bracket.apply(&bracket.apply(g, h)?, f)?;
    Ok(a.add(&b).add(&c).is_zero())
}

/// The κ^0 coefficient of the Moyal bracket, read two ways, against the Poisson bracket.
pub fn classical_limit_check(f: &PhaseSymbol, g: &PhaseSymbol) -> Result<bool> {
    let poisson = poisson_dkp(f, g);
    let direct = moyal_bracket_orders(f, g)?.into_iter().next().unwrap_or_default();
    let star = moyal_star_orders(f, g)?;
    let swapped = moyal_star_orders(g, f)?;
    let first = |v: &[PhaseSymbol]| v.get(1).cloned().unwrap_or_default();
    let from_star = first(&star)
        .sub(&first(&swapped))
        .scale(&Rational::new(1.into(), 2.into()));
    Ok(direct == poisson && from_star == poisson)
}

/// The Jackson derivative in p on a normal-ordered symbol:
/// `D_p(x^m p^n) = q^m (n)_q x^m p^(n-1)`.
pub fn qplane_dp(f: &PhaseSymbol, q: &QValue) -> PhaseSymbol {
    let mut out = PhaseSymbol::zero();
    for ((m, n), c) in &f.terms {
        out.add_term(*m, n - 1, q.pow(*m) * qint(*n, q) * c);
    }
    out
}

/// The Jackson derivative in x on a normal-ordered symbol:
/// `D_x(x^m p^n) = (m)_q x^(m-1) p^n`.
pub fn qplane_dx(f: &PhaseSymbol, q: &QValue) -> PhaseSymbol {
    let mut out = PhaseSymbol::zero();
    for ((m, n), c) in &f.terms {
        out.add_term(m - 1, *n, qint(*m, q) * c);
    }
    out
}

/// Checks `D_x p = q^-1 p D_x`, `D_p x = q x D_p`, `D_p x^a = q^a x^a D_p`
/// and `D_x p^b = q^-b p^b D_x` on every monomial `x^m p^n` with |m|, |n| <= 3.
pub fn qplane_compat_check(q: &QValue) -> bool {
    let x = PhaseSymbol::x();
    let p = PhaseSymbol::p();
    let qi = q.inverse();
    for m in -3..=3 {
        for n in -3..=3 {
            let f = PhaseSymbol::monomial(Rational::one(), m, n);
            let dx_p = qplane_dx(&qplane_star(&p, &f, q), q);
            let p_dx = qplane_star(&p, &qplane_dx(&f, q), q).scale(qi.value());
            let dp_x = qplane_dp(&qplane_star(&x, &f, q), q);
            let x_dp = qplane_star(&x, &qplane_dp(&f, q), q).scale(q.value());
            if dx_p != p_dx || dp_x != x_dp {
                return false;
            }
            for k in -2i64..=2 {
                let xk = PhaseSymbol::monomial(Rational::one(), k, 0);
                let pk = PhaseSymbol::monomial(Rational::one(), 0, k);
                let lhs = qplane_dp(&qplane_star(&xk, &f, q), q);
                let rhs = qplane_star(&xk, &qplane_dp(&f, q), q).scale(&q.pow(k));
                if lhs != rhs {
                    return false;
                }
                let lhs = qplane_dx(&qplane_star(&pk, &f, q), q);
                let rhs = qplane_star(&pk, &qplane_dx(&f, q), q).scale(&q.pow(-k));
                if lhs != rhs {
                    return false;
                }
            }
        }
    }
    true
}

/// A finite sum `Σ c z^m ζ^n` on the torus.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TorusElement {
    terms: BTreeMap<(i64, i64), Rational>,
}

impl TorusElement {
    pub fn zero() -> Self {
        TorusElement::default()
    }

    pub fn monomial(c: Rational, m: i64, n: i64) -> Self {
        let mut t = TorusElement::default();
        t.add_term(m, n, c);
        t
    }

    pub fn from_terms<I: IntoIterator<Item = ((i64, i64), Rational)>>(terms: I) -> Self {
        let mut t = TorusElement::default();
        for ((m, n), c) in terms {
            t.add_term(m, n, c);
        }
        t
    }

    pub fn add_term(&mut self, m: i64, n: i64, c: Rational) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry((m, n)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&(m, n));
        }
    }

    pub fn coeff(&self, m: i64, n: i64) -> Rational {
        self.terms.get(&(m, n)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = ((i64, i64), &Rational)> + '_ {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((m, n), c) in &other.terms {
            out.add_term(*m, *n, c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        TorusElement::from_terms(self.terms.iter().map(|(k, v)| (*k, v * c)))
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, ((m, n), c)) in self.terms.iter().enumerate() {
            let mut f = Vec::new();
            for (name, e) in [("z", *m), ("zeta", *n)] {
                match e {
                    0 => {}
                    1 => f.push(name.to_string()),
                    e if e < 0 => f.push(format!("{name}^({e})")),
                    e => f.push(format!("{name}^{e}")),
                }
            }
            crate::coeffring::render_term(c, &f.join("*"), i == 0, &mut out);
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TorusTermDto {
    z: i64,
    zeta: i64,
    c: String,
}

#[derive(Serialize, Deserialize)]
struct TorusElementDto {
    terms: Vec<TorusTermDto>,
}

impl Serialize for TorusElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TorusElementDto {
            terms: self
                .terms
                .iter()
                .map(|((z, zeta), c)| TorusTermDto {
                    z: *z,
                    zeta: *zeta,
                    c: render_rational(c),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorusElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let dto = TorusElementDto::deserialize(d)?;
        let mut out = TorusElement::default();
        for t in dto.terms {
            out.add_term(t.z, t.zeta, parse_rational(&t.c).map_err(serde::de::Error::custom)?);
        }
        Ok(out)
    }
}

/// A polynomial in λ up to a fixed even order, with torus coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormalLambdaSeries {
    order: u32,
    coeffs: Vec<TorusElement>,
}

impl FormalLambdaSeries {
    pub fn zero(order: u32) -> Self {
        FormalLambdaSeries {
            order,
            coeffs: vec![TorusElement::zero(); order as usize + 1],
        }
    }

    /// A torus element as a λ-constant series.
    pub fn constant(t: TorusElement, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = t;
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The coefficient of λ^k (zero above the order).
    pub fn coeff(&self, k: u32) -> TorusElement {
        self.coeffs.get(k as usize).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(TorusElement::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let order = self.order.min(other.order);
        FormalLambdaSeries {
            order,
            coeffs: (0..=order).map(|k| self.coeff(k).add(&other.coeff(k))).collect(),
        }
    }
}

/// Taylor coefficients of `sin(λc)/λ` in λ up to `order`.
fn sine_constants(c: i64, order: u32) -> Vec<Rational> {
    let c = int(c);
    (0..=order)
        .map(|k| {
            if k % 2 == 1 {
                return Rational::zero();
            }
            let h = k / 2;
            let sign = if h % 2 == 0 { int(1) } else { int(-1) };
            sign * rpow(&c, 2 * h as i64 + 1) * inv_factorial(2 * h + 1)
        })
        .collect()
}

/// `[z^m ζ^n, z^a ζ^b] = (1/λ) sin(λ(na - mb)) z^(m+a) ζ^(n+b)`, as a λ-series to `order`.
pub fn sine_bracket(a: &TorusElement, b: &TorusElement, order: u32) -> Result<FormalLambdaSeries> {
    if order % 2 == 1 {
        return Err(Error::InvalidArgument(format!("the λ-order must be even, got {order}")));
    }
    let mut out = FormalLambdaSeries::zero(order);
    for ((m, n), c) in &a.terms {
        for ((p, q), d) in &b.terms {
            let k = n * p - m * q;
            if k == 0 {
                continue;
            }
            let cd = c * d;
            for (i, s) in sine_constants(k, order).iter().enumerate() {
                if !s.is_zero() {
                    out.coeffs[i].add_term(m + p, n + q, s * &cd);
                }
            }
        }
    }
    Ok(out)
}

/// The sine bracket extended λ-bilinearly to series, truncated at the smaller order.
pub fn sine_bracket_series(a: &FormalLambdaSeries, b: &FormalLambdaSeries) -> Result<FormalLambdaSeries> {
    let order = a.order.min(b.order);
    let mut out = FormalLambdaSeries::zero(order);
    for i in 0..=order {
        for j in 0..=(order - i) {
            let (ai, bj) = (a.coeff(i), b.coeff(j));
            if ai.is_zero() || bj.is_zero() {
                continue;
            }
            let br = sine_bracket(&ai, &bj, order)?;
            for k in 0..=(order - i - j) {
                out.coeffs[(i + j + k) as usize] = out.coeffs[(i + j + k) as usize].add(&br.coeff(k));
            }
        }
    }
    Ok(out)
}

/// The cyclic Jacobi sum of the sine bracket vanishes through λ^order.
pub fn sine_jacobi_check(a: &TorusElement, b: &TorusElement, c: &TorusElement, order: u32) -> Result<bool> {
    let lift = |t: &TorusElement| FormalLambdaSeries::constant(t.clone(), order);
    let (a, b, c) = (lift(a), lift(b), lift(c));
    let t1 = sine_bracket_series(&sine_bracket_series(&a, &b)?, &c)?;
    let t2 = sine_bracket_series(&sine_bracket_series(&b, &c)?, &a)?;
    let t3 = sine_bracket_series(&sine_bracket_series(&c, &a)?, &b)?;
    Ok(t1.add(&t2).add(&t3).is_zero())
}

/// Moyal star product on series `Σ f_i(x) λ^i` with coefficients in any ring.
/// The output window keeps the powers no unknown tail term can reach.
pub fn moyal_star_series<C: Coeff>(f: &SymbolSeries<C>, g: &SymbolSeries<C>, kappa: &Rational) -> SymbolSeries<C> {
    let (top, lo) = product_window(f, g);
    let mut out = empty_window(top, lo);
    moyal_sum(f, g, kappa, 1, 0, lo, &mut out);
    out
}

/// Moyal bracket on series: the odd orders of [`moyal_star_series`] with weight κ^(2s).
pub fn moyal_bracket_series<C: Coeff>(f: &SymbolSeries<C>, g: &SymbolSeries<C>, kappa: &Rational) -> SymbolSeries<C> {
    let (top, lo) = product_window(f, g);
    let mut out = empty_window(top - 1, lo - 1);
    moyal_sum(f, g, kappa, 2, 1, lo - 1, &mut out);
    out
}

/// Adds `Σ_s κ^(s - parity)/s! Σ_j (-1)^j C(s,j) (∂_x^j ∂_λ^(s-j) f)(∂_x^(s-j) ∂_λ^j g)`
/// over s = parity, parity + step, ... into `out`.
fn moyal_sum<C: Coeff>(
    f: &SymbolSeries<C>,
    g: &SymbolSeries<C>,
    kappa: &Rational,
    step: usize,
    parity: usize,
    lo: i64,
    out: &mut SymbolSeries<C>,
) {
    let mut df = DerivCache::new(f);
    let mut dg = DerivCache::new(g);
    let fi: Vec<i64> = f.terms().map(|(i, _)| i).collect();
    let gk: Vec<i64> = g.terms().map(|(k, _)| k).collect();
    for &i in &fi {
        for &k in &gk {
            let max_s = i + k - lo;
            if max_s < 0 {
                continue;
            }
            for s in (parity..=max_s as usize).step_by(step) {
                let weight = rpow(kappa, (s - parity) as i64) * inv_factorial(s as u32);
                if weight.is_zero() {
                    continue;
                }
                for j in 0..=s {
                    let c = binom_generalized(s as i64, j as u32)
                        * Rational::from(falling_factorial(i, (s - j) as u32) * falling_factorial(k, j as u32));
                    if c.is_zero() {
                        continue;
                    }
                    let a = df.get(i, j).clone();
                    let b = dg.get(k, s - j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let sign = if j % 2 == 0 { int(1) } else { int(-1) };
                    out.add_in_window(i + k - s as i64, &a.mul(b).scale(&(c * &weight * sign)));
                }
            }
        }
    }
}

/// Poisson bracket on series, `f_λ g_x - f_x g_λ`.
pub fn poisson_series<C: Coeff>(f: &SymbolSeries<C>, g: &SymbolSeries<C>) -> SymbolSeries<C> {
    moyal_bracket_series(f, g, &int(0))
}
