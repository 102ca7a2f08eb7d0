use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::{parse_terms, render_term};
use crate::error::{Error, Result};
use crate::exactnum::{binom_generalized, int, rpow, QValue, Rational};

/// A polynomial in the times t_1..t_N over the rationals. The arity N is
/// fixed per value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TimesPoly {
    arity: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl TimesPoly {
    pub fn zero(arity: usize) -> Self {
        TimesPoly {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: Rational, arity: usize) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(vec![0; arity], c);
        p
    }

    /// The variable t_j, 1-based.
    pub fn var(j: usize, arity: usize) -> Self {
        assert!(j >= 1 && j <= arity, "t{j} outside arity {arity}");
        let mut e = vec![0; arity];
        e[j - 1] = 1;
        let mut p = Self::zero(arity);
        p.add_term(e, Rational::one());
        p
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> + '_ {
        self.terms.iter()
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.arity, other.arity);
        let mut out = Self::zero(self.arity);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(Rational::one(), self.arity), |acc, _| acc.mul(self))
    }

    /// Partial derivative in t_j (1-based), applied `k` times.
    pub fn partial(&self, j: usize, k: u32) -> Self {
        let mut out = Self::zero(self.arity);
        for (e, c) in &self.terms {
            let ej = e[j - 1];
            if ej < k {
                continue;
            }
            let mut e2 = e.clone();
            e2[j - 1] = ej - k;
            let f = crate::exactnum::falling_factorial(ej as i64, k);
            out.add_term(e2, c * Rational::from_integer(f));
        }
        out
    }

    pub fn partial_multi(&self, multi: &[u32]) -> Self {
        multi.iter().enumerate().fold(
            self.clone(),
            |acc, (j, &k)| if k == 0 { acc } else { acc.partial(j + 1, k) },
        )
    }

    /// Substitutes t_j -> images[j-1].
    pub fn substitute(&self, images: &[TimesPoly]) -> TimesPoly {
        assert_eq!(images.len(), self.arity);
        let arity = images.first().map_or(self.arity, |p| p.arity);
        let mut out = Self::zero(arity);
        for (e, c) in &self.terms {
            let mut term = Self::constant(c.clone(), arity);
            for (j, &k) in e.iter().enumerate() {
                if k > 0 {
                    term = term.mul(&images[j].pow(k));
                }
            }
            out = out.add(&term);
        }
        out
    }

    /// tau(t + shift) for a vector of rational shifts.
    pub fn shift(&self, shift: &[Rational]) -> TimesPoly {
        let images: Vec<TimesPoly> = (1..=self.arity)
            .map(|j| {
                let c = shift.get(j - 1).cloned().unwrap_or_else(Rational::zero);
                Self::var(j, self.arity).add(&Self::constant(c, self.arity))
            })
            .collect();
        self.substitute(&images)
    }

    /// Hirota bilinear derivative D^multi a . b.
    pub fn hirota_apply(a: &TimesPoly, b: &TimesPoly, multi: &[u32]) -> TimesPoly {
        assert_eq!(a.arity, b.arity);
        assert_eq!(multi.len(), a.arity, "multi-index arity must match the times");
        let mut out = Self::zero(a.arity);
        let mut k = vec![0u32; multi.len()];
        loop {
            let mut coef = Rational::one();
            let mut rest = Vec::with_capacity(multi.len());
            for (mj, kj) in multi.iter().zip(&k) {
                coef *= binom_generalized(*mj as i64, *kj);
                if (mj - kj) % 2 == 1 {
                    coef = -coef;
                }
                rest.push(mj - kj);
            }
            let term = a.partial_multi(&k).mul(&b.partial_multi(&rest)).scale(&coef);
            out = out.add(&term);
            // advance the multi-index k <= multi
            let mut pos = 0;
            loop {
                if pos == k.len() {
                    return out;
                }
                if k[pos] < multi[pos] {
                    k[pos] += 1;
                    break;
                }
                k[pos] = 0;
                pos += 1;
            }
        }
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let factors: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, k)| **k > 0)
                .map(|(j, k)| {
                    if *k == 1 {
                        format!("t{}", j + 1)
                    } else {
                        format!("t{}^{k}", j + 1)
                    }
                })
                .collect();
            render_term(c, &factors.join("*"), i == 0, &mut out);
        }
        out
    }

    pub fn parse(text: &str, arity: usize) -> Result<Self> {
        let mut out = Self::zero(arity);
        for t in parse_terms(text)? {
            let mut e = vec![0u32; arity];
            for (name, pow, col) in t.factors {
                let j: usize = name
                    .strip_prefix('t')
                    .and_then(|s| s.parse().ok())
                    .filter(|j| *j >= 1 && *j <= arity)
                    .ok_or_else(|| Error::Parse {
                        column: col,
                        message: format!("unknown time variable `{name}` for arity {arity}"),
                    })?;
                if pow < 0 {
                    return Err(Error::Parse {
                        column: col,
                        message: "negative power of a time".into(),
                    });
                }
                e[j - 1] += pow as u32;
            }
            out.add_term(e, t.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for TimesPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Elementary Schur polynomial p_j: exp(sum t_k z^k) = sum p_j z^j.
pub fn schur_p(j: usize, arity: usize) -> TimesPoly {
    let mut p = vec![TimesPoly::constant(Rational::one(), arity)];
    for n in 1..=j {
        let mut acc = TimesPoly::zero(arity);
        for k in 1..=n.min(arity) {
            let term = TimesPoly::var(k, arity).mul(&p[n - k]).scale(&int(k as i64));
            acc = acc.add(&term);
        }
        p.push(acc.scale(&Rational::new(1.into(), (n as i64).into())));
    }
    p.swap_remove(j)
}

/// Schur polynomial of the partition (2,1) from the Jacobi-Trudi determinant
/// det [[p2, p3], [p0, p1]].
pub fn jacobi_trudi_21(arity: usize) -> TimesPoly {
    let p = |j| schur_p(j, arity);
    p(2).mul(&p(1)).sub(&p(3).mul(&p(0)))
}

/// (D1^4 + 3 D2^2 - 4 D1 D3) tau . tau.
pub fn kp_hirota_residual(tau: &TimesPoly) -> Result<TimesPoly> {
    let n = tau.arity();
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "the KP residual needs arity >= 3, got {n}"
        )));
    }
    let multi = |entries: &[(usize, u32)]| {
        let mut m = vec![0u32; n];
        for &(j, k) in entries {
            m[j - 1] = k;
        }
        m
    };
    let d1 = TimesPoly::hirota_apply(tau, tau, &multi(&[(1, 4)]));
    let d2 = TimesPoly::hirota_apply(tau, tau, &multi(&[(2, 2)]));
    let d13 = TimesPoly::hirota_apply(tau, tau, &multi(&[(1, 1), (3, 1)]));
    Ok(d1.add(&d2.scale(&int(3))).sub(&d13.scale(&int(4))))
}

/// Components (1-q)^k x^k / (k (1-q^k)) of the shift [x]_q, for k = 1..=n.
pub fn qtau_components(x: &Rational, q: &QValue, n: usize) -> Vec<Rational> {
    let one_minus_q = Rational::one() - q.value();
    (1..=n as i64)
        .map(|k| rpow(&one_minus_q, k) * rpow(x, k) / (int(k) * (Rational::one() - q.pow(k))))
        .collect()
}

impl TimesPoly {
    /// tau(t + [x]_q), truncated at the arity of tau.
    pub fn qtau_shift(&self, x: &Rational, q: &QValue) -> TimesPoly {
        self.shift(&qtau_components(x, q, self.arity))
    }
}
