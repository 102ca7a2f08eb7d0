use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::{parse_terms, render_term, Coeff, ParseCoeff};
use crate::error::{Error, Result};
use crate::exactnum::{int, Rational};

/// The generator g(i, k): the k-th x-derivative of the unknown u_i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Gen {
    pub index: u32,
    pub deriv: u32,
}

impl Gen {
    pub fn new(index: u32, deriv: u32) -> Self {
        assert!(index >= 2, "generator indices start at 2");
        Gen { index, deriv }
    }

    fn render(&self) -> String {
        if self.deriv == 0 {
            format!("u{}", self.index)
        } else {
            format!("u{}_x{}", self.index, self.deriv)
        }
    }

    fn parse(name: &str) -> Option<Gen> {
        let rest = name.strip_prefix('u')?;
        let (i, k) = match rest.split_once("_x") {
            Some((i, k)) => (i.parse().ok()?, k.parse().ok()?),
            None => (rest.parse().ok()?, 0),
        };
        (i >= 2).then_some(Gen { index: i, deriv: k })
    }
}

/// A monomial: generators with positive exponents, sorted by generator.
pub type Monomial = Vec<(Gen, u32)>;

fn mono_mul(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0, a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// A differential polynomial with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DPoly {
    pub fn gen(index: u32, deriv: u32) -> Self {
        let mut p = DPoly::default();
        p.add_term(vec![(Gen::new(index, deriv), 1)], Rational::one());
        p
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        use std::collections::btree_map::Entry;
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Every generator index that occurs.
    pub fn generators(&self) -> Vec<Gen> {
        let mut g: Vec<Gen> = self.terms.keys().flat_map(|m| m.iter().map(|(g, _)| *g)).collect();
        g.sort();
        g.dedup();
        g
    }

    /// Applies a derivation given by its value on each generator.
    pub fn apply_derivation(&self, mut image: impl FnMut(Gen) -> Result<DPoly>) -> Result<DPoly> {
        let mut out = DPoly::default();
        for (m, c) in &self.terms {
            for (pos, (g, e)) in m.iter().enumerate() {
                let dg = image(*g)?;
                if dg.is_zero() {
                    continue;
                }
                let mut rest: Monomial = m.clone();
                if *e == 1 {
                    rest.remove(pos);
                } else {
                    rest[pos].1 -= 1;
                }
                let factor = c * int(*e as i64);
                for (dm, dc) in &dg.terms {
                    out.add_term(mono_mul(&rest, dm), &factor * dc);
                }
            }
        }
        Ok(out)
    }
}

impl Coeff for DPoly {
    fn zero() -> Self {
        DPoly::default()
    }

    fn constant(c: Rational) -> Self {
        let mut p = DPoly::default();
        p.add_term(Vec::new(), c);
        p
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    fn mul(&self, other: &Self) -> Self {
        let mut out = DPoly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(mono_mul(m1, m2), c1 * c2);
            }
        }
        out
    }

    fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return DPoly::default();
        }
        DPoly {
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    fn ddx(&self) -> Self {
        self.apply_derivation(|g| Ok(DPoly::gen(g.index, g.deriv + 1)))
            .expect("x-derivative is total")
    }

    fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let factors: Vec<String> = m
                .iter()
                .map(|(g, e)| {
                    if *e == 1 {
                        g.render()
                    } else {
                        format!("{}^{e}", g.render())
                    }
                })
                .collect();
            render_term(c, &factors.join("*"), i == 0, &mut out);
        }
        out
    }
}

impl ParseCoeff for DPoly {
    fn parse(text: &str) -> Result<Self> {
        let mut out = DPoly::default();
        for t in parse_terms(text)? {
            let mut m: Monomial = Vec::new();
            for (name, pow, col) in t.factors {
                let g = Gen::parse(&name).ok_or_else(|| Error::Parse {
                    column: col,
                    message: format!("unknown generator `{name}`; expected u<i> or u<i>_x<k> with i >= 2"),
                })?;
                if pow < 0 {
                    return Err(Error::Parse {
                        column: col,
                        message: "negative power of a generator".into(),
                    });
                }
                if pow > 0 {
                    m = mono_mul(&m, &vec![(g, pow as u32)]);
                }
            }
            out.add_term(m, t.coeff);
        }
        Ok(out)
    }
}

impl fmt::Display for DPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// A time derivation on differential polynomials, given by its value on each
/// undifferentiated generator. Images of x-derivatives of generators are
/// derived on demand and cached.
#[derive(Clone, Debug, Default)]
pub struct FlowDerivation {
    table: HashMap<u32, DPoly>,
    cache: HashMap<Gen, DPoly>,
}

impl FlowDerivation {
    pub fn new(table: HashMap<u32, DPoly>) -> Self {
        FlowDerivation {
            table,
            cache: HashMap::new(),
        }
    }

    pub fn covers(&self, index: u32) -> bool {
        self.table.contains_key(&index)
    }

    fn image(&mut self, g: Gen) -> Result<DPoly> {
        if let Some(p) = self.cache.get(&g) {
            return Ok(p.clone());
        }
        let base = self.table.get(&g.index).ok_or(Error::MissingGenerator(g.index))?;
        let p = if g.deriv == 0 {
            base.clone()
        } else {
            self.image(Gen {
                index: g.index,
                deriv: g.deriv - 1,
            })?
            .ddx()
        };
        self.cache.insert(g, p.clone());
        Ok(p)
    }

    pub fn apply(&mut self, p: &DPoly) -> Result<DPoly> {
        p.apply_derivation(|g| self.image(g))
    }
}
