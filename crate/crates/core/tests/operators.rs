use kpsym::exactnum::{int, rat};
use kpsym::qpsdo::dq_pow_apply;
use kpsym::sample::Sampler;
use kpsym::verify::dressing_round_trip;
use kpsym::{Coeff, OperatorSeries, QOperatorSeries, QValue, Rational, SymbolSeries, XLaurent};
use proptest::prelude::*;

/// A finite operator with Laurent coefficients, read as exact to a deep window.
fn finite_op(s: &mut Sampler, top: i64, kappa: &Rational) -> OperatorSeries<XLaurent> {
    let terms: Vec<_> = (-3..=top).map(|i| (i, s.laurent(-3, 3, 3))).collect();
    OperatorSeries::from_terms(top, (top + 4) as u32, terms, kappa.clone())
        .unwrap()
        .map_series(|w| w.extend_exact(-14))
}

/// Σ c_i ∂^i f for a differential operator.
fn apply_differential(op: &OperatorSeries<XLaurent>, f: &XLaurent) -> XLaurent {
    op.series()
        .terms()
        .filter(|(i, _)| *i >= 0)
        .fold(XLaurent::zero(), |acc, (i, c)| acc.add(&c.mul(&f.ddx_n(i as u32))))
}

fn q_apply(op: &QOperatorSeries, f: &XLaurent) -> XLaurent {
    op.series().terms().fold(XLaurent::zero(), |acc, (i, c)| {
        acc.add(&c.mul(&dq_pow_apply(f, i, op.q()).unwrap()))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn differential_composition_acts_by_nesting(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, "nesting");
        let (tp, tq) = (s.int(0, 3), s.int(0, 3));
        let mk = |s: &mut Sampler, t: i64| {
            let terms: Vec<_> = (0..=t).map(|i| (i, s.polynomial(3))).collect();
            OperatorSeries::from_terms(t, (t + 1) as u32, terms, int(1)).unwrap().map_series(|w| w.extend_exact(-8))
        };
        let p = mk(&mut s, tp);
        let q = mk(&mut s, tq);
        let f = s.polynomial(6);
        let composed = p.compose(&q).unwrap();
        prop_assert!(composed.series().terms().all(|(i, c)| i >= 0 || c.is_zero()));
        prop_assert_eq!(apply_differential(&composed, &f), apply_differential(&p, &apply_differential(&q, &f)));
    }

    #[test]
    fn classical_product_is_associative(seed in any::<u64>(), half in any::<bool>()) {
        let kappa = if half { rat(1, 2) } else { int(1) };
        let mut s = Sampler::new(seed, "assoc");
        let [a, b, c] = [0, 1, 2].map(|_| { let t = s.int(-1, 2); s.operator(t, 5, 3, &kappa) });
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(left.eq_mod_tail(&right));
    }

    #[test]
    fn commutator_satisfies_jacobi(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, "jacobi");
        let [a, b, c] = [0, 1, 2].map(|_| { let t = s.int(0, 2); s.operator(t, 5, 2, &int(1)) });
        let ab_c = a.commutator(&b).unwrap().commutator(&c).unwrap();
        let bc_a = b.commutator(&c).unwrap().commutator(&a).unwrap();
        let ca_b = c.commutator(&a).unwrap().commutator(&b).unwrap();
        let sum = ab_c.add(&bc_a).unwrap().add(&ca_b).unwrap();
        prop_assert!(sum.series().terms().all(|(_, c)| c.is_zero()));
    }

    #[test]
    fn adjoint_reverses_products(seed in any::<u64>(), half in any::<bool>()) {
        let kappa = if half { rat(1, 2) } else { int(1) };
        let mut s = Sampler::new(seed, "adjoint");
        let p = finite_op(&mut s, 2, &kappa);
        let q = finite_op(&mut s, 1, &kappa);
        prop_assert!(p.compose(&q).unwrap().adjoint().eq_mod_tail(&q.adjoint().compose(&p.adjoint()).unwrap()));
        prop_assert_eq!(p.adjoint().adjoint(), p);
    }

    #[test]
    fn residue_of_commutator_is_a_total_derivative(seed in any::<u64>()) {
        let mut s = Sampler::new(seed, "residue");
        let (tp, tq) = (s.int(-1, 2), s.int(-1, 2));
        let p = finite_op(&mut s, tp, &int(1));
        let q = finite_op(&mut s, tq, &int(1));
        let res = p.commutator(&q).unwrap().res_partial().unwrap();
        // A total derivative of a Laurent polynomial has no x^-1 term.
        prop_assert!(res.coeff(-1) == int(0));
        prop_assert!(res.integrate().is_ok());
    }

    #[test]
    fn q_product_is_associative(seed in any::<u64>()) {
        let qv = QValue::from_ratio(3, 2).unwrap();
        let mut s = Sampler::new(seed, "qassoc");
        let [a, b, c] = [0, 1, 2].map(|_| { let t = s.int(-1, 2); s.qoperator(t, 4, 2, &qv) });
        let left = a.compose_q(&b).unwrap().compose_q(&c).unwrap();
        let right = a.compose_q(&b.compose_q(&c).unwrap()).unwrap();
        prop_assert!(left.eq_mod_tail(&right));
    }

    #[test]
    fn q_adjoint_reverses_products(seed in any::<u64>()) {
        let qv = QValue::from_ratio(2, 1).unwrap();
        let mut s = Sampler::new(seed, "qadjoint");
        let (tp, tq) = (s.int(-1, 2), s.int(-1, 2));
        let p = s.qoperator(tp, 5, 3, &qv);
        let q = s.qoperator(tq, 5, 3, &qv);
        prop_assert!(p.compose_q(&q).unwrap().adjoint_q().eq_mod_tail(&q.adjoint_q().compose_q(&p.adjoint_q()).unwrap()));
    }

    #[test]
    fn q_differential_composition_acts_by_nesting(seed in any::<u64>()) {
        let qv = QValue::from_ratio(3, 2).unwrap();
        let mut s = Sampler::new(seed, "qnesting");
        let mk = |s: &mut Sampler, t: i64| {
            let terms: Vec<_> = (0..=t).map(|i| (i, s.polynomial(2))).collect();
            QOperatorSeries::from_terms(t, (t + 1) as u32, terms, qv.clone()).unwrap().map_series(|w| w.extend_exact(-8))
        };
        let (tp, tq) = (s.int(0, 2), s.int(0, 2));
        let p = mk(&mut s, tp);
        let q = mk(&mut s, tq);
        let f = s.polynomial(5);
        let composed = p.compose_q(&q).unwrap();
        prop_assert_eq!(q_apply(&composed.map_series(|w| w.plus_part()), &f), q_apply(&p.map_series(|w| w.plus_part()), &q_apply(&q.map_series(|w| w.plus_part()), &f)));
    }

    #[test]
    fn dressing_round_trips(seed in any::<u64>()) {
        let qv = QValue::from_ratio(3, 2).unwrap();
        let (ok, detail) = dressing_round_trip(seed, &qv, 5).unwrap();
        prop_assert!(ok, "{}", detail);
    }
}

#[test]
fn dq_power_composes_additively_off_the_kernel() {
    for qv in [QValue::from_ratio(2, 1).unwrap(), QValue::from_ratio(3, 2).unwrap()] {
        for m in [-2i64, -1, 1, 2] {
            for n in [-2i64, -1, 1, 2] {
                let op = QOperatorSeries::dq_power(m, 1, qv.clone())
                    .compose_q(&QOperatorSeries::dq_power(n, 1, qv.clone()))
                    .unwrap();
                assert_eq!(op.series().terms().filter(|(_, c)| !c.is_zero()).count(), 1);
                assert_eq!(op.series().coeff(m + n), XLaurent::one());
                for j in n.max(0)..=6 {
                    let f = XLaurent::monomial(int(1), j);
                    let nested = dq_pow_apply(&dq_pow_apply(&f, n, &qv).unwrap(), m, &qv).unwrap();
                    assert_eq!(nested, dq_pow_apply(&f, m + n, &qv).unwrap(), "m={m} n={n} j={j}");
                }
            }
        }
    }
}

#[test]
fn windows_follow_the_product_rule() {
    let a: SymbolSeries<XLaurent> = SymbolSeries::monomial(XLaurent::x(), 2, 4);
    let b: SymbolSeries<XLaurent> = SymbolSeries::monomial(XLaurent::one(), 1, 3);
    let p = OperatorSeries::new(a, int(1))
        .compose(&OperatorSeries::new(b, int(1)))
        .unwrap();
    assert_eq!(p.top(), 3);
    // a spans ξ^2..ξ^-1 and b spans ξ^1..ξ^-1: lo = max(-1 + 1, 2 - 1).
    assert_eq!(p.lo(), 1);
}
