//! Acceptance gate: every criterion runs at its stated size and time budget
//! and prints one PASS/FAIL line. The process exits non-zero if any fails.

use std::process::Command;
use std::time::{Duration, Instant};

use kpsym::coeffring::{jacobi_trudi_21, kp_hirota_residual, schur_p};
use kpsym::correspond::flow_correspondence_check;
use kpsym::exactnum::{
    check_shifted_binomial_identity, int, qexp_coeffs, qexp_coeffs_exponential_form, qexp_recip_coeffs, rat, series_mul,
};
use kpsym::psdo::{dickey_lemma_check, flow_commutativity_check, LaxKP};
use kpsym::qpsdo::{q_dickey_recommended_order, q_dickey_sides};
use kpsym::sample::Sampler;
use kpsym::starcalc::{associativity_check, jacobi_check, sine_jacobi_check, Bracket, BracketKind};
use kpsym::verify::{dressing_round_trip, q_composition_law_grid};
use kpsym::{QValue, Result, StarKind, StarProduct, TimesPoly};

const SEED: u64 = 20240601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn q(n: i64, d: i64) -> QValue {
    QValue::from_ratio(n, d).unwrap()
}

fn binomial_grid() -> Result<Outcome> {
    let mut fails = 0;
    let mut cases = 0;
    for n in -4..=4 {
        for r in -4..=4 {
            for g in 0..=4 {
                for m in 0..=4 {
                    cases += 1;
                    fails += usize::from(!check_shifted_binomial_identity(n, r, g, m));
                }
            }
        }
    }
    Ok(outcome(
        fails == 0 && cases == 2025,
        format!("{cases} cases, {fails} failures"),
    ))
}

fn symbol_associativity() -> Result<Outcome> {
    let mut fails = 0;
    for kappa in [int(1), rat(1, 2)] {
        let mut s = Sampler::new(SEED, "acceptance/assoc");
        for _ in 0..100 {
            let tops = [s.int(0, 3), s.int(0, 3), s.int(0, 3)];
            let [a, b, c] = tops.map(|t| s.operator(t, 6, 3, &kappa));
            let left = a.compose(&b)?.compose(&c)?;
            let right = a.compose(&b.compose(&c)?)?;
            fails += usize::from(!left.eq_mod_tail(&right));
        }
    }
    Ok(outcome(fails == 0, format!("200 triples, {fails} failures")))
}

fn q_composition() -> Result<Outcome> {
    let mut cases = 0;
    for qv in [q(2, 1), q(3, 2)] {
        cases += q_composition_law_grid(&qv)?;
    }
    Ok(outcome(true, format!("{cases} pointwise cases")))
}

fn adjoint() -> Result<Outcome> {
    let mut s = Sampler::new(SEED, "acceptance/adjoint");
    let mut fails = 0;
    for _ in 0..50 {
        let (tp, tq) = (s.int(-1, 2), s.int(-1, 2));
        let p = s.operator(tp, 6, 3, &int(1));
        let r = s.operator(tq, 6, 3, &int(1));
        fails += usize::from(
            !p.compose(&r)?
                .adjoint()
                .eq_mod_tail(&r.adjoint().compose(&p.adjoint())?),
        );
    }
    let qv = q(3, 2);
    for _ in 0..50 {
        let (tp, tq) = (s.int(-1, 2), s.int(-1, 2));
        let p = s.qoperator(tp, 6, 3, &qv);
        let r = s.qoperator(tq, 6, 3, &qv);
        fails += usize::from(
            !p.compose_q(&r)?
                .adjoint_q()
                .eq_mod_tail(&r.adjoint_q().compose_q(&p.adjoint_q())?),
        );
    }
    Ok(outcome(
        fails == 0,
        format!("50 classical + 50 q pairs, {fails} failures"),
    ))
}

fn dickey() -> Result<Outcome> {
    let mut s = Sampler::new(SEED, "acceptance/dickey");
    let mut classical = 0;
    for _ in 0..25 {
        let (tp, tq) = (s.int(0, 2), s.int(0, 2));
        let p = s.operator(tp, 4, 2, &int(1));
        let r = s.operator(tq, 4, 2, &int(1));
        classical += usize::from(!dickey_lemma_check(&p, &r)?);
    }
    let qv = q(3, 2);
    let mut eigen_vs_operator = 0;
    let mut series_vs_eigen = 0;
    for _ in 0..25 {
        let (tp, tq) = (s.int(0, 2), s.int(0, 2));
        let p = s.qoperator(tp, 4, 2, &qv);
        let r = s.qoperator(tq, 4, 2, &qv);
        let rep = q_dickey_sides(&p, &r, q_dickey_recommended_order(&p, &r))?;
        eigen_vs_operator += usize::from(rep.eigen != rep.operator);
        series_vs_eigen += usize::from(rep.eigen.truncate_above(rep.safe_degree) != rep.series);
    }
    let fails = classical + eigen_vs_operator + series_vs_eigen;
    Ok(outcome(
        fails == 0,
        format!(
            "classical {classical} failures; q eigen/operator {eigen_vs_operator}, series/eigen {series_vs_eigen} failures"
        ),
    ))
}

fn brackets_and_q_stars() -> Result<Outcome> {
    let mut s = Sampler::new(SEED, "acceptance/jacobi");
    let moyal = Bracket::new(BracketKind::Moyal, rat(1, 2));
    let mut jac = 0;
    for _ in 0..25 {
        let [f, g, h] = [s.phase_polynomial(3), s.phase_polynomial(3), s.phase_polynomial(3)];
        jac += usize::from(!jacobi_check(&moyal, &f, &g, &h)?);
    }
    let qplane = StarProduct::new(StarKind::QPlane, rat(1, 2), q(3, 2));
    let mut assoc = 0;
    for _ in 0..50 {
        let [f, g, h] = [s.phase_monomial(4), s.phase_monomial(4), s.phase_monomial(4)];
        assoc += usize::from(!associativity_check(&qplane, &f, &g, &h)?);
    }
    let mut sine = 0;
    for _ in 0..25 {
        let [a, b, c] = [s.torus_monomial(3), s.torus_monomial(3), s.torus_monomial(3)];
        sine += usize::from(!sine_jacobi_check(&a, &b, &c, 8)?);
    }
    Ok(outcome(
        jac + assoc + sine == 0,
        format!("Moyal Jacobi {jac}/25, q-plane associativity {assoc}/50, sine Jacobi {sine}/25 failures"),
    ))
}

fn kp_commutativity() -> Result<Outcome> {
    let lax = LaxKP::for_commutativity(2, 3, 6);
    Ok(outcome(
        flow_commutativity_check(&lax, 2, 3, 6)?,
        "[∂2, ∂3] L at depth 6",
    ))
}

fn correspondence() -> Result<Outcome> {
    let mut notes = Vec::new();
    let mut ok = true;
    for m in 1..=3 {
        let rep = flow_correspondence_check(m, 4)?;
        ok &= rep.passed();
        let note = match rep.mismatches().next() {
            None => format!("m={m}: {} coefficients match", rep.rows.len()),
            Some(row) => format!("m={m}: coefficient {} differs", row.index),
        };
        notes.push(note);
    }
    Ok(outcome(ok, notes.join("; ")))
}

fn hirota() -> Result<Outcome> {
    let t1 = TimesPoly::var(1, 3);
    let built = schur_p(2, 3).mul(&schur_p(1, 3)).sub(&schur_p(3, 3));
    // s_(2,1) = t1^3/3 - t3, computed by hand from the Jacobi-Trudi determinant.
    let oracle = t1.pow(3).scale(&rat(1, 3)).sub(&TimesPoly::var(3, 3));
    let taus = [TimesPoly::constant(rat(1, 1), 3), t1, built.clone()];
    let zero = taus
        .iter()
        .map(kp_hirota_residual)
        .collect::<Result<Vec<_>>>()?
        .iter()
        .all(TimesPoly::is_zero);
    let shape = built == oracle && jacobi_trudi_21(3) == oracle;
    Ok(outcome(
        zero && shape,
        format!("residuals zero: {zero}; s_(2,1) matches its closed form: {shape}"),
    ))
}

fn qexp() -> Result<Outcome> {
    let mut ok = true;
    for qv in [q(2, 1), q(3, 2)] {
        ok &= qexp_coeffs(12, &qv) == qexp_coeffs_exponential_form(12, &qv);
        let prod = series_mul(&qexp_coeffs(12, &qv), &qexp_recip_coeffs(12, &qv), 13);
        ok &= prod[0] == int(1) && prod[1..].iter().all(|c| *c == int(0));
    }
    Ok(outcome(ok, "q in {2, 3/2}, order 12"))
}

fn dressing() -> Result<Outcome> {
    let (ok, detail) = dressing_round_trip(SEED, &q(3, 2), 5)?;
    Ok(outcome(ok, detail))
}

fn cli_determinism() -> Result<Outcome> {
    let bin = env!("CARGO_BIN_EXE_kpsym");
    let run = |args: &[&str]| Command::new(bin).args(args).env_clear().output().expect("binary runs");
    let a = run(&["verify", "all", "--seed", "7"]);
    let b = run(&["verify", "all", "--seed", "7"]);
    let same = a.stdout == b.stdout && !a.stdout.is_empty();
    let pass_code = a.status.code() == Some(0) && b.status.code() == Some(0);
    let usage = [
        run(&["verify", "no-such-suite"]),
        run(&["flow", "kp", "4"]),
        run(&["verify", "all", "--depth", "11"]),
        run(&["--bogus"]),
    ]
    .iter()
    .all(|o| o.status.code() == Some(2));
    Ok(outcome(
        same && pass_code && usage,
        format!("byte-identical: {same}; exit 0 on pass: {pass_code}; exit 2 on usage errors: {usage}"),
    ))
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Outcome>);

fn main() {
    let criteria: [Criterion; 12] = [
        (1, "shifted binomial identity on the full grid", 1, binomial_grid),
        (
            2,
            "symbol-product associativity, κ in {1, 1/2}",
            5,
            symbol_associativity,
        ),
        (3, "q-Leibniz composition law pointwise", 2, q_composition),
        (4, "adjoint anti-homomorphism, classical and q", 5, adjoint),
        (5, "classical and q residue lemmas", 10, dickey),
        (
            6,
            "Moyal Jacobi, q-plane associativity, sine Jacobi",
            5,
            brackets_and_q_stars,
        ),
        (7, "KP flow commutativity at depth 6", 30, kp_commutativity),
        (8, "Sato and Moyal flow correspondence", 60, correspondence),
        (9, "Hirota bilinear KP equation", 1, hirota),
        (10, "q-exponential identities", 1, qexp),
        (11, "q-dressing residual and round trip", 5, dressing),
        (12, "CLI determinism and exit codes", 120, cli_determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, body) in criteria {
        let start = Instant::now();
        let result = body();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(budget);
        let (ok, detail) = match result {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        failed += usize::from(!ok);
        println!(
            "{} criterion {id:>2}: {name} ({detail}; {:.3}s of {budget}s)",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 12 criteria passed", 12 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
