use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use kpsym::correspond::flow_correspondence_check;
use kpsym::exactnum::{int, rat};
use kpsym::psdo::{flow_commutativity_check, LaxKP};
use kpsym::qpsdo::{q_dickey_recommended_order, q_dickey_sides};
use kpsym::sample::Sampler;
use kpsym::{QValue, StarKind, StarProduct};

fn compose(c: &mut Criterion) {
    let mut group = c.benchmark_group("compose");
    for depth in [4u32, 6, 8] {
        let mut s = Sampler::new(1, "bench/compose");
        let a = s.operator(2, depth, 3, &int(1));
        let b = s.operator(2, depth, 3, &int(1));
        group.bench_with_input(BenchmarkId::new("classical", depth), &depth, |bch, _| {
            bch.iter(|| black_box(&a).compose(black_box(&b)).unwrap())
        });
        let q = QValue::from_ratio(3, 2).unwrap();
        let qa = s.qoperator(2, depth, 3, &q);
        let qb = s.qoperator(2, depth, 3, &q);
        group.bench_with_input(BenchmarkId::new("q", depth), &depth, |bch, _| {
            bch.iter(|| black_box(&qa).compose_q(black_box(&qb)).unwrap())
        });
    }
    group.finish();
}

fn stars(c: &mut Criterion) {
    let mut group = c.benchmark_group("star");
    let mut s = Sampler::new(1, "bench/star");
    let f = s.phase_polynomial(4);
    let g = s.phase_polynomial(4);
    for kind in [StarKind::Moyal, StarKind::Circ, StarKind::QPlane, StarKind::QStandard] {
        let star = StarProduct::new(kind, rat(1, 2), QValue::from_ratio(3, 2).unwrap());
        group.bench_function(kind.name(), |b| {
            b.iter(|| star.apply(black_box(&f), black_box(&g)).unwrap())
        });
    }
    group.finish();
}

fn checks(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    group.sample_size(10);
    group.bench_function("kp-commutativity-depth-6", |b| {
        b.iter(|| flow_commutativity_check(&LaxKP::for_commutativity(2, 3, 6), 2, 3, 6).unwrap())
    });
    group.bench_function("flow-correspondence-m3-depth-4", |b| {
        b.iter(|| flow_correspondence_check(3, 4).unwrap())
    });
    let q = QValue::from_ratio(3, 2).unwrap();
    let mut s = Sampler::new(1, "bench/q-dickey");
    let p = s.qoperator(2, 4, 2, &q);
    let r = s.qoperator(2, 4, 2, &q);
    let n = q_dickey_recommended_order(&p, &r);
    group.bench_function("q-residue-lemma", |b| b.iter(|| q_dickey_sides(&p, &r, n).unwrap()));
    group.finish();
}

criterion_group!(benches, compose, stars, checks);
criterion_main!(benches);
