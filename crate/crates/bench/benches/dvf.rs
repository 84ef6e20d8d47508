use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use cstrap::dvf::{deformed, DvfKind, DvfSpec};
use cstrap::qalgebra::rat;
use cstrap::rootdata::{AlgebraId, VacuumSpec};
use cstrap::strapgraph::build_strap_for;
use cstrap::tableaux::enumerate_column;
use cstrap::verify::{check_dvf, CheckMode, VerifyConfig};
use cstrap_bench::{c3_context, c3_dvfs};

fn enumeration(c: &mut Criterion) {
    c.bench_function("enumerate col:6 C(3)", |b| {
        b.iter(|| enumerate_column(black_box(3), 6))
    });
    c.bench_function("deformed C(3) c=7/2", |b| {
        b.iter(|| deformed(3, black_box(&rat(7, 2))))
    });
}

fn pole_checks(c: &mut Criterion) {
    let ctx = c3_context();
    let cfg = VerifyConfig::new(1, 5);
    let mut g = c.benchmark_group("exact pole check");
    g.sample_size(10);
    for (name, _, e) in c3_dvfs() {
        g.bench_function(&name, |b| {
            b.iter(|| check_dvf(&name, &e, &ctx, &[], &cfg, CheckMode::ExactRatio))
        });
    }
    g.finish();
    let (_, _, t2) = &c3_dvfs()[1];
    let mut g = c.benchmark_group("numeric pole check");
    g.sample_size(10);
    g.bench_function("col:2", |b| {
        b.iter(|| check_dvf("col:2", t2, &ctx, &[], &cfg, CheckMode::NumericTotal))
    });
    g.finish();
}

fn straps(c: &mut Criterion) {
    let cfg = VerifyConfig::new(1, 5);
    let spec = DvfSpec::new(AlgebraId::C(3), DvfKind::Column(2), VacuumSpec::Trivial);
    let mut g = c.benchmark_group("strap");
    g.sample_size(10);
    g.bench_function("col:2 C(3)", |b| b.iter(|| build_strap_for(&spec, &cfg)));
    g.finish();
}

criterion_group!(benches, enumeration, pole_checks, straps);
criterion_main!(benches);
