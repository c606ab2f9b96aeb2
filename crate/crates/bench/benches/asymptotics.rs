use criterion::{criterion_group, criterion_main, Criterion};
use harmean::asymptotics::{closed_form_moment, spike_prediction, MeanKind, SpectralLaw, TTransform};
use std::hint::black_box;

fn asymptotics(c: &mut Criterion) {
    let law = SpectralLaw::harmonic(0.25, 2).unwrap();
    c.bench_function("cdf_table", |b| b.iter(|| black_box(&law).cdf_table()));
    let cdf = law.cdf_table();
    c.bench_function("cdf_lookup", |b| b.iter(|| cdf.cdf(black_box(0.97))));
    c.bench_function("closed_form_moment_k8", |b| {
        b.iter(|| closed_form_moment(black_box(0.5), black_box(2.5), 8).unwrap())
    });
    let t = TTransform::new(0.25).unwrap();
    c.bench_function("t_transform", |b| b.iter(|| t.t(black_box(2.3)).unwrap()));
    c.bench_function("spike_prediction", |b| {
        b.iter(|| spike_prediction(black_box(1.0), 0.25, MeanKind::Harmonic).unwrap())
    });
}

criterion_group!(benches, asymptotics);
criterion_main!(benches);
