use criterion::{black_box, criterion_group, criterion_main, Criterion};
use whitham_core::hodograph::{epd_q, DswEvaluator, ZoneSolver};
use whitham_core::whitham::speeds;
use whitham_core::{HastingsMcLeod, InitialProfile, RiemannTriple};
use whitham_bench::triples;

fn whitham_speeds(c: &mut Criterion) {
    let ts = triples(32);
    c.bench_function("speeds x32", |b| {
        b.iter(|| ts.iter().map(|t| speeds(black_box(t)).lambda2()).sum::<f64>())
    });
}

fn hodograph(c: &mut Criterion) {
    let p = InitialProfile::sech2();
    let tr = RiemannTriple::new(-0.1, -0.5, -0.95).unwrap();
    c.bench_function("epd_q", |b| b.iter(|| epd_q(black_box(&tr), &p)));
    let mut g = c.benchmark_group("zone");
    g.sample_size(10);
    g.bench_function("trace t=0.4", |b| b.iter(|| ZoneSolver::new(&p, black_box(0.4)).unwrap()));
    let ev = DswEvaluator::new(&p, 0.4, 1e-2).unwrap();
    let (a, z) = (ev.zone().x_minus(), ev.zone().x_plus());
    let xs: Vec<f64> = (1..100).map(|i| a + (z - a) * i as f64 / 100.0).collect();
    g.bench_function("asymptotic profile x99", |b| b.iter(|| ev.eval_many(black_box(&xs)).unwrap()));
    g.bench_function("hastings-mcleod", |b| b.iter(HastingsMcLeod::standard));
    g.finish();
}

criterion_group!(benches, whitham_speeds, hodograph);
criterion_main!(benches);
