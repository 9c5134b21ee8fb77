use std::sync::Arc;

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use plcontrol::cellulation::build_cellulation;
use plcontrol::contractibility::contractibility_verdict;
use plcontrol::controlled::ControlledFamily;
use plcontrol::fixtures;
use plcontrol::homotopy::{sample_points, Homotopy, PointMap, DEFAULT_SEED};
use plcontrol::metric::{standard_comesh, DistanceOracle, DEFAULT_REFINEMENT};
use plcontrol::verify::{run_verify, VerifyOptions};

fn cellulation(c: &mut Criterion) {
    let k = fixtures::ex44_target();
    let comesh = standard_comesh(&k);
    let mut group = c.benchmark_group("cellulation");
    for div in [2.0, 8.0, 32.0] {
        group.bench_with_input(BenchmarkId::new("build", div), &(comesh / div), |b, &eps| {
            b.iter(|| build_cellulation(k.clone(), black_box(eps)).unwrap())
        });
    }
    let cells = Arc::new(build_cellulation(k.clone(), comesh / 4.0).unwrap());
    let pts = sample_points(&k, 2, 200, DEFAULT_SEED);
    group.bench_function("invert 200 points", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(cells.invert(p).unwrap());
            }
        })
    });
    let h = cells.straightline();
    group.bench_function("h2 at t = 0.5, 200 points", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(h.at(p, 0.5).unwrap());
            }
        })
    });
    group.finish();
}

fn metric(c: &mut Criterion) {
    let k = fixtures::ex44_target();
    c.bench_function("distance oracle build", |b| {
        b.iter(|| DistanceOracle::new(k.clone(), DEFAULT_REFINEMENT).unwrap())
    });
    let oracle = DistanceOracle::new(k.clone(), DEFAULT_REFINEMENT).unwrap();
    let pts = sample_points(&k, 0, 64, DEFAULT_SEED);
    c.bench_function("distance 32 pairs", |b| {
        b.iter(|| {
            for pair in pts.chunks(2) {
                black_box(oracle.distance(&pair[0], &pair[1]).unwrap());
            }
        })
    });
}

fn contractibility(c: &mut Criterion) {
    let k = fixtures::cone_bd2();
    let (sd, _) = k.barycentric_subdivision();
    c.bench_function("verdict on Sd cone BD2", |b| b.iter(|| contractibility_verdict(black_box(&sd))));
}

fn family(c: &mut Criterion) {
    let f = fixtures::ex44_map();
    let fam = ControlledFamily::from_map(f.clone()).unwrap();
    let eps = standard_comesh(f.target()) / 4.0;
    let g = fam.g(eps).unwrap();
    let pts = sample_points(f.target(), 2, 100, DEFAULT_SEED);
    c.bench_function("g_eps on 100 points", |b| {
        b.iter(|| {
            for p in &pts {
                black_box(g.apply(p).unwrap());
            }
        })
    });
    let opts = VerifyOptions { random_samples: 40, bound_samples: 8, ..VerifyOptions::default() };
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    group.bench_function("EX44", |b| b.iter(|| run_verify(f.clone(), &opts).unwrap()));
    group.finish();
}

criterion_group!(benches, cellulation, metric, contractibility, family);
criterion_main!(benches);
