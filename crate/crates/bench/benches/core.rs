use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use fcmp_core::crosscal::CrossCalibState;
use fcmp_core::harness::{Experiment, TestSpec};
use fcmp_core::likelihood::{derivative_verdict, LikelihoodState, VerdictParams, DEFAULT_LAMBDA};
use fcmp_core::strategy::{absolutely_continuous_pair, example_b1_pair, iid_strategy};
use fcmp_core::{sample_path, Expert, Nature};

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("sample_path");
    let (m0, m1) = example_b1_pair();
    let (i0, i1) = (iid_strategy(0.3).unwrap(), iid_strategy(0.7).unwrap());
    let nature = Nature::Expert(Expert::Zero);
    for horizon in [200usize, 2000] {
        g.bench_with_input(BenchmarkId::new("iid", horizon), &horizon, |b, &h| {
            b.iter(|| sample_path(&*i0, &*i1, &nature, h, black_box(7)).unwrap())
        });
        // mixtures carry posterior weights through the cursor
        g.bench_with_input(BenchmarkId::new("mixture", horizon), &horizon, |b, &h| {
            b.iter(|| sample_path(&*m0, &*m1, &nature, h, black_box(7)).unwrap())
        });
    }
    g.finish();
}

fn mixture_forecast(c: &mut Criterion) {
    let (f0, f1) = absolutely_continuous_pair();
    let path = sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 2000, 3).unwrap();
    let mut g = c.benchmark_group("mixture_forecast");
    g.bench_function("cursor_2000", |b| {
        b.iter(|| {
            let mut cur = f0.cursor();
            for n in 0..path.len() {
                black_box(cur.next_forecast(path.prefix(n)).unwrap());
            }
        })
    });
    g.bench_function("stateless_200", |b| {
        b.iter(|| {
            for n in 0..200 {
                black_box(f0.forecast(path.prefix(n)).unwrap());
            }
        })
    });
    g.finish();
}

fn likelihood(c: &mut Criterion) {
    let (f0, f1) = (iid_strategy(0.3).unwrap(), iid_strategy(0.7).unwrap());
    let path = sample_path(&*f0, &*f1, &Nature::Expert(Expert::One), 2000, 5).unwrap();
    let params = VerdictParams::new(path.len(), DEFAULT_LAMBDA, 1000).unwrap();
    c.bench_function("likelihood_update_2000", |b| {
        b.iter(|| {
            let state = LikelihoodState::from_path(black_box(path.entries()), 1000);
            derivative_verdict(&state, &params).unwrap()
        })
    });
}

fn cross_calibration(c: &mut Criterion) {
    let (f0, f1) = absolutely_continuous_pair();
    let path = sample_path(&*f0, &*f1, &Nature::Expert(Expert::Zero), 2000, 9).unwrap();
    let mut g = c.benchmark_group("cross_calibration");
    for n in [5u32, 20] {
        g.bench_with_input(BenchmarkId::new("from_path_2000", n), &n, |b, &n| {
            b.iter(|| CrossCalibState::from_path(black_box(path.entries()), n).unwrap())
        });
    }
    g.finish();
}

fn experiment(c: &mut Criterion) {
    let (f0, f1) = example_b1_pair();
    let mut g = c.benchmark_group("experiment");
    g.sample_size(10);
    g.bench_function("b1_pair_h200_1000_trials", |b| {
        b.iter_batched(
            || {
                Experiment::new(f0.clone(), f1.clone(), Nature::Expert(Expert::Zero), 200, 1000, 1)
                    .unwrap()
                    .with_tests(vec![TestSpec::derivative(), TestSpec::cross_calibration()])
            },
            |exp| exp.run(None).unwrap(),
            BatchSize::SmallInput,
        )
    });
    g.finish();
}

criterion_group!(benches, sampling, mixture_forecast, likelihood, cross_calibration, experiment);
criterion_main!(benches);
