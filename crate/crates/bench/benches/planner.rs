use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use uavplan_bench::urban_operating_point;
use uavplan_core::montecarlo::sample_transmit_power;
use uavplan_core::power::{kernel_gamma, kernel_gamma_derivative};
use uavplan_core::{optimal_normalized_altitude, plan_area, BisectionConfig, Preset, QuadratureConfig, SimConfig, Subregion};

fn kernel(c: &mut Criterion) {
    let (env, _, _) = urban_operating_point();
    let quad = QuadratureConfig::default();
    c.bench_function("kernel_gamma", |b| b.iter(|| kernel_gamma(&env, black_box(1.1), &quad).unwrap()));
    c.bench_function("kernel_gamma_derivative", |b| {
        b.iter(|| kernel_gamma_derivative(&env, black_box(1.1), &quad).unwrap())
    });
}

fn altitude(c: &mut Criterion) {
    let quad = QuadratureConfig::default();
    let cfg = BisectionConfig::default();
    let mut group = c.benchmark_group("optimal_normalized_altitude");
    for preset in Preset::ALL {
        let env = uavplan_core::Environment::preset(preset);
        group.bench_function(preset.canonical_name(), |b| {
            b.iter(|| optimal_normalized_altitude(black_box(&env), &cfg, &quad).unwrap())
        });
    }
    group.finish();
}

fn placement(c: &mut Criterion) {
    let (env, _, params) = urban_operating_point();
    let subs: Vec<Subregion> = [0.1, 1.0, 5.0]
        .iter()
        .map(|&d| Subregion::from_area_over_pi_eb(format!("d{d}"), 1.0, 1.0, d, env.clone()).unwrap())
        .collect();
    let (cfg, quad) = (BisectionConfig::default(), QuadratureConfig::default());
    c.bench_function("plan_area/three_urban", |b| b.iter(|| plan_area(black_box(&subs), &params, &cfg, &quad).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let (env, density, params) = urban_operating_point();
    let mut group = c.benchmark_group("sample_transmit_power");
    group.sample_size(10);
    group.bench_function("urban_r31_1000_trials", |b| {
        b.iter_batched(
            || SimConfig::new(1_000, 42),
            |sim| sample_transmit_power(&env, 31.0, density, 35.8, &params, &sim).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(benches, kernel, altitude, placement, monte_carlo);
criterion_main!(benches);
