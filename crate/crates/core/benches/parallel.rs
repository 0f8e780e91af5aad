use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use theta_quartic::chars::enumerate_aronhold_brute;
use theta_quartic::pipeline::{run, PipelineConfig};
use theta_quartic::random::random_tau;
use theta_quartic::verify::check_all;
use theta_quartic::{AronholdSystem, Exec, ThetaTable, TruncationPolicy};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn theta_table(c: &mut Criterion) {
    let pol = TruncationPolicy::default();
    let tau = random_tau(1, &pol).unwrap();
    let mut group = c.benchmark_group("theta_table");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| ThetaTable::new_with(black_box(&tau), &pol, exec).unwrap())
        });
    }
    group.finish();
}

fn aronhold_brute(c: &mut Criterion) {
    let mut group = c.benchmark_group("aronhold_brute_force");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| enumerate_aronhold_brute(black_box(exec)))
        });
    }
    group.finish();
}

fn bitangency(c: &mut Criterion) {
    let pol = TruncationPolicy::default();
    let tau = random_tau(2, &pol).unwrap();
    let out = run(&tau, &AronholdSystem::reference(), &PipelineConfig::default()).unwrap();
    let lines: Vec<_> = out.bitangents.iter().map(|b| b.line).collect();
    let mut group = c.benchmark_group("check_all_28");
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| check_all(black_box(&out.quartic), &lines, 1e-6, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, theta_table, aronhold_brute, bitangency);
criterion_main!(benches);
