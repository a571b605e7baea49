use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use ice_lab::ice::{ice_payoff_region, is_ice};
use ice_lab::mediated::MediatedMechanism;
use ice_lab::refinement::a_infinity;
use ice_lab::{PunishmentMode, ThreatSpace};
use ice_lab_bench::{chicken_case, cycle, random_case};

const WORST: PunishmentMode = PunishmentMode::WorstInThreats;

fn membership(c: &mut Criterion) {
    let (env, alpha) = random_case(11);
    let all = ThreatSpace::all(&env);
    c.bench_function("is_ice 3x3", |b| b.iter(|| is_ice(black_box(&env), black_box(&alpha), &all, WORST).unwrap()));
    c.bench_function("is_ice 3x3 minimax", |b| {
        b.iter(|| is_ice(black_box(&env), black_box(&alpha), &all, PunishmentMode::Minimax).unwrap())
    });
}

fn operator(c: &mut Criterion) {
    let (env, _) = random_case(12);
    let mut g = c.benchmark_group("a_infinity");
    g.sample_size(10);
    g.bench_function("3x3", |b| b.iter(|| a_infinity(black_box(&env), WORST).unwrap()));
    let cycle = cycle(2);
    g.bench_function("4x4 cycle", |b| b.iter(|| a_infinity(black_box(&cycle), WORST).unwrap()));
    g.finish();
}

fn regions(c: &mut Criterion) {
    let (env, _) = chicken_case();
    let all = ThreatSpace::all(&env);
    c.bench_function("ice region chicken", |b| {
        b.iter(|| ice_payoff_region(black_box(&env), &all, WORST, 16).unwrap())
    });
}

fn mechanism(c: &mut Criterion) {
    let (env, alpha) = chicken_case();
    let all = ThreatSpace::all(&env);
    let theta = is_ice(&env, &alpha, &all, WORST).unwrap().theta(&env).unwrap();
    let mech = MediatedMechanism::build(&env, &alpha, &theta, &all).unwrap();
    c.bench_function("is_nash chicken", |b| b.iter(|| mech.is_nash().unwrap()));
    c.bench_function("simulate 10k", |b| b.iter(|| mech.simulate(black_box(3), 10_000, None).unwrap()));
}

criterion_group!(benches, membership, operator, regions, mechanism);
criterion_main!(benches);
