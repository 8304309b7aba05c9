use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pag_core::rational::int;
use pag_core::{
    enumerate_equilibria, price_of_anarchy, Country, CountryId, Environment, Execution,
    GridOptions, Relation, UtilityModel,
};

fn env(powers: &[i64], edges: &[(usize, usize, Relation)]) -> Environment {
    Environment::new(
        powers
            .iter()
            .enumerate()
            .map(|(k, &p)| Country::new((k + 1).to_string(), int(p)))
            .collect(),
        edges
            .iter()
            .map(|&(a, b, r)| (CountryId(a), CountryId(b), r)),
    )
    .unwrap()
}

fn instances() -> Vec<(&'static str, Environment)> {
    use Relation::{Adversary as A, Friend as F};
    vec![
        (
            "triangle-3780",
            env(&[8, 6, 1], &[(0, 1, A), (1, 2, F), (0, 2, F)]),
        ),
        (
            "five-countries",
            env(
                &[3, 2, 2, 3, 2],
                &[
                    (0, 1, F),
                    (0, 2, A),
                    (1, 3, A),
                    (2, 4, F),
                    (3, 4, A),
                    (0, 4, F),
                    (1, 2, A),
                ],
            ),
        ),
    ]
}

fn bench_enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_equilibria");
    group.sample_size(10);
    for (name, env) in instances() {
        let model = UtilityModel::default_for(&env);
        for (label, exec) in [
            ("sequential", Execution::Sequential),
            ("parallel", Execution::Parallel),
        ] {
            let options = GridOptions::new(1).with_execution(exec);
            group.bench_with_input(BenchmarkId::new(label, name), &options, |b, options| {
                b.iter(|| enumerate_equilibria(black_box(&env), &model, options).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_poa(c: &mut Criterion) {
    let mut group = c.benchmark_group("price_of_anarchy");
    group.sample_size(10);
    let (name, env) = instances().pop().unwrap();
    let model = UtilityModel::default_for(&env);
    for (label, exec) in [
        ("sequential", Execution::Sequential),
        ("parallel", Execution::Parallel),
    ] {
        let options = GridOptions::new(1).with_execution(exec);
        group.bench_with_input(BenchmarkId::new(label, name), &options, |b, options| {
            b.iter(|| price_of_anarchy(black_box(&env), &model, options).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_enumeration, bench_poa);
criterion_main!(benches);
