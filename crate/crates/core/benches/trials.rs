use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qfeistel::classical::count_pairs_fs4;
use qfeistel::distinguish::{run_distinguisher, Algorithm, AlgorithmConfig, Budget};
use qfeistel::oracle::{BlockParams, OracleInstance, OracleKind};
use qfeistel::parallel::{map_indexed, Execution};
use qfeistel::seed;

const SCHEDULES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let mut group = c.benchmark_group("distinguisher_runs");
    group.sample_size(10);
    for alg in [Algorithm::Alg1, Algorithm::Alg2, Algorithm::Alg3] {
        let cfg = AlgorithmConfig::new(alg, 6, None, Budget::Queries(21)).unwrap();
        let (kind, params) = alg.scheme(6, cfg.k).unwrap();
        let oracles: Vec<_> = (0..32).map(|s| OracleInstance::build(kind, params, s).unwrap()).collect();
        for (name, exec) in SCHEDULES {
            group.bench_with_input(BenchmarkId::new(alg.name(), name), &exec, |b, &exec| {
                b.iter(|| {
                    map_indexed(exec, oracles.len(), |i| {
                        run_distinguisher(&oracles[i], &cfg, &mut seed::stream(i as u64)).unwrap().label
                    })
                })
            });
        }
    }
    group.finish();
}

fn classical(c: &mut Criterion) {
    let mut group = c.benchmark_group("classical_fs4_n8");
    group.sample_size(10);
    let params = BlockParams::balanced(8, 4).unwrap();
    for (name, exec) in SCHEDULES {
        group.bench_function(name, |b| {
            b.iter(|| {
                map_indexed(exec, 64, |i| {
                    count_pairs_fs4(&OracleInstance::build(OracleKind::Feistel, params, i as u64).unwrap()).unwrap().pairs
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, classical);
criterion_main!(benches);
