use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use kacd::alignment::{pseudo_correlation_with, AlignmentOptions};
use kacd::kernels::{Dataset, KernelParams};
use kacd::simdata::{assign_types, forward_sample, random_dag, sample_sem_params, GenConfig, TypeGroup};

fn mixed_dataset(p: usize, n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dag = random_dag(p, 2.0, &mut rng).unwrap();
    let types = assign_types(p, TypeGroup::Group2, (0.15, 0.60), &mut rng).unwrap();
    let cfg = GenConfig::default();
    let params = sample_sem_params(&dag, &types, &cfg, &mut rng).unwrap();
    forward_sample(&dag, &types, &params, n, &mut rng).unwrap()
}

fn bench_pseudo_corr(c: &mut Criterion) {
    let params = KernelParams::new(0.1, 1.0).unwrap();
    let mut group = c.benchmark_group("pseudo_correlation");
    group.sample_size(10);

    for &(p, n) in &[(10usize, 500usize), (10, 1000), (20, 500)] {
        let ds = mixed_dataset(p, n, 42);
        for parallel in [false, true] {
            let label = if parallel { "parallel" } else { "sequential" };
            let opts = AlignmentOptions {
                parallel,
                ..Default::default()
            };
            group.bench_with_input(
                BenchmarkId::new(label, format!("p{p}_n{n}")),
                &ds,
                |b, ds| b.iter(|| pseudo_correlation_with(ds, &params, &opts).unwrap()),
            );
        }
    }
    group.finish();
}

criterion_group!(benches, bench_pseudo_corr);
criterion_main!(benches);
