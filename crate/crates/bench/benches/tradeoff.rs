use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sqkd_bench::random_case;
use sqkd_core::{
    accessible_information, haar_unitary, named_attack, proof_chain, run_suite, verify_tradeoff,
    NamedAttack, OptimizerConfig, Suite,
};

fn bench_haar(c: &mut Criterion) {
    let mut group = c.benchmark_group("haar_unitary");
    for dim in [2usize, 4, 8] {
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            let mut rng = ChaCha8Rng::seed_from_u64(1);
            b.iter(|| haar_unitary(dim, &mut rng));
        });
    }
    group.finish();
}

fn bench_proof_chain(c: &mut Criterion) {
    let mut group = c.benchmark_group("proof_chain");
    for d in [2usize, 3, 4] {
        let (a, e) = random_case(d, 7);
        group.bench_with_input(BenchmarkId::from_parameter(d), &d, |b, _| {
            b.iter(|| proof_chain(&a, &e).unwrap());
        });
    }
    group.finish();
    let (a, e) = random_case(2, 7);
    c.bench_function("verify_tradeoff d=2", |b| {
        b.iter(|| verify_tradeoff(&a, &e).unwrap())
    });
}

fn bench_accessible_information(c: &mut Criterion) {
    let a = named_attack(NamedAttack::PartialForwardCnot(0.6));
    let cfg = OptimizerConfig {
        restarts: 4,
        ..Default::default()
    };
    c.bench_function("accessible_information 4 restarts", |b| {
        b.iter(|| accessible_information(&a, &cfg).unwrap())
    });
}

fn bench_suite(c: &mut Criterion) {
    c.bench_function("theorem suite 100 trials", |b| {
        b.iter(|| run_suite(Suite::Theorem, 100, 1).unwrap())
    });
}

criterion_group!(
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_haar, bench_proof_chain, bench_accessible_information, bench_suite
);
criterion_main!(benches);
