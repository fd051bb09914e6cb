use countnet_core::entropy::{
    bivariate_joint_entropy_exact, conditional_mutual_information_poisson, gaussian_cmi,
    joint_entropy_approx, mutual_information_poisson, poisson_entropy, TruncationPolicy,
};
use countnet_core::linalg::SquareMatrix;
use countnet_core::rates::RateMatrix;
use countnet_core::sim::{simulate, Adjacency, SimConfig};
use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

fn entropy_benches(c: &mut Criterion) {
    let policy = TruncationPolicy::default();

    c.bench_function("poisson_entropy lambda=1", |b| {
        b.iter(|| poisson_entropy(black_box(1.0), &policy).unwrap())
    });

    c.bench_function("joint_exact (0.5,0.5,0.1)", |b| {
        b.iter(|| bivariate_joint_entropy_exact(0.5, 0.5, black_box(0.1), &policy).unwrap())
    });

    let pair = RateMatrix::from_entries(2, |i, j| if i == j { 0.5 } else { 0.1 }).unwrap();
    c.bench_function("joint_approx (0.5,0.5,0.1)", |b| {
        b.iter(|| joint_entropy_approx(black_box(&pair), &[0, 1], &policy).unwrap())
    });

    let wide = RateMatrix::from_entries(20, |i, j| if i == j { 0.8 } else { 0.01 }).unwrap();
    let subset: Vec<usize> = (0..20).collect();
    c.bench_function("joint_approx 20 variables", |b| {
        b.iter(|| joint_entropy_approx(black_box(&wide), &subset, &policy).unwrap())
    });

    c.bench_function("mutual_information_poisson", |b| {
        b.iter(|| mutual_information_poisson(0.9, 0.9, black_box(0.1), &policy).unwrap())
    });
}

fn cmi_benches(c: &mut Criterion) {
    let policy = TruncationPolicy::default();
    let mut adj = Adjacency::undirected(5);
    adj.add_edge(0, 1).unwrap();
    adj.add_edge(1, 2).unwrap();
    let cfg = SimConfig::new(5, 1000, 0.0, 1).unwrap();
    let counts = simulate(&cfg, &adj).unwrap();

    c.bench_function("poisson CMI |S|=0 t=1000", |b| {
        b.iter(|| {
            conditional_mutual_information_poisson(0, 1, black_box(&[]), &counts, &policy).unwrap()
        })
    });
    c.bench_function("poisson CMI |S|=2 t=1000", |b| {
        b.iter(|| {
            conditional_mutual_information_poisson(0, 1, black_box(&[2, 3]), &counts, &policy)
                .unwrap()
        })
    });

    let cov = SquareMatrix::from_fn(5, |i, j| if i == j { 2.5 } else { 0.4 });
    c.bench_function("gaussian CMI |S|=2", |b| {
        b.iter(|| gaussian_cmi(0, 1, black_box(&[2, 3]), &cov).unwrap())
    });
}

criterion_group!(benches, entropy_benches, cmi_benches);
criterion_main!(benches);
