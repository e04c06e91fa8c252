use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use topexp::expansion::{alpha_polynomial, build_j, colored_word, genus_oracle, QuadConfig};
use topexp::freemoments::{sd_residual, ExactFreeTrace};
use topexp::ncalg::{cyclic_derivative, nc_derivative, parse_polynomial, Alphabet};
use topexp::rmt::{gue_matrix, hermitian_eigenvalues, stream, MatrixBinding};

fn derivatives(c: &mut Criterion) {
    let p = parse_polynomial("(X1 + X2*X3 - 2*X3^2)^5", Alphabet::new(3, 0)).unwrap();
    c.bench_function("nc_derivative deg10", |b| b.iter(|| nc_derivative(black_box(&p), 2)));
    c.bench_function("cyclic_derivative deg10", |b| b.iter(|| cyclic_derivative(black_box(&p), 3)));
}

fn free_traces(c: &mut Criterion) {
    let tr = ExactFreeTrace::free();
    let q = parse_polynomial("(X1 + X2)^7", Alphabet::new(2, 0)).unwrap();
    c.bench_function("sd_residual (X1+X2)^7", |b| b.iter(|| sd_residual(&tr, black_box(&q), 1).unwrap()));
}

fn oracle(c: &mut Criterion) {
    let mut g = c.benchmark_group("genus_oracle");
    for m in [8usize, 12, 14] {
        let w = colored_word(&vec![1; m]);
        g.bench_with_input(BenchmarkId::from_parameter(m), &w, |b, w| b.iter(|| genus_oracle(w, u32::MAX).unwrap()));
    }
    g.finish();
}

fn expansion(c: &mut Criterion) {
    let mut g = c.benchmark_group("alpha");
    g.sample_size(10);
    let quad = QuadConfig { verify: false, ..QuadConfig::default() };
    let p = parse_polynomial("X1^6", Alphabet::new(1, 0)).unwrap();
    for k in [1usize, 2] {
        g.bench_with_input(BenchmarkId::new("X1^6", k), &k, |b, &k| b.iter(|| alpha_polynomial(&p, k, &MatrixBinding::new(), &quad).unwrap()));
    }
    g.bench_function("build_j 3", |b| b.iter(|| build_j(3, true).unwrap()));
    g.finish();
}

fn sampling(c: &mut Criterion) {
    let mut g = c.benchmark_group("gue");
    for n in [64usize, 256] {
        g.bench_with_input(BenchmarkId::new("sample", n), &n, |b, &n| {
            let mut r = 0u64;
            b.iter(|| {
                r += 1;
                gue_matrix(n, &mut stream(7, r, 0))
            })
        });
        let m = gue_matrix(n, &mut stream(7, 0, 0));
        g.bench_with_input(BenchmarkId::new("eigenvalues", n), &m, |b, m| b.iter(|| hermitian_eigenvalues(m)));
    }
    g.finish();
}

criterion_group!(benches, derivatives, free_traces, oracle, expansion, sampling);
criterion_main!(benches);
