use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};

use toricsim::entropy::{setting_purity, Moments};
use toricsim::lattice::surface_code;
use toricsim::logical::{Basis, Decoder};
use toricsim::mitigation::{ibu_unfold_with, IbuOptions, ResponseMatrix};
use toricsim::noise::ReadoutModel;
use toricsim::sim::dense::DenseState;
use toricsim::sim::{run, InitialState};
use toricsim::{Backend, Circuit, Gate, ProbDist};

fn random_clifford(n: usize, depth: usize, seed: u64) -> Circuit {
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let mut c = Circuit::new(n);
    for _ in 0..depth {
        let mut free: Vec<usize> = (0..n).collect();
        let mut layer = Vec::new();
        while free.len() >= 2 {
            let a = free.swap_remove(rng.random_range(0..free.len()));
            if rng.random_bool(0.5) {
                let b = free.swap_remove(rng.random_range(0..free.len()));
                layer.push(Gate::cnot(a, b));
            } else {
                layer.push(match rng.random_range(0..3) {
                    0 => Gate::h(a),
                    1 => Gate::s(a),
                    _ => Gate::x(a),
                });
            }
        }
        c.push_layer(layer).unwrap();
    }
    c
}

fn tableau(c: &mut Criterion) {
    let circ = random_clifford(33, 100, 1);
    c.bench_function("tableau_33q_depth100", |b| {
        b.iter(|| run(black_box(&circ), Backend::Tableau, &InitialState::Zeros).unwrap())
    });
}

fn dense(c: &mut Criterion) {
    let mut g = c.benchmark_group("dense_kernels");
    for n in [12usize, 18] {
        let h = [
            [C64::new(0.5f64.sqrt(), 0.0), C64::new(0.5f64.sqrt(), 0.0)],
            [C64::new(0.5f64.sqrt(), 0.0), C64::new(-(0.5f64.sqrt()), 0.0)],
        ];
        g.bench_with_input(BenchmarkId::new("apply_1q", n), &n, |b, &n| {
            let mut s = DenseState::new(n).unwrap();
            b.iter(|| s.apply_1q(n / 2, &h))
        });
        g.bench_with_input(BenchmarkId::new("cz", n), &n, |b, &n| {
            let mut s = DenseState::new(n).unwrap();
            b.iter(|| s.cz(0, n - 1))
        });
    }
    g.finish();
}

fn ibu(c: &mut Criterion) {
    let mut g = c.benchmark_group("ibu_50_iterations");
    g.sample_size(10);
    for k in [6usize, 9] {
        let model = ReadoutModel::new(0.019, 0.05).unwrap();
        let r = ResponseMatrix::from_model(&model, k).unwrap();
        let dim = 1usize << k;
        let mut rng = rand::rngs::StdRng::seed_from_u64(k as u64);
        let raw: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let measured = ProbDist::from_dense(&probs, Some(10_000));
        for cov in [false, true] {
            if cov && k > 6 {
                continue;
            }
            let opts = IbuOptions {
                iterations: 50,
                tol: None,
                propagate_covariance: cov,
            };
            let id = format!("k{k}{}", if cov { "_cov" } else { "" });
            g.bench_function(id, |b| {
                b.iter(|| ibu_unfold_with(black_box(&measured), &r, &opts).unwrap())
            });
        }
    }
    g.finish();
}

fn purity(c: &mut Criterion) {
    let mut g = c.benchmark_group("purity_kernel");
    for k in [4usize, 6, 9] {
        let dim = 1usize << k;
        let p: Vec<f64> = (0..dim).map(|i| (i % 7 + 1) as f64).collect();
        let total: f64 = p.iter().sum();
        let p: Vec<f64> = p.iter().map(|x| x / total).collect();
        g.bench_with_input(BenchmarkId::from_parameter(k), &p, |b, p| {
            b.iter(|| setting_purity(black_box(p), &Moments::Multinomial(10_000)).unwrap())
        });
    }
    g.finish();
}

fn decoder(c: &mut Criterion) {
    let mut g = c.benchmark_group("decoder");
    for d in [3usize, 5] {
        let l = surface_code(d).unwrap();
        let dec = Decoder::new(&l, Basis::Z).unwrap();
        let n = l.qubit_count;
        let mut rng = rand::rngs::StdRng::seed_from_u64(d as u64);
        let shots: Vec<u64> = (0..256).map(|_| rng.random::<u64>() & ((1 << n) - 1)).collect();
        g.bench_with_input(BenchmarkId::new("decode_256_shots", d), &shots, |b, shots| {
            b.iter(|| shots.iter().map(|&s| dec.decode(s).logical_value as i64).sum::<i64>())
        });
    }
    g.bench_function("build_d5", |b| {
        let l = surface_code(5).unwrap();
        b.iter(|| Decoder::new(black_box(&l), Basis::X).unwrap())
    });
    g.finish();
}

criterion_group!(benches, tableau, dense, ibu, purity, decoder);
criterion_main!(benches);
