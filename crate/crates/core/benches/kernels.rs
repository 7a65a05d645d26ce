use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ppeps::families::{build_isotns_circuit, build_rppeps, GateChoice, IsoOc};
use ppeps::lattice::Lattice;
use ppeps::network::{circuit_to_network, contract_network_with};
use ppeps::schedule::Preferred;
use ppeps::statevector::simulate_with;
use ppeps::tensor::{contract_with, random_unitary};
use ppeps::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn simulate(c: &mut Criterion) {
    let mut g = c.benchmark_group("simulate");
    g.sample_size(10);
    for (n, m) in [(3usize, 4usize), (4, 4), (4, 5)] {
        let l = Lattice::open(&[n, m], 2).unwrap();
        let circ = build_rppeps(&l, 2, &[0, 0], &Preferred::default_for(2), GateChoice::Seed(1)).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, format!("{n}x{m}")), &circ, |b, circ| {
                b.iter(|| simulate_with(exec, black_box(circ)).unwrap())
            });
        }
    }
    g.finish();
}

fn matmul(c: &mut Criterion) {
    let mut g = c.benchmark_group("contract");
    for dim in [64usize, 256] {
        let a = random_unitary(dim, 1).unwrap();
        let b = random_unitary(dim, 2).unwrap();
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, dim), &dim, |bch, _| {
                bch.iter(|| contract_with(exec, black_box(&a), black_box(&b), &[(1, 0)]).unwrap())
            });
        }
    }
    g.finish();
}

fn network(c: &mut Criterion) {
    let mut g = c.benchmark_group("contract_network");
    g.sample_size(10);
    let l = Lattice::open(&[4, 4], 2).unwrap();
    let net = circuit_to_network(&build_isotns_circuit(&l, 2, IsoOc::Corner, GateChoice::Seed(3)).unwrap()).unwrap();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new(name, "isotns 4x4"), |b| b.iter(|| contract_network_with(exec, black_box(&net)).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, simulate, matmul, network);
criterion_main!(benches);
