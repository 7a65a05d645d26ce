use num_complex::Complex64 as C64;
use ppeps::families::{build_rppeps, ghz_chain_circuit, GateChoice};
use ppeps::lattice::Lattice;
use ppeps::lightcone::*;
use ppeps::schedule::{brickwall_min_sweeps_for_overlap, Preferred};
use ppeps::statevector::{expectation, ops, simulate, Observable};
use ppeps::tensor::random_unitary;
use ppeps::Exec;

fn rp(n: usize, lp: usize, seed: u64) -> ppeps::circuit::Circuit {
    // the 5x5 full-simulation oracle needs 2^25 amplitudes
    ppeps::statevector::set_memory_cap(Some(1 << 25));
    let l = Lattice::open(&[n, n], 2).unwrap();
    build_rppeps(&l, lp, &[0, 0], &Preferred::default_for(2), GateChoice::Seed(seed)).unwrap()
}

#[test]
fn source_observable_cancels_most_gates() {
    let c = rp(5, 2, 21);
    let z = Observable::new(ops::z(2), vec![vec![0, 0]]);
    let (v, rep) = expectation_via_lightcone(Exec::default(), &c, &z).unwrap();
    let full = expectation(&simulate(&c).unwrap(), &z).unwrap();
    assert!((v - full).norm() <= 1e-10);
    assert_eq!(rep.total_gates, 16);
    assert!(rep.cost_ratio < 0.5, "{}", rep.cost_ratio);
    assert_eq!(rep.surviving, vec![0]);
}

#[test]
fn preferred_line_through_source() {
    let c = rp(5, 2, 5);
    let psi = simulate(&c).unwrap();
    for i in 0..5 {
        let z = Observable::new(ops::z(2), vec![vec![i, 0]]);
        let (v, rep) = expectation_via_lightcone(Exec::default(), &c, &z).unwrap();
        assert!((v - expectation(&psi, &z).unwrap()).norm() <= 1e-10);
        assert!(rep.cost_ratio < 1.0);
    }
}

#[test]
fn random_local_observables_match() {
    for seed in 0..12u64 {
        let c = rp(4, 2 + (seed % 2) as usize, seed);
        let psi = simulate(&c).unwrap();
        let site = vec![(seed as usize * 3) % 4, (seed as usize * 5 + 1) % 4];
        let h = random_unitary(2, 100 + seed).unwrap();
        let herm = ppeps::tensor::Tensor::from_fn(vec![2, 2], |i| {
            h.get(&[i[0], i[1]]) + h.get(&[i[1], i[0]]).conj()
        });
        let o = Observable::new(herm, vec![site]);
        let (v, _) = expectation_via_lightcone(Exec::Sequential, &c, &o).unwrap();
        assert!((v - expectation(&psi, &o).unwrap()).norm() <= 1e-10);
    }
}

#[test]
fn product_circuit_uses_one_gate() {
    let l = Lattice::open(&[4, 4], 2).unwrap();
    let c = brickwall_circuit(&l, 2, 1, 3).unwrap();
    assert_eq!(c.gates.len(), 4);
    let z = Observable::new(ops::z(2), vec![vec![3, 2]]);
    let (v, rep) = expectation_via_lightcone(Exec::default(), &c, &z).unwrap();
    assert_eq!(rep.surviving, vec![3]);
    assert_eq!(rep.reduced_support.len(), 4);
    assert!((v - expectation(&simulate(&c).unwrap(), &z).unwrap()).norm() <= 1e-12);
}

#[test]
fn cancellation_is_monotone() {
    let c = rp(5, 2, 1);
    let small = cancellation(&c, &[vec![1, 1]]);
    let big = cancellation(&c, &[vec![1, 1], vec![3, 2]]);
    assert!(small.surviving.iter().all(|g| big.surviving.contains(g)));
}

#[test]
fn ghz_ends_fully_correlated() {
    let c = ghz_chain_circuit(12).unwrap();
    let z = ops::z(2);
    let rows = correlation_scan(Exec::default(), &c, &z, &z, &[(vec![0], vec![11]), (vec![3], vec![7])]).unwrap();
    for r in &rows {
        assert!((r.value - C64::new(1.0, 0.0)).norm() <= 1e-10);
    }
    assert_eq!(rows[0].distance, 11);
    let csv = correlations_csv(&rows);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("site_a,site_b,distance,re,im"));
    assert!(lines.next().unwrap().starts_with("0,11,11,"));
}

#[test]
fn disjoint_tiles_are_uncorrelated() {
    let l = Lattice::open(&[4, 4], 2).unwrap();
    let c = brickwall_circuit(&l, 2, 1, 8).unwrap();
    let z = ops::z(2);
    let x = ops::x(2);
    let rows = correlation_scan(Exec::default(), &c, &z, &x, &[(vec![0, 0], vec![3, 3]), (vec![1, 1], vec![2, 2])]).unwrap();
    assert!(rows.iter().all(|r| r.value.norm() <= 1e-12));
    let same_tile = correlation_scan(Exec::default(), &c, &z, &z, &[(vec![0, 0], vec![1, 1])]).unwrap();
    assert!(same_tile[0].value.norm() > 1e-6);
}

#[test]
fn sequential_chain_correlates_ends() {
    let l = Lattice::open(&[8], 2).unwrap();
    let c = build_rppeps(&l, 2, &[0], &Preferred::default_for(1), GateChoice::Seed(2)).unwrap();
    let rows = correlation_scan(Exec::default(), &c, &ops::z(2), &ops::z(2), &[(vec![0], vec![7])]).unwrap();
    assert!(rows[0].value.norm() > 0.0);
}

#[test]
fn brickwall_budget_leaves_ends_uncorrelated() {
    let l = Lattice::open(&[12], 2).unwrap();
    let c = brickwall_circuit(&l, 2, 2, 4).unwrap();
    assert_eq!(c.gates.len(), 11);
    let rows = correlation_scan(Exec::default(), &c, &ops::z(2), &ops::z(2), &[(vec![0], vec![11])]).unwrap();
    assert!(rows[0].value.norm() <= 1e-12);
}

#[test]
fn comparison_counts() {
    let r = brickwall_comparison(&Lattice::open(&[12], 2).unwrap(), 2).unwrap();
    assert_eq!(r.sequential_gates, 11);
    assert_eq!(r.brickwall_min_sweeps, brickwall_min_sweeps_for_overlap(12, 2, 100).unwrap());
    assert!(r.brickwall_min_sweeps.unwrap() >= 3);
    let r = brickwall_comparison(&Lattice::open(&[10, 10], 2).unwrap(), 2).unwrap();
    assert_eq!(r.sequential_gates, 81);
    let r = brickwall_comparison(&Lattice::open(&[1, 1], 2).unwrap(), 2).unwrap();
    assert_eq!((r.sequential_gates, r.brickwall_gates), (0, Some(0)));
}

#[test]
fn comparison_scaling() {
    for dims in [vec![vec![12], vec![24], vec![48]], vec![vec![6, 6], vec![10, 10], vec![14, 14]]] {
        let reps: Vec<_> =
            dims.iter().map(|d| brickwall_comparison(&Lattice::open(d, 2).unwrap(), 2).unwrap()).collect();
        for r in &reps {
            assert!(r.sequential_per_site <= 1.0);
            let b = r.brickwall_per_site_side.unwrap();
            assert!(b > 0.05 && b <= 2.0, "{b}");
        }
        let excess: Vec<f64> =
            reps.iter().map(|r| r.brickwall_gates.unwrap() as f64 / r.sequential_gates as f64).collect();
        assert!(excess.windows(2).all(|w| w[1] > w[0]), "{excess:?}");
        assert!(excess[2] > 1.0);
    }
}
