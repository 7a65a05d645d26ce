#![allow(dead_code)]

use ppeps::lattice::Coord;
use ppeps::statevector::{fidelity, StateVector};

pub fn assert_same_state(a: &StateVector, b: &StateVector, tol: f64) {
    let b = b.reorder(a.sites()).expect("same register");
    let f = fidelity(a, &b).unwrap();
    assert!(f >= 1.0 - tol, "fidelity {f}");
}

/// Normalized copy of `s`.
pub fn normalized(s: &StateVector) -> StateVector {
    let n = s.norm();
    let amps = s.amplitudes().iter().map(|a| a / n).collect();
    StateVector::from_amplitudes(s.lattice(), s.sites().to_vec(), amps).unwrap()
}

pub fn row_major(n: usize, m: usize) -> Vec<Coord> {
    (0..n).flat_map(|i| (0..m).map(move |j| vec![i, j])).collect()
}
