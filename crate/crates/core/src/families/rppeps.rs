//! Plaquette circuits: generic orderings, radial orderings, and two
//! closed-form targets (GHZ chain, 2D cluster state).

use num_complex::Complex64 as C64;

use super::{make_gate, GateChoice};
use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind};
use crate::error::Result;
use crate::lattice::{Coord, Lattice};
use crate::linalg::{self, ONE};
use crate::schedule::{radial_ordering, Ordering, Preferred};
use crate::statevector::{ops, StateVector};
use crate::tensor::Tensor;

/// Plaquette circuit in the given order of anchors.
pub fn build_ppeps(lattice: &Lattice, ordering: &Ordering, gates: GateChoice<'_>) -> Result<Circuit> {
    ordering.validate(lattice)?;
    let lp = ordering.plaquette_size;
    let params = CircuitParams {
        lp: Some(lp),
        source: ordering.source.clone(),
        preferred: ordering.preferred.clone(),
        ..Default::default()
    };
    let mut c = Circuit::new(lattice.clone(), Family::PPeps, params);
    for pos in &ordering.positions {
        let sup = lattice.plaquette(pos, lp)?;
        c.push(make_gate(&gates, sup, GateKind::Plaquette, pos.clone(), lattice.d)?)?;
    }
    Ok(c)
}

pub fn build_rppeps(
    lattice: &Lattice,
    lp: usize,
    source: &[usize],
    preferred: &Preferred,
    gates: GateChoice<'_>,
) -> Result<Circuit> {
    let ord = radial_ordering(lattice, lp, source, preferred)?;
    let mut c = build_ppeps(lattice, &ord, gates)?;
    c.family = Family::RpPeps;
    Ok(c)
}

/// Radial `L_p = 2` chain whose first gate is CNOT (H x 1) and the rest
/// CNOTs: prepares `(|0...0> + |1...1>)/sqrt 2`.
pub fn ghz_chain_circuit(n: usize) -> Result<Circuit> {
    let lattice = Lattice::open(&[n], 2)?;
    let first = Tensor::new(
        vec![4, 4],
        linalg::matmul(
            crate::Exec::Sequential,
            ops::cnot().data(),
            4,
            4,
            &linalg::kron(ops::hadamard().data(), 2, &linalg::identity(2), 2),
            4,
        ),
    )?;
    let cnot = ops::cnot();
    let f = move |pos: &[usize], _dim: usize| if pos[0] == 0 { first.clone() } else { cnot.clone() };
    build_rppeps(&lattice, 2, &[0], &Preferred::default_for(1), GateChoice::Custom(&f))
}

/// Cluster state on an open 2D lattice as a radial `L_p = 2` circuit: each
/// plaquette applies H to sites it touches first, then CZ on the lattice edges
/// it is the first to contain.
pub fn cluster_circuit(lattice: &Lattice, source: &[usize]) -> Result<Circuit> {
    let ord = radial_ordering(lattice, 2, source, &Preferred::default_for(lattice.q()))?;
    let mut seen_site = std::collections::HashSet::new();
    let mut seen_edge = std::collections::HashSet::new();
    let params = CircuitParams { lp: Some(2), source: Some(source.to_vec()), preferred: ord.preferred.clone(), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::RpPeps, params);
    for pos in &ord.positions {
        let sup = lattice.plaquette(pos, 2)?;
        let k = sup.len();
        let dim = 1usize << k;
        let mut h = vec![ONE];
        let mut hd = 1;
        for s in &sup {
            let m = if seen_site.insert(s.clone()) { ops::hadamard().into_data() } else { linalg::identity(2) };
            h = linalg::kron(&h, hd, &m, 2);
            hd *= 2;
        }
        let mut phase = vec![ONE; dim];
        for a in 0..k {
            for b in a + 1..k {
                let dist: usize = sup[a].iter().zip(&sup[b]).map(|(x, y)| x.abs_diff(*y)).sum();
                if dist == 1 && seen_edge.insert((sup[a].clone(), sup[b].clone())) {
                    for (x, p) in phase.iter_mut().enumerate() {
                        if (x >> (k - 1 - a)) & 1 == 1 && (x >> (k - 1 - b)) & 1 == 1 {
                            *p = -*p;
                        }
                    }
                }
            }
        }
        for (r, p) in phase.iter().enumerate() {
            for col in 0..dim {
                h[r * dim + col] *= p;
            }
        }
        let g = Gate::new(Tensor::new(vec![dim, dim], h)?, sup, GateKind::Plaquette, pos.clone(), 2)?;
        c.push(g)?;
    }
    Ok(c)
}

/// `psi(x) = (-1)^{sum_<ab> x_a x_b} / 2^{N/2}` over nearest-neighbour edges.
pub fn cluster_state_oracle(lattice: &Lattice) -> Result<StateVector> {
    let sites: Vec<Coord> = lattice.sites().collect();
    let n = sites.len();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let dist: usize = sites[a].iter().zip(&sites[b]).map(|(x, y)| x.abs_diff(*y)).sum();
            if dist == 1 {
                edges.push((n - 1 - a, n - 1 - b));
            }
        }
    }
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let amps: Vec<C64> = (0..1usize << n)
        .map(|x| {
            let parity = edges.iter().filter(|&&(a, b)| (x >> a) & 1 == 1 && (x >> b) & 1 == 1).count();
            if parity % 2 == 0 { C64::new(amp, 0.0) } else { C64::new(-amp, 0.0) }
        })
        .collect();
    StateVector::from_amplitudes(lattice, sites, amps)
}
