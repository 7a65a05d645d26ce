//! F-PEPS: the corner 'L' circuit wound into a helix, so that the gate at the
//! end of a row also reaches the first sites of the next row. The circuit is
//! fully sequential.

use super::{make_gate, GateChoice};
use crate::circuit::{ceil_log, Circuit, CircuitParams, Family, GateKind};
use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice};

/// Support of the helix gate at row-major index `t`: `t, t+1, ..., t+s`, then
/// `t+s+k*m` for `k = 1..s`; indices past the last site are dropped.
pub fn helix_support(lattice: &Lattice, t: usize, s: usize) -> Vec<Coord> {
    let n = lattice.num_sites();
    let m = lattice.dims[1];
    (0..=s)
        .map(|u| t + u)
        .chain((1..=s).map(|k| t + s + k * m))
        .filter(|&x| x < n)
        .map(|x| lattice.coord(x))
        .collect()
}

pub fn build_fpeps_circuit(lattice: &Lattice, bond_dim: usize, gates: GateChoice<'_>) -> Result<Circuit> {
    if lattice.q() != 2 {
        return Err(Error::Unsupported("F-PEPS circuits are built on 2D lattices".into()));
    }
    if bond_dim < 2 {
        return Err(Error::InvalidArgument("F-PEPS bond dimension must be at least 2".into()));
    }
    let s = ceil_log(bond_dim, lattice.d);
    if lattice.dims[1] <= s {
        return Err(Error::InvalidArgument(format!(
            "rows of length {} cannot carry a bond register of {s} qudits",
            lattice.dims[1]
        )));
    }
    let params = CircuitParams { bond_dim: Some(bond_dim), oc: Some(vec![0, 0]), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::FPeps, params);
    for t in 0..lattice.num_sites() {
        let sup = helix_support(lattice, t, s);
        let kind = if sup.len() == 2 * s + 1 && t % lattice.dims[1] + s < lattice.dims[1] { GateKind::LShaped } else { GateKind::Custom };
        c.push(make_gate(&gates, sup, kind, lattice.coord(t), lattice.d)?)?;
    }
    Ok(c)
}
