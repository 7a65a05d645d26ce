//! Isometric tensor-network circuits built from 'L'-shaped unitaries.
//!
//! Corner orthogonality center at the origin (any `q <= 3`; general `s` for
//! `q <= 2`) or, in 2D, a bulk center from which gates spread along the
//! row/column through the center and then through the four quadrants.
//!
//! A bond dimension `D` that is not a power of `d` is treated as
//! `d^ceil(log_d D)`: the smaller bond is a subspace of the qudit register.

use super::{make_gate, GateChoice};
use crate::circuit::{ceil_log, Circuit, CircuitParams, Family, GateKind};
use crate::error::{Error, Result};
use crate::lattice::{Coord, Lattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoOc {
    Corner,
    Bulk(Coord),
}

impl IsoOc {
    pub fn coord(&self, q: usize) -> Coord {
        match self {
            IsoOc::Corner => vec![0; q],
            IsoOc::Bulk(c) => c.clone(),
        }
    }
}

/// Support of the corner-center gate whose `k` leg sits at `(i, j)`:
/// `[k, r_1..r_s, u_1..u_s]` with `r_t = (i, j+t)` and `u_t = (i+t, j+s)`;
/// `u` sites above the lattice are dropped.
pub fn corner_l_support(lattice: &Lattice, i: usize, j: usize, s: usize) -> Vec<Coord> {
    let mut out: Vec<Coord> = (0..=s).map(|t| vec![i, j + t]).collect();
    out.extend((1..=s).map(|t| vec![i + t, j + s]).filter(|c| lattice.contains(c)));
    out
}

fn push_if(lattice: &Lattice, out: &mut Vec<Coord>, i: i64, j: i64) {
    if i >= 0 && j >= 0 {
        let c = vec![i as usize, j as usize];
        if lattice.contains(&c) {
            out.push(c);
        }
    }
}

/// Support of a bulk-center gate with `k` at `(i, j)` relative to the center
/// `(i0, j0)`.
pub fn bulk_support(lattice: &Lattice, oc: &[usize], i: usize, j: usize, s: usize) -> (Vec<Coord>, GateKind) {
    let (i0, j0) = (oc[0] as i64, oc[1] as i64);
    let (i, j, s) = (i as i64, j as i64, s as i64);
    let si = (i - i0).signum();
    let sj = (j - j0).signum();
    let mut out = Vec::new();
    push_if(lattice, &mut out, i, j);
    let kind = match (si, sj) {
        (0, 0) => {
            for t in 1..=s {
                push_if(lattice, &mut out, i, j + t);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i, j - t);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i + t, j);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i - t, j);
            }
            GateKind::Custom
        }
        (0, sj) => {
            for t in 1..=s {
                push_if(lattice, &mut out, i, j + sj * t);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i + t, j + sj * s);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i - t, j + sj * s);
            }
            GateKind::Custom
        }
        (si, 0) => {
            for t in 1..=s {
                push_if(lattice, &mut out, i + si * t, j);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i, j + t);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i, j - t);
            }
            GateKind::Custom
        }
        (si, sj) => {
            for t in 1..=s {
                push_if(lattice, &mut out, i, j + sj * t);
            }
            for t in 1..=s {
                push_if(lattice, &mut out, i + si * t, j + sj * s);
            }
            GateKind::LShaped
        }
    };
    (out, kind)
}

/// Support of the `s = 1` gate in `q` dimensions:
/// `x, x + e_q, x + e_{q-1} + e_q, ..., x + e_1 + ... + e_q`.
pub fn staircase_support(lattice: &Lattice, x: &[usize]) -> Vec<Coord> {
    let q = x.len();
    let mut out = vec![x.to_vec()];
    let mut c = x.to_vec();
    for axis in (0..q).rev() {
        c[axis] += 1;
        if lattice.contains(&c) {
            out.push(c.clone());
        }
    }
    out
}

/// Anchors `(k-site positions)` of the isoTNS circuit in gate order.
pub fn isotns_anchors(lattice: &Lattice, s: usize, oc: &IsoOc) -> Result<Vec<Coord>> {
    let q = lattice.q();
    let last = *lattice.dims.last().expect("q >= 1");
    if last <= s {
        return Err(Error::InvalidArgument(format!(
            "lattice {:?} too small for bond register of {s} qudits",
            lattice.dims
        )));
    }
    match oc {
        IsoOc::Corner => {
            let mut a: Vec<Coord> = lattice.sites().filter(|c| c[q - 1] + s < last).collect();
            a.sort_by_key(|c| (c.iter().sum::<usize>(), c.clone()));
            Ok(a)
        }
        IsoOc::Bulk(c) => {
            if q != 2 {
                return Err(Error::Unsupported("bulk orthogonality center is implemented for 2D lattices".into()));
            }
            lattice.check(c)?;
            let m = lattice.dims[1];
            if c[1] < s || c[1] + s >= m {
                return Err(Error::OutOfLattice(format!(
                    "bulk center column {} must lie in [{s}, {}]",
                    c[1],
                    m - 1 - s
                )));
            }
            let mut a: Vec<Coord> = lattice.sites().filter(|x| x[1] >= s && x[1] + s < m).collect();
            a.sort_by_key(|x| (x[0].abs_diff(c[0]) + x[1].abs_diff(c[1]), x.clone()));
            Ok(a)
        }
    }
}

/// Supports of every gate, in gate order, with their kinds.
pub fn isotns_supports(lattice: &Lattice, s: usize, oc: &IsoOc) -> Result<Vec<(Coord, Vec<Coord>, GateKind)>> {
    let q = lattice.q();
    let anchors = isotns_anchors(lattice, s, oc)?;
    if q == 3 && s != 1 {
        return Err(Error::Unsupported("3D isoTNS circuits are implemented for s = 1".into()));
    }
    Ok(anchors
        .into_iter()
        .map(|a| {
            let (sup, kind) = match (q, oc) {
                (1, _) => ((0..=s).map(|t| vec![a[0] + t]).collect(), GateKind::Custom),
                (2, IsoOc::Corner) => (corner_l_support(lattice, a[0], a[1], s), GateKind::LShaped),
                (2, IsoOc::Bulk(c)) => bulk_support(lattice, c, a[0], a[1], s),
                _ => (staircase_support(lattice, &a), GateKind::Custom),
            };
            (a, sup, kind)
        })
        .collect())
}

/// isoTNS circuit with bond dimension `bond_dim` (`s = ceil(log_d D)` qudits
/// per bond).
pub fn build_isotns_circuit(lattice: &Lattice, bond_dim: usize, oc: IsoOc, gates: GateChoice<'_>) -> Result<Circuit> {
    if bond_dim < 2 {
        return Err(Error::InvalidArgument("isoTNS bond dimension must be at least 2".into()));
    }
    let s = ceil_log(bond_dim, lattice.d);
    let params = CircuitParams { bond_dim: Some(bond_dim), oc: Some(oc.coord(lattice.q())), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::Isotns, params);
    for (a, sup, kind) in isotns_supports(lattice, s, &oc)? {
        c.push(make_gate(&gates, sup, kind, a, lattice.d)?)?;
    }
    Ok(c)
}
