//! Plaquette unitaries as projected entangled-pair operators.
//!
//! Row blocks are peeled off top to bottom by QR, with the bond between
//! consecutive blocks attached to their first column; each block is then
//! split left to right. Rows of the triangular factor that vanish are
//! dropped, so product operators give bond dimension 1.

use std::collections::HashMap;

use serde::Serialize;

use super::contract::{contract_all, Labeled};
use crate::circuit::Gate;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::Coord;
use crate::tensor::{qr_split, Tensor};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PepoLeg {
    Out(usize),
    In(usize),
    Bond(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PepoBond {
    pub a: (usize, usize),
    pub b: (usize, usize),
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct PepoGrid {
    pub lp: usize,
    pub d: usize,
    pub anchor: Coord,
    pub sites: Vec<Coord>,
    /// One operator tensor per plaquette site (row-major); legs are labeled.
    pub tensors: Vec<Tensor>,
    pub legs: Vec<Vec<PepoLeg>>,
    pub bonds: Vec<PepoBond>,
}

impl PepoGrid {
    pub fn bond_dims(&self) -> Vec<usize> {
        self.bonds.iter().map(|b| b.dim).collect()
    }

    pub fn max_bond(&self) -> usize {
        self.bonds.iter().map(|b| b.dim).max().unwrap_or(1)
    }

    /// Contracts the grid back to a `d^N x d^N` matrix.
    pub fn recontract(&self) -> Result<Tensor> {
        let items: Vec<Labeled<PepoLeg>> =
            self.tensors.iter().zip(&self.legs).map(|(t, l)| Labeled::new(t.clone(), l.clone())).collect();
        let n = self.sites.len();
        let all = contract_all(Exec::default(), items, usize::MAX)?;
        let mut order: Vec<PepoLeg> = (0..n).map(PepoLeg::Out).collect();
        order.extend((0..n).map(PepoLeg::In));
        let dim = self.d.pow(n as u32);
        all.arranged(&order)?.reshape(vec![dim, dim])
    }
}

/// Whole-state bond-dimension bound `d^(L_p^4)` for plaquette circuits.
pub fn peps_bond_bound(d: usize, lp: usize) -> u128 {
    (d as u128).pow((lp as u32).pow(4))
}

/// Per-gate bond-dimension bound `d^(L_p^2)`.
pub fn pepo_bond_bound(d: usize, lp: usize) -> u128 {
    (d as u128).pow((lp as u32).pow(2))
}

/// QR split that drops vanishing rows of the triangular factor.
fn trimmed_split(t: &Tensor, left: &[usize]) -> Result<(Tensor, Tensor)> {
    let (q, r) = qr_split(t, left)?;
    let k = r.shape()[0];
    let row = r.len() / k.max(1);
    let scale = r.data().iter().map(|x| x.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let keep: Vec<usize> = (0..k)
        .filter(|&i| r.data()[i * row..(i + 1) * row].iter().map(|x| x.norm()).fold(0.0, f64::max) > 1e-14 * scale)
        .collect();
    let keep = if keep.is_empty() { vec![0] } else { keep };
    if keep.len() == k {
        return Ok((q, r));
    }
    let qrank = q.rank();
    let qrows = q.len() / k;
    let mut qd = Vec::with_capacity(qrows * keep.len());
    for i in 0..qrows {
        qd.extend(keep.iter().map(|&c| q.data()[i * k + c]));
    }
    let mut qshape = q.shape().to_vec();
    qshape[qrank - 1] = keep.len();
    let mut rd = Vec::with_capacity(keep.len() * row);
    for &i in &keep {
        rd.extend_from_slice(&r.data()[i * row..(i + 1) * row]);
    }
    let mut rshape = r.shape().to_vec();
    rshape[0] = keep.len();
    Ok((Tensor::new(qshape, qd)?, Tensor::new(rshape, rd)?))
}

/// Decomposes a 2D plaquette gate into an `L_p x L_p` operator grid.
pub fn unitary_to_pepo(gate: &Gate) -> Result<PepoGrid> {
    let sup = gate.support();
    let n = sup.len();
    let lp = (n as f64).sqrt().round() as usize;
    let anchor = sup[0].clone();
    let is_plaquette = lp * lp == n
        && anchor.len() == 2
        && (0..n).all(|t| sup[t] == vec![anchor[0] + t / lp, anchor[1] + t % lp]);
    if !is_plaquette {
        return Err(Error::InvalidArgument(format!("support {sup:?} is not an open 2D plaquette")));
    }
    let d = (gate.dim() as f64).powf(1.0 / n as f64).round() as usize;
    // legs [out_0..out_{n-1}, in_0..in_{n-1}]
    let mut cur = Labeled::new(
        gate.matrix().reshape(vec![d; 2 * n])?,
        (0..n).map(PepoLeg::Out).chain((0..n).map(PepoLeg::In)).collect(),
    );
    let mut next_bond = 0;
    let mut pieces: Vec<(usize, Labeled<PepoLeg>)> = Vec::new();
    let split = |cur: &Labeled<PepoLeg>, left: &[PepoLeg], bond: usize| -> Result<(Labeled<PepoLeg>, Labeled<PepoLeg>)> {
        let pos: Vec<usize> = left.iter().map(|l| cur.labels.iter().position(|x| x == l).expect("leg")).collect();
        let (q, r) = trimmed_split(&cur.tensor, &pos)?;
        let mut ql: Vec<PepoLeg> = left.to_vec();
        ql.push(PepoLeg::Bond(bond));
        let mut rl = vec![PepoLeg::Bond(bond)];
        rl.extend(cur.labels.iter().filter(|l| !left.contains(l)).cloned());
        Ok((Labeled::new(q, ql), Labeled::new(r, rl)))
    };
    // rows, with the vertical bond carried by column 0
    let mut rows: Vec<Labeled<PepoLeg>> = Vec::with_capacity(lp);
    let mut vertical_in: Option<usize> = None;
    for row in 0..lp {
        if row + 1 == lp {
            rows.push(cur.clone());
            break;
        }
        let mut left: Vec<PepoLeg> = (row * lp..(row + 1) * lp).flat_map(|t| [PepoLeg::Out(t), PepoLeg::In(t)]).collect();
        if let Some(b) = vertical_in {
            left.push(PepoLeg::Bond(b));
        }
        let (q, r) = split(&cur, &left, next_bond)?;
        vertical_in = Some(next_bond);
        next_bond += 1;
        rows.push(q);
        cur = r;
    }
    // columns within each row; the first split keeps every vertical bond on
    // column 0
    for (row, block) in rows.into_iter().enumerate() {
        let mut cur = block;
        for col in 0..lp {
            let t = row * lp + col;
            if col + 1 == lp {
                pieces.push((t, cur.clone()));
                break;
            }
            let mut left = vec![PepoLeg::Out(t), PepoLeg::In(t)];
            if col == 0 {
                left.extend(cur.labels.iter().filter(|l| matches!(l, PepoLeg::Bond(_))).cloned());
            } else {
                left.push(PepoLeg::Bond(next_bond - 1));
            }
            let (q, r) = split(&cur, &left, next_bond)?;
            next_bond += 1;
            pieces.push((t, q));
            cur = r;
        }
    }
    pieces.sort_by_key(|p| p.0);
    let mut ends: HashMap<usize, Vec<(usize, usize, usize)>> = HashMap::new();
    for (t, p) in &pieces {
        for (li, l) in p.labels.iter().enumerate() {
            if let PepoLeg::Bond(b) = l {
                ends.entry(*b).or_default().push((*t, li, p.tensor.shape()[li]));
            }
        }
    }
    let mut bonds: Vec<PepoBond> = ends
        .into_values()
        .map(|e| PepoBond { a: (e[0].0, e[0].1), b: (e[1].0, e[1].1), dim: e[0].2 })
        .collect();
    bonds.sort_by_key(|b| (b.a, b.b));
    Ok(PepoGrid {
        lp,
        d,
        anchor,
        sites: sup.to_vec(),
        tensors: pieces.iter().map(|p| p.1.tensor.clone()).collect(),
        legs: pieces.into_iter().map(|p| p.1.labels).collect(),
        bonds,
    })
}
