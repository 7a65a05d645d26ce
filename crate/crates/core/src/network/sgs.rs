//! PEPS form of sequentially generated states.
//!
//! Site `(i, j)` collects the coupling `V_[i,j]` and the staircase gate of
//! row `i + L_p - 1` at `j` (row 0 also takes the staircase gates of rows
//! `0..L_p-1`). The top sites of the last coupling row are split off by QR,
//! one physical site at a time.

use super::{circuit_to_network, ArrowedNetwork, Leg};
use crate::error::Result;
use crate::families::sgs::{build_sgs, SgsSpec};

pub fn sgs_to_network(spec: &SgsSpec) -> Result<ArrowedNetwork> {
    let lattice = spec.lattice()?;
    let circuit = build_sgs(spec, &lattice)?;
    let net = circuit_to_network(&circuit)?;
    let (n, m, lp) = (spec.rows(), spec.cols(), spec.lp);
    let w = |i: usize, j: usize| j * n + i;
    let v = |i: usize, j: usize| n * m + i * m + j;
    let mut groups = Vec::with_capacity((n + 1 - lp) * m);
    for i in 0..=n - lp {
        for j in 0..m {
            let mut members = vec![v(i, j), w(i + lp - 1, j)];
            if i == 0 {
                members.extend((0..lp - 1).map(|x| w(x, j)));
            }
            groups.push((vec![i, j], members));
        }
    }
    let mut net = net.merge_groups(&groups)?;
    let top = n - lp;
    for j in 0..m {
        let t = top * m + j;
        let mut carry: Vec<usize> = Vec::new();
        for row in (top + 1..n).rev() {
            let q = net.split_site(t, &[row, j], &carry, vec![row, j])?;
            carry = net.tensors[q]
                .legs
                .iter()
                .filter_map(|l| match l {
                    Leg::Bond(b) if net.bonds[*b].head.tensor == t => Some(*b),
                    _ => None,
                })
                .collect();
        }
    }
    net.check()?;
    Ok(net)
}
