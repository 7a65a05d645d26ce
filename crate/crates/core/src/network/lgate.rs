//! 'L'-shaped gates and the isoTNS site tensors they define.
//!
//! A gate on `[k, r_1..r_s, u_1..u_s]` (the `r` sites in a straight line
//! from `k`, the `u` sites in a perpendicular line from `r_s`) maps inputs
//! `(l, b, 0)` to outputs `(k, r, u)`, where `l` is the input on
//! `k, r_1..r_{s-1}`, `b` the input on `r_s, u_1..u_{s-1}`, and `u_s` starts
//! in `|0>`. The site tensor is `B[k, l, u, r, b] = U[(k, r, u), (l, b, 0)]`.

use crate::circuit::{Gate, GateKind, UNITARY_TOL};
use crate::error::{Error, Result};
use crate::lattice::Coord;
use crate::linalg;
use crate::tensor::{isometry_residual, Tensor};

/// Leg positions of the site tensor.
pub const K: usize = 0;
pub const L: usize = 1;
pub const U: usize = 2;
pub const R: usize = 3;
pub const B: usize = 4;

const SWAP_LR: [usize; 5] = [0, 3, 2, 1, 4];

fn unit_step(a: &[usize], b: &[usize]) -> Option<Vec<i64>> {
    let v: Vec<i64> = a.iter().zip(b).map(|(&x, &y)| y as i64 - x as i64).collect();
    let nonzero: Vec<&i64> = v.iter().filter(|x| **x != 0).collect();
    (nonzero.len() == 1 && nonzero[0].abs() == 1).then_some(v)
}

/// Arm length `s` if the support has the 'L' shape.
pub fn l_shape_arm(support: &[Coord]) -> Result<usize> {
    let n = support.len();
    let bad = || Error::InvalidArgument(format!("support {support:?} is not 'L'-shaped"));
    if n < 3 || n.is_multiple_of(2) {
        return Err(bad());
    }
    let s = (n - 1) / 2;
    let er = unit_step(&support[0], &support[1]).ok_or_else(bad)?;
    let eu = unit_step(&support[s], &support[s + 1]).ok_or_else(bad)?;
    if er.iter().zip(&eu).any(|(a, b)| a * b != 0) {
        return Err(bad());
    }
    let at = |base: &Coord, e: &[i64], t: i64| -> Vec<i64> { base.iter().zip(e).map(|(&x, &y)| x as i64 + t * y).collect() };
    let as_i64 = |c: &Coord| -> Vec<i64> { c.iter().map(|&x| x as i64).collect() };
    for t in 0..=s {
        if as_i64(&support[t]) != at(&support[0], &er, t as i64) {
            return Err(bad());
        }
    }
    for t in 1..=s {
        if as_i64(&support[s + t]) != at(&support[s], &eu, t as i64) {
            return Err(bad());
        }
    }
    Ok(s)
}

fn local_dim(gate_dim: usize, sites: usize) -> usize {
    (gate_dim as f64).powf(1.0 / sites as f64).round() as usize
}

/// Site tensor `B[k, l, u, r, b]` of an 'L' gate.
pub fn tensor_from_lgate(gate: &Gate) -> Result<Tensor> {
    let s = l_shape_arm(gate.support())?;
    let n = 2 * s + 1;
    let d = local_dim(gate.dim(), n);
    let ds = d.pow(s as u32);
    let t = gate.matrix().reshape(vec![d; 2 * n])?.slice(2 * n - 1, 0)?;
    t.reshape(vec![d, ds, ds, ds, ds])?.permute(&SWAP_LR)
}

/// Unitary completion of a site tensor: the gate's `(l, b, 0)` columns are
/// the tensor, and the remaining columns are a fixed orthonormal complement.
pub fn lgate_from_tensor(b: &Tensor, support: Vec<Coord>) -> Result<Gate> {
    let s = l_shape_arm(&support)?;
    let sh = b.shape();
    let d = sh[K];
    let ds = d.pow(s as u32);
    if sh != [d, ds, ds, ds, ds] {
        return Err(Error::DimensionMismatch(format!(
            "site tensor of shape {sh:?} does not fit an 'L' gate with arm {s}"
        )));
    }
    let residual = isometry_residual(b, &[L, B])?;
    if residual > UNITARY_TOL {
        return Err(Error::NotIsometric { residual, tol: UNITARY_TOL });
    }
    let dim = d * ds * ds;
    let cols = b.permute(&SWAP_LR)?.into_data();
    let at: Vec<usize> = (0..ds * ds).map(|c| c * d).collect();
    let u = linalg::complete_to_unitary_at(&cols, dim, &at);
    let pos = support[0].clone();
    Gate::new(Tensor::new(vec![dim, dim], u)?, support, GateKind::LShaped, pos, d)
}
