//! Sequentially generated states: one MPS per row `i` (running along axis 1),
//! coupled by unitaries `V_[i,j]` acting on sites `(i..i+L_p-1, j)`.
//!
//! Each MPS is prepared by a staircase of gates `W_{i,j}` on
//! `(i, j..j+L_p-1)`; the `L_p - 1` sites after `j` hold the bond. All `W`
//! gates come first (site `j` outer), then the `V` gates (`i` outer).

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, CircuitParams, Family, Gate, GateKind};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Coord, Lattice};
use crate::linalg::{self, ONE, ZERO};
use crate::rng::derive_seed;
use crate::statevector::StateVector;
use crate::tensor::{random_unitary, Tensor};

const CANON_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct SgsSpec {
    pub d: usize,
    pub lp: usize,
    /// `mps[i][j]` has shape `(D_{j-1}, d, D_j)` and is right-canonical.
    pub mps: Vec<Vec<Tensor>>,
    /// `v[i][j]` acts on `(i..i+L_p-1, j)`, `i <= n - L_p`.
    pub v: Vec<Vec<Tensor>>,
}

/// Bond dimensions `D_0..D_{m-2}` of a length-`m` row.
pub fn bond_dims(m: usize, d: usize, lp: usize) -> Vec<usize> {
    (0..m.saturating_sub(1))
        .map(|j| d.pow((lp as u32 - 1).min(j as u32 + 1).min((m - 1 - j) as u32)))
        .collect()
}

fn left_right(m: usize, d: usize, lp: usize, j: usize) -> (usize, usize) {
    let b = bond_dims(m, d, lp);
    let l = if j == 0 { 1 } else { b[j - 1] };
    let r = if j + 1 == m { 1 } else { b[j] };
    (l, r)
}

impl SgsSpec {
    pub fn rows(&self) -> usize {
        self.mps.len()
    }

    pub fn cols(&self) -> usize {
        self.mps.first().map_or(0, Vec::len)
    }

    pub fn lattice(&self) -> Result<Lattice> {
        Lattice::open(&[self.rows(), self.cols()], self.d)
    }

    /// Product rows and identity couplings.
    pub fn trivial(n: usize, m: usize, d: usize, lp: usize) -> Result<Self> {
        check_shape(n, m, d, lp)?;
        let mut a = Tensor::zeros(vec![1, d, 1]);
        a.data_mut()[0] = ONE;
        let dim = d.pow(lp as u32);
        Ok(Self {
            d,
            lp,
            mps: vec![vec![a; m]; n],
            v: vec![vec![Tensor::identity(dim); m]; n + 1 - lp],
        })
    }

    /// Seeded Haar-random right-canonical rows and couplings, with maximal
    /// bond dimensions.
    pub fn random(n: usize, m: usize, d: usize, lp: usize, seed: u64) -> Result<Self> {
        check_shape(n, m, d, lp)?;
        let mut mps = Vec::with_capacity(n);
        for i in 0..n {
            let mut row = Vec::with_capacity(m);
            for j in 0..m {
                let (dl, dr) = left_right(m, d, lp, j);
                let u = random_unitary(d * dr, derive_seed(seed, &[0, i as u64, j as u64]))?;
                let data = u.data()[..dl * d * dr].to_vec();
                row.push(Tensor::new(vec![dl, d, dr], data)?);
            }
            mps.push(row);
        }
        let dim = d.pow(lp as u32);
        let v = (0..=n - lp)
            .map(|i| {
                (0..m)
                    .map(|j| random_unitary(dim, derive_seed(seed, &[1, i as u64, j as u64])))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { d, lp, mps, v })
    }

    pub fn validate(&self) -> Result<()> {
        let (n, m, d, lp) = (self.rows(), self.cols(), self.d, self.lp);
        check_shape(n, m, d, lp)?;
        let max_bond = d.pow(lp as u32 - 1);
        for (i, row) in self.mps.iter().enumerate() {
            if row.len() != m {
                return Err(Error::DimensionMismatch(format!("row {i} has {} tensors, expected {m}", row.len())));
            }
            for (j, a) in row.iter().enumerate() {
                let sh = a.shape();
                let ok = sh.len() == 3
                    && sh[1] == d
                    && sh[0] <= max_bond
                    && sh[2] <= max_bond
                    && (j > 0 || sh[0] == 1)
                    && (j + 1 < m || sh[2] == 1)
                    && (j == 0 || row[j - 1].shape()[2] == sh[0]);
                if !ok {
                    return Err(Error::DimensionMismatch(format!("MPS tensor ({i}, {j}) has shape {sh:?}")));
                }
                let (dl, dr) = (sh[0], sh[2]);
                if dl > d * dr {
                    return Err(Error::NotIsometric { residual: f64::INFINITY, tol: CANON_TOL });
                }
                let rows = a.data();
                let g = linalg::matmul(Exec::Sequential, rows, dl, d * dr, &linalg::adjoint(rows, dl, d * dr), dl);
                let residual = linalg::identity_residual(&g, dl);
                if residual > CANON_TOL {
                    return Err(Error::NotIsometric { residual, tol: CANON_TOL });
                }
            }
        }
        if self.v.len() != n + 1 - lp {
            return Err(Error::DimensionMismatch(format!("expected {} rows of couplings", n + 1 - lp)));
        }
        let dim = d.pow(lp as u32);
        for row in &self.v {
            if row.len() != m {
                return Err(Error::DimensionMismatch("coupling row has the wrong length".into()));
            }
            for u in row {
                if u.shape() != [dim, dim] {
                    return Err(Error::DimensionMismatch(format!("coupling of shape {:?}", u.shape())));
                }
                let residual = linalg::unitarity_residual(u.data(), dim);
                if residual > crate::circuit::UNITARY_TOL {
                    return Err(Error::NotUnitary { residual, tol: crate::circuit::UNITARY_TOL });
                }
            }
        }
        Ok(())
    }

    /// Support and unitary of the staircase gate `W_{i,j}`.
    pub fn w_gate(&self, i: usize, j: usize) -> Result<(Vec<Coord>, Tensor)> {
        let (d, lp, m) = (self.d, self.lp, self.cols());
        let a = &self.mps[i][j];
        let (dl, dr) = (a.shape()[0], a.shape()[2]);
        let k = lp.min(m - j);
        let support: Vec<Coord> = (0..k).map(|t| vec![i, j + t]).collect();
        let dim = d.pow(k as u32);
        let fresh = usize::from(j + lp <= m);
        let out_reg = d.pow(k as u32 - 1);
        // given columns alpha -> a[alpha, s, beta] at row s * out_reg + beta
        let mut cols = vec![ZERO; dim * dl];
        for alpha in 0..dl {
            for s in 0..d {
                for beta in 0..dr {
                    cols[(s * out_reg + beta) * dl + alpha] = a.get(&[alpha, s, beta]);
                }
            }
        }
        let step = d.pow(fresh as u32);
        let at: Vec<usize> = (0..dl).map(|alpha| alpha * step).collect();
        let u = linalg::complete_to_unitary_at(&cols, dim, &at);
        Ok((support, Tensor::new(vec![dim, dim], u)?))
    }

    pub fn v_support(&self, i: usize, j: usize) -> Vec<Coord> {
        (0..self.lp).map(|t| vec![i + t, j]).collect()
    }
}

fn check_shape(n: usize, m: usize, d: usize, lp: usize) -> Result<()> {
    if lp < 2 || n < lp || m < 1 || d < 2 {
        return Err(Error::InvalidArgument(format!(
            "SGS needs L_p >= 2 and at least L_p rows (got {n}x{m}, L_p = {lp}, d = {d})"
        )));
    }
    Ok(())
}

pub fn build_sgs(spec: &SgsSpec, lattice: &Lattice) -> Result<Circuit> {
    spec.validate()?;
    if lattice.dims != [spec.rows(), spec.cols()] || lattice.d != spec.d {
        return Err(Error::DimensionMismatch(format!(
            "SGS of {}x{} (d = {}) on lattice {:?} (d = {})",
            spec.rows(),
            spec.cols(),
            spec.d,
            lattice.dims,
            lattice.d
        )));
    }
    let (n, m, d, lp) = (spec.rows(), spec.cols(), spec.d, spec.lp);
    let params = CircuitParams { lp: Some(lp), bond_dim: Some(d.pow(lp as u32 - 1)), ..Default::default() };
    let mut c = Circuit::new(lattice.clone(), Family::Sgs, params);
    for j in 0..m {
        for i in 0..n {
            let (sup, u) = spec.w_gate(i, j)?;
            c.push(Gate::new(u, sup, GateKind::Custom, vec![i, j], d)?)?;
        }
    }
    for i in 0..=n - lp {
        for j in 0..m {
            c.push(Gate::new(spec.v[i][j].clone(), spec.v_support(i, j), GateKind::Custom, vec![i, j], d)?)?;
        }
    }
    Ok(c)
}

/// The state evaluated directly: contract every row MPS, take the tensor
/// product of rows, then apply the couplings.
pub fn direct_state(spec: &SgsSpec) -> Result<StateVector> {
    spec.validate()?;
    let lattice = spec.lattice()?;
    let (n, m, d) = (spec.rows(), spec.cols(), spec.d);
    let mut amps = vec![ONE];
    for row in &spec.mps {
        // vec over (s_0..s_j, right bond)
        let mut cur = vec![ONE];
        let mut left = 1;
        for a in row {
            let dr = a.shape()[2];
            let mut next = vec![ZERO; cur.len() / left * d * dr];
            let prefixes = cur.len() / left;
            for p in 0..prefixes {
                for l in 0..left {
                    let c = cur[p * left + l];
                    if c == ZERO {
                        continue;
                    }
                    for s in 0..d {
                        for r in 0..dr {
                            next[(p * d + s) * dr + r] += c * a.get(&[l, s, r]);
                        }
                    }
                }
            }
            cur = next;
            left = dr;
        }
        amps = linalg_outer(&amps, &cur);
    }
    let mut psi = StateVector::from_amplitudes(&lattice, lattice.sites().collect(), amps)?;
    for i in 0..=n - spec.lp {
        for j in 0..m {
            psi.apply_matrix(Exec::default(), spec.v[i][j].data(), &spec.v_support(i, j))?;
        }
    }
    Ok(psi)
}

fn linalg_outer(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}
