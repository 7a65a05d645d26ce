//! Exact dense statevector simulation.
//!
//! Amplitude index convention: the register's first site is the most
//! significant digit of a mixed-radix (base `d`) index. For a full lattice the
//! register is every site in row-major order, so site `(0, ..., 0)` is most
//! significant.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

use num_complex::Complex64 as C64;

use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::lattice::{Coord, Lattice};
use crate::linalg::{self, ONE, ZERO};
use crate::tensor::Tensor;

/// Environment variable overriding the amplitude cap.
pub const MEMORY_CAP_ENV: &str = "PPEPS_MAX_AMPLITUDES";
pub const DEFAULT_MEMORY_CAP: usize = 1 << 24;

static CAP_OVERRIDE: AtomicUsize = AtomicUsize::new(0);

/// Sets the amplitude cap for this process, taking precedence over the
/// environment; `None` restores the environment/default lookup.
pub fn set_memory_cap(cap: Option<usize>) {
    CAP_OVERRIDE.store(cap.unwrap_or(0), AtomicOrdering::Relaxed);
}

pub fn memory_cap() -> usize {
    let o = CAP_OVERRIDE.load(AtomicOrdering::Relaxed);
    if o > 0 {
        return o;
    }
    std::env::var(MEMORY_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MEMORY_CAP)
}

/// `d^n` as an amplitude count, failing past the cap.
pub fn checked_dim(d: usize, n: usize) -> Result<usize> {
    let cap = memory_cap();
    let mut req: u128 = 1;
    for _ in 0..n {
        req = req.saturating_mul(d as u128);
    }
    if req > cap as u128 {
        return Err(Error::MemoryCap { required: req, cap });
    }
    Ok(req as usize)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    lattice: Lattice,
    sites: Vec<Coord>,
    amps: Vec<C64>,
}

/// A Hermitian (or general) operator on an ordered list of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    pub matrix: Tensor,
    pub support: Vec<Coord>,
}

impl Observable {
    pub fn new(matrix: Tensor, support: Vec<Coord>) -> Self {
        Self { matrix, support }
    }

    /// Tensor product of single-site operators.
    pub fn product(ops: &[(&Tensor, Coord)]) -> Self {
        let mut m = vec![ONE];
        let mut n = 1;
        for (op, _) in ops {
            let k = op.shape()[0];
            m = linalg::kron(&m, n, op.data(), k);
            n *= k;
        }
        let matrix = Tensor::new(vec![n, n], m).expect("square kron");
        Self { matrix, support: ops.iter().map(|(_, c)| c.clone()).collect() }
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.matrix.shape()[0];
        let a = linalg::adjoint(self.matrix.data(), n, n);
        a.iter().zip(self.matrix.data()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Pauli and qudit clock/shift operators used throughout tests and reports.
pub mod ops {
    use super::*;

    pub fn z(d: usize) -> Tensor {
        let w = 2.0 * std::f64::consts::PI / d as f64;
        Tensor::from_fn(vec![d, d], |i| if i[0] == i[1] { C64::from_polar(1.0, w * i[0] as f64) } else { ZERO })
    }

    pub fn x(d: usize) -> Tensor {
        Tensor::from_fn(vec![d, d], |i| if i[0] == (i[1] + 1) % d { ONE } else { ZERO })
    }

    pub fn hadamard() -> Tensor {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Tensor::new(vec![2, 2], vec![C64::new(s, 0.0), C64::new(s, 0.0), C64::new(s, 0.0), C64::new(-s, 0.0)])
            .expect("2x2")
    }

    pub fn cz() -> Tensor {
        Tensor::from_fn(vec![4, 4], |i| match (i[0], i[1]) {
            (3, 3) => -ONE,
            (a, b) if a == b => ONE,
            _ => ZERO,
        })
    }

    pub fn cnot() -> Tensor {
        let perm = [0, 1, 3, 2];
        Tensor::from_fn(vec![4, 4], |i| if perm[i[1]] == i[0] { ONE } else { ZERO })
    }
}

impl StateVector {
    /// `|0...0>` on every lattice site.
    pub fn zero(lattice: &Lattice) -> Result<Self> {
        Self::zero_on(lattice, lattice.sites().collect())
    }

    /// `|0...0>` on a sub-register of the lattice.
    pub fn zero_on(lattice: &Lattice, sites: Vec<Coord>) -> Result<Self> {
        let dim = checked_dim(lattice.d, sites.len())?;
        for s in &sites {
            lattice.check(s)?;
        }
        let mut amps = vec![ZERO; dim];
        amps[0] = ONE;
        Ok(Self { lattice: lattice.clone(), sites, amps })
    }

    pub fn from_amplitudes(lattice: &Lattice, sites: Vec<Coord>, amps: Vec<C64>) -> Result<Self> {
        let dim = checked_dim(lattice.d, sites.len())?;
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} sites of dimension {}",
                amps.len(),
                sites.len(),
                lattice.d
            )));
        }
        Ok(Self { lattice: lattice.clone(), sites, amps })
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn sites(&self) -> &[Coord] {
        &self.sites
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn d(&self) -> usize {
        self.lattice.d
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn positions(&self, support: &[Coord]) -> Result<Vec<usize>> {
        let map: HashMap<&[usize], usize> = self.sites.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        support
            .iter()
            .map(|s| {
                map.get(s.as_slice())
                    .copied()
                    .ok_or_else(|| Error::OutOfLattice(format!("site {s:?} is not in the register")))
            })
            .collect()
    }

    /// Applies a `d^k x d^k` matrix to the listed sites (first most significant).
    pub fn apply_matrix(&mut self, exec: Exec, matrix: &[C64], support: &[Coord]) -> Result<()> {
        let d = self.d();
        let k = support.len();
        let dk = d.pow(k as u32);
        if matrix.len() != dk * dk {
            return Err(Error::DimensionMismatch(format!(
                "matrix of {} entries on {k} sites of dimension {d}",
                matrix.len()
            )));
        }
        let pos = self.positions(support)?;
        let n = self.sites.len();
        let strides: Vec<usize> = pos.iter().map(|&p| d.pow((n - 1 - p) as u32)).collect();
        // offsets[j]: amplitude offset of the support configuration j
        let offsets: Vec<usize> = (0..dk)
            .map(|j| {
                let mut r = j;
                let mut off = 0;
                for t in (0..k).rev() {
                    off += (r % d) * strides[t];
                    r /= d;
                }
                off
            })
            .collect();
        let src = &self.amps;
        let mut out = vec![ZERO; src.len()];
        exec.fill(&mut out, |i| {
            let mut row = 0;
            for &s in &strides {
                row = row * d + (i / s) % d;
            }
            let base = i - offsets[row];
            let urow = &matrix[row * dk..(row + 1) * dk];
            let mut acc = ZERO;
            for (j, &u) in urow.iter().enumerate() {
                if u != ZERO {
                    acc += u * src[base + offsets[j]];
                }
            }
            acc
        });
        self.amps = out;
        Ok(())
    }

    pub fn apply_gate(&mut self, exec: Exec, gate: &Gate) -> Result<()> {
        self.apply_matrix(exec, gate.matrix().data(), gate.support())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.amps.len() != other.amps.len() || self.sites != other.sites {
            return Err(Error::DimensionMismatch("states live on different registers".into()));
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Same state with the register reordered to `sites`.
    pub fn reorder(&self, sites: &[Coord]) -> Result<StateVector> {
        if sites.len() != self.sites.len() {
            return Err(Error::DimensionMismatch("reorder needs a permutation of the register".into()));
        }
        let pos = self.positions(sites)?;
        let d = self.d();
        let n = sites.len();
        let strides: Vec<usize> = pos.iter().map(|&p| d.pow((n - 1 - p) as u32)).collect();
        let mut out = vec![ZERO; self.amps.len()];
        for (i, o) in out.iter_mut().enumerate() {
            let mut r = i;
            let mut src = 0;
            for t in (0..n).rev() {
                src += (r % d) * strides[t];
                r /= d;
            }
            *o = self.amps[src];
        }
        Ok(StateVector { lattice: self.lattice.clone(), sites: sites.to_vec(), amps: out })
    }

    /// Unnormalized projection of `sites` onto `|0>`, removing them from the
    /// register.
    pub fn project_zero(&self, sites: &[Coord]) -> Result<StateVector> {
        let proj = self.positions(sites)?;
        let keep: Vec<usize> = (0..self.sites.len()).filter(|p| !proj.contains(p)).collect();
        let mut order: Vec<Coord> = keep.iter().map(|&p| self.sites[p].clone()).collect();
        order.extend(sites.iter().cloned());
        let r = self.reorder(&order)?;
        let tail = self.d().pow(sites.len() as u32);
        let amps: Vec<C64> = r.amps.iter().step_by(tail).copied().collect();
        order.truncate(keep.len());
        Ok(StateVector { lattice: self.lattice.clone(), sites: order, amps })
    }

    /// Reduced density matrix on `region` (rows/cols ordered as `region`).
    pub fn reduced_density_matrix(&self, region: &[Coord]) -> Result<(Vec<C64>, usize)> {
        let (m, da, db) = self.split_matrix(region)?;
        Ok((linalg::matmul(Exec::default(), &m, da, db, &linalg::adjoint(&m, da, db), da), da))
    }

    fn split_matrix(&self, region: &[Coord]) -> Result<(Vec<C64>, usize, usize)> {
        let pos = self.positions(region)?;
        let mut order: Vec<Coord> = region.to_vec();
        order.extend((0..self.sites.len()).filter(|p| !pos.contains(p)).map(|p| self.sites[p].clone()));
        let r = self.reorder(&order)?;
        let da = self.d().pow(region.len() as u32);
        let db = self.amps.len() / da;
        Ok((r.amps, da, db))
    }

    /// Von Neumann entropy (natural log) of `region`; 0 for an empty or full
    /// region.
    pub fn entanglement_entropy(&self, region: &[Coord]) -> Result<f64> {
        if region.is_empty() || region.len() >= self.sites.len() {
            return Ok(0.0);
        }
        let (m, da, db) = self.split_matrix(region)?;
        let rho = if da <= db {
            linalg::matmul(Exec::default(), &m, da, db, &linalg::adjoint(&m, da, db), da)
        } else {
            linalg::matmul(Exec::default(), &linalg::adjoint(&m, da, db), db, da, &m, db)
        };
        let eig = linalg::hermitian_eigenvalues(&rho, da.min(db));
        Ok(eig.into_iter().filter(|&l| l > 1e-300).map(|l| -l * l.ln()).sum())
    }
}

pub fn simulate(circuit: &Circuit) -> Result<StateVector> {
    simulate_with(Exec::default(), circuit)
}

pub fn simulate_with(exec: Exec, circuit: &Circuit) -> Result<StateVector> {
    simulate_gates(exec, &circuit.lattice, circuit.lattice.sites().collect(), circuit.gates.iter())
}

/// Applies `gates` in order to `|0...0>` on the register `sites`.
pub fn simulate_gates<'a>(
    exec: Exec,
    lattice: &Lattice,
    sites: Vec<Coord>,
    gates: impl IntoIterator<Item = &'a Gate>,
) -> Result<StateVector> {
    let mut psi = StateVector::zero_on(lattice, sites)?;
    for g in gates {
        for s in g.support() {
            lattice.check(s)?;
        }
        psi.apply_gate(exec, g)?;
    }
    Ok(psi)
}

/// Simulates with `frozen` sites held in `|0>`: every gate touching them is
/// compressed to its `<0|U|0>` block on those sites, which must itself be
/// unitary (the gate never moves weight out of the frozen sector). The
/// result lives on the remaining sites and equals the full evolution with the
/// frozen sites projected out.
pub fn simulate_frozen(exec: Exec, circuit: &Circuit, frozen: &[Coord]) -> Result<StateVector> {
    let frozen: std::collections::HashSet<&Coord> = frozen.iter().collect();
    let d = circuit.lattice.d;
    let sites: Vec<Coord> = circuit.lattice.sites().filter(|s| !frozen.contains(s)).collect();
    let mut psi = StateVector::zero_on(&circuit.lattice, sites)?;
    for g in &circuit.gates {
        let sup = g.support();
        let live: Vec<usize> = (0..sup.len()).filter(|&t| !frozen.contains(&sup[t])).collect();
        if live.len() == sup.len() {
            psi.apply_gate(exec, g)?;
            continue;
        }
        let k = sup.len();
        let dim = g.dim();
        let bd = d.pow(live.len() as u32);
        let full_index = |sub: usize| {
            let mut digits = vec![0usize; k];
            let mut r = sub;
            for &t in live.iter().rev() {
                digits[t] = r % d;
                r /= d;
            }
            digits.iter().fold(0, |acc, &x| acc * d + x)
        };
        let idx: Vec<usize> = (0..bd).map(full_index).collect();
        let u = g.matrix().data();
        let block: Vec<C64> = (0..bd * bd).map(|x| u[idx[x / bd] * dim + idx[x % bd]]).collect();
        let residual = linalg::unitarity_residual(&block, bd);
        if residual > crate::circuit::UNITARY_TOL {
            return Err(Error::NotUnitary { residual, tol: crate::circuit::UNITARY_TOL });
        }
        if !live.is_empty() {
            let live_sites: Vec<Coord> = live.iter().map(|&t| sup[t].clone()).collect();
            psi.apply_matrix(exec, &block, &live_sites)?;
        }
    }
    Ok(psi)
}

/// `<psi|O|psi>`.
pub fn expectation(state: &StateVector, obs: &Observable) -> Result<C64> {
    let k = obs.support.len();
    let dk = state.d().pow(k as u32);
    if obs.matrix.shape() != [dk, dk] {
        return Err(Error::DimensionMismatch(format!(
            "observable of shape {:?} on {k} sites",
            obs.matrix.shape()
        )));
    }
    let mut phi = state.clone();
    phi.apply_matrix(Exec::default(), obs.matrix.data(), &obs.support)?;
    state.inner(&phi)
}

/// `|<a|b>|^2`; `b` is first brought to the site order of `a`.
pub fn fidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.sites == b.sites {
        return Ok(a.inner(b)?.norm_sqr());
    }
    Ok(a.inner(&b.reorder(&a.sites)?)?.norm_sqr())
}
