//! Circuit constructors for each state family and the embeddings between them.

pub mod embed;
pub mod fpeps;
pub mod isotns;
pub mod rppeps;
pub mod sgs;

use crate::lattice::Coord;
use crate::rng::derive_seed;
use crate::tensor::{random_unitary, Tensor};
use crate::error::Result;

pub use embed::{embed_in_plaquettes, Embedding};
pub use fpeps::build_fpeps_circuit;
pub use isotns::{build_isotns_circuit, IsoOc};
pub use rppeps::{build_ppeps, build_rppeps, cluster_circuit, cluster_state_oracle, ghz_chain_circuit};
pub use sgs::{build_sgs, SgsSpec};

/// How gate matrices are chosen.
#[derive(Clone, Copy)]
pub enum GateChoice<'a> {
    /// Haar-random, seeded from the base seed and the gate position.
    Seed(u64),
    Identity,
    /// `f(pos, dim)` returns a `dim x dim` unitary.
    Custom(&'a dyn Fn(&[usize], usize) -> Tensor),
}

impl GateChoice<'_> {
    pub(crate) fn seed_for(&self, pos: &[usize]) -> Option<u64> {
        match self {
            GateChoice::Seed(base) => Some(gate_seed(*base, pos)),
            _ => None,
        }
    }

    pub(crate) fn matrix(&self, pos: &[usize], dim: usize) -> Result<Tensor> {
        match self {
            GateChoice::Seed(base) => random_unitary(dim, gate_seed(*base, pos)),
            GateChoice::Identity => Ok(Tensor::identity(dim)),
            GateChoice::Custom(f) => Ok(f(pos, dim)),
        }
    }
}

/// Seed of the gate anchored at `pos`; matter and photonic builds share it.
pub fn gate_seed(base: u64, pos: &[usize]) -> u64 {
    let parts: Vec<u64> = pos.iter().map(|&x| x as u64).collect();
    derive_seed(base, &parts)
}

pub(crate) fn make_gate(
    choice: &GateChoice<'_>,
    support: Vec<Coord>,
    kind: crate::circuit::GateKind,
    pos: Coord,
    d: usize,
) -> Result<crate::circuit::Gate> {
    use crate::circuit::Gate;
    let dim = d.pow(support.len() as u32);
    match choice.seed_for(&pos) {
        Some(seed) => Gate::seeded(support, kind, pos, d, seed),
        None => Gate::new(choice.matrix(&pos, dim)?, support, kind, pos, d),
    }
}
