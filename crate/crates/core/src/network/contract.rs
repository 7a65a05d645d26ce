//! Greedy exact contraction of labeled tensors.

use std::hash::Hash;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::tensor::{contract_with, Tensor};

/// Tensor whose legs carry labels; legs with equal labels on two different
/// tensors are contracted.
#[derive(Clone, Debug)]
pub struct Labeled<L> {
    pub tensor: Tensor,
    pub labels: Vec<L>,
}

impl<L: Clone + Eq + Hash> Labeled<L> {
    pub fn new(tensor: Tensor, labels: Vec<L>) -> Self {
        debug_assert_eq!(tensor.rank(), labels.len());
        Self { tensor, labels }
    }

    fn pairs(&self, other: &Self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(j) = other.labels.iter().position(|x| x == l) {
                out.push((i, j));
            }
        }
        out
    }

    fn result_size(&self, other: &Self, pairs: &[(usize, usize)]) -> u128 {
        let shared: u128 = pairs.iter().map(|p| self.tensor.shape()[p.0] as u128).product();
        let a: u128 = self.tensor.shape().iter().map(|&x| x as u128).product();
        let b: u128 = other.tensor.shape().iter().map(|&x| x as u128).product();
        a / shared.max(1) * (b / shared.max(1))
    }

    pub fn contract(&self, exec: Exec, other: &Self) -> Result<Self> {
        let pairs = self.pairs(other);
        let t = contract_with(exec, &self.tensor, &other.tensor, &pairs)?;
        let mut labels: Vec<L> =
            (0..self.labels.len()).filter(|i| !pairs.iter().any(|p| p.0 == *i)).map(|i| self.labels[i].clone()).collect();
        labels.extend(
            (0..other.labels.len()).filter(|j| !pairs.iter().any(|p| p.1 == *j)).map(|j| other.labels[j].clone()),
        );
        Ok(Self { tensor: t, labels })
    }

    /// Permutes legs into the order of `labels`.
    pub fn arranged(&self, labels: &[L]) -> Result<Tensor> {
        let perm: Vec<usize> = labels
            .iter()
            .map(|l| {
                self.labels
                    .iter()
                    .position(|x| x == l)
                    .ok_or_else(|| Error::InvalidArgument("label not present".into()))
            })
            .collect::<Result<_>>()?;
        self.tensor.permute(&perm)
    }
}

/// Contracts everything to one tensor, always merging the connected pair
/// with the smallest result (unconnected pieces are joined last, smallest
/// first). Fails when an intermediate exceeds `cap` entries.
pub fn contract_all<L: Clone + Eq + Hash>(exec: Exec, mut items: Vec<Labeled<L>>, cap: usize) -> Result<Labeled<L>> {
    if items.is_empty() {
        return Ok(Labeled { tensor: Tensor::scalar(crate::linalg::ONE), labels: Vec::new() });
    }
    while items.len() > 1 {
        let mut best: Option<(u128, usize, usize)> = None;
        for a in 0..items.len() {
            for b in a + 1..items.len() {
                let pairs = items[a].pairs(&items[b]);
                if pairs.is_empty() {
                    continue;
                }
                let size = items[a].result_size(&items[b], &pairs);
                if best.is_none_or(|(s, _, _)| size < s) {
                    best = Some((size, a, b));
                }
            }
        }
        let (size, a, b) = match best {
            Some(x) => x,
            None => {
                let mut order: Vec<usize> = (0..items.len()).collect();
                order.sort_by_key(|&i| items[i].tensor.len());
                let (a, b) = (order[0].min(order[1]), order[0].max(order[1]));
                (items[a].tensor.len() as u128 * items[b].tensor.len() as u128, a, b)
            }
        };
        if size > cap as u128 {
            return Err(Error::MemoryCap { required: size, cap });
        }
        let rhs = items.remove(b);
        let lhs = items.remove(a);
        items.push(lhs.contract(exec, &rhs)?);
    }
    Ok(items.pop().expect("one item left"))
}
