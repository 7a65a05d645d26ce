//! Dense complex tensors with row-major storage and optional leg labels.

use num_complex::Complex64 as C64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{self, ONE, ZERO};
use crate::rng::rng_from_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LegKind {
    Physical,
    VirtualIn,
    VirtualOut,
}

/// Lattice coordinate plus leg kind.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LegLabel {
    pub site: Vec<usize>,
    pub kind: LegKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<C64>,
    labels: Option<Vec<LegLabel>>,
}

pub(crate) fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

impl Tensor {
    pub fn new(shape: Vec<usize>, data: Vec<C64>) -> Result<Self> {
        if shape.contains(&0) {
            return Err(Error::InvalidArgument(format!("zero leg dimension in {shape:?}")));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "shape {shape:?} needs {n} entries, got {}",
                data.len()
            )));
        }
        Ok(Self { shape, data, labels: None })
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let n = shape.iter().product();
        Self { shape, data: vec![ZERO; n], labels: None }
    }

    pub fn scalar(v: C64) -> Self {
        Self { shape: vec![], data: vec![v], labels: None }
    }

    /// `n x n` identity matrix.
    pub fn identity(n: usize) -> Self {
        Self { shape: vec![n, n], data: linalg::identity(n), labels: None }
    }

    pub fn from_fn(shape: Vec<usize>, f: impl Fn(&[usize]) -> C64) -> Self {
        let n: usize = shape.iter().product();
        let mut idx = vec![0; shape.len()];
        let mut data = Vec::with_capacity(n);
        for _ in 0..n {
            data.push(f(&idx));
            for k in (0..shape.len()).rev() {
                idx[k] += 1;
                if idx[k] < shape[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
        Self { shape, data, labels: None }
    }

    pub fn with_labels(mut self, labels: Vec<LegLabel>) -> Result<Self> {
        if labels.len() != self.shape.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} labels for rank {}",
                labels.len(),
                self.shape.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidArgument(format!("duplicate leg label {l:?}")));
            }
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn labels(&self) -> Option<&[LegLabel]> {
        self.labels.as_deref()
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let s = strides(&self.shape);
        self.data[idx.iter().zip(&s).map(|(i, s)| i * s).sum::<usize>()]
    }

    /// Reorders legs: leg `k` of the result is leg `perm[k]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Tensor> {
        let r = self.rank();
        let mut seen = vec![false; r];
        if perm.len() != r || perm.iter().any(|&p| p >= r || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument(format!("{perm:?} is not a permutation of {r} legs")));
        }
        let labels = self.labels.as_ref().map(|l| perm.iter().map(|&p| l[p].clone()).collect());
        if perm.iter().enumerate().all(|(k, &p)| k == p) {
            return Ok(Tensor { shape: self.shape.clone(), data: self.data.clone(), labels });
        }
        let shape: Vec<usize> = perm.iter().map(|&p| self.shape[p]).collect();
        let src = strides(&self.shape);
        let pstr: Vec<usize> = perm.iter().map(|&p| src[p]).collect();
        let mut data = Vec::with_capacity(self.data.len());
        let mut idx = vec![0usize; r];
        let mut off = 0usize;
        for _ in 0..self.data.len() {
            data.push(self.data[off]);
            for k in (0..r).rev() {
                idx[k] += 1;
                off += pstr[k];
                if idx[k] < shape[k] {
                    break;
                }
                off -= pstr[k] * shape[k];
                idx[k] = 0;
            }
        }
        Ok(Tensor { shape, data, labels })
    }

    /// Reinterprets the data with a new shape. Labels are dropped.
    pub fn reshape(&self, shape: Vec<usize>) -> Result<Tensor> {
        Tensor::new(shape, self.data.clone())
    }

    pub fn conj(&self) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x.conj()).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn scale(&self, s: C64) -> Tensor {
        Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|x| x * s).collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Entrywise `max |self - other|`; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Tensor) -> f64 {
        if self.shape != other.shape {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Fixes leg `leg` to index `value`, removing it.
    pub fn slice(&self, leg: usize, value: usize) -> Result<Tensor> {
        if leg >= self.rank() || value >= self.shape[leg] {
            return Err(Error::InvalidArgument(format!("slice leg {leg} at {value} out of range")));
        }
        let outer: usize = self.shape[..leg].iter().product();
        let inner: usize = self.shape[leg + 1..].iter().product();
        let dim = self.shape[leg];
        let mut data = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * dim + value) * inner;
            data.extend_from_slice(&self.data[base..base + inner]);
        }
        let mut shape = self.shape.clone();
        shape.remove(leg);
        let labels = self.labels.as_ref().map(|l| {
            let mut l = l.clone();
            l.remove(leg);
            l
        });
        Ok(Tensor { shape, data, labels })
    }

    /// Outer product; legs of `self` first.
    pub fn outer(&self, other: &Tensor) -> Tensor {
        let mut data = Vec::with_capacity(self.len() * other.len());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        let mut shape = self.shape.clone();
        shape.extend_from_slice(&other.shape);
        Tensor { shape, data, labels: None }
    }
}

fn check_pairs(a: &Tensor, b: &Tensor, pairs: &[(usize, usize)]) -> Result<()> {
    let mut used_a = vec![false; a.rank()];
    let mut used_b = vec![false; b.rank()];
    for &(la, lb) in pairs {
        if la >= a.rank() || lb >= b.rank() {
            return Err(Error::InvalidArgument(format!("leg pair ({la}, {lb}) out of range")));
        }
        if std::mem::replace(&mut used_a[la], true) {
            return Err(Error::LegPairedTwice { tensor: 'a', leg: la });
        }
        if std::mem::replace(&mut used_b[lb], true) {
            return Err(Error::LegPairedTwice { tensor: 'b', leg: lb });
        }
        if a.shape[la] != b.shape[lb] {
            return Err(Error::DimensionMismatch(format!(
                "leg {la} of a has dimension {}, leg {lb} of b has {}",
                a.shape[la], b.shape[lb]
            )));
        }
    }
    Ok(())
}

/// Sums over the paired legs. Result legs are the unpaired legs of `a`
/// followed by the unpaired legs of `b`, each in original order.
pub fn contract(a: &Tensor, b: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
    contract_with(Exec::default(), a, b, pairs)
}

pub fn contract_with(exec: Exec, a: &Tensor, b: &Tensor, pairs: &[(usize, usize)]) -> Result<Tensor> {
    check_pairs(a, b, pairs)?;
    let free_a: Vec<usize> = (0..a.rank()).filter(|l| !pairs.iter().any(|p| p.0 == *l)).collect();
    let free_b: Vec<usize> = (0..b.rank()).filter(|l| !pairs.iter().any(|p| p.1 == *l)).collect();
    let mut perm_a = free_a.clone();
    perm_a.extend(pairs.iter().map(|p| p.0));
    let mut perm_b: Vec<usize> = pairs.iter().map(|p| p.1).collect();
    perm_b.extend(free_b.iter().copied());
    let ap = a.permute(&perm_a)?;
    let bp = b.permute(&perm_b)?;
    let n: usize = free_a.iter().map(|&l| a.shape[l]).product();
    let k: usize = pairs.iter().map(|p| a.shape[p.0]).product();
    let m: usize = free_b.iter().map(|&l| b.shape[l]).product();
    let data = linalg::matmul(exec, &ap.data, n, k, &bp.data, m);
    let mut shape: Vec<usize> = free_a.iter().map(|&l| a.shape[l]).collect();
    shape.extend(free_b.iter().map(|&l| b.shape[l]));
    let labels = match (&a.labels, &b.labels) {
        (Some(la), Some(lb)) => {
            let mut l: Vec<LegLabel> = free_a.iter().map(|&i| la[i].clone()).collect();
            l.extend(free_b.iter().map(|&i| lb[i].clone()));
            Some(l)
        }
        _ => None,
    };
    Ok(Tensor { shape, data, labels })
}

/// Splits `t` into `q` (legs `left_legs` in the given order, then the new
/// bond) and `r` (new bond, then the remaining legs in original order).
///
/// `q` is an isometry from the new bond into `left_legs`, and the diagonal
/// of the triangular factor is real and non-negative. For a zero tensor `r`
/// is zero and `q` is the orthonormal Householder completion.
pub fn qr_split(t: &Tensor, left_legs: &[usize]) -> Result<(Tensor, Tensor)> {
    let rank = t.rank();
    if left_legs.is_empty() || left_legs.len() >= rank {
        return Err(Error::InvalidArgument(format!(
            "left legs {left_legs:?} must be a nonempty proper subset of {rank} legs"
        )));
    }
    let right: Vec<usize> = (0..rank).filter(|l| !left_legs.contains(l)).collect();
    if right.len() + left_legs.len() != rank {
        return Err(Error::InvalidArgument(format!("repeated leg in {left_legs:?}")));
    }
    let mut perm = left_legs.to_vec();
    perm.extend(&right);
    let p = t.permute(&perm)?;
    let rows: usize = left_legs.iter().map(|&l| t.shape[l]).product();
    let cols: usize = right.iter().map(|&l| t.shape[l]).product();
    let (q, r, k) = linalg::qr(&p.data, rows, cols);
    let mut qshape: Vec<usize> = left_legs.iter().map(|&l| t.shape[l]).collect();
    qshape.push(k);
    let mut rshape = vec![k];
    rshape.extend(right.iter().map(|&l| t.shape[l]));
    Ok((Tensor::new(qshape, q)?, Tensor::new(rshape, r)?))
}

/// Checks that `t`, read as a map from the legs `in_legs` to all other legs,
/// is an isometry: contracting `t` with `conj(t)` over every leg outside
/// `in_legs` must give the identity on `in_legs`. Returns the flag and the
/// max-norm residual.
pub fn is_isometry(t: &Tensor, in_legs: &[usize], tol: f64) -> Result<(bool, f64)> {
    if in_legs.is_empty() {
        return Err(Error::InvalidArgument("in_legs must be nonempty".into()));
    }
    let residual = isometry_residual(t, in_legs)?;
    Ok((residual <= tol, residual))
}

/// Residual of the isometry condition; an empty `in_legs` checks the norm
/// (the map from a one-dimensional space).
pub fn isometry_residual(t: &Tensor, in_legs: &[usize]) -> Result<f64> {
    let rank = t.rank();
    if in_legs.iter().any(|&l| l >= rank) {
        return Err(Error::InvalidArgument(format!("in_legs {in_legs:?} out of range")));
    }
    let out: Vec<usize> = (0..rank).filter(|l| !in_legs.contains(l)).collect();
    let mut perm = out.clone();
    perm.extend(in_legs);
    let p = t.permute(&perm)?;
    let rows: usize = out.iter().map(|&l| t.shape[l]).product();
    let cols: usize = in_legs.iter().map(|&l| t.shape[l]).product();
    Ok(linalg::column_isometry_residual(&p.data, rows, cols))
}

/// Haar-random `dim x dim` unitary: QR of a seeded complex Ginibre matrix
/// with the triangular factor's diagonal phases absorbed into `Q`.
pub fn random_unitary(dim: usize, seed: u64) -> Result<Tensor> {
    if dim == 0 {
        return Err(Error::InvalidArgument("unitary dimension must be positive".into()));
    }
    if dim == 1 {
        return Ok(Tensor::identity(1));
    }
    let mut rng = rng_from_seed(seed);
    let g: Vec<C64> = (0..dim * dim)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let (q, _, _) = linalg::qr(&g, dim, dim);
    Tensor::new(vec![dim, dim], q)
}

/// `|0>` basis vector of dimension `d`.
pub fn basis_vector(d: usize, k: usize) -> Tensor {
    let mut data = vec![ZERO; d];
    data[k] = ONE;
    Tensor { shape: vec![d], data, labels: None }
}
