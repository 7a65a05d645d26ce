//! Hypercubic qudit lattices with open or periodic boundaries.
//!
//! Coordinates are 0-based and ordered (row, column[, depth]). Site indices
//! are row-major, so site `(0, ..., 0)` is index 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Coord = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub dims: Vec<usize>,
    pub d: usize,
    pub boundary: Boundary,
}

impl Lattice {
    pub fn new(dims: Vec<usize>, d: usize, boundary: Boundary) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "lattice dimension must be 1, 2 or 3, got {}",
                dims.len()
            )));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidArgument(format!("side lengths must be >= 1: {dims:?}")));
        }
        if d < 2 {
            return Err(Error::InvalidArgument(format!("local dimension must be >= 2, got {d}")));
        }
        Ok(Self { dims, d, boundary })
    }

    pub fn open(dims: &[usize], d: usize) -> Result<Self> {
        Self::new(dims.to_vec(), d, Boundary::Open)
    }

    /// Lattice dimension q.
    pub fn q(&self) -> usize {
        self.dims.len()
    }

    pub fn num_sites(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn contains(&self, c: &[usize]) -> bool {
        c.len() == self.dims.len() && c.iter().zip(&self.dims).all(|(x, n)| x < n)
    }

    pub fn index(&self, c: &[usize]) -> usize {
        c.iter().zip(&self.dims).fold(0, |acc, (x, n)| acc * n + x)
    }

    pub fn coord(&self, mut index: usize) -> Coord {
        let mut c = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            c[k] = index % self.dims[k];
            index /= self.dims[k];
        }
        c
    }

    pub fn sites(&self) -> impl Iterator<Item = Coord> + '_ {
        (0..self.num_sites()).map(|i| self.coord(i))
    }

    /// Resolves a signed coordinate: wraps under periodic boundaries,
    /// `None` if outside an open lattice.
    pub fn resolve(&self, c: &[i64]) -> Option<Coord> {
        if c.len() != self.dims.len() {
            return None;
        }
        c.iter()
            .zip(&self.dims)
            .map(|(&x, &n)| {
                let n = n as i64;
                match self.boundary {
                    Boundary::Periodic => Some(x.rem_euclid(n) as usize),
                    Boundary::Open => (0..n).contains(&x).then_some(x as usize),
                }
            })
            .collect()
    }

    pub fn check(&self, c: &[usize]) -> Result<()> {
        if self.contains(c) {
            Ok(())
        } else {
            Err(Error::OutOfLattice(format!("{c:?} not in lattice {:?}", self.dims)))
        }
    }

    /// Plaquette anchors for side length `lp`: every position whose cube fits
    /// (open) or every site (periodic).
    pub fn anchors(&self, lp: usize) -> Vec<Coord> {
        let ranges: Vec<usize> = self
            .dims
            .iter()
            .map(|&n| match self.boundary {
                Boundary::Open => (n + 1).saturating_sub(lp),
                Boundary::Periodic => n,
            })
            .collect();
        let total: usize = ranges.iter().product();
        let mut out = Vec::with_capacity(total);
        if total == 0 {
            return out;
        }
        let mut c = vec![0; ranges.len()];
        for _ in 0..total {
            out.push(c.clone());
            for k in (0..c.len()).rev() {
                c[k] += 1;
                if c[k] < ranges[k] {
                    break;
                }
                c[k] = 0;
            }
        }
        out
    }

    /// Sites of the `lp`-cube anchored at `anchor`, in row-major order
    /// within the cube.
    pub fn plaquette(&self, anchor: &[usize], lp: usize) -> Result<Vec<Coord>> {
        if anchor.len() != self.q() || lp == 0 {
            return Err(Error::InvalidArgument(format!("bad plaquette {anchor:?} / {lp}")));
        }
        if self.boundary == Boundary::Periodic && self.dims.iter().any(|&n| n < lp) {
            return Err(Error::InvalidArgument(format!(
                "plaquette side {lp} exceeds periodic lattice {:?}",
                self.dims
            )));
        }
        let q = self.q();
        let count = lp.pow(q as u32);
        let mut out = Vec::with_capacity(count);
        for t in 0..count {
            let mut off = vec![0i64; q];
            let mut r = t;
            for k in (0..q).rev() {
                off[k] = (r % lp) as i64;
                r /= lp;
            }
            let c: Vec<i64> = anchor.iter().zip(&off).map(|(&a, &o)| a as i64 + o).collect();
            match self.resolve(&c) {
                Some(s) => out.push(s),
                None => {
                    return Err(Error::OutOfLattice(format!(
                        "plaquette at {anchor:?} with side {lp} crosses the open boundary of {:?}",
                        self.dims
                    )))
                }
            }
        }
        Ok(out)
    }

    /// Signed displacement `to - from`, using the shortest image under
    /// periodic boundaries.
    pub fn displacement(&self, from: &[usize], to: &[usize]) -> Vec<i64> {
        from.iter()
            .zip(to)
            .zip(&self.dims)
            .map(|((&a, &b), &n)| {
                let mut dx = b as i64 - a as i64;
                if self.boundary == Boundary::Periodic {
                    let n = n as i64;
                    dx = dx.rem_euclid(n);
                    if dx > n / 2 {
                        dx -= n;
                    }
                }
                dx
            })
            .collect()
    }
}
