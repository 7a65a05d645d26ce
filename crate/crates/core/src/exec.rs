//! Execution policy for the data-parallel kernels.
//!
//! With the `parallel` feature (default) the hot loops run on rayon's global
//! pool; without it every call falls back to the sequential path. Each output
//! element is produced by exactly one closure call with a fixed inner
//! reduction order, so both paths give bit-identical results.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

/// Below this many output elements the parallel path is not worth the fork.
#[cfg(feature = "parallel")]
const PAR_THRESHOLD: usize = 1 << 12;

impl Exec {
    /// Writes `f(i)` into `out[i]` for every index.
    pub fn fill<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && out.len() >= PAR_THRESHOLD {
            out.par_iter_mut().enumerate().for_each(|(i, o)| *o = f(i));
            return;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o = f(i);
        }
    }

    /// Fills fixed-size chunks of `out`; chunk `c` is handed to `f(c, chunk)`.
    pub fn fill_chunks<T, F>(self, out: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && out.len() >= PAR_THRESHOLD {
            out.par_chunks_mut(chunk).enumerate().for_each(|(c, o)| f(c, o));
            return;
        }
        for (c, o) in out.chunks_mut(chunk).enumerate() {
            f(c, o);
        }
    }

    /// Maps `f` over `items`, preserving order.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self == Exec::Parallel && items.len() > 1 {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }
}
