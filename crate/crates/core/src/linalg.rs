//! Dense complex matrix helpers on row-major slices.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::exec::Exec;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// `a (n x k) * b (k x m)`, row-major.
pub fn matmul(exec: Exec, a: &[C64], n: usize, k: usize, b: &[C64], m: usize) -> Vec<C64> {
    debug_assert_eq!(a.len(), n * k);
    debug_assert_eq!(b.len(), k * m);
    let mut out = vec![ZERO; n * m];
    if m == 0 || n == 0 {
        return out;
    }
    exec.fill_chunks(&mut out, m, |i, row| {
        let arow = &a[i * k..(i + 1) * k];
        for (l, &x) in arow.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            let brow = &b[l * m..(l + 1) * m];
            for (o, &y) in row.iter_mut().zip(brow) {
                *o += x * y;
            }
        }
    });
    out
}

pub fn adjoint(a: &[C64], rows: usize, cols: usize) -> Vec<C64> {
    let mut out = vec![ZERO; rows * cols];
    for i in 0..rows {
        for j in 0..cols {
            out[j * rows + i] = a[i * cols + j].conj();
        }
    }
    out
}

pub fn identity(n: usize) -> Vec<C64> {
    let mut out = vec![ZERO; n * n];
    for i in 0..n {
        out[i * n + i] = ONE;
    }
    out
}

/// `max |M - I|` for a square matrix.
pub fn identity_residual(m: &[C64], n: usize) -> f64 {
    let mut r = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { ONE } else { ZERO };
            r = r.max((m[i * n + j] - target).norm());
        }
    }
    r
}

/// `max |A^dag A - I|` for an `rows x cols` matrix (columns orthonormal?).
pub fn column_isometry_residual(a: &[C64], rows: usize, cols: usize) -> f64 {
    let ad = adjoint(a, rows, cols);
    let g = matmul(Exec::Sequential, &ad, cols, rows, a, cols);
    identity_residual(&g, cols)
}

pub fn unitarity_residual(u: &[C64], n: usize) -> f64 {
    column_isometry_residual(u, n, n)
}

fn to_dmatrix(a: &[C64], rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_row_slice(rows, cols, a)
}

fn from_dmatrix(m: &DMatrix<C64>) -> Vec<C64> {
    let (r, c) = m.shape();
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

/// Thin Householder QR with the diagonal of the triangular factor made real
/// and non-negative. Returns `(q, r, k)` with `q: rows x k`, `r: k x cols`,
/// `k = min(rows, cols)`.
///
/// A zero column leaves the corresponding diagonal entry at zero; `q` stays
/// orthonormal in that case because the Householder reflector degenerates to
/// the identity.
pub fn qr(a: &[C64], rows: usize, cols: usize) -> (Vec<C64>, Vec<C64>, usize) {
    let k = rows.min(cols);
    let qr = to_dmatrix(a, rows, cols).qr();
    let mut q = from_dmatrix(&qr.q());
    let mut r = from_dmatrix(&qr.r());
    for l in 0..k {
        let d = r[l * cols + l];
        let norm = d.norm();
        if norm == 0.0 {
            continue;
        }
        let phase = d / norm;
        for i in 0..rows {
            q[i * k + l] *= phase;
        }
        for j in 0..cols {
            r[l * cols + j] *= phase.conj();
        }
        r[l * cols + l] = C64::new(norm, 0.0);
    }
    (q, r, k)
}

/// Eigenvalues of a Hermitian `n x n` matrix, ascending.
pub fn hermitian_eigenvalues(a: &[C64], n: usize) -> Vec<f64> {
    let eig = SymmetricEigen::new(to_dmatrix(a, n, n));
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|x, y| x.total_cmp(y));
    vals
}

/// Extends orthonormal columns of an `n x k` matrix to an `n x n` unitary.
///
/// New columns come from the standard basis vector with the largest residual
/// against the current span (lowest index on ties), orthogonalized twice.
/// The result is deterministic for a given input.
pub fn complete_to_unitary(cols: &[C64], n: usize, k: usize) -> Vec<C64> {
    let mut basis: Vec<Vec<C64>> = (0..k)
        .map(|j| (0..n).map(|i| cols[i * k + j]).collect())
        .collect();
    // residuals of the standard basis against the current span
    let mut resid: Vec<Vec<C64>> = (0..n)
        .map(|e| {
            let mut v = vec![ZERO; n];
            v[e] = ONE;
            v
        })
        .collect();
    let project_out = |v: &mut Vec<C64>, b: &[C64]| {
        let overlap: C64 = b.iter().zip(v.iter()).map(|(x, y)| x.conj() * y).sum();
        for (vi, bi) in v.iter_mut().zip(b) {
            *vi -= overlap * bi;
        }
    };
    for b in &basis {
        for r in resid.iter_mut() {
            project_out(r, b);
        }
    }
    while basis.len() < n {
        let norms: Vec<f64> = resid.iter().map(|r| r.iter().map(|x| x.norm_sqr()).sum()).collect();
        // first index attaining the maximum keeps the choice deterministic
        let mut best = 0;
        for (e, &nr) in norms.iter().enumerate() {
            if nr > norms[best] {
                best = e;
            }
        }
        let mut v = resid[best].clone();
        for b in &basis {
            project_out(&mut v, b);
        }
        let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        for x in &mut v {
            *x /= norm;
        }
        for r in resid.iter_mut() {
            project_out(r, &v);
        }
        basis.push(v);
    }
    let mut out = vec![ZERO; n * n];
    for (j, b) in basis.iter().enumerate() {
        for i in 0..n {
            out[i * n + j] = b[i];
        }
    }
    out
}

/// Unitary whose column `at[c]` is the `c`-th given orthonormal column; the
/// other columns complete it in increasing position order.
pub fn complete_to_unitary_at(cols: &[C64], n: usize, at: &[usize]) -> Vec<C64> {
    let k = at.len();
    let full = complete_to_unitary(cols, n, k);
    let mut order = at.to_vec();
    order.extend((0..n).filter(|c| !at.contains(c)));
    let mut u = vec![ZERO; n * n];
    for (src, &dst) in order.iter().enumerate() {
        for r in 0..n {
            u[r * n + dst] = full[r * n + src];
        }
    }
    u
}

/// Kronecker product of two square matrices.
pub fn kron(a: &[C64], na: usize, b: &[C64], nb: usize) -> Vec<C64> {
    let n = na * nb;
    let mut out = vec![ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            let x = a[i * na + j];
            if x == ZERO {
                continue;
            }
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + j * nb + l] = x * b[k * nb + l];
                }
            }
        }
    }
    out
}
