//! Dense vector and matrix primitives, supports and sorting permutations.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Seeded generator used everywhere randomness is needed.
///
/// ChaCha8 produces the same stream on every platform for a given seed.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strictly increasing list of coordinate indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Support(Vec<usize>);

impl Support {
    /// Builds a support from arbitrary indices, sorting and deduplicating them.
    pub fn from_indices(mut indices: Vec<usize>) -> Self {
        indices.sort_unstable();
        indices.dedup();
        Support(indices)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&i).is_ok()
    }

    /// Indices in `0..n` that are not in the support, ascending.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(n.saturating_sub(self.0.len()));
        let mut it = self.0.iter().peekable();
        for i in 0..n {
            if it.peek() == Some(&&i) {
                it.next();
            } else {
                out.push(i);
            }
        }
        out
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

/// Indices `i` with `|x_i| > tol`.
pub fn support_of(x: &[f64], tol: f64) -> Support {
    Support(
        x.iter()
            .enumerate()
            .filter(|(_, v)| v.abs() > tol)
            .map(|(i, _)| i)
            .collect(),
    )
}

/// Number of exactly nonzero entries.
pub fn nnz(x: &[f64]) -> usize {
    x.iter().filter(|v| **v != 0.0).count()
}

/// Permutation sorting `v` in non-ascending order; ties keep ascending index.
pub fn sorting_permutation(v: &[f64]) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..v.len()).collect();
    // stable sort, so equal values keep index order
    perm.sort_by(|&a, &b| v[b].partial_cmp(&v[a]).unwrap_or(Ordering::Equal));
    perm
}

/// Indices of the `k` largest entries of `v` (stable ties), in sorted-value order.
pub fn top_k_indices(v: &[f64], k: usize) -> Vec<usize> {
    let mut perm = sorting_permutation(v);
    perm.truncate(k);
    perm
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

pub fn norm(a: &[f64]) -> f64 {
    norm_sq(a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    dist_sq(a, b).sqrt()
}

/// `x - t * g`
pub fn axpy_step(x: &[f64], t: f64, g: &[f64]) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi - t * gi).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn all_finite(x: &[f64]) -> bool {
    x.iter().all(|v| v.is_finite())
}

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(m * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix { rows: m, cols: n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn scale(&mut self, factor: f64) {
        self.data.iter_mut().for_each(|v| *v *= factor);
    }

    /// `A x`. Zero entries of `x` are skipped, which pays off for sparse iterates.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        let nz: Vec<usize> = (0..self.cols).filter(|&j| x[j] != 0.0).collect();
        if nz.len() * 4 < self.cols {
            (0..self.rows)
                .map(|i| {
                    let r = self.row(i);
                    nz.iter().map(|&j| r[j] * x[j]).sum()
                })
                .collect()
        } else {
            (0..self.rows).map(|i| dot(self.row(i), x)).collect()
        }
    }

    /// `Aᵀ y`.
    pub fn mul_t_vec(&self, y: &[f64]) -> Vec<f64> {
        debug_assert_eq!(y.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &yi) in y.iter().enumerate() {
            if yi == 0.0 {
                continue;
            }
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += yi * a;
            }
        }
        out
    }

    /// Squared largest singular value by power iteration on `AᵀA`.
    ///
    /// Stops after `max_iter` rounds or when the Rayleigh quotient changes by
    /// less than `rel_tol` relative.
    pub fn spectral_norm_sq(&self, max_iter: usize, rel_tol: f64) -> f64 {
        if self.rows == 0 || self.cols == 0 {
            return 0.0;
        }
        // Deterministic start with a mild tilt so it is not orthogonal to the
        // leading singular vector in symmetric cases.
        let mut v: Vec<f64> = (0..self.cols)
            .map(|j| 1.0 + 1e-3 * ((j % 7) as f64))
            .collect();
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        let mut lambda = 0.0;
        for _ in 0..max_iter {
            let w = self.mul_t_vec(&self.mul_vec(&v));
            let next = dot(&v, &w);
            let nw = norm(&w);
            if nw == 0.0 {
                return 0.0;
            }
            v = w.into_iter().map(|x| x / nw).collect();
            if (next - lambda).abs() <= rel_tol * next.abs() {
                lambda = next;
                break;
            }
            lambda = next;
        }
        // One more quotient with the final normalized vector.
        let av = self.mul_vec(&v);
        lambda.max(norm_sq(&av))
    }
}
