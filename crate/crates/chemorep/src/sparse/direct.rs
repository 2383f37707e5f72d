//! Direct factorizations: banded LU with partial pivoting for general
//! systems and an envelope Cholesky for SPD operators that are factored
//! once and solved against many right-hand sides.
//!
//! Both run on a reverse Cuthill-McKee permutation of the input, which
//! keeps FEM matrices narrowly banded.

use super::csr::SparseMatrix;
use crate::error::{Error, Result};

/// Reverse Cuthill-McKee ordering of the (symmetrized) sparsity graph.
/// Returns `perm` with `perm[new] = old`.
pub fn reverse_cuthill_mckee(a: &SparseMatrix) -> Vec<usize> {
    let n = a.n_rows();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for r in 0..n {
        let (cols, _) = a.row(r);
        for &c in cols {
            if c != r {
                adj[r].push(c);
                adj[c].push(r);
            }
        }
    }
    for nbrs in &mut adj {
        nbrs.sort_unstable();
        nbrs.dedup();
    }
    let degree: Vec<usize> = adj.iter().map(|v| v.len()).collect();

    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();
    loop {
        // Start each component from a minimum-degree node.
        let start = (0..n)
            .filter(|&i| !visited[i])
            .min_by_key(|&i| (degree[i], i));
        let Some(start) = start else { break };
        visited[start] = true;
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<usize> = adj[v].iter().copied().filter(|&u| !visited[u]).collect();
            nbrs.sort_unstable_by_key(|&u| (degree[u], u));
            for u in nbrs {
                visited[u] = true;
                queue.push_back(u);
            }
        }
    }
    order.reverse();
    order
}

fn permute(a: &SparseMatrix, perm: &[usize]) -> SparseMatrix {
    let n = a.n_rows();
    let mut inv = vec![0usize; n];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut trips = Vec::with_capacity(a.nnz());
    for r in 0..n {
        let (cols, vals) = a.row(r);
        for (c, v) in cols.iter().zip(vals) {
            trips.push((inv[r], inv[*c], *v));
        }
    }
    SparseMatrix::from_triplets(n, n, &trips).expect("permutation preserves shape")
}

/// Banded LU factorization with partial pivoting, after an RCM reordering.
pub struct BandLu {
    n: usize,
    kl: usize,
    /// Upper bandwidth after pivot fill: ku + kl.
    ku_fill: usize,
    /// Row-major band storage; row `i` covers columns `i-kl ..= i+ku_fill`.
    ab: Vec<f64>,
    ipiv: Vec<usize>,
    perm: Vec<usize>,
}

impl BandLu {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::Dimension("band lu: matrix must be square".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let pa = permute(a, &perm);
        let (mut kl, mut ku) = (0usize, 0usize);
        for r in 0..n {
            let (cols, _) = pa.row(r);
            for &c in cols {
                if c < r {
                    kl = kl.max(r - c);
                } else {
                    ku = ku.max(c - r);
                }
            }
        }
        let ku_fill = ku + kl;
        let width = kl + ku_fill + 1;
        let mut ab = vec![0.0f64; n * width];
        let idx = |i: usize, j: usize| -> usize {
            debug_assert!(j + kl >= i && j <= i + ku_fill);
            i * width + (j + kl - i)
        };
        for r in 0..n {
            let (cols, vals) = pa.row(r);
            for (c, v) in cols.iter().zip(vals) {
                ab[idx(r, *c)] = *v;
            }
        }
        let mut ipiv = vec![0usize; n];
        for j in 0..n {
            let imax = (j..=(j + kl).min(n - 1))
                .max_by(|&p, &q| ab[idx(p, j)].abs().total_cmp(&ab[idx(q, j)].abs()))
                .unwrap();
            ipiv[j] = imax;
            if ab[idx(imax, j)] == 0.0 {
                return Err(Error::SolverBreakdown(format!(
                    "band lu: zero pivot at column {j}"
                )));
            }
            if imax != j {
                let hi = (j + ku_fill).min(n - 1);
                for c in j..=hi {
                    ab.swap(idx(imax, c), idx(j, c));
                }
            }
            let pivot = ab[idx(j, j)];
            for i in (j + 1)..=(j + kl).min(n - 1) {
                let m = ab[idx(i, j)] / pivot;
                ab[idx(i, j)] = m;
                if m != 0.0 {
                    let hi = (j + ku_fill).min(n - 1);
                    for c in (j + 1)..=hi {
                        ab[idx(i, c)] -= m * ab[idx(j, c)];
                    }
                }
            }
        }
        Ok(BandLu {
            n,
            kl,
            ku_fill,
            ab,
            ipiv,
            perm,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let width = self.kl + self.ku_fill + 1;
        let idx = |i: usize, j: usize| -> usize { i * width + (j + self.kl - i) };
        let mut x: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for j in 0..n {
            if self.ipiv[j] != j {
                x.swap(j, self.ipiv[j]);
            }
            let xj = x[j];
            if xj != 0.0 {
                for i in (j + 1)..=(j + self.kl).min(n - 1) {
                    x[i] -= self.ab[idx(i, j)] * xj;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            let hi = (i + self.ku_fill).min(n - 1);
            for c in (i + 1)..=hi {
                s -= self.ab[idx(i, c)] * x[c];
            }
            x[i] = s / self.ab[idx(i, i)];
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = x[new];
        }
        out
    }
}

/// Envelope (profile) Cholesky factorization for SPD matrices, reusable
/// across right-hand sides.
pub struct EnvelopeCholesky {
    n: usize,
    /// First stored column of each row (<= i); rows hold `first[i] ..= i`.
    first: Vec<usize>,
    offsets: Vec<usize>,
    values: Vec<f64>,
    perm: Vec<usize>,
}

impl EnvelopeCholesky {
    pub fn factor(a: &SparseMatrix) -> Result<Self> {
        let n = a.n_rows();
        if a.n_cols() != n {
            return Err(Error::Dimension("cholesky: matrix must be square".into()));
        }
        let perm = reverse_cuthill_mckee(a);
        let pa = permute(a, &perm);
        let mut first: Vec<usize> = (0..n).collect();
        // Symmetrized profile: an entry (r, c) forces row max(r, c) to
        // reach down to column min(r, c).
        for r in 0..n {
            let (cols, _) = pa.row(r);
            for &c in cols {
                let (lo, hi) = if c < r { (c, r) } else { (r, c) };
                if lo < first[hi] {
                    first[hi] = lo;
                }
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + (i - first[i] + 1);
        }
        let mut values = vec![0.0f64; offsets[n]];
        for r in 0..n {
            let (cols, vals) = pa.row(r);
            for (c, v) in cols.iter().zip(vals) {
                if *c <= r {
                    values[offsets[r] + (c - first[r])] = *v;
                }
            }
        }
        // L[i][j] = (A[i][j] - sum_k L[i][k] L[j][k]) / L[j][j]
        for i in 0..n {
            for j in first[i]..i {
                let k0 = first[i].max(first[j]);
                let mut s = values[offsets[i] + (j - first[i])];
                let row_i = offsets[i] - first[i];
                let row_j = offsets[j] - first[j];
                for k in k0..j {
                    s -= values[row_i + k] * values[row_j + k];
                }
                values[offsets[i] + (j - first[i])] = s / values[offsets[j] + (j - first[j])];
            }
            let mut d = values[offsets[i] + (i - first[i])];
            let row_i = offsets[i] - first[i];
            for k in first[i]..i {
                d -= values[row_i + k] * values[row_i + k];
            }
            if d <= 0.0 {
                return Err(Error::SolverBreakdown(format!(
                    "cholesky: nonpositive pivot {d:.3e} at row {i}; matrix not SPD"
                )));
            }
            values[offsets[i] + (i - first[i])] = d.sqrt();
        }
        Ok(EnvelopeCholesky {
            n,
            first,
            offsets,
            values,
            perm,
        })
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&old| b[old]).collect();
        for i in 0..n {
            let row = self.offsets[i] - self.first[i];
            let mut s = y[i];
            for k in self.first[i]..i {
                s -= self.values[row + k] * y[k];
            }
            y[i] = s / self.values[row + i];
        }
        for i in (0..n).rev() {
            let row = self.offsets[i] - self.first[i];
            let xi = y[i] / self.values[row + i];
            y[i] = xi;
            for k in self.first[i]..i {
                y[k] -= self.values[row + k] * xi;
            }
        }
        let mut out = vec![0.0; n];
        for (new, &old) in self.perm.iter().enumerate() {
            out[old] = y[new];
        }
        out
    }
}
