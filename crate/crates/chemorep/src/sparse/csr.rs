//! CSR storage, triplet assembly and block composition.

use crate::error::{Error, Result};
use std::io::Write;

/// Compressed sparse row matrix over `f64`.
///
/// Column indices are strictly increasing within each row; duplicate
/// triplets are summed during construction in a value-sorted order, so the
/// result is independent of triplet insertion order, bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds a CSR matrix from COO triplets, summing duplicates.
    pub fn from_triplets(
        n_rows: usize,
        n_cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        for &(r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Dimension(format!(
                    "triplet ({r}, {c}, {v}) out of range for {n_rows}x{n_cols} matrix"
                )));
            }
        }
        let mut sorted: Vec<(usize, usize, f64)> = triplets.to_vec();
        // Sorting duplicates by value as well makes the summation order,
        // and hence the result, independent of the input permutation.
        sorted.sort_unstable_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then_with(|| a.2.total_cmp(&b.2))
        });

        let mut row_ptr = vec![0usize; n_rows + 1];
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        let mut i = 0;
        while i < sorted.len() {
            let (r, c, _) = sorted[i];
            let mut sum = 0.0;
            while i < sorted.len() && sorted[i].0 == r && sorted[i].1 == c {
                sum += sorted[i].2;
                i += 1;
            }
            row_ptr[r + 1] += 1;
            col_idx.push(c);
            values.push(sum);
        }
        for r in 0..n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Ok(SparseMatrix {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn identity(n: usize) -> Self {
        SparseMatrix {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![1.0; n],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// (column indices, values) of row `r`.
    pub fn row(&self, r: usize) -> (&[usize], &[f64]) {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        (&self.col_idx[lo..hi], &self.values[lo..hi])
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for r in 0..self.n_rows {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            y[r] = s;
        }
    }

    pub fn matvec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.matvec(x, &mut y);
        y
    }

    /// x^T A y (bilinear form value).
    pub fn bilinear(&self, x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.n_rows);
        let mut total = 0.0;
        for r in 0..self.n_rows {
            let mut s = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                s += self.values[k] * y[self.col_idx[k]];
            }
            total += x[r] * s;
        }
        total
    }

    pub fn diagonal(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.n_rows];
        for r in 0..self.n_rows.min(self.n_cols) {
            let (cols, vals) = self.row(r);
            if let Ok(k) = cols.binary_search(&r) {
                d[r] = vals[k];
            }
        }
        d
    }

    /// Maximum |A_ij - A_ji| over stored entries; 0 for exactly symmetric.
    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                let vt = self.get(*c, r);
                worst = worst.max((v - vt).abs());
            }
        }
        worst
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let (cols, vals) = self.row(r);
        match cols.binary_search(&c) {
            Ok(k) => vals[k],
            Err(_) => 0.0,
        }
    }

    /// Matrix Market coordinate export (1-based, real general).
    pub fn write_matrix_market<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", self.n_rows, self.n_cols, self.nnz())?;
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (c, v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:.16e}", r + 1, c + 1, v)?;
            }
        }
        Ok(())
    }
}

/// Composes a block matrix out of scaled CSR blocks placed at row/column
/// offsets. Rows are merged in column order, so no global triplet sort is
/// needed and the result is deterministic.
pub struct BlockLayout {
    n_rows: usize,
    n_cols: usize,
    blocks: Vec<(usize, usize, f64, SparseMatrix)>,
}

impl BlockLayout {
    pub fn new(n_rows: usize, n_cols: usize) -> Self {
        BlockLayout {
            n_rows,
            n_cols,
            blocks: Vec::new(),
        }
    }

    pub fn add(&mut self, row_offset: usize, col_offset: usize, scale: f64, block: SparseMatrix) {
        debug_assert!(row_offset + block.n_rows() <= self.n_rows);
        debug_assert!(col_offset + block.n_cols() <= self.n_cols);
        self.blocks.push((row_offset, col_offset, scale, block));
    }

    pub fn compose(&self) -> SparseMatrix {
        let mut row_ptr = vec![0usize; self.n_rows + 1];
        for (ro, _, _, b) in &self.blocks {
            for r in 0..b.n_rows() {
                row_ptr[ro + r + 1] += b.row_ptr[r + 1] - b.row_ptr[r];
            }
        }
        for r in 0..self.n_rows {
            row_ptr[r + 1] += row_ptr[r];
        }
        let nnz_upper = row_ptr[self.n_rows];
        let mut col_idx = vec![0usize; nnz_upper];
        let mut values = vec![0.0f64; nnz_upper];
        let mut fill = row_ptr.clone();
        // Blocks are visited in insertion order; distinct blocks in the same
        // row occupy disjoint column ranges in the scheme's layouts, but we
        // still sort-and-merge each row to keep the type's invariant
        // unconditionally.
        for (ro, co, scale, b) in &self.blocks {
            for r in 0..b.n_rows() {
                let (cols, vals) = b.row(r);
                let dst = ro + r;
                for (c, v) in cols.iter().zip(vals) {
                    col_idx[fill[dst]] = co + c;
                    values[fill[dst]] = scale * v;
                    fill[dst] += 1;
                }
            }
        }
        // Per-row sort + duplicate merge.
        let mut out_cols = Vec::with_capacity(nnz_upper);
        let mut out_vals = Vec::with_capacity(nnz_upper);
        let mut out_ptr = vec![0usize; self.n_rows + 1];
        let mut scratch: Vec<(usize, f64)> = Vec::new();
        for r in 0..self.n_rows {
            scratch.clear();
            for k in row_ptr[r]..fill[r] {
                scratch.push((col_idx[k], values[k]));
            }
            scratch.sort_unstable_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.total_cmp(&b.1)));
            let mut i = 0;
            while i < scratch.len() {
                let c = scratch[i].0;
                let mut s = 0.0;
                while i < scratch.len() && scratch[i].0 == c {
                    s += scratch[i].1;
                    i += 1;
                }
                out_cols.push(c);
                out_vals.push(s);
            }
            out_ptr[r + 1] = out_cols.len();
        }
        SparseMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: out_ptr,
            col_idx: out_cols,
            values: out_vals,
        }
    }
}
