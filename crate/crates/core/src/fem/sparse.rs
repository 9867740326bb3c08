use std::io::Write;

use faer::sparse::{SparseColMat, Triplet};

/// Coordinate-format sparse matrix; duplicate entries sum on conversion.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseTriplets {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<(usize, usize, f64)>,
}

impl SparseTriplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        SparseTriplets {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, row: usize, col: usize, value: f64) {
        debug_assert!(row < self.nrows && col < self.ncols);
        self.entries.push((row, col, value));
    }

    /// Entries sorted by `(row, col)` with duplicates summed.
    pub fn compressed(&self) -> Vec<(usize, usize, f64)> {
        let mut e = self.entries.clone();
        e.sort_by_key(|&(r, c, _)| (r, c));
        let mut out: Vec<(usize, usize, f64)> = Vec::with_capacity(e.len());
        for (r, c, v) in e {
            match out.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => out.push((r, c, v)),
            }
        }
        out
    }

    pub fn to_csc(&self) -> SparseColMat<usize, f64> {
        let triplets: Vec<Triplet<usize, usize, f64>> = self
            .entries
            .iter()
            .map(|&(r, c, v)| Triplet::new(r, c, v))
            .collect();
        SparseColMat::try_new_from_triplets(self.nrows, self.ncols, &triplets)
            .expect("triplet indices are in range")
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.ncols]; self.nrows];
        for &(r, c, v) in &self.entries {
            m[r][c] += v;
        }
        m
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.ncols);
        let mut y = vec![0.0; self.nrows];
        for &(r, c, v) in &self.entries {
            y[r] += v * x[c];
        }
        y
    }

    /// Largest absolute entry after summing duplicates.
    pub fn max_abs(&self) -> f64 {
        self.compressed().iter().map(|e| e.2.abs()).fold(0.0, f64::max)
    }

    /// Debug dump: one `row col value` line per nonzero, sorted.
    pub fn write_coordinate<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (r, c, v) in self.compressed() {
            writeln!(w, "{r} {c} {v:.17e}")?;
        }
        Ok(())
    }
}

/// `y = A x` for a compressed-column matrix.
pub fn csc_apply(a: &SparseColMat<usize, f64>, x: &[f64]) -> Vec<f64> {
    let (sym, val) = a.parts();
    let col_ptr = sym.col_ptr();
    let row_idx = sym.row_idx();
    let mut y = vec![0.0; sym.nrows()];
    for j in 0..sym.ncols() {
        let xj = x[j];
        for k in col_ptr[j]..col_ptr[j + 1] {
            y[row_idx[k]] += val[k] * xj;
        }
    }
    y
}
