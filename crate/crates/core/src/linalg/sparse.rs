use crate::linalg::check_dim;
use crate::Result;

/// Accumulates `(row, col, value)` triplets of a symmetric matrix.
///
/// Only one triangle is kept: an entry added at `(i, j)` is stored at
/// `(min(i, j), max(i, j))`, so callers may add either half but must not add
/// both. Duplicates are summed on [`finish`](Self::finish).
#[derive(Debug, Clone)]
pub struct SymTripletBuilder {
    dim: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl SymTripletBuilder {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            entries: Vec::new(),
        }
    }

    pub fn with_capacity(dim: usize, cap: usize) -> Self {
        Self {
            dim,
            entries: Vec::with_capacity(cap),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        assert!(row < self.dim && col < self.dim, "triplet out of bounds");
        if value == 0.0 {
            return;
        }
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push((r, c, value));
    }

    /// Adds `coef * block` at block offset `(row0, col0)`.
    ///
    /// For off-diagonal blocks (`row0 != col0`) every entry of `block` is
    /// placed; for diagonal blocks only its upper triangle is.
    pub fn add_block(&mut self, row0: usize, col0: usize, coef: f64, block: &SparseSymMatrix) {
        if coef == 0.0 {
            return;
        }
        if row0 == col0 {
            for (i, j, v) in block.upper_entries() {
                self.add(row0 + i, col0 + j, coef * v);
            }
        } else {
            for (i, j, v) in block.full_entries() {
                self.add(row0 + i, col0 + j, coef * v);
            }
        }
    }

    pub fn finish(mut self) -> SparseSymMatrix {
        self.entries.sort_unstable_by_key(|e| (e.0, e.1));
        let mut row_ptr = vec![0usize; self.dim + 1];
        let mut col_idx = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in self.entries {
            if last == Some((r, c)) {
                *values.last_mut().expect("merged entry exists") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SparseSymMatrix {
            dim: self.dim,
            row_ptr,
            col_idx,
            values,
        }
    }
}

/// Symmetric sparse matrix stored as the upper triangle in CSR layout.
///
/// Products expand the stored triangle to act as the full matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymMatrix {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSymMatrix {
    pub fn identity(dim: usize) -> Self {
        let mut b = SymTripletBuilder::with_capacity(dim, dim);
        for i in 0..dim {
            b.add(i, i, 1.0);
        }
        b.finish()
    }

    pub fn zeros(dim: usize) -> Self {
        SymTripletBuilder::new(dim).finish()
    }

    /// Symmetric tridiagonal matrix from its diagonal and first off-diagonal.
    pub fn tridiagonal(diag: &[f64], off: &[f64]) -> Self {
        let n = diag.len();
        assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
        let mut b = SymTripletBuilder::with_capacity(n, 2 * n);
        for (i, &d) in diag.iter().enumerate() {
            b.add(i, i, d);
        }
        for (i, &o) in off.iter().enumerate() {
            b.add(i, i + 1, o);
        }
        b.finish()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of stored (upper triangle) entries.
    pub fn nnz_stored(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// Stored entries `(row, col, value)` with `row <= col`.
    pub fn upper_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.dim).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |k| (r, self.col_idx[k], self.values[k]))
        })
    }

    /// All entries of the full symmetric matrix.
    pub fn full_entries(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.upper_entries().flat_map(|(r, c, v)| {
            let mirror = (r != c).then_some((c, r, v));
            std::iter::once((r, c, v)).chain(mirror)
        })
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        let mut y = vec![0.0; self.dim];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x`; panics on length mismatch.
    pub fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        y.fill(0.0);
        for r in 0..self.dim {
            let xr = x[r];
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                let c = self.col_idx[k];
                let v = self.values[k];
                acc += v * x[c];
                if c != r {
                    y[c] += v * xr;
                }
            }
            y[r] += acc;
        }
    }

    /// `x^T A y`.
    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        let mut ay = vec![0.0; self.dim];
        self.matvec_into(y, &mut ay);
        super::dot(x, &ay)
    }

    /// `x^T A x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        self.inner(x, x)
    }

    /// Bands `(diag, off)` when the matrix is tridiagonal.
    pub fn tridiagonal_bands(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut off = vec![0.0; self.dim.saturating_sub(1)];
        for (r, c, v) in self.upper_entries() {
            if c > r + 1 {
                return None;
            }
            if c == r + 1 {
                off[r] = v;
            }
        }
        Some((self.diagonal(), off))
    }

    /// `alpha * self + beta * other`.
    pub fn linear_combination(&self, alpha: f64, other: &SparseSymMatrix, beta: f64) -> Result<Self> {
        check_dim(self.dim, other.dim)?;
        let mut b = SymTripletBuilder::with_capacity(self.dim, self.nnz_stored() + other.nnz_stored());
        for (r, c, v) in self.upper_entries() {
            b.add(r, c, alpha * v);
        }
        for (r, c, v) in other.upper_entries() {
            b.add(r, c, beta * v);
        }
        Ok(b.finish())
    }

    pub fn to_dense(&self) -> super::DenseMatrix {
        let mut d = super::DenseMatrix::zeros(self.dim);
        for (r, c, v) in self.full_entries() {
            d[(r, c)] = v;
        }
        d
    }
}
