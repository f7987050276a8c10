use crate::linalg::{check_dim, SparseSymMatrix};
use crate::{Error, Result};

/// LDL^T factorization of a symmetric positive definite tridiagonal matrix.
///
/// Time stepping repeatedly solves with the same `M + tau A`, so the factor
/// is computed once and reused for every level.
#[derive(Debug, Clone)]
pub struct TridiagonalSpd {
    d: Vec<f64>,
    l: Vec<f64>,
}

impl TridiagonalSpd {
    pub fn factor(diag: &[f64], off: &[f64]) -> Result<Self> {
        let n = diag.len();
        check_dim(n.saturating_sub(1), off.len())?;
        let mut d = Vec::with_capacity(n);
        let mut l = Vec::with_capacity(off.len());
        for i in 0..n {
            let di = if i == 0 {
                diag[0]
            } else {
                diag[i] - l[i - 1] * l[i - 1] * d[i - 1]
            };
            if !(di > 0.0) || !di.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: i, value: di });
            }
            d.push(di);
            if i + 1 < n {
                l.push(off[i] / di);
            }
        }
        Ok(Self { d, l })
    }

    pub fn from_matrix(a: &SparseSymMatrix) -> Result<Self> {
        let (diag, off) = a
            .tridiagonal_bands()
            .ok_or_else(|| Error::InvalidConfig("matrix is not tridiagonal".into()))?;
        Self::factor(&diag, &off)
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), b.len())?;
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.d.len();
        assert_eq!(x.len(), n);
        for i in 1..n {
            x[i] -= self.l[i - 1] * x[i - 1];
        }
        for (xi, di) in x.iter_mut().zip(&self.d) {
            *xi /= di;
        }
        for i in (0..n.saturating_sub(1)).rev() {
            x[i] -= self.l[i] * x[i + 1];
        }
    }
}
