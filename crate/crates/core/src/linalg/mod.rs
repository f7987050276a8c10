//! Sparse symmetric linear algebra and the iterative solvers built on it.

mod dense;
mod krylov;
mod sparse;
mod tridiag;

pub use dense::{solve_dense_direct, DenseMatrix, DENSE_ORACLE_CAP};
pub use krylov::{solve_spd_cg, solve_sym_minres, SolveReport};
pub use sparse::{SparseSymMatrix, SymTripletBuilder};
pub use tridiag::TridiagonalSpd;

/// Default relative tolerance for monolithic MINRES solves.
pub const MINRES_TOL: f64 = 1e-8;
/// Default iteration cap for monolithic MINRES solves.
pub const MINRES_MAXIT: usize = 50_000;
/// Default relative tolerance for inner SPD solves.
pub const CG_TOL: f64 = 1e-10;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn norm2(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> crate::Result<()> {
    if expected != found {
        return Err(crate::Error::DimensionMismatch { expected, found });
    }
    Ok(())
}
