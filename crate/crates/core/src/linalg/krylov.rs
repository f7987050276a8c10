use serde::Serialize;

use crate::linalg::{axpy, check_dim, dot, norm2, SparseSymMatrix};
use crate::{Error, Result};

/// Outcome of an iterative solve.
///
/// `residual_norm` is the true residual `||b - A x||` of the returned
/// iterate, recomputed at exit rather than taken from the recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolveReport {
    pub iterations: usize,
    pub residual_norm: f64,
    pub initial_residual_norm: f64,
    pub converged: bool,
}

impl SolveReport {
    pub fn relative_residual(&self) -> f64 {
        if self.initial_residual_norm == 0.0 {
            self.residual_norm
        } else {
            self.residual_norm / self.initial_residual_norm
        }
    }
}

fn validate(a: &SparseSymMatrix, b: &[f64], tol: f64) -> Result<()> {
    check_dim(a.dim(), b.len())?;
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side".into()));
    }
    Ok(())
}

fn true_residual(a: &SparseSymMatrix, x: &[f64], b: &[f64], scratch: &mut [f64]) -> f64 {
    a.matvec_into(x, scratch);
    scratch
        .iter()
        .zip(b)
        .map(|(ax, bi)| (bi - ax) * (bi - ax))
        .sum::<f64>()
        .sqrt()
}

/// Conjugate gradients from a zero initial guess.
///
/// Stops when `||r_k|| <= tol * ||b||`. Hitting `maxit`, or detecting a
/// non-positive curvature direction, returns the current iterate with
/// `converged = false`.
pub fn solve_spd_cg(
    a: &SparseSymMatrix,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    validate(a, b, tol)?;
    let n = b.len();
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Ok((
            x,
            SolveReport {
                iterations: 0,
                residual_norm: 0.0,
                initial_residual_norm: 0.0,
                converged: true,
            },
        ));
    }
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    let mut rr = dot(&r, &r);
    let target = tol * b_norm;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < maxit {
        a.matvec_into(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            break;
        }
        let alpha = rr / pap;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &ap, &mut r);
        iterations += 1;
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            converged = true;
            break;
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    let residual_norm = true_residual(a, &x, b, &mut ap);
    Ok((
        x,
        SolveReport {
            iterations,
            residual_norm,
            initial_residual_norm: b_norm,
            converged: converged && residual_norm <= target * (1.0 + 1e-6),
        },
    ))
}

/// Unpreconditioned MINRES (Paige and Saunders) from a zero initial guess.
///
/// Valid for symmetric indefinite systems. The recurrence residual estimate
/// drives the loop; once it drops below `tol * ||b||` the true residual is
/// checked and iteration continues if the two have drifted apart.
pub fn solve_sym_minres(
    a: &SparseSymMatrix,
    b: &[f64],
    tol: f64,
    maxit: usize,
) -> Result<(Vec<f64>, SolveReport)> {
    validate(a, b, tol)?;
    let n = b.len();
    let beta1 = norm2(b);
    let mut x = vec![0.0; n];
    if beta1 == 0.0 {
        return Ok((
            x,
            SolveReport {
                iterations: 0,
                residual_norm: 0.0,
                initial_residual_norm: 0.0,
                converged: true,
            },
        ));
    }
    let target = tol * beta1;

    // Lanczos vectors: r1 = beta_{k-1} v_{k-1}, r2 = beta_k v_k, y = A v_k - ...
    let mut r1 = b.to_vec();
    let mut r2 = b.to_vec();
    let mut y = b.to_vec();
    let mut v = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut w1 = vec![0.0; n];
    let mut w2 = vec![0.0; n];
    let mut scratch = vec![0.0; n];

    let mut oldb = 0.0;
    let mut beta = beta1;
    let mut dbar = 0.0;
    let mut epsln = 0.0;
    let mut phibar = beta1;
    let mut cs = -1.0;
    let mut sn = 0.0;

    let mut iterations = 0;
    let mut converged = false;
    let mut next_true_check = 0usize;

    while iterations < maxit {
        iterations += 1;
        let s = 1.0 / beta;
        for (vi, yi) in v.iter_mut().zip(&y) {
            *vi = s * yi;
        }
        a.matvec_into(&v, &mut y);
        if iterations >= 2 {
            axpy(-beta / oldb, &r1, &mut y);
        }
        let alfa = dot(&v, &y);
        axpy(-alfa / beta, &r2, &mut y);
        std::mem::swap(&mut r1, &mut r2);
        r2.copy_from_slice(&y);
        oldb = beta;
        beta = norm2(&r2);

        let oldeps = epsln;
        let delta = cs * dbar + sn * alfa;
        let gbar = sn * dbar - cs * alfa;
        epsln = sn * beta;
        dbar = -cs * beta;

        let gamma = gbar.hypot(beta).max(f64::EPSILON);
        cs = gbar / gamma;
        sn = beta / gamma;
        let phi = cs * phibar;
        phibar *= sn;

        // w_k = (v_k - eps_k w_{k-2} - delta_k w_{k-1}) / gamma_k
        std::mem::swap(&mut w1, &mut w2);
        std::mem::swap(&mut w2, &mut w);
        let inv_gamma = 1.0 / gamma;
        for i in 0..n {
            w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) * inv_gamma;
        }
        axpy(phi, &w, &mut x);

        if !phibar.is_finite() || !gbar.is_finite() {
            break;
        }
        if phibar <= target && iterations >= next_true_check {
            if true_residual(a, &x, b, &mut scratch) <= target {
                converged = true;
                break;
            }
            next_true_check = iterations + 10;
        }
        if beta == 0.0 {
            // Exact invariant subspace: the Krylov solution is final.
            break;
        }
    }
    let residual_norm = true_residual(a, &x, b, &mut scratch);
    Ok((
        x,
        SolveReport {
            iterations,
            residual_norm,
            initial_residual_norm: beta1,
            converged: converged || residual_norm <= target,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cg_identity_one_iteration() {
        let a = SparseSymMatrix::identity(4);
        let b = vec![1.0, -2.0, 3.0, 0.25];
        let (x, rep) = solve_spd_cg(&a, &b, 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert!(rep.iterations <= 1);
        assert_eq!(x, b);
    }

    #[test]
    fn cg_zero_rhs() {
        let a = SparseSymMatrix::tridiagonal(&[2.0; 3], &[-1.0; 2]);
        let (x, rep) = solve_spd_cg(&a, &[0.0; 3], 1e-10, 10).unwrap();
        assert_eq!(x, vec![0.0; 3]);
        assert!(rep.converged);
        assert_eq!(rep.iterations, 0);
    }

    #[test]
    fn cg_maxit_flags_nonconvergence() {
        let a = SparseSymMatrix::tridiagonal(&[2.0; 50], &[-1.0; 49]);
        let b = vec![1.0; 50];
        let (_, rep) = solve_spd_cg(&a, &b, 1e-12, 3).unwrap();
        assert!(!rep.converged);
        assert_eq!(rep.iterations, 3);
    }

    #[test]
    fn minres_identity() {
        let a = SparseSymMatrix::identity(3);
        let b = vec![1.0, 2.0, 3.0];
        let (x, rep) = solve_sym_minres(&a, &b, 1e-12, 10).unwrap();
        assert!(rep.converged);
        for (p, q) in x.iter().zip(&b) {
            assert!((p - q).abs() < 1e-14);
        }
    }

    #[test]
    fn minres_indefinite_diagonal() {
        let a = SparseSymMatrix::tridiagonal(&[1.0, -1.0], &[0.0]);
        let (x, rep) = solve_sym_minres(&a, &[2.0, 3.0], 1e-12, 10).unwrap();
        assert!(rep.converged);
        assert!((x[0] - 2.0).abs() < 1e-12 && (x[1] + 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_tolerance() {
        let a = SparseSymMatrix::identity(2);
        assert!(solve_sym_minres(&a, &[1.0, 1.0], 0.0, 10).is_err());
        assert!(solve_spd_cg(&a, &[1.0, 1.0], -1.0, 10).is_err());
    }

    #[test]
    fn invariant_holds_on_convergence() {
        let a = SparseSymMatrix::tridiagonal(&[3.0, -2.0, 4.0, -1.0], &[1.0, 0.5, -0.7]);
        let b = vec![1.0, 0.0, -1.0, 2.0];
        let (_, rep) = solve_sym_minres(&a, &b, 1e-10, 100).unwrap();
        assert!(rep.converged);
        assert!(rep.residual_norm <= 1e-10 * rep.initial_residual_norm);
    }
}
