use crate::forms::{assemble_kkt, lagrangian_value, Discretization, ProblemData};
use crate::linalg::{solve_dense_direct, solve_sym_minres, SolveReport, MINRES_MAXIT, MINRES_TOL};
use crate::solvers::AssimSolution;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinresOptions {
    pub tol: f64,
    pub maxit: usize,
}

impl Default for MinresOptions {
    fn default() -> Self {
        Self {
            tol: MINRES_TOL,
            maxit: MINRES_MAXIT,
        }
    }
}

/// Solves the full saddle-point system with unpreconditioned MINRES from a
/// zero initial guess. Non-convergence is reported, not raised: the
/// returned iterate carries `report.converged == false`.
pub fn solve_monolithic(disc: &Discretization, data: &ProblemData, opts: MinresOptions) -> Result<AssimSolution> {
    let kkt = assemble_kkt(disc, data)?;
    let (x, report) = solve_sym_minres(&kkt.matrix, &kkt.rhs, opts.tol, opts.maxit)?;
    let (u, z) = kkt.layout.unpack(disc, &x)?;
    let lagrangian = lagrangian_value(disc, &u, &z, data)?;
    Ok(AssimSolution {
        u,
        z,
        report,
        lagrangian,
        z1_history: Vec::new(),
        lagrangian_history: Vec::new(),
        gd_stop: None,
    })
}

/// Dense LU solve of the saddle-point system; a reference oracle for small
/// instances only.
pub fn solve_direct(disc: &Discretization, data: &ProblemData) -> Result<AssimSolution> {
    let kkt = assemble_kkt(disc, data)?;
    let x = solve_dense_direct(&kkt.matrix.to_dense(), &kkt.rhs)?;
    let residual = crate::linalg::norm2(&kkt.gradient(&x)?);
    let (u, z) = kkt.layout.unpack(disc, &x)?;
    let lagrangian = lagrangian_value(disc, &u, &z, data)?;
    Ok(AssimSolution {
        u,
        z,
        report: SolveReport {
            iterations: 0,
            residual_norm: residual,
            initial_residual_norm: crate::linalg::norm2(&kkt.rhs),
            converged: true,
        },
        lagrangian,
        z1_history: Vec::new(),
        lagrangian_history: Vec::new(),
        gd_stop: None,
    })
}
