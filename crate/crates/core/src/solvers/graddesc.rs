use serde::Serialize;

use crate::fem1d::NodalField;
use crate::forms::{lagrangian_value, Discretization, DualState, ProblemData, SpaceTimeState};
use crate::linalg::{dot, SolveReport};
use crate::solvers::{backward_dual, coupling_functional, forward_heat, AssimSolution};
use crate::{Error, Result};

/// Gradient descent on the initial value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GdOptions {
    /// Step size of `M phi_{m+1} = M phi_m - alpha C(phi_m)`.
    pub alpha: f64,
    pub max_iters: usize,
    /// Halt as soon as `||z^1||` grows between iterates, returning the
    /// iterate before the increase.
    pub stop_on_dual_increase: bool,
    /// Halt when the Euclidean norm of the coupling vector drops below this.
    pub abs_tol: f64,
    /// Halt when the coupling norm falls below `rel_tol` times its initial
    /// value; `0` disables the test.
    pub rel_tol: f64,
}

impl Default for GdOptions {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            max_iters: 10_000,
            stop_on_dual_increase: true,
            abs_tol: 1e-10,
            rel_tol: 0.0,
        }
    }
}

impl GdOptions {
    /// Runs to a coupling tolerance only, ignoring the dual-increase rule.
    pub fn to_tolerance(alpha: f64, abs_tol: f64, rel_tol: f64, max_iters: usize) -> Self {
        Self {
            alpha,
            max_iters,
            stop_on_dual_increase: false,
            abs_tol,
            rel_tol,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GdStop {
    Converged,
    DualIncrease,
    MaxIters,
    Diverged,
}

struct Iterate {
    phi: Vec<f64>,
    u: SpaceTimeState,
    z: DualState,
    coupling: Vec<f64>,
    coupling_norm: f64,
    z1_norm: f64,
    lagrangian: f64,
}

fn evaluate(disc: &Discretization, data: &ProblemData, phi: Vec<f64>) -> Result<Iterate> {
    let field = NodalField::new(*disc.mesh(), phi)?;
    let u = forward_heat(disc, &field, data)?;
    let z = backward_dual(disc, &u, data)?;
    let coupling = coupling_functional(disc, &u, &z)?;
    let lagrangian = lagrangian_value(disc, &u, &z, data)?;
    Ok(Iterate {
        phi: field.coeffs,
        coupling_norm: dot(&coupling, &coupling).sqrt(),
        z1_norm: disc.mass().quad(z.level(1)).sqrt(),
        u,
        z,
        coupling,
        lagrangian,
    })
}

/// Gradient descent `M phi_{m+1} = M phi_m - alpha C(phi_m)` on the
/// initial value, each iterate evaluated by a forward and a backward sweep.
///
/// The Lagrangian at `(U(phi), Z(phi))` is the reduced objective; it
/// decreases monotonically whenever `alpha` is below
/// `2 / reduced_hessian_max_eigenvalue`.
pub fn solve_gradient_descent(
    disc: &Discretization,
    data: &ProblemData,
    phi0: &NodalField,
    opts: GdOptions,
) -> Result<AssimSolution> {
    if !(opts.alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("step size must be positive, got {}", opts.alpha)));
    }
    let mut cur = evaluate(disc, data, phi0.coeffs.clone())?;
    let initial_norm = cur.coupling_norm;
    let mut z1_history = vec![cur.z1_norm];
    let mut lagrangian_history = vec![cur.lagrangian];
    let mut iterations = 0;
    let mut best: Option<Iterate> = None;

    let converged = |it: &Iterate| {
        it.coupling_norm <= opts.abs_tol || (opts.rel_tol > 0.0 && it.coupling_norm <= opts.rel_tol * initial_norm)
    };

    let stop = loop {
        if converged(&cur) {
            break GdStop::Converged;
        }
        if iterations >= opts.max_iters {
            break GdStop::MaxIters;
        }
        let mut grad = cur.coupling.clone();
        disc.mass_factor().solve_in_place(&mut grad);
        let phi: Vec<f64> = cur.phi.iter().zip(&grad).map(|(p, g)| p - opts.alpha * g).collect();
        let next = match evaluate(disc, data, phi) {
            Ok(it) if it.lagrangian.is_finite() => it,
            Ok(_) | Err(Error::NonFinite(_)) => break GdStop::Diverged,
            Err(e) => return Err(e),
        };
        if opts.stop_on_dual_increase && next.z1_norm > cur.z1_norm {
            break GdStop::DualIncrease;
        }
        iterations += 1;
        z1_history.push(next.z1_norm);
        lagrangian_history.push(next.lagrangian);
        // `best` holds the lowest-objective iterate only while `cur` is worse.
        let prev = std::mem::replace(&mut cur, next);
        match &best {
            None if cur.lagrangian > prev.lagrangian => best = Some(prev),
            Some(b) if cur.lagrangian <= b.lagrangian => best = None,
            _ => {}
        }
    };

    let chosen = match best {
        Some(b) if stop != GdStop::Converged => b,
        _ => cur,
    };
    Ok(AssimSolution {
        report: SolveReport {
            iterations,
            residual_norm: chosen.coupling_norm,
            initial_residual_norm: initial_norm,
            converged: stop == GdStop::Converged,
        },
        lagrangian: chosen.lagrangian,
        u: chosen.u,
        z: chosen.z,
        z1_history,
        lagrangian_history,
        gd_stop: Some(stop),
    })
}

/// Estimate of the largest eigenvalue of the reduced Hessian of the
/// Lagrangian with respect to the initial value, measured in the L2 inner
/// product, by power iteration.
///
/// The coupling vector is affine in `phi`; with homogeneous data it is the
/// Hessian action itself.
pub fn reduced_hessian_max_eigenvalue(disc: &Discretization, iterations: usize) -> Result<f64> {
    let zero = ProblemData::zeros(disc.mesh(), disc.n_steps());
    let n = disc.n_dofs();
    // Deterministic start rich in every mode.
    let mut x: Vec<f64> = (0..n).map(|k| 1.0 + 0.5 * ((k * 7919) % 13) as f64 / 13.0).collect();
    let mut lambda = 0.0;
    for _ in 0..iterations.max(1) {
        let field = NodalField::new(*disc.mesh(), x.clone())?;
        let u = forward_heat(disc, &field, &zero)?;
        let z = backward_dual(disc, &u, &zero)?;
        let hx = coupling_functional(disc, &u, &z)?;
        let mx_norm = disc.mass().quad(&x);
        lambda = dot(&x, &hx) / mx_norm;
        let mut y = hx;
        disc.mass_factor().solve_in_place(&mut y);
        let s = disc.mass().quad(&y).sqrt();
        if s == 0.0 {
            return Ok(0.0);
        }
        x = y.into_iter().map(|v| v / s).collect();
    }
    Ok(lambda)
}

/// `min(alpha, safety / lambda_max)`: the requested step, shortened when
/// it would exceed the stability limit `2 / lambda_max` of the iteration.
pub fn stable_step_size(disc: &Discretization, alpha: f64) -> Result<f64> {
    const SAFETY: f64 = 1.5;
    let lambda = reduced_hessian_max_eigenvalue(disc, 300)?;
    Ok(if lambda > 0.0 { alpha.min(SAFETY / lambda) } else { alpha })
}
