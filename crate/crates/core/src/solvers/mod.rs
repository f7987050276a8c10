//! Solution strategies for the discrete Euler-Lagrange system: a monolithic
//! MINRES solve, a dense direct oracle, and gradient descent on the initial
//! value driven by forward and backward heat sweeps.

mod graddesc;
mod monolithic;
mod sweep;

pub use graddesc::{
    reduced_hessian_max_eigenvalue, solve_gradient_descent, stable_step_size, GdOptions, GdStop,
};
pub use monolithic::{solve_direct, solve_monolithic, MinresOptions};
pub use sweep::{backward_dual, coupling_functional, forward_heat, forward_residual};

use crate::forms::{DualState, SpaceTimeState};
use crate::linalg::SolveReport;

/// A computed stationary point `(u, z)` with solver diagnostics.
#[derive(Debug, Clone)]
pub struct AssimSolution {
    pub u: SpaceTimeState,
    pub z: DualState,
    pub report: SolveReport,
    /// Lagrangian at the returned pair.
    pub lagrangian: f64,
    /// `||z^1||` per gradient descent iterate (empty for other solvers).
    pub z1_history: Vec<f64>,
    /// Lagrangian per gradient descent iterate (empty for other solvers).
    pub lagrangian_history: Vec<f64>,
    /// Why gradient descent stopped (`None` for other solvers).
    pub gd_stop: Option<GdStop>,
}
