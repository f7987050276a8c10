//! Finite element reconstruction of heat equation states from interior
//! space-time observations when the initial state is unknown.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`]: sparse symmetric storage, CG, MINRES and a dense oracle.
//! * [`fem1d`]: P1 elements on a uniform mesh of (0, 1).
//! * [`forms`]: the regularized Lagrangian, its bilinear forms and norms,
//!   and the assembled saddle-point system.
//! * [`solvers`]: monolithic MINRES and the forward/backward sweep with
//!   gradient descent on the initial value.
//! * [`harness`]: exact solutions, synthetic data, convergence studies and
//!   CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fem1d;
pub mod forms;
pub mod harness;
pub mod linalg;
pub mod solvers;

pub use error::{Error, Result};
