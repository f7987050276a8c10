//! Space-time discrete structures: states, the regularized Lagrangian, its
//! bilinear forms and (semi)norms, and the assembled saddle-point system.

mod config;
mod kkt;
mod lagrangian;
mod state;

pub use config::{AssimConfig, Discretization};
pub use kkt::{assemble_kkt, KktLayout, KktSystem};
pub use lagrangian::{
    coercivity_witness, discrete_time_derivative, form_a1, form_a2, lagrangian_value, norm_c,
    norm_d, seminorm_r,
};
pub use state::{DualState, ProblemData, SpaceTimeState};
