//! Experiment driver: exact solutions, synthetic observations, convergence
//! studies in h and tau, parameter sweeps and CSV output.

mod csv_out;
mod data;
mod experiments;

pub use csv_out::{emit_csv, write_csv, CsvOptions, CSV_COLUMNS};
pub use data::{generate_data, ExactSolution, Noise};
pub use experiments::{
    observed_orders, run_convergence_h, run_convergence_tau, run_divergence_check, run_oracle_check,
    run_param_sweep, run_single, DivergenceOutcome, ExperimentSpec, Mode, OracleOutcome, RunRecord,
    SolverKind, SweepOutcome,
};
