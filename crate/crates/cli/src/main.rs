//! Command line driver for the heat-equation assimilation experiments.

use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use heat_assim::harness::{
    emit_csv, run_convergence_h, run_convergence_tau, run_divergence_check, run_oracle_check, run_param_sweep,
    run_single, write_csv, CsvOptions, ExperimentSpec, Mode, Noise, RunRecord, SolverKind,
};
use heat_assim::solvers::GdOptions;

const CSV_HELP: &str = "\
Output is CSV with a header row and these columns:
  mode         converge_h | converge_tau | param_sweep | single_solve | oracle_check | diverge_check
  solver       minres | graddesc | direct
  h            mesh width
  tau          time step
  gamma_m      data fidelity weight
  gamma_0      initial state regularization
  gamma_1      time derivative regularization
  error        L2 error of the computed state against the exact solution at the final time
  order        observed order against the previous row (empty for the first row)
  iterations   solver iterations (0 for the direct solver)
  wall_time_s  solve time in seconds (empty with --no-timing)";

#[derive(Parser)]
#[command(name = "heat-assim", version, about = "Heat equation data assimilation experiments", after_help = CSV_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one configuration.
    Solve(Common),
    /// Refine the mesh over the given cell counts.
    ConvergeH(Common),
    /// Refine the time step over the given step counts.
    ConvergeTau(Common),
    /// Sweep gamma_0 against gamma_1.
    ParamSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.6, 1.0, 1.2, 1.5])]
        gamma_0_grid: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        gamma_1_grid: Option<Vec<f64>>,
    },
    /// Compare against the unregularized problem (gamma_0 = 0).
    DivergeCheck(Common),
    /// Cross-check MINRES, the dense direct solver and gradient descent.
    OracleCheck(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1.0)]
    gamma_m: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma_0: f64,
    #[arg(long, default_value_t = 0.0)]
    gamma_1: f64,
    /// Cell counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [50usize])]
    cells: Vec<usize>,
    /// Time step counts, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [16usize])]
    steps: Vec<usize>,
    #[arg(long, default_value_t = 0.02)]
    final_time: f64,
    /// Spatial frequency of the exact solution.
    #[arg(long, default_value_t = 2)]
    freq_k: u32,
    /// minres, graddesc or direct.
    #[arg(long, default_value = "minres")]
    solver: SolverKind,
    /// Gradient descent step length.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Use the step as given instead of capping it at the stability limit.
    #[arg(long)]
    raw_alpha: bool,
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
    /// Per-level norm of the observation noise on the window.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Leave wall_time_s empty for reproducible output.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn spec(&self, mode: Mode) -> ExperimentSpec {
        ExperimentSpec {
            mode,
            solver: self.solver,
            gamma_m: self.gamma_m,
            gamma_0: self.gamma_0,
            gamma_1: self.gamma_1,
            cells: self.cells.clone(),
            steps: self.steps.clone(),
            final_time: self.final_time,
            freq_k: self.freq_k,
            noise: Noise {
                magnitude: self.noise,
                seed: self.seed,
            },
            gd: GdOptions {
                alpha: self.alpha,
                max_iters: self.max_iters,
                ..GdOptions::default()
            },
            gd_stable_step: !self.raw_alpha,
            ..ExperimentSpec::default()
        }
    }

    fn emit(&self, records: &[RunRecord]) -> Result<()> {
        let opts = CsvOptions {
            include_timing: !self.no_timing,
        };
        match &self.out {
            Some(path) => emit_csv(records, path, opts)?,
            None => write_csv(records, io::stdout().lock(), opts).context("writing CSV to stdout")?,
        }
        Ok(())
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Solve(c) => {
            let spec = c.spec(Mode::SingleSolve);
            spec.validate()?;
            let r = run_single(&spec, spec.cells[0], spec.steps[0], spec.gamma_0, spec.gamma_1)?;
            if !r.converged {
                eprintln!("warning: solver stopped before convergence after {} iterations", r.iterations);
            }
            c.emit(&[r])
        }
        Command::ConvergeH(c) => c.emit(&run_convergence_h(&c.spec(Mode::ConvergeH))?),
        Command::ConvergeTau(c) => c.emit(&run_convergence_tau(&c.spec(Mode::ConvergeTau))?),
        Command::ParamSweep {
            common,
            gamma_0_grid,
            gamma_1_grid,
        } => {
            let mut spec = common.spec(Mode::ParamSweep);
            spec.gamma_0_grid = gamma_0_grid;
            if let Some(g1) = gamma_1_grid {
                spec.gamma_1_grid = g1;
            }
            let out = run_param_sweep(&spec)?;
            if out.over_regularized {
                eprintln!("note: the largest gamma_0 gives a worse best error than the median");
            }
            common.emit(&out.records)
        }
        Command::DivergeCheck(c) => {
            let out = run_divergence_check(&c.spec(Mode::DivergeCheck))?;
            eprintln!(
                "gamma_0 = 0: {} (error {:.3e}, converged {}; baseline error {:.3e})",
                if out.diverged { "diverged" } else { "did not diverge" },
                out.unregularized.error,
                out.unregularized.converged,
                out.baseline.error
            );
            c.emit(&out.records())
        }
        Command::OracleCheck(c) => {
            let out = run_oracle_check(&c.spec(Mode::OracleCheck))?;
            eprintln!(
                "max solver discrepancy {:.3e}, max homogeneous response {:.3e}",
                out.max_discrepancy, out.max_homogeneous
            );
            c.emit(&out.records)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
