use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::fem1d::{interpolate_nodal, l2_error_vs_exact, Mesh1D, ObservationWindow};
use crate::forms::{AssimConfig, Discretization, ProblemData};
use crate::harness::{generate_data, ExactSolution, Noise};
use crate::solvers::{
    solve_direct, solve_gradient_descent, solve_monolithic, stable_step_size, AssimSolution, GdOptions,
    MinresOptions,
};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    ConvergeH,
    ConvergeTau,
    ParamSweep,
    SingleSolve,
    OracleCheck,
    DivergeCheck,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::ConvergeH => "converge_h",
            Mode::ConvergeTau => "converge_tau",
            Mode::ParamSweep => "param_sweep",
            Mode::SingleSolve => "single_solve",
            Mode::OracleCheck => "oracle_check",
            Mode::DivergeCheck => "diverge_check",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Minres,
    GradDesc,
    Direct,
}

impl SolverKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolverKind::Minres => "minres",
            SolverKind::GradDesc => "graddesc",
            SolverKind::Direct => "direct",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SolverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "minres" => Ok(SolverKind::Minres),
            "graddesc" | "gd" => Ok(SolverKind::GradDesc),
            "direct" => Ok(SolverKind::Direct),
            other => Err(Error::InvalidConfig(format!("unknown solver '{other}'"))),
        }
    }
}

/// Everything needed to run one experiment.
///
/// `cells` and `steps` are refinement ranges: convergence in h walks
/// `cells` at `steps[0]`, convergence in tau walks `steps` at `cells[0]`,
/// and single solves use the first entry of each.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub mode: Mode,
    pub solver: SolverKind,
    pub gamma_m: f64,
    pub gamma_0: f64,
    pub gamma_1: f64,
    pub cells: Vec<usize>,
    pub steps: Vec<usize>,
    pub final_time: f64,
    pub freq_k: u32,
    pub window_offset: f64,
    pub gamma_0_grid: Vec<f64>,
    pub gamma_1_grid: Vec<f64>,
    pub noise: Noise,
    pub minres: MinresOptions,
    pub gd: GdOptions,
    /// Amplitude of the `sin(pi x)` perturbation added to the interpolated
    /// true initial state to form the gradient descent start; `None` means
    /// the mesh width `h`.
    pub gd_perturbation: Option<f64>,
    /// Shorten the gradient descent step to the stability limit.
    pub gd_stable_step: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            mode: Mode::SingleSolve,
            solver: SolverKind::Minres,
            gamma_m: 1.0,
            gamma_0: 1.0,
            gamma_1: 0.0,
            cells: vec![50],
            steps: vec![16],
            final_time: 0.02,
            freq_k: 2,
            window_offset: 0.2,
            gamma_0_grid: vec![0.1, 0.2, 0.6, 1.0, 1.2, 1.5],
            gamma_1_grid: log_grid(1e-3, 1e1, 9),
            noise: Noise::none(),
            minres: MinresOptions::default(),
            gd: GdOptions::default(),
            gd_perturbation: None,
            gd_stable_step: true,
        }
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

impl ExperimentSpec {
    /// h-refinement with `N = 16`, `T = 0.02`, `k = 2`.
    pub fn space_refinement() -> Self {
        Self {
            mode: Mode::ConvergeH,
            cells: vec![50, 100, 200],
            steps: vec![16],
            ..Self::default()
        }
    }

    /// tau-refinement with 200 cells, `tau in {0.004, 0.002, 0.001}`.
    pub fn time_refinement() -> Self {
        Self {
            mode: Mode::ConvergeTau,
            cells: vec![200],
            steps: vec![5, 10, 20],
            ..Self::default()
        }
    }

    /// tau-refinement by gradient descent, `h = 0.01`, `T = 0.1`, `k = 1`.
    pub fn regularized_time_refinement(gamma_1: f64) -> Self {
        Self {
            mode: Mode::ConvergeTau,
            solver: SolverKind::GradDesc,
            gamma_1,
            cells: vec![100],
            steps: vec![5, 10, 20, 40],
            final_time: 0.1,
            freq_k: 1,
            gd: GdOptions::to_tolerance(0.1, 1e-14, 1e-7, 2_000_000),
            ..Self::default()
        }
    }

    /// `(gamma_0, gamma_1)` sweep at `h = tau = 0.01`, `T = 0.1`, `k = 1`.
    pub fn parameter_sweep() -> Self {
        Self {
            mode: Mode::ParamSweep,
            cells: vec![100],
            steps: vec![10],
            final_time: 0.1,
            freq_k: 1,
            ..Self::default()
        }
    }

    /// `gamma_0 = 0` against the h-refinement baseline at 50 cells.
    pub fn divergence() -> Self {
        Self {
            mode: Mode::DivergeCheck,
            cells: vec![50],
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() || self.steps.is_empty() {
            return Err(Error::InvalidConfig("cell and step ranges must be nonempty".into()));
        }
        if self.mode == Mode::ParamSweep && (self.gamma_0_grid.is_empty() || self.gamma_1_grid.is_empty()) {
            return Err(Error::InvalidConfig("sweep grids must be nonempty".into()));
        }
        if !(self.noise.magnitude >= 0.0) {
            return Err(Error::InvalidConfig("noise magnitude must be non-negative".into()));
        }
        ExactSolution::new(self.freq_k)?;
        ObservationWindow::new(self.window_offset)?;
        Ok(())
    }

    fn config(&self, n_cells: usize, n_steps: usize, gamma_0: f64, gamma_1: f64) -> Result<AssimConfig> {
        let cfg = AssimConfig::new(Mesh1D::new(n_cells)?, n_steps, self.final_time)
            .with_gammas(self.gamma_m, gamma_0, gamma_1)
            .with_window(ObservationWindow::new(self.window_offset)?)
            .allow_unregularized(self.mode == Mode::DivergeCheck);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// One solve, summarized.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub mode: Mode,
    pub solver: SolverKind,
    pub n_cells: usize,
    pub h: f64,
    pub n_steps: usize,
    pub tau: f64,
    pub gamma_m: f64,
    pub gamma_0: f64,
    pub gamma_1: f64,
    /// `||u(T) - u_h^N||_{L2(0,1)}`.
    pub error: f64,
    pub order: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub lagrangian: f64,
    pub wall_time_s: f64,
}

fn solve_with(
    spec: &ExperimentSpec,
    disc: &Discretization,
    data: &ProblemData,
    exact: &ExactSolution,
) -> Result<AssimSolution> {
    match spec.solver {
        SolverKind::Minres => solve_monolithic(disc, data, spec.minres),
        SolverKind::Direct => solve_direct(disc, data),
        SolverKind::GradDesc => {
            let amp = spec.gd_perturbation.unwrap_or(disc.h());
            let phi0 = interpolate_nodal(disc.mesh(), |x| exact.eval(0.0, x) + amp * (PI * x).sin());
            let mut opts = spec.gd;
            if spec.gd_stable_step {
                opts.alpha = stable_step_size(disc, opts.alpha)?;
            }
            solve_gradient_descent(disc, data, &phi0, opts)
        }
    }
}

/// Solves one configuration and measures the final-time L2 error.
pub fn run_single(
    spec: &ExperimentSpec,
    n_cells: usize,
    n_steps: usize,
    gamma_0: f64,
    gamma_1: f64,
) -> Result<RunRecord> {
    let cfg = spec.config(n_cells, n_steps, gamma_0, gamma_1)?;
    let disc = Discretization::new(cfg)?;
    let exact = ExactSolution::new(spec.freq_k)?;
    let data = generate_data(&disc, &exact, spec.noise)?;
    let start = Instant::now();
    let sol = solve_with(spec, &disc, &data, &exact)?;
    let wall_time_s = start.elapsed().as_secs_f64();
    let error = l2_error_vs_exact(&sol.u.level_field(n_steps), exact.at(spec.final_time));
    Ok(RunRecord {
        mode: spec.mode,
        solver: spec.solver,
        n_cells,
        h: disc.h(),
        n_steps,
        tau: disc.tau(),
        gamma_m: cfg.gamma_m,
        gamma_0,
        gamma_1,
        error,
        order: None,
        iterations: sol.report.iterations,
        converged: sol.report.converged,
        lagrangian: sol.lagrangian,
        wall_time_s,
    })
}

/// `log(e_i / e_{i+1}) / log(s_i / s_{i+1})` for consecutive pairs, using the
/// actual size ratios. The first entry is `None`.
pub fn observed_orders(errors: &[f64], sizes: &[f64]) -> Vec<Option<f64>> {
    assert_eq!(errors.len(), sizes.len());
    std::iter::once(None)
        .chain(errors.windows(2).zip(sizes.windows(2)).map(|(e, s)| {
            let order = (e[0] / e[1]).ln() / (s[0] / s[1]).ln();
            order.is_finite().then_some(order)
        }))
        .take(errors.len())
        .collect()
}

fn with_orders(mut records: Vec<RunRecord>, size: impl Fn(&RunRecord) -> f64) -> Vec<RunRecord> {
    let errors: Vec<f64> = records.iter().map(|r| r.error).collect();
    let sizes: Vec<f64> = records.iter().map(size).collect();
    for (r, o) in records.iter_mut().zip(observed_orders(&errors, &sizes)) {
        r.order = o;
    }
    records
}

/// Refinement in h over `spec.cells` at `spec.steps[0]` time steps.
pub fn run_convergence_h(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let n_steps = spec.steps[0];
    let records = spec
        .cells
        .par_iter()
        .map(|&c| run_single(spec, c, n_steps, spec.gamma_0, spec.gamma_1))
        .collect::<Result<Vec<_>>>()?;
    Ok(with_orders(records, |r| r.h))
}

/// Refinement in tau over `spec.steps` on `spec.cells[0]` cells.
pub fn run_convergence_tau(spec: &ExperimentSpec) -> Result<Vec<RunRecord>> {
    spec.validate()?;
    let n_cells = spec.cells[0];
    let records = spec
        .steps
        .par_iter()
        .map(|&n| run_single(spec, n_cells, n, spec.gamma_0, spec.gamma_1))
        .collect::<Result<Vec<_>>>()?;
    Ok(with_orders(records, |r| r.tau))
}

#[derive(Debug, Clone)]
pub struct SweepOutcome {
    /// Row-major over `(gamma_0, gamma_1)` in grid order.
    pub records: Vec<RunRecord>,
    /// The best error at the largest `gamma_0` exceeds the median of the
    /// best errors at the other `gamma_0` values.
    pub over_regularized: bool,
}

/// Error over the `gamma_0 x gamma_1` grid at `spec.cells[0]`, `spec.steps[0]`.
pub fn run_param_sweep(spec: &ExperimentSpec) -> Result<SweepOutcome> {
    spec.validate()?;
    let grid: Vec<(f64, f64)> = spec
        .gamma_0_grid
        .iter()
        .flat_map(|&g0| spec.gamma_1_grid.iter().map(move |&g1| (g0, g1)))
        .collect();
    let (c, n) = (spec.cells[0], spec.steps[0]);
    let records = grid
        .par_iter()
        .map(|&(g0, g1)| run_single(spec, c, n, g0, g1))
        .collect::<Result<Vec<_>>>()?;

    let per_g0 = spec.gamma_1_grid.len();
    let mut best: Vec<f64> = records
        .chunks(per_g0)
        .map(|row| row.iter().map(|r| r.error).fold(f64::INFINITY, f64::min))
        .collect();
    let over_regularized = match best.pop() {
        Some(last) if !best.is_empty() => {
            best.sort_by(f64::total_cmp);
            last > best[best.len() / 2]
        }
        _ => false,
    };
    Ok(SweepOutcome {
        records,
        over_regularized,
    })
}

#[derive(Debug, Clone)]
pub struct DivergenceOutcome {
    pub baseline: RunRecord,
    pub unregularized: RunRecord,
    /// `gamma_0 = 1e-6`; recorded, not judged.
    pub weakly_regularized: RunRecord,
    /// The unregularized solve failed to converge or its error is at least
    /// ten times the baseline error.
    pub diverged: bool,
}

impl DivergenceOutcome {
    pub fn records(&self) -> Vec<RunRecord> {
        vec![
            self.baseline.clone(),
            self.unregularized.clone(),
            self.weakly_regularized.clone(),
        ]
    }
}

/// Compares `gamma_0 = spec.gamma_0` against `gamma_0 = 0`.
pub fn run_divergence_check(spec: &ExperimentSpec) -> Result<DivergenceOutcome> {
    let spec = ExperimentSpec {
        mode: Mode::DivergeCheck,
        ..spec.clone()
    };
    spec.validate()?;
    let (c, n) = (spec.cells[0], spec.steps[0]);
    let g0 = if spec.gamma_0 > 0.0 { spec.gamma_0 } else { 1.0 };
    let runs = [g0, 0.0, 1e-6]
        .par_iter()
        .map(|&g| run_single(&spec, c, n, g, spec.gamma_1))
        .collect::<Result<Vec<_>>>()?;
    let [baseline, unregularized, weakly_regularized]: [RunRecord; 3] =
        runs.try_into().expect("three runs");
    let diverged = !unregularized.converged
        || !unregularized.error.is_finite()
        || unregularized.error >= 10.0 * baseline.error;
    Ok(DivergenceOutcome {
        baseline,
        unregularized,
        weakly_regularized,
        diverged,
    })
}

#[derive(Debug, Clone)]
pub struct OracleOutcome {
    pub records: Vec<RunRecord>,
    /// Largest componentwise difference between any two solvers over the
    /// grid, across every time level of `u` and `z`.
    pub max_discrepancy: f64,
    /// Largest entry of any solver's output on homogeneous data.
    pub max_homogeneous: f64,
}

/// Cross-checks MINRES, the dense oracle and gradient descent on small
/// instances: `N in {2, 4}`, `cells in {4, 8}`, `gamma_1 in {0, 1}`.
pub fn run_oracle_check(spec: &ExperimentSpec) -> Result<OracleOutcome> {
    let base = ExperimentSpec {
        mode: Mode::OracleCheck,
        ..spec.clone()
    };
    base.validate()?;
    let exact = ExactSolution::new(base.freq_k)?;
    let mut grid = Vec::new();
    for n in [2usize, 4] {
        for c in [4usize, 8] {
            for g1 in [0.0, 1.0] {
                grid.push((n, c, g1));
            }
        }
    }
    let results = grid
        .par_iter()
        .map(|&(n, c, g1)| -> Result<(Vec<RunRecord>, f64, f64)> {
            let disc = Discretization::new(base.config(c, n, base.gamma_0, g1)?)?;
            let minres = MinresOptions {
                tol: 1e-13,
                maxit: 100_000,
            };
            let gd = GdOptions::to_tolerance(base.gd.alpha, 1e-13, 0.0, 5_000_000);
            let run = |data: &ProblemData| -> Result<Vec<(SolverKind, AssimSolution, f64)>> {
                let mut out = Vec::new();
                for kind in [SolverKind::Direct, SolverKind::Minres, SolverKind::GradDesc] {
                    let s = ExperimentSpec {
                        solver: kind,
                        minres,
                        gd,
                        ..base.clone()
                    };
                    let start = Instant::now();
                    let sol = solve_with(&s, &disc, data, &exact)?;
                    out.push((kind, sol, start.elapsed().as_secs_f64()));
                }
                Ok(out)
            };

            let data = generate_data(&disc, &exact, base.noise)?;
            let sols = run(&data)?;
            let mut disc_max: f64 = 0.0;
            for i in 0..sols.len() {
                for j in i + 1..sols.len() {
                    let (a, b) = (&sols[i].1, &sols[j].1);
                    let du = max_abs_diff(a.u.as_slice(), b.u.as_slice());
                    let dz = max_abs_diff(a.z.as_slice(), b.z.as_slice());
                    disc_max = disc_max.max(du).max(dz);
                }
            }
            let zeros = ProblemData::zeros(disc.mesh(), n);
            let homogeneous = run(&zeros)?
                .iter()
                .map(|(_, s, _)| {
                    s.u.as_slice()
                        .iter()
                        .chain(s.z.as_slice())
                        .fold(0.0f64, |m, v| m.max(v.abs()))
                })
                .fold(0.0f64, f64::max);

            let records = sols
                .into_iter()
                .map(|(kind, sol, wall)| RunRecord {
                    mode: Mode::OracleCheck,
                    solver: kind,
                    n_cells: c,
                    h: disc.h(),
                    n_steps: n,
                    tau: disc.tau(),
                    gamma_m: base.gamma_m,
                    gamma_0: base.gamma_0,
                    gamma_1: g1,
                    error: l2_error_vs_exact(&sol.u.level_field(n), exact.at(base.final_time)),
                    order: None,
                    iterations: sol.report.iterations,
                    converged: sol.report.converged,
                    lagrangian: sol.lagrangian,
                    wall_time_s: wall,
                })
                .collect();
            Ok((records, disc_max, homogeneous))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut records = Vec::new();
    let mut max_discrepancy: f64 = 0.0;
    let mut max_homogeneous: f64 = 0.0;
    for (r, d, h) in results {
        records.extend(r);
        max_discrepancy = max_discrepancy.max(d);
        max_homogeneous = max_homogeneous.max(h);
    }
    Ok(OracleOutcome {
        records,
        max_discrepancy,
        max_homogeneous,
    })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}
