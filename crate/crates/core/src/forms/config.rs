use crate::fem1d::{
    assemble_mass, assemble_obs_mass, assemble_stiffness, Mesh1D, ObservationWindow,
};
use crate::forms::{DualState, ProblemData, SpaceTimeState};
use crate::linalg::{SparseSymMatrix, TridiagonalSpd};
use crate::{Error, Result};

/// Discretization and regularization parameters.
///
/// `tau` is never stored; it is always `final_time / n_steps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssimConfig {
    pub gamma_m: f64,
    pub gamma_0: f64,
    pub gamma_1: f64,
    pub n_steps: usize,
    pub final_time: f64,
    pub mesh: Mesh1D,
    pub window: ObservationWindow,
    /// Permits `gamma_m = 0` or `gamma_0 = 0`, which voids the uniqueness
    /// guarantee of the discrete system. Only for divergence experiments.
    pub allow_unregularized: bool,
}

impl AssimConfig {
    /// `gamma_m = gamma_0 = 1`, `gamma_1 = 0`, window `(0.2, 0.8)`.
    pub fn new(mesh: Mesh1D, n_steps: usize, final_time: f64) -> Self {
        Self {
            gamma_m: 1.0,
            gamma_0: 1.0,
            gamma_1: 0.0,
            n_steps,
            final_time,
            mesh,
            window: ObservationWindow::default(),
            allow_unregularized: false,
        }
    }

    pub fn with_gammas(mut self, gamma_m: f64, gamma_0: f64, gamma_1: f64) -> Self {
        self.gamma_m = gamma_m;
        self.gamma_0 = gamma_0;
        self.gamma_1 = gamma_1;
        self
    }

    pub fn with_window(mut self, window: ObservationWindow) -> Self {
        self.window = window;
        self
    }

    pub fn allow_unregularized(mut self, allow: bool) -> Self {
        self.allow_unregularized = allow;
        self
    }

    pub fn tau(&self) -> f64 {
        self.final_time / self.n_steps as f64
    }

    pub fn h(&self) -> f64 {
        self.mesh.h()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        for (name, g) in [
            ("gamma_m", self.gamma_m),
            ("gamma_0", self.gamma_0),
            ("gamma_1", self.gamma_1),
        ] {
            if !g.is_finite() || g < 0.0 {
                return bad(format!("{name} must be finite and non-negative, got {g}"));
            }
        }
        if !self.allow_unregularized && (self.gamma_m <= 0.0 || self.gamma_0 <= 0.0) {
            return bad(format!(
                "gamma_m and gamma_0 must be positive (got {}, {}); \
                 set allow_unregularized to override",
                self.gamma_m, self.gamma_0
            ));
        }
        if self.n_steps == 0 {
            return bad("n_steps must be at least 1".into());
        }
        if !(self.final_time > 0.0 && self.final_time.is_finite()) {
            return bad(format!("final_time must be positive, got {}", self.final_time));
        }
        Ok(())
    }
}

/// A validated configuration together with its assembled spatial matrices.
#[derive(Debug, Clone)]
pub struct Discretization {
    cfg: AssimConfig,
    mass: SparseSymMatrix,
    stiffness: SparseSymMatrix,
    obs_mass: SparseSymMatrix,
    step_factor: TridiagonalSpd,
    mass_factor: TridiagonalSpd,
}

impl Discretization {
    pub fn new(cfg: AssimConfig) -> Result<Self> {
        cfg.validate()?;
        let mass = assemble_mass(&cfg.mesh);
        let stiffness = assemble_stiffness(&cfg.mesh);
        let obs_mass = assemble_obs_mass(&cfg.mesh, &cfg.window);
        let step = mass.linear_combination(1.0, &stiffness, cfg.tau())?;
        let step_factor = TridiagonalSpd::from_matrix(&step)?;
        let mass_factor = TridiagonalSpd::from_matrix(&mass)?;
        Ok(Self {
            cfg,
            mass,
            stiffness,
            obs_mass,
            step_factor,
            mass_factor,
        })
    }

    pub fn config(&self) -> &AssimConfig {
        &self.cfg
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.cfg.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.cfg.mesh.n_dofs()
    }

    pub fn n_steps(&self) -> usize {
        self.cfg.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.cfg.tau()
    }

    pub fn h(&self) -> f64 {
        self.cfg.h()
    }

    pub fn mass(&self) -> &SparseSymMatrix {
        &self.mass
    }

    pub fn stiffness(&self) -> &SparseSymMatrix {
        &self.stiffness
    }

    pub fn obs_mass(&self) -> &SparseSymMatrix {
        &self.obs_mass
    }

    /// Factor of `M + tau A`, the implicit Euler step matrix.
    pub fn step_factor(&self) -> &TridiagonalSpd {
        &self.step_factor
    }

    pub fn mass_factor(&self) -> &TridiagonalSpd {
        &self.mass_factor
    }

    pub(crate) fn check_primal(&self, u: &SpaceTimeState) -> Result<()> {
        self.check_shape(u.mesh(), u.n_steps())
    }

    pub(crate) fn check_dual(&self, z: &DualState) -> Result<()> {
        self.check_shape(z.mesh(), z.n_steps())
    }

    pub(crate) fn check_data(&self, data: &ProblemData) -> Result<()> {
        crate::linalg::check_dim(self.n_steps(), data.n_steps())?;
        crate::linalg::check_dim(self.n_dofs(), data.n_dofs())
    }

    fn check_shape(&self, mesh: &Mesh1D, n_steps: usize) -> Result<()> {
        crate::linalg::check_dim(self.n_dofs(), mesh.n_dofs())?;
        crate::linalg::check_dim(self.n_steps(), n_steps)
    }
}
