use crate::fem1d::{Mesh1D, NodalField};
use crate::linalg::check_dim;
use crate::{Error, Result};

/// Primal trajectory `u^0, ..., u^N`, stored level-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeState {
    mesh: Mesh1D,
    n_steps: usize,
    values: Vec<f64>,
}

impl SpaceTimeState {
    pub fn zeros(mesh: Mesh1D, n_steps: usize) -> Self {
        Self {
            mesh,
            n_steps,
            values: vec![0.0; (n_steps + 1) * mesh.n_dofs()],
        }
    }

    pub fn from_levels(mesh: Mesh1D, levels: Vec<Vec<f64>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidConfig("a trajectory needs at least u^0".into()));
        }
        let n_steps = levels.len() - 1;
        let mut values = Vec::with_capacity(levels.len() * mesh.n_dofs());
        for l in levels {
            check_dim(mesh.n_dofs(), l.len())?;
            values.extend(l);
        }
        Ok(Self {
            mesh,
            n_steps,
            values,
        })
    }

    pub fn from_flat(mesh: Mesh1D, n_steps: usize, values: Vec<f64>) -> Result<Self> {
        check_dim((n_steps + 1) * mesh.n_dofs(), values.len())?;
        Ok(Self {
            mesh,
            n_steps,
            values,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Level `n` for `0 <= n <= N`.
    pub fn level(&self, n: usize) -> &[f64] {
        assert!(n <= self.n_steps, "primal level {n} > {}", self.n_steps);
        let d = self.mesh.n_dofs();
        &self.values[n * d..(n + 1) * d]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        assert!(n <= self.n_steps, "primal level {n} > {}", self.n_steps);
        let d = self.mesh.n_dofs();
        &mut self.values[n * d..(n + 1) * d]
    }

    pub fn level_field(&self, n: usize) -> NodalField {
        NodalField {
            mesh: self.mesh,
            coeffs: self.level(n).to_vec(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// `tau * d_tau u^n = u^n - u^{n-1}` for `1 <= n <= N`.
    pub(crate) fn increment(&self, n: usize) -> Vec<f64> {
        self.level(n)
            .iter()
            .zip(self.level(n - 1))
            .map(|(a, b)| a - b)
            .collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        check_dim(self.values.len(), other.values.len())?;
        let mut out = self.clone();
        crate::linalg::axpy(s, &other.values, &mut out.values);
        Ok(out)
    }
}

/// Dual trajectory `z^1, ..., z^N`; `z^{N+1} = 0` is implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct DualState {
    mesh: Mesh1D,
    n_steps: usize,
    values: Vec<f64>,
}

impl DualState {
    pub fn zeros(mesh: Mesh1D, n_steps: usize) -> Self {
        Self {
            mesh,
            n_steps,
            values: vec![0.0; n_steps * mesh.n_dofs()],
        }
    }

    /// `levels[0]` is `z^1`.
    pub fn from_levels(mesh: Mesh1D, levels: Vec<Vec<f64>>) -> Result<Self> {
        let n_steps = levels.len();
        let mut values = Vec::with_capacity(n_steps * mesh.n_dofs());
        for l in levels {
            check_dim(mesh.n_dofs(), l.len())?;
            values.extend(l);
        }
        Ok(Self {
            mesh,
            n_steps,
            values,
        })
    }

    pub fn from_flat(mesh: Mesh1D, n_steps: usize, values: Vec<f64>) -> Result<Self> {
        check_dim(n_steps * mesh.n_dofs(), values.len())?;
        Ok(Self {
            mesh,
            n_steps,
            values,
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Level `n` for `1 <= n <= N`.
    pub fn level(&self, n: usize) -> &[f64] {
        assert!(
            (1..=self.n_steps).contains(&n),
            "dual level {n} outside 1..={}",
            self.n_steps
        );
        let d = self.mesh.n_dofs();
        &self.values[(n - 1) * d..n * d]
    }

    pub fn level_mut(&mut self, n: usize) -> &mut [f64] {
        assert!(
            (1..=self.n_steps).contains(&n),
            "dual level {n} outside 1..={}",
            self.n_steps
        );
        let d = self.mesh.n_dofs();
        &mut self.values[(n - 1) * d..n * d]
    }

    pub fn level_field(&self, n: usize) -> NodalField {
        NodalField {
            mesh: self.mesh,
            coeffs: self.level(n).to_vec(),
        }
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        check_dim(self.values.len(), other.values.len())?;
        let mut out = self.clone();
        crate::linalg::axpy(s, &other.values, &mut out.values);
        Ok(out)
    }
}

/// Source `f^n` and observations `q^n` sampled at `t_n = n tau`, `n = 1..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemData {
    n_dofs: usize,
    f: Vec<Vec<f64>>,
    q: Vec<Vec<f64>>,
}

impl ProblemData {
    pub fn zeros(mesh: &Mesh1D, n_steps: usize) -> Self {
        let d = mesh.n_dofs();
        Self {
            n_dofs: d,
            f: vec![vec![0.0; d]; n_steps],
            q: vec![vec![0.0; d]; n_steps],
        }
    }

    /// `f[0]`, `q[0]` are the values at `t_1`.
    pub fn new(mesh: &Mesh1D, f: Vec<Vec<f64>>, q: Vec<Vec<f64>>) -> Result<Self> {
        check_dim(f.len(), q.len())?;
        for l in f.iter().chain(&q) {
            check_dim(mesh.n_dofs(), l.len())?;
        }
        Ok(Self {
            n_dofs: mesh.n_dofs(),
            f,
            q,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.f.len()
    }

    pub fn n_dofs(&self) -> usize {
        self.n_dofs
    }

    /// `f^n`, `1 <= n <= N`.
    pub fn f(&self, n: usize) -> &[f64] {
        &self.f[n - 1]
    }

    /// `q^n`, `1 <= n <= N`.
    pub fn q(&self, n: usize) -> &[f64] {
        &self.q[n - 1]
    }

    pub fn q_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.q[n - 1]
    }

    pub fn f_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.f[n - 1]
    }
}
