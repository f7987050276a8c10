use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fem1d::interpolate_nodal;
use crate::forms::{Discretization, ProblemData};
use crate::{Error, Result};

/// `u(t, x) = exp(-pi^2 k^2 t) sin(pi k x)`, a source-free solution of the
/// heat equation with homogeneous Dirichlet data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactSolution {
    pub k: u32,
}

impl ExactSolution {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("frequency k must be at least 1".into()));
        }
        Ok(Self { k })
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        let k = self.k as f64;
        (-PI * PI * k * k * t).exp() * (PI * k * x).sin()
    }

    /// `u(t, .)` as a closure.
    pub fn at(&self, t: f64) -> impl Fn(f64) -> f64 + '_ {
        move |x| self.eval(t, x)
    }
}

/// Observation noise: uniform nodal perturbations on nodes inside the
/// window, rescaled to an exact L2(w) magnitude per time level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Noise {
    pub magnitude: f64,
    pub seed: u64,
}

impl Noise {
    pub fn none() -> Self {
        Self { magnitude: 0.0, seed: 0 }
    }
}

/// `f^n = 0` and `q^n = I_h u(t_n)`, plus optional noise on each `q^n`.
pub fn generate_data(disc: &Discretization, sol: &ExactSolution, noise: Noise) -> Result<ProblemData> {
    if !(noise.magnitude >= 0.0 && noise.magnitude.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "noise magnitude must be finite and non-negative, got {}",
            noise.magnitude
        )));
    }
    let mesh = disc.mesh();
    let tau = disc.tau();
    let mut data = ProblemData::zeros(mesh, disc.n_steps());
    for n in 1..=disc.n_steps() {
        let q = interpolate_nodal(mesh, sol.at(n as f64 * tau));
        data.q_mut(n).copy_from_slice(&q.coeffs);
    }
    if noise.magnitude > 0.0 {
        let window = disc.config().window;
        let mut rng = ChaCha8Rng::seed_from_u64(noise.seed);
        for n in 1..=disc.n_steps() {
            let delta: Vec<f64> = mesh
                .nodes()
                .map(|x| {
                    let r: f64 = rng.gen_range(-1.0..=1.0);
                    if window.contains(x) {
                        r
                    } else {
                        0.0
                    }
                })
                .collect();
            let size = disc.obs_mass().quad(&delta).sqrt();
            if size == 0.0 {
                return Err(Error::InvalidConfig("observation window contains no mesh nodes".into()));
            }
            let s = noise.magnitude / size;
            for (q, d) in data.q_mut(n).iter_mut().zip(&delta) {
                *q += s * d;
            }
        }
    }
    Ok(data)
}
