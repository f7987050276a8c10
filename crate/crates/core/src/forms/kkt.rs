use crate::forms::{Discretization, DualState, ProblemData, SpaceTimeState};
use crate::linalg::{check_dim, SparseSymMatrix, SymTripletBuilder};
use crate::Result;

/// Flat index map of the saddle-point unknowns.
///
/// All primal levels `u^0..u^N` come first (level-major, node-minor),
/// followed by the dual levels `z^1..z^N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KktLayout {
    n_dofs: usize,
    n_steps: usize,
}

impl KktLayout {
    pub fn new(n_dofs: usize, n_steps: usize) -> Self {
        Self { n_dofs, n_steps }
    }

    pub fn dim(&self) -> usize {
        (2 * self.n_steps + 1) * self.n_dofs
    }

    pub fn n_primal(&self) -> usize {
        (self.n_steps + 1) * self.n_dofs
    }

    pub fn primal_offset(&self, level: usize) -> usize {
        debug_assert!(level <= self.n_steps);
        level * self.n_dofs
    }

    pub fn dual_offset(&self, level: usize) -> usize {
        debug_assert!((1..=self.n_steps).contains(&level));
        self.n_primal() + (level - 1) * self.n_dofs
    }

    pub fn primal_index(&self, level: usize, node: usize) -> usize {
        self.primal_offset(level) + node
    }

    pub fn dual_index(&self, level: usize, node: usize) -> usize {
        self.dual_offset(level) + node
    }

    pub fn pack(&self, u: &SpaceTimeState, z: &DualState) -> Result<Vec<f64>> {
        check_dim(self.n_primal(), u.as_slice().len())?;
        check_dim(self.dim() - self.n_primal(), z.as_slice().len())?;
        let mut x = Vec::with_capacity(self.dim());
        x.extend_from_slice(u.as_slice());
        x.extend_from_slice(z.as_slice());
        Ok(x)
    }

    pub fn unpack(&self, disc: &Discretization, x: &[f64]) -> Result<(SpaceTimeState, DualState)> {
        check_dim(self.dim(), x.len())?;
        let (p, d) = x.split_at(self.n_primal());
        Ok((
            SpaceTimeState::from_flat(*disc.mesh(), self.n_steps, p.to_vec())?,
            DualState::from_flat(*disc.mesh(), self.n_steps, d.to_vec())?,
        ))
    }
}

/// Symmetric indefinite Euler-Lagrange system of the Lagrangian.
#[derive(Debug, Clone)]
pub struct KktSystem {
    pub matrix: SparseSymMatrix,
    pub rhs: Vec<f64>,
    pub layout: KktLayout,
}

impl KktSystem {
    /// `K x - rhs`, i.e. the gradient of the Lagrangian at `x`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.matrix.matvec(x)?;
        for (gi, bi) in g.iter_mut().zip(&self.rhs) {
            *gi -= bi;
        }
        Ok(g)
    }
}

/// Assembles the Euler-Lagrange system
///
/// ```text
/// [ H  B^T ] [u]   [gM tau M_w q]
/// [ B  0   ] [z] = [tau M f     ]
/// ```
///
/// `H` carries the `gamma_0`, `gamma_m` and `gamma_1` terms; row `n` of `B`
/// is the implicit Euler step `(M + tau A) u^n - M u^{n-1}`.
pub fn assemble_kkt(disc: &Discretization, data: &ProblemData) -> Result<KktSystem> {
    disc.check_data(data)?;
    let cfg = disc.config();
    let (m, a, mw) = (disc.mass(), disc.stiffness(), disc.obs_mass());
    let (tau, h) = (disc.tau(), disc.h());
    let n_steps = disc.n_steps();
    let layout = KktLayout::new(disc.n_dofs(), n_steps);
    let step = m.linear_combination(1.0, a, tau)?;

    let per_block = 3 * disc.n_dofs();
    let mut b = SymTripletBuilder::with_capacity(layout.dim(), 8 * n_steps * per_block + per_block);
    let p = |n| layout.primal_offset(n);

    b.add_block(p(0), p(0), cfg.gamma_0 * h * h, a);
    for n in 1..=n_steps {
        b.add_block(p(n), p(n), cfg.gamma_m * tau, mw);
        // gamma_1 tau |grad (u^n - u^{n-1})|^2: path-graph Laplacian in time
        b.add_block(p(n), p(n), cfg.gamma_1 * tau, a);
        b.add_block(p(n - 1), p(n - 1), cfg.gamma_1 * tau, a);
        b.add_block(p(n - 1), p(n), -cfg.gamma_1 * tau, a);

        let d = layout.dual_offset(n);
        b.add_block(p(n), d, 1.0, &step);
        b.add_block(p(n - 1), d, -1.0, m);
    }
    let matrix = b.finish();

    let mut rhs = vec![0.0; layout.dim()];
    for n in 1..=n_steps {
        let mq = mw.matvec(data.q(n))?;
        let mf = m.matvec(data.f(n))?;
        let (po, d) = (p(n), layout.dual_offset(n));
        for k in 0..disc.n_dofs() {
            rhs[po + k] = cfg.gamma_m * tau * mq[k];
            rhs[d + k] = tau * mf[k];
        }
    }
    Ok(KktSystem { matrix, rhs, layout })
}
