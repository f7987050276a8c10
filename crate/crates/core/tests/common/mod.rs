//! Checks shared by the property suites and the acceptance runner. Each
//! takes explicit states so callers choose how to draw them.
#![allow(dead_code)]

use heat_assim::fem1d::{Mesh1D, ObservationWindow};
use heat_assim::forms::{
    assemble_kkt, coercivity_witness, discrete_time_derivative, form_a1, form_a2, lagrangian_value, norm_c,
    norm_d, seminorm_r, AssimConfig, Discretization, DualState, ProblemData, SpaceTimeState,
};
use heat_assim::linalg::SparseSymMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Grid of `(n_cells, n_steps)` used for the norm and coercivity checks.
pub const SHAPES: [(usize, usize); 6] = [(4, 2), (8, 4), (16, 3), (10, 8), (32, 5), (20, 16)];

pub fn disc(n_cells: usize, n_steps: usize, gammas: (f64, f64, f64)) -> Discretization {
    let cfg = AssimConfig::new(Mesh1D::new(n_cells).unwrap(), n_steps, 0.1)
        .with_gammas(gammas.0, gammas.1, gammas.2)
        .with_window(ObservationWindow::default());
    Discretization::new(cfg).unwrap()
}

pub fn primal(disc: &Discretization, values: Vec<f64>) -> SpaceTimeState {
    SpaceTimeState::from_flat(*disc.mesh(), disc.n_steps(), values).unwrap()
}

pub fn dual(disc: &Discretization, values: Vec<f64>) -> DualState {
    DualState::from_flat(*disc.mesh(), disc.n_steps(), values).unwrap()
}

pub fn random_vec(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_pair(disc: &Discretization, rng: &mut ChaCha8Rng) -> (SpaceTimeState, DualState) {
    let (n, s) = (disc.n_dofs(), disc.n_steps());
    (primal(disc, random_vec(rng, (s + 1) * n)), dual(disc, random_vec(rng, s * n)))
}

pub fn random_data(disc: &Discretization, rng: &mut ChaCha8Rng) -> ProblemData {
    let (n, s) = (disc.n_dofs(), disc.n_steps());
    let f = (0..s).map(|_| random_vec(rng, n)).collect();
    let q = (0..s).map(|_| random_vec(rng, n)).collect();
    ProblemData::new(disc.mesh(), f, q).unwrap()
}

/// Relative defect of `tau sum (d_tau u^n, u^n)_B = 1/2 (|u^N|_B^2 - |u^0|_B^2)
/// + tau^2/2 sum |d_tau u^n|_B^2` for the inner product given by `b`.
pub fn summation_by_parts_defect(disc: &Discretization, u: &SpaceTimeState, b: &SparseSymMatrix) -> f64 {
    let (tau, n_steps) = (disc.tau(), disc.n_steps());
    let mut lhs = 0.0;
    let mut sq = 0.0;
    for n in 1..=n_steps {
        let d = discrete_time_derivative(disc, u, n).unwrap();
        lhs += tau * b.inner(&d, u.level(n));
        sq += b.quad(&d);
    }
    let end = 0.5 * (b.quad(u.level(n_steps)) - b.quad(u.level(0)));
    let rhs = end + 0.5 * tau * tau * sq;
    let scale = lhs.abs() + end.abs() + 0.5 * tau * tau * sq;
    (lhs - rhs).abs() / scale.max(f64::MIN_POSITIVE)
}

/// Same identity routed through `A1(u, d_tau u)`:
/// `tau sum |d_tau u|^2 + 1/2 (|grad u^N|^2 - |grad u^0|^2) + tau^2/2 sum |grad d_tau u|^2`.
pub fn a1_identity_defect(disc: &Discretization, u: &SpaceTimeState) -> f64 {
    let (tau, n_steps) = (disc.tau(), disc.n_steps());
    let (m, a) = (disc.mass(), disc.stiffness());
    let levels: Vec<Vec<f64>> = (1..=n_steps)
        .map(|n| discrete_time_derivative(disc, u, n).unwrap())
        .collect();
    let lhs = form_a1(disc, u, &DualState::from_levels(*disc.mesh(), levels.clone()).unwrap()).unwrap();
    let mut rhs = 0.5 * (a.quad(u.level(n_steps)) - a.quad(u.level(0)));
    let mut scale = rhs.abs();
    for d in &levels {
        let t = tau * m.quad(d) + 0.5 * tau * tau * a.quad(d);
        rhs += t;
        scale += t;
    }
    (lhs - rhs).abs() / (scale + lhs.abs()).max(f64::MIN_POSITIVE)
}

/// `|y.Kx - x.Ky| / (|K| |x| |y|)` with the KKT matrix of `disc`.
pub fn kkt_asymmetry(disc: &Discretization, x: &[f64], y: &[f64]) -> f64 {
    let kkt = assemble_kkt(disc, &ProblemData::zeros(disc.mesh(), disc.n_steps())).unwrap();
    let k = &kkt.matrix;
    let kx = k.matvec(x).unwrap();
    let ky = k.matvec(y).unwrap();
    let a: f64 = y.iter().zip(&kx).map(|(p, q)| p * q).sum();
    let b: f64 = x.iter().zip(&ky).map(|(p, q)| p * q).sum();
    let norm = |v: &[f64]| v.iter().map(|t| t * t).sum::<f64>().sqrt();
    (a - b).abs() / (norm(&kx) * norm(y) + norm(&ky) * norm(x)).max(f64::MIN_POSITIVE)
}

/// Largest relative mismatch between the KKT residual `Kx - b` tested
/// against each direction and the central finite-difference derivative of
/// the Lagrangian along it.
pub fn gradient_fd_mismatch(
    disc: &Discretization,
    data: &ProblemData,
    x: &[f64],
    directions: &[Vec<f64>],
) -> f64 {
    let kkt = assemble_kkt(disc, data).unwrap();
    let g = kkt.gradient(x).unwrap();
    let lag = |p: &[f64]| {
        let (u, z) = kkt.layout.unpack(disc, p).unwrap();
        lagrangian_value(disc, &u, &z, data).unwrap()
    };
    let eps = 1e-4;
    let mut worst: f64 = 0.0;
    for d in directions {
        let plus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a + eps * b).collect();
        let minus: Vec<f64> = x.iter().zip(d).map(|(a, b)| a - eps * b).collect();
        let fd = (lag(&plus) - lag(&minus)) / (2.0 * eps);
        let exact: f64 = g.iter().zip(d).map(|(a, b)| a * b).sum();
        let scale = g.iter().map(|t| t * t).sum::<f64>().sqrt() * d.iter().map(|t| t * t).sum::<f64>().sqrt();
        worst = worst.max((fd - exact).abs() / scale.max(1e-300));
    }
    worst
}

/// The KKT residual tested with `(v, w)` equals the weak Euler-Lagrange forms
/// `A1(u, w) - tau sum (f, w) + A2((u, z), v) - gM tau sum (q, v)_w`.
pub fn kkt_form_mismatch(
    disc: &Discretization,
    data: &ProblemData,
    (u, z): (&SpaceTimeState, &DualState),
    (v, w): (&SpaceTimeState, &DualState),
) -> f64 {
    let kkt = assemble_kkt(disc, data).unwrap();
    let x = kkt.layout.pack(u, z).unwrap();
    let y = kkt.layout.pack(v, w).unwrap();
    let g = kkt.gradient(&x).unwrap();
    let via_matrix: f64 = g.iter().zip(&y).map(|(a, b)| a * b).sum();
    let (tau, gm) = (disc.tau(), disc.config().gamma_m);
    let mut via_forms = form_a1(disc, u, w).unwrap() + form_a2(disc, u, z, v).unwrap();
    for n in 1..=disc.n_steps() {
        via_forms -= tau * disc.mass().inner(data.f(n), w.level(n));
        via_forms -= gm * tau * disc.obs_mass().inner(data.q(n), v.level(n));
    }
    (via_matrix - via_forms).abs() / (via_matrix.abs() + via_forms.abs()).max(1.0)
}

/// Both sides of the coercivity inequality
/// `1/2 (|u|_R^2 + alpha |u,z|_D^2) <= A1(u, w) + A2((u, z), v)`,
/// plus the ratio `|v,w|_C / (|u|_R + |u,z|_D)`.
pub struct Coercivity {
    pub lhs: f64,
    pub rhs: f64,
    pub c_ratio: f64,
}

pub fn coercivity(disc: &Discretization, u: &SpaceTimeState, z: &DualState, alpha: f64) -> Coercivity {
    let (v, w) = coercivity_witness(disc, u, z, alpha).unwrap();
    let r = seminorm_r(disc, u).unwrap();
    let d = norm_d(disc, u, z).unwrap();
    Coercivity {
        lhs: 0.5 * (r * r + alpha * d * d),
        rhs: form_a1(disc, u, &w).unwrap() + form_a2(disc, u, z, &v).unwrap(),
        c_ratio: norm_c(disc, &v, &w).unwrap() / (r + d),
    }
}

/// Gram matrix of a quadratic form `q` over the standard basis of `R^dim`.
pub fn gram(dim: usize, q: impl Fn(&[f64]) -> f64) -> Vec<Vec<f64>> {
    let unit = |i: usize| {
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        e
    };
    let diag: Vec<f64> = (0..dim).map(|i| q(&unit(i))).collect();
    let mut g = vec![vec![0.0; dim]; dim];
    for i in 0..dim {
        g[i][i] = diag[i];
        for j in 0..i {
            let mut e = unit(i);
            e[j] = 1.0;
            let v = 0.5 * (q(&e) - diag[i] - diag[j]);
            g[i][j] = v;
            g[j][i] = v;
        }
    }
    g
}

/// Smallest Cholesky pivot relative to the largest diagonal entry; negative
/// or zero when the matrix is not positive definite.
#[allow(clippy::needless_range_loop)]
pub fn min_relative_cholesky_pivot(mut g: Vec<Vec<f64>>) -> f64 {
    let n = g.len();
    let max_diag = (0..n).map(|i| g[i][i]).fold(0.0f64, f64::max);
    let mut min_pivot = f64::INFINITY;
    for k in 0..n {
        let p = g[k][k];
        min_pivot = min_pivot.min(p / max_diag);
        if p <= 0.0 {
            return min_pivot;
        }
        for i in k + 1..n {
            let l = g[i][k] / p;
            for j in k + 1..=i {
                g[i][j] -= l * g[j][k];
            }
        }
    }
    min_pivot
}

/// Bound on `|v,w|_C / (|u|_R + |u,z|_D)` asserted for the coercivity witness.
pub const COERCIVITY_C: f64 = 10.0;

/// Largest `alpha = 2^-k`, `k = 0..=10`, for which the coercivity
/// inequality holds on `draws` seeded draws over every shape in `SHAPES`.
pub fn coercivity_alpha(seed: u64, draws: usize) -> Option<f64> {
    let discs: Vec<Discretization> = SHAPES.iter().map(|&(c, s)| disc(c, s, (1.0, 1.0, 1.0))).collect();
    let mut r = rng(seed);
    let samples: Vec<(usize, SpaceTimeState, DualState)> = (0..draws * discs.len())
        .map(|i| {
            let k = i % discs.len();
            let (u, z) = random_pair(&discs[k], &mut r);
            (k, u, z)
        })
        .collect();
    (0..=10).map(|k| 0.5f64.powi(k)).find(|&alpha| {
        samples.iter().all(|(k, u, z)| {
            let res = coercivity(&discs[*k], u, z, alpha);
            res.lhs <= res.rhs
        })
    })
}
