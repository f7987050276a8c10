//! Uniform P1 finite elements on (0, 1) with homogeneous Dirichlet
//! conditions eliminated from the unknowns.

use crate::linalg::{solve_spd_cg, SparseSymMatrix, SymTripletBuilder};
use crate::{Error, Result};

/// Uniform partition of (0, 1) into `n_cells` cells.
///
/// Degrees of freedom live on the interior nodes `x_i = i h`,
/// `i = 1..n_cells-1`; dof `k` sits at `x_{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mesh1D {
    n_cells: usize,
}

impl Mesh1D {
    pub fn new(n_cells: usize) -> Result<Self> {
        if n_cells < 2 {
            return Err(Error::InvalidConfig(format!(
                "mesh needs at least 2 cells, got {n_cells}"
            )));
        }
        Ok(Self { n_cells })
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    /// Number of interior nodes, i.e. the dimension of the P1 space.
    pub fn n_dofs(&self) -> usize {
        self.n_cells - 1
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells as f64
    }

    /// Coordinate of dof `k`.
    pub fn node(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.h()
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_dofs()).map(|k| self.node(k))
    }

    /// Endpoints of cell `c`.
    pub fn cell(&self, c: usize) -> (f64, f64) {
        let h = self.h();
        (c as f64 * h, (c + 1) as f64 * h)
    }

    /// Dof indices of the two endpoints of cell `c`, `None` on the boundary.
    fn cell_dofs(&self, c: usize) -> [Option<usize>; 2] {
        let left = (c > 0).then(|| c - 1);
        let right = (c + 1 < self.n_cells).then_some(c);
        [left, right]
    }
}

/// Observation interval `(a, 1 - a)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObservationWindow {
    a: f64,
}

impl ObservationWindow {
    pub fn new(a: f64) -> Result<Self> {
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::InvalidConfig(format!(
                "observation window offset must lie in (0, 1/2), got {a}"
            )));
        }
        Ok(Self { a })
    }

    pub fn offset(&self) -> f64 {
        self.a
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, 1.0 - self.a)
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.a && x < 1.0 - self.a
    }
}

impl Default for ObservationWindow {
    fn default() -> Self {
        Self { a: 0.2 }
    }
}

/// A member of the P1 space given by its interior nodal values.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalField {
    pub mesh: Mesh1D,
    pub coeffs: Vec<f64>,
}

impl NodalField {
    pub fn zeros(mesh: Mesh1D) -> Self {
        Self {
            mesh,
            coeffs: vec![0.0; mesh.n_dofs()],
        }
    }

    pub fn new(mesh: Mesh1D, coeffs: Vec<f64>) -> Result<Self> {
        crate::linalg::check_dim(mesh.n_dofs(), coeffs.len())?;
        Ok(Self { mesh, coeffs })
    }

    /// Point evaluation of the piecewise linear function.
    pub fn eval(&self, x: f64) -> f64 {
        eval_p1(&self.mesh, &self.coeffs, x)
    }
}

pub(crate) fn eval_p1(mesh: &Mesh1D, coeffs: &[f64], x: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    let h = mesh.h();
    let c = ((x / h).floor() as usize).min(mesh.n_cells() - 1);
    let (x0, _) = mesh.cell(c);
    let t = (x - x0) / h;
    let [l, r] = mesh.cell_dofs(c);
    let vl = l.map_or(0.0, |k| coeffs[k]);
    let vr = r.map_or(0.0, |k| coeffs[k]);
    vl * (1.0 - t) + vr * t
}

const GAUSS5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GAUSS5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Five-point Gauss-Legendre rule on `[lo, hi]`.
pub fn gauss5(lo: f64, hi: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    GAUSS5_NODES
        .iter()
        .zip(GAUSS5_WEIGHTS)
        .map(|(&xi, w)| w * f(mid + half * xi))
        .sum::<f64>()
        * half
}

fn assemble_cells(mesh: &Mesh1D, mut local: impl FnMut(usize) -> [[f64; 2]; 2]) -> SparseSymMatrix {
    let mut b = SymTripletBuilder::with_capacity(mesh.n_dofs(), 3 * mesh.n_cells());
    for c in 0..mesh.n_cells() {
        let m = local(c);
        let dofs = mesh.cell_dofs(c);
        for p in 0..2 {
            for q in p..2 {
                if let (Some(i), Some(j)) = (dofs[p], dofs[q]) {
                    b.add(i, j, m[p][q]);
                }
            }
        }
    }
    b.finish()
}

fn local_mass(h: f64) -> [[f64; 2]; 2] {
    [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]]
}

/// `M_ij = (phi_i, phi_j)`.
pub fn assemble_mass(mesh: &Mesh1D) -> SparseSymMatrix {
    let h = mesh.h();
    assemble_cells(mesh, |_| local_mass(h))
}

/// Mass matrix over all `n_cells + 1` nodes, boundary included.
pub fn assemble_mass_with_boundary(mesh: &Mesh1D) -> SparseSymMatrix {
    let h = mesh.h();
    let mut b = SymTripletBuilder::new(mesh.n_cells() + 1);
    let m = local_mass(h);
    for c in 0..mesh.n_cells() {
        b.add(c, c, m[0][0]);
        b.add(c, c + 1, m[0][1]);
        b.add(c + 1, c + 1, m[1][1]);
    }
    b.finish()
}

/// `A_ij = (phi_i', phi_j')`.
pub fn assemble_stiffness(mesh: &Mesh1D) -> SparseSymMatrix {
    let h = mesh.h();
    assemble_cells(mesh, |_| [[1.0 / h, -1.0 / h], [-1.0 / h, 1.0 / h]])
}

/// `(M_w)_ij = integral over w of phi_i phi_j`, with `w = (a, 1 - a)`.
pub fn assemble_obs_mass(mesh: &Mesh1D, window: &ObservationWindow) -> SparseSymMatrix {
    let (lo, hi) = window.bounds();
    assemble_interval_mass(mesh, lo, hi)
}

/// Mass matrix restricted to an arbitrary subinterval `(lo, hi)` of (0, 1).
///
/// Cells cut by the interval are integrated exactly: on the overlap the
/// products of local basis functions are quadratics and Simpson's rule is
/// exact for them.
pub fn assemble_interval_mass(mesh: &Mesh1D, lo: f64, hi: f64) -> SparseSymMatrix {
    let h = mesh.h();
    assemble_cells(mesh, |c| {
        let (x0, x1) = mesh.cell(c);
        let a = x0.max(lo);
        let b = x1.min(hi);
        if b <= a {
            return [[0.0; 2]; 2];
        }
        let basis = |x: f64| [(x1 - x) / h, (x - x0) / h];
        let (pa, pm, pb) = (basis(a), basis(0.5 * (a + b)), basis(b));
        let mut m = [[0.0; 2]; 2];
        for p in 0..2 {
            for q in 0..2 {
                m[p][q] = (b - a) / 6.0 * (pa[p] * pa[q] + 4.0 * pm[p] * pm[q] + pb[p] * pb[q]);
            }
        }
        m
    })
}

/// Nodal interpolant: `coeffs_k = u(x_k)`.
pub fn interpolate_nodal(mesh: &Mesh1D, u: impl Fn(f64) -> f64) -> NodalField {
    NodalField {
        mesh: *mesh,
        coeffs: mesh.nodes().map(u).collect(),
    }
}

/// Ritz (energy) projection: `a(pi_h u, w) = a(u, w)` for all `w` in the P1
/// space. The load `a(u, phi_i)` is integrated with the 5-point Gauss rule
/// using the supplied derivative `du`.
pub fn ritz_project(
    mesh: &Mesh1D,
    u: impl Fn(f64) -> f64,
    du: impl Fn(f64) -> f64,
) -> Result<NodalField> {
    let h = mesh.h();
    let mut rhs = vec![0.0; mesh.n_dofs()];
    for c in 0..mesh.n_cells() {
        let (x0, x1) = mesh.cell(c);
        let slope_int = gauss5(x0, x1, &du);
        if !slope_int.is_finite() {
            return Err(Error::NonFinite(format!("derivative quadrature on cell {c}")));
        }
        let [l, r] = mesh.cell_dofs(c);
        // phi_l' = -1/h, phi_r' = +1/h on this cell
        if let Some(k) = l {
            rhs[k] -= slope_int / h;
        }
        if let Some(k) = r {
            rhs[k] += slope_int / h;
        }
    }
    // Boundary values enter only through u's derivative; check them anyway.
    for x in [0.0, 1.0] {
        if !u(x).is_finite() {
            return Err(Error::NonFinite(format!("u({x})")));
        }
    }
    let a = assemble_stiffness(mesh);
    let (coeffs, report) = solve_spd_cg(&a, &rhs, crate::linalg::CG_TOL, 10 * mesh.n_dofs().max(10))?;
    if !report.converged {
        return Err(Error::InnerSolve(format!(
            "ritz projection CG stopped at relative residual {:e}",
            report.relative_residual()
        )));
    }
    Ok(NodalField { mesh: *mesh, coeffs })
}

/// `||v - u||_{L2(0,1)}` by 5-point Gauss quadrature on each cell.
pub fn l2_error_vs_exact(v: &NodalField, u_exact: impl Fn(f64) -> f64) -> f64 {
    l2_error_coeffs(&v.mesh, &v.coeffs, u_exact)
}

pub(crate) fn l2_error_coeffs(mesh: &Mesh1D, coeffs: &[f64], u_exact: impl Fn(f64) -> f64) -> f64 {
    (0..mesh.n_cells())
        .map(|c| {
            let (x0, x1) = mesh.cell(c);
            gauss5(x0, x1, |x| {
                let d = eval_p1(mesh, coeffs, x) - u_exact(x);
                d * d
            })
        })
        .sum::<f64>()
        .sqrt()
}
