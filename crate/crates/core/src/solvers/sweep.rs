use crate::fem1d::NodalField;
use crate::forms::{Discretization, DualState, ProblemData, SpaceTimeState};
use crate::linalg::{axpy, check_dim};
use crate::{Error, Result};

fn finite(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what.to_string()))
    }
}

/// Implicit Euler from `u^0 = phi`:
/// `(M + tau A) u^n = M u^{n-1} + tau M f^n`.
pub fn forward_heat(disc: &Discretization, phi: &NodalField, data: &ProblemData) -> Result<SpaceTimeState> {
    check_dim(disc.n_dofs(), phi.coeffs.len())?;
    disc.check_data(data)?;
    let (m, tau) = (disc.mass(), disc.tau());
    let mut u = SpaceTimeState::zeros(*disc.mesh(), disc.n_steps());
    u.level_mut(0).copy_from_slice(&phi.coeffs);
    let mut rhs = vec![0.0; disc.n_dofs()];
    let mut mf = vec![0.0; disc.n_dofs()];
    for n in 1..=disc.n_steps() {
        m.matvec_into(u.level(n - 1), &mut rhs);
        m.matvec_into(data.f(n), &mut mf);
        axpy(tau, &mf, &mut rhs);
        disc.step_factor().solve_in_place(&mut rhs);
        u.level_mut(n).copy_from_slice(&rhs);
    }
    finite(u.as_slice(), "forward heat sweep")?;
    Ok(u)
}

/// Backward sweep for the multiplier with `z^{N+1} = 0`:
///
/// ```text
/// (M + tau A) z^n = M z^{n+1} + gM tau M_w (q^n - u^n)
///                 - g1 tau A ((u^n - u^{n-1}) - (u^{n+1} - u^n))
/// ```
///
/// where the `u^{N+1}` increment is taken as zero. This is the primal
/// stationarity condition tested against levels `n >= 1`.
pub fn backward_dual(disc: &Discretization, u: &SpaceTimeState, data: &ProblemData) -> Result<DualState> {
    disc.check_primal(u)?;
    disc.check_data(data)?;
    let cfg = disc.config();
    let (m, a, mw, tau) = (disc.mass(), disc.stiffness(), disc.obs_mass(), disc.tau());
    let n_steps = disc.n_steps();
    let nd = disc.n_dofs();
    let mut z = DualState::zeros(*disc.mesh(), n_steps);
    let mut next = vec![0.0; nd];
    let mut rhs = vec![0.0; nd];
    let mut tmp = vec![0.0; nd];
    let mut misfit = vec![0.0; nd];
    for n in (1..=n_steps).rev() {
        m.matvec_into(&next, &mut rhs);
        for ((r, q), v) in misfit.iter_mut().zip(data.q(n)).zip(u.level(n)) {
            *r = q - v;
        }
        mw.matvec_into(&misfit, &mut tmp);
        axpy(cfg.gamma_m * tau, &tmp, &mut rhs);
        if cfg.gamma_1 != 0.0 {
            let mut second = u.increment(n);
            if n < n_steps {
                axpy(-1.0, &u.increment(n + 1), &mut second);
            }
            a.matvec_into(&second, &mut tmp);
            axpy(-cfg.gamma_1 * tau, &tmp, &mut rhs);
        }
        disc.step_factor().solve_in_place(&mut rhs);
        z.level_mut(n).copy_from_slice(&rhs);
        next.copy_from_slice(&rhs);
    }
    finite(z.as_slice(), "backward dual sweep")?;
    Ok(z)
}

/// Coefficients `C(phi, psi_i)` of the initial-level stationarity condition
///
/// ```text
/// C(phi, psi) = g0 (h grad u^0, h grad psi) - g1 tau (tau grad d_tau u^1, grad psi) - (z^1, psi)
/// ```
///
/// for `u = U(phi)`, `z = Z(phi)`. The pair solves the full system exactly
/// when this vector vanishes.
pub fn coupling_functional(disc: &Discretization, u: &SpaceTimeState, z: &DualState) -> Result<Vec<f64>> {
    disc.check_primal(u)?;
    disc.check_dual(z)?;
    let cfg = disc.config();
    let (m, a, tau, h) = (disc.mass(), disc.stiffness(), disc.tau(), disc.h());
    let mut c = a.matvec(u.level(0))?;
    c.iter_mut().for_each(|v| *v *= cfg.gamma_0 * h * h);
    if cfg.gamma_1 != 0.0 {
        let a_inc = a.matvec(&u.increment(1))?;
        axpy(-cfg.gamma_1 * tau, &a_inc, &mut c);
    }
    let mz = m.matvec(z.level(1))?;
    axpy(-1.0, &mz, &mut c);
    Ok(c)
}

/// Largest Euclidean residual of the discrete heat equation over all levels.
pub fn forward_residual(disc: &Discretization, u: &SpaceTimeState, data: &ProblemData) -> Result<f64> {
    disc.check_primal(u)?;
    disc.check_data(data)?;
    let (m, a, tau) = (disc.mass(), disc.stiffness(), disc.tau());
    let mut worst: f64 = 0.0;
    for n in 1..=disc.n_steps() {
        let mut r = m.matvec(&u.increment(n))?;
        axpy(tau, &a.matvec(u.level(n))?, &mut r);
        axpy(-tau, &m.matvec(data.f(n))?, &mut r);
        worst = worst.max(crate::linalg::norm2(&r));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem1d::{interpolate_nodal, Mesh1D};
    use crate::forms::AssimConfig;

    fn disc(n_cells: usize, n_steps: usize, t: f64, g1: f64) -> Discretization {
        let cfg = AssimConfig::new(Mesh1D::new(n_cells).unwrap(), n_steps, t).with_gammas(1.0, 1.0, g1);
        Discretization::new(cfg).unwrap()
    }

    #[test]
    fn zero_initial_value_stays_zero() {
        let d = disc(6, 4, 0.1, 0.0);
        let data = ProblemData::zeros(d.mesh(), 4);
        let u = forward_heat(&d, &NodalField::zeros(*d.mesh()), &data).unwrap();
        assert!(u.as_slice().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn energy_decays() {
        let d = disc(20, 10, 0.2, 0.0);
        let data = ProblemData::zeros(d.mesh(), 10);
        let phi = interpolate_nodal(d.mesh(), |x| (std::f64::consts::PI * x).sin());
        let u = forward_heat(&d, &phi, &data).unwrap();
        let norms: Vec<f64> = (0..=10).map(|n| d.mass().quad(u.level(n)).sqrt()).collect();
        assert!(norms.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn single_node_single_step() {
        let tau = 0.05;
        let d = disc(2, 1, tau, 0.0);
        let data = ProblemData::zeros(d.mesh(), 1);
        let phi = NodalField::new(*d.mesh(), vec![1.7]).unwrap();
        let u = forward_heat(&d, &phi, &data).unwrap();
        let expect = (1.0 / 3.0) * 1.7 / (1.0 / 3.0 + 4.0 * tau);
        assert!((u.level(1)[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn single_node_dual() {
        let tau = 0.1;
        let d = disc(2, 1, tau, 0.0);
        let mut data = ProblemData::zeros(d.mesh(), 1);
        data.q_mut(1)[0] = 0.9;
        let u = SpaceTimeState::from_levels(*d.mesh(), vec![vec![0.4], vec![0.3]]).unwrap();
        let z = backward_dual(&d, &u, &data).unwrap();
        let mw = d.obs_mass().get(0, 0);
        let expect = tau * mw * (0.9 - 0.3) / (1.0 / 3.0 + 4.0 * tau);
        assert!((z.level(1)[0] - expect).abs() < 1e-15);
    }

    #[test]
    fn matching_observations_give_zero_dual() {
        let d = disc(10, 5, 0.1, 0.0);
        let phi = interpolate_nodal(d.mesh(), |x| x * (1.0 - x));
        let zero = ProblemData::zeros(d.mesh(), 5);
        let u = forward_heat(&d, &phi, &zero).unwrap();
        let mut data = ProblemData::zeros(d.mesh(), 5);
        for n in 1..=5 {
            data.q_mut(n).copy_from_slice(u.level(n));
        }
        let z = backward_dual(&d, &u, &data).unwrap();
        assert!(z.as_slice().iter().all(|v| v.abs() < 1e-16));
    }

    #[test]
    fn coupling_is_gamma0_term_when_dual_vanishes() {
        let d = disc(8, 3, 0.1, 1.0);
        let phi: Vec<f64> = d.mesh().nodes().map(|x| x * (1.0 - x)).collect();
        let u = SpaceTimeState::from_levels(*d.mesh(), vec![phi.clone(); 4]).unwrap();
        let z = DualState::zeros(*d.mesh(), 3);
        let c = coupling_functional(&d, &u, &z).unwrap();
        let h2 = d.h() * d.h();
        let expect = d.stiffness().matvec(&phi).unwrap();
        for (a, b) in c.iter().zip(&expect) {
            assert!((a - h2 * b).abs() < 1e-15);
        }
    }
}
