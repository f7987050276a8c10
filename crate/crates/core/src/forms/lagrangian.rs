use crate::forms::{Discretization, DualState, ProblemData, SpaceTimeState};
use crate::{Error, Result};

/// `d_tau u^n = (u^n - u^{n-1}) / tau` for `1 <= n <= N`.
pub fn discrete_time_derivative(
    disc: &Discretization,
    u: &SpaceTimeState,
    n: usize,
) -> Result<Vec<f64>> {
    disc.check_primal(u)?;
    if n == 0 || n > u.n_steps() {
        return Err(Error::LevelOutOfRange {
            level: n,
            min: 1,
            max: u.n_steps(),
        });
    }
    let tau = disc.tau();
    Ok(u.increment(n).into_iter().map(|d| d / tau).collect())
}

/// The regularized Lagrangian
///
/// ```text
/// L(u, z) = 1/2 gM tau sum_n |u^n - q^n|_w^2 + 1/2 g0 |h grad u^0|^2
///         + 1/2 g1 tau sum_n |tau grad d_tau u^n|^2
///         + tau sum_n [ (d_tau u^n, z^n) + a(u^n, z^n) - (f^n, z^n) ]
/// ```
///
/// with all sums over `n = 1..N`.
pub fn lagrangian_value(
    disc: &Discretization,
    u: &SpaceTimeState,
    z: &DualState,
    data: &ProblemData,
) -> Result<f64> {
    disc.check_primal(u)?;
    disc.check_dual(z)?;
    disc.check_data(data)?;
    let cfg = disc.config();
    let (m, a, mw) = (disc.mass(), disc.stiffness(), disc.obs_mass());
    let (tau, h) = (disc.tau(), disc.h());

    let mut value = 0.5 * cfg.gamma_0 * h * h * a.quad(u.level(0));
    for n in 1..=disc.n_steps() {
        let misfit: Vec<f64> = u.level(n).iter().zip(data.q(n)).map(|(a, b)| a - b).collect();
        let inc = u.increment(n);
        value += 0.5 * cfg.gamma_m * tau * mw.quad(&misfit);
        value += 0.5 * cfg.gamma_1 * tau * a.quad(&inc);
        // tau (d_tau u^n, z^n) = (u^n - u^{n-1}, z^n)
        value += m.inner(&inc, z.level(n)) + tau * a.inner(u.level(n), z.level(n))
            - tau * m.inner(data.f(n), z.level(n));
    }
    Ok(value)
}

/// `A1(u, w) = tau sum_n [ (d_tau u^n, w^n) + a(u^n, w^n) ]`.
pub fn form_a1(disc: &Discretization, u: &SpaceTimeState, w: &DualState) -> Result<f64> {
    disc.check_primal(u)?;
    disc.check_dual(w)?;
    let (m, a, tau) = (disc.mass(), disc.stiffness(), disc.tau());
    Ok((1..=disc.n_steps())
        .map(|n| m.inner(&u.increment(n), w.level(n)) + tau * a.inner(u.level(n), w.level(n)))
        .sum())
}

/// `A2((u, z), v)`: the regularization terms applied to `(u, v)` plus the
/// heat operator applied to `v` and tested with `z`.
pub fn form_a2(
    disc: &Discretization,
    u: &SpaceTimeState,
    z: &DualState,
    v: &SpaceTimeState,
) -> Result<f64> {
    disc.check_primal(u)?;
    disc.check_dual(z)?;
    disc.check_primal(v)?;
    let cfg = disc.config();
    let (m, a, mw) = (disc.mass(), disc.stiffness(), disc.obs_mass());
    let (tau, h) = (disc.tau(), disc.h());
    let mut value = cfg.gamma_0 * h * h * a.inner(u.level(0), v.level(0));
    for n in 1..=disc.n_steps() {
        let (du, dv) = (u.increment(n), v.increment(n));
        value += cfg.gamma_m * tau * mw.inner(u.level(n), v.level(n));
        value += cfg.gamma_1 * tau * a.inner(&du, &dv);
        value += m.inner(&dv, z.level(n)) + tau * a.inner(v.level(n), z.level(n));
    }
    Ok(value)
}

fn seminorm_r_squared(disc: &Discretization, u: &SpaceTimeState) -> f64 {
    let cfg = disc.config();
    let (a, mw) = (disc.stiffness(), disc.obs_mass());
    let (tau, h) = (disc.tau(), disc.h());
    let mut s = cfg.gamma_0 * h * h * a.quad(u.level(0));
    for n in 1..=disc.n_steps() {
        s += cfg.gamma_m * tau * mw.quad(u.level(n));
        s += cfg.gamma_1 * tau * a.quad(&u.increment(n));
    }
    s
}

/// Regularization seminorm `|||u|||_R`.
pub fn seminorm_r(disc: &Discretization, u: &SpaceTimeState) -> Result<f64> {
    disc.check_primal(u)?;
    Ok(seminorm_r_squared(disc, u).sqrt())
}

/// The stability norm `|||u, z|||_D`.
pub fn norm_d(disc: &Discretization, u: &SpaceTimeState, z: &DualState) -> Result<f64> {
    disc.check_primal(u)?;
    disc.check_dual(z)?;
    let (m, a) = (disc.mass(), disc.stiffness());
    let (tau, h) = (disc.tau(), disc.h());
    let n_steps = disc.n_steps();
    let mut s = m.quad(z.level(1)) + m.quad(z.level(n_steps));
    for n in 2..=n_steps {
        let dz: Vec<f64> = z.level(n).iter().zip(z.level(n - 1)).map(|(a, b)| a - b).collect();
        s += m.quad(&dz);
    }
    for n in 1..=n_steps {
        let inc = u.increment(n);
        s += tau * a.quad(z.level(n));
        s += h * h / tau * m.quad(&inc);
        s += h * h * a.quad(&inc);
    }
    s += h * h * a.quad(u.level(n_steps));
    Ok(s.sqrt())
}

/// `|||v, w|||_C^2 = |||v|||_R^2 + tau sum_n |w^n|^2`.
pub fn norm_c(disc: &Discretization, v: &SpaceTimeState, w: &DualState) -> Result<f64> {
    disc.check_primal(v)?;
    disc.check_dual(w)?;
    let tau = disc.tau();
    let dual: f64 = (1..=disc.n_steps()).map(|n| tau * disc.mass().quad(w.level(n))).sum();
    Ok((seminorm_r_squared(disc, v) + dual).sqrt())
}

/// Test pair `v = u + alpha z_hat`, `w = -z + alpha h^2 d_tau u` used to
/// certify coercivity of the saddle-point system; `z_hat^0 = 0`.
pub fn coercivity_witness(
    disc: &Discretization,
    u: &SpaceTimeState,
    z: &DualState,
    alpha: f64,
) -> Result<(SpaceTimeState, DualState)> {
    disc.check_primal(u)?;
    disc.check_dual(z)?;
    if !(alpha > 0.0) {
        return Err(Error::InvalidConfig(format!("alpha must be positive, got {alpha}")));
    }
    let (tau, h) = (disc.tau(), disc.h());
    let mut v = u.clone();
    let mut w = z.scaled(-1.0);
    for n in 1..=disc.n_steps() {
        crate::linalg::axpy(alpha, z.level(n), v.level_mut(n));
        crate::linalg::axpy(alpha * h * h / tau, &u.increment(n), w.level_mut(n));
    }
    Ok((v, w))
}
