use super::InitialState;
use crate::market::MarketModel;
use crate::pde::PdeSolution;
use crate::{Error, Result, Scalar};

/// Whether the returned MMV control is known to be optimal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ControlStatus {
    Optimal,
    /// Some `1 + phi(p) < 0`: the candidate measure is not a probability measure and
    /// MMV optimality is not established. The MV control is still valid.
    CandidateOnly,
}

/// `(pi, eta1, eta2, phi)` at one state.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlVector<T> {
    pub pi: T,
    pub eta1: T,
    pub eta2: T,
    /// `phi(p)` at each mark of [`MarketModel::levy`] (atoms in order, or the two ends of
    /// a parametric support).
    pub phi: Vec<T>,
    /// `zeta(z_now, s)`; `phi(p) = zeta * gamma(z_now, p)`.
    pub zeta: T,
    pub assumption_violated: bool,
    pub status: ControlStatus,
}

/// Marks at which `phi` is reported.
pub(crate) fn reported_marks<T: Scalar>(model: &MarketModel<T>) -> Vec<T> {
    let atoms = model.levy().atoms();
    if atoms.is_empty() {
        model.levy().extreme_marks()
    } else {
        atoms.iter().map(|a| a.mark).collect()
    }
}

/// `zeta = -(mu - r - sigma b rho G_z / G) / Sigma` from precomputed `G`, `G_z`.
pub fn zeta_from_g<T: Scalar>(model: &MarketModel<T>, z: T, g: T, g_z: T) -> Result<T> {
    let pc = model.point(z)?;
    if !(pc.big_sigma > T::zero()) {
        return Err(Error::DegenerateMarket {
            z: z.to_f64_lossy(),
            reason: "Sigma = 0".into(),
        });
    }
    let premium = pc.mu - model.r();
    Ok(-(premium - pc.sigma * pc.b * model.rho_w() * g_z / g) / pc.big_sigma)
}

pub fn zeta<T: Scalar>(model: &MarketModel<T>, sol: &PdeSolution<T>, z: T, t: T) -> Result<T> {
    let q = sol.sample(z, t)?;
    zeta_from_g(model, z, q.g, q.g_z)
}

/// The same quantity computed from `H`: `zeta = -(mu - r + sigma b rho H_z / H) / Sigma`.
pub fn zeta_from_h<T: Scalar>(model: &MarketModel<T>, sol: &PdeSolution<T>, z: T, t: T) -> Result<T> {
    let q = sol.sample(z, t)?;
    let pc = model.point(z)?;
    if !(pc.big_sigma > T::zero()) {
        return Err(Error::DegenerateMarket {
            z: z.to_f64_lossy(),
            reason: "Sigma = 0".into(),
        });
    }
    let premium = pc.mu - model.r();
    Ok(-(premium + pc.sigma * pc.b * model.rho_w() * q.h_z / q.h) / pc.big_sigma)
}

/// Optimal MMV control at the current state `(x_now, z_now, s)` for an investor anchored at
/// `state`. `g0` is `G(state.z, state.t)`.
pub fn mmv_control_with_g0<T: Scalar>(
    state: &InitialState<T>,
    g0: T,
    x_now: T,
    z_now: T,
    s: T,
    sol: &PdeSolution<T>,
    model: &MarketModel<T>,
) -> Result<ControlVector<T>> {
    let q = sol.sample(z_now, s)?;
    let ze = zeta_from_g(model, z_now, q.g, q.g_z)?;
    let pc = model.point(z_now)?;
    let slope = q.g_z / q.g;
    let pi = (x_now - state.x + g0 / state.theta) * ze;
    let eta1 = ze * pc.sigma - model.rho_w() * pc.b * slope;
    let eta2 = -model.rho_bar() * pc.b * slope;
    let phi: Vec<T> = reported_marks(model)
        .into_iter()
        .map(|p| ze * model.gamma_at(z_now, p))
        .collect();
    let violated = model
        .levy()
        .extreme_marks()
        .into_iter()
        .any(|p| T::one() + ze * model.gamma_at(z_now, p) < T::zero());
    Ok(ControlVector {
        pi,
        eta1,
        eta2,
        phi,
        zeta: ze,
        assumption_violated: violated,
        status: if violated {
            ControlStatus::CandidateOnly
        } else {
            ControlStatus::Optimal
        },
    })
}

pub fn mmv_control<T: Scalar>(
    state: &InitialState<T>,
    x_now: T,
    z_now: T,
    s: T,
    sol: &PdeSolution<T>,
    model: &MarketModel<T>,
) -> Result<ControlVector<T>> {
    let g0 = sol.g_at(state.z, state.t)?;
    mmv_control_with_g0(state, g0, x_now, z_now, s, sol, model)
}

/// Optimal control of the auxiliary quadratic problem with target `d`: `(x_now - d) zeta`.
pub fn mv_auxiliary_control<T: Scalar>(
    d: T,
    x_now: T,
    z_now: T,
    s: T,
    sol: &PdeSolution<T>,
    model: &MarketModel<T>,
) -> Result<T> {
    Ok((x_now - d) * zeta(model, sol, z_now, s)?)
}
