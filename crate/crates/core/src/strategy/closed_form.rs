use super::InitialState;
use crate::market::MarketModel;
use crate::{Error, Result, Scalar};

/// Constant-coefficient comparison of the jump-diffusion market with its Brownian
/// reduction (jumps removed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCaseSummary<T> {
    /// `(mu - r) / Sigma`
    pub pi_slope_levy: T,
    /// `(mu - r) / sigma^2`
    pub pi_slope_brownian: T,
    pub utility_levy: T,
    pub utility_brownian: T,
    pub lambda_levy: T,
    pub lambda_brownian: T,
}

pub fn constant_case_summary<T: Scalar>(
    model: &MarketModel<T>,
    x: T,
    theta: T,
    t: T,
    t_end: T,
) -> Result<ConstantCaseSummary<T>> {
    if !model.is_constant() {
        return Err(Error::NotApplicable(
            "constant-case summary needs mu, sigma and gamma constant in z".into(),
        ));
    }
    if !(theta > T::zero()) {
        return Err(Error::InvalidParameter(format!("theta = {theta} must be > 0")));
    }
    let brownian = model.without_jumps();
    let z = T::zero();
    let pl = model.point(z)?;
    let pb = brownian.point(z)?;
    let premium = pl.mu - model.r();
    let lambda_levy = model.pde_coefficients(z)?.lambda;
    let lambda_brownian = brownian.pde_coefficients(z)?.lambda;
    let utility =
        |lambda: T| x - (T::one() - (lambda * (t_end - t)).exp()) / (T::two() * theta);
    Ok(ConstantCaseSummary {
        pi_slope_levy: premium / pl.big_sigma,
        pi_slope_brownian: premium / pb.big_sigma,
        utility_levy: utility(lambda_levy),
        utility_brownian: utility(lambda_brownian),
        lambda_levy,
        lambda_brownian,
    })
}

/// One row of the strategy-versus-wealth comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyRow<T> {
    pub x_now: T,
    pub pi_levy: T,
    pub pi_brownian: T,
}

/// Optimal amounts `(x + e^{lambda (T - t)} / theta - x_now) (mu - r) / Sigma` in both
/// markets at each current wealth level.
pub fn strategy_comparison<T: Scalar>(
    model: &MarketModel<T>,
    state: &InitialState<T>,
    t_end: T,
    x_now: &[T],
) -> Result<Vec<StrategyRow<T>>> {
    let s = constant_case_summary(model, state.x, state.theta, state.t, t_end)?;
    let tau = t_end - state.t;
    let target = |lambda: T| state.x + (lambda * tau).exp() / state.theta;
    let (dl, db) = (target(s.lambda_levy), target(s.lambda_brownian));
    Ok(x_now
        .iter()
        .map(|&w| StrategyRow {
            x_now: w,
            pi_levy: (dl - w) * s.pi_slope_levy,
            pi_brownian: (db - w) * s.pi_slope_brownian,
        })
        .collect())
}
