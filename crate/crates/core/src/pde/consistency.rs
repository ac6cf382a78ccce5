use super::solution::{PdeSolution, Scheme};
use crate::Scalar;

/// Tolerance on `|G H + 1|`.
pub const PRODUCT_TOLERANCE: f64 = 1e-12;

/// Residual bound for solutions written down in closed form. Their `F` residual sits at
/// roundoff, so the relative test against it carries no information.
pub const EXACT_RESIDUAL_TOLERANCE: f64 = 1e-6;

/// Largest ratio allowed between the `G` or `H` residual and the `F` residual.
pub const RESIDUAL_RATIO: f64 = 10.0;

/// Agreement of the three equivalent formulations on one solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyReport<T> {
    pub residual_f: T,
    pub residual_g: T,
    pub residual_h: T,
    /// `max |G H + 1|` over all nodes.
    pub product_gap: T,
    /// `max(|G(z, T) + 1|, |H(z, T) - 1|)`.
    pub terminal_gap: T,
    /// `max (G + 1)`; nonpositive when `G <= -1` everywhere.
    pub max_g_plus_one: T,
    pub residuals_consistent: bool,
    pub passed: bool,
}

pub fn consistency_report<T: Scalar>(sol: &PdeSolution<T>) -> ConsistencyReport<T> {
    let (rf, rg, rh) = (sol.max_residual_f(), sol.max_residual_g(), sol.max_residual_h());
    let product_gap = sol
        .g()
        .iter()
        .zip(sol.h())
        .map(|(&g, &h)| (g * h + T::one()).abs())
        .fold(T::zero(), T::max);
    let n = sol.grid().n_z;
    let last = sol.grid().n_t * n;
    let terminal_gap = sol.g()[last..]
        .iter()
        .zip(&sol.h()[last..])
        .map(|(&g, &h)| (g + T::one()).abs().max((h - T::one()).abs()))
        .fold(T::zero(), T::max);
    let max_g_plus_one = sol
        .g()
        .iter()
        .map(|&g| g + T::one())
        .fold(T::neg_infinity(), T::max);
    let residuals_consistent = match sol.scheme() {
        Scheme::ExactOde => {
            let tol = T::of(EXACT_RESIDUAL_TOLERANCE);
            rf <= tol && rg <= tol && rh <= tol
        }
        _ => {
            let cap = T::of(RESIDUAL_RATIO) * rf;
            rg <= cap && rh <= cap
        }
    };
    ConsistencyReport {
        residual_f: rf,
        residual_g: rg,
        residual_h: rh,
        product_gap,
        terminal_gap,
        max_g_plus_one,
        residuals_consistent,
        passed: residuals_consistent
            && product_gap <= T::of(PRODUCT_TOLERANCE)
            && terminal_gap == T::zero()
            && max_g_plus_one <= T::zero(),
    }
}
