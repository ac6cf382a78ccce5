use super::controls::zeta;
use crate::market::MarketModel;
use crate::pde::PdeSolution;
use crate::{Result, Scalar};

/// Minimum of `zeta(z, t) gamma(z, p)` over a sample set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssumptionReport<T> {
    pub min_zeta_gamma: T,
    /// `(z, t, p)` attaining the minimum; `None` when the measure has no marks.
    pub argmin: Option<(T, T, T)>,
    /// `min_zeta_gamma >= -1`.
    pub passed: bool,
}

/// Evaluates the jump-size condition `zeta gamma >= -1` at every `(z, t)` sample and every
/// mark. With no marks the product is identically zero.
pub fn check_assumption<T: Scalar>(
    model: &MarketModel<T>,
    sol: &PdeSolution<T>,
    z_samples: &[T],
    t_samples: &[T],
) -> Result<AssumptionReport<T>> {
    let marks = model.levy().extreme_marks();
    let mut min = T::zero();
    let mut argmin = None;
    for &z in z_samples {
        for &t in t_samples {
            let ze = zeta(model, sol, z, t)?;
            for &p in &marks {
                let v = ze * model.gamma_at(z, p);
                if argmin.is_none() || v < min {
                    min = v;
                    argmin = Some((z, t, p));
                }
            }
        }
    }
    Ok(AssumptionReport {
        min_zeta_gamma: min,
        argmin,
        passed: min >= -T::one(),
    })
}
