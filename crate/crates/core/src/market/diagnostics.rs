use serde::Serialize;

use super::MarketModel;
use crate::{Error, Result, Scalar};

/// Grid scan of the coefficient conditions the PDE existence theory needs:
/// `b^2` bounded away from zero and `a`, `b`, `b'`, `lambda` bounded.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientDiagnostics {
    pub b_sq_lower_bound: f64,
    pub sup_abs_a: f64,
    pub sup_abs_b: f64,
    pub sup_abs_b_prime: f64,
    pub sup_lambda: f64,
    pub passed: bool,
}

impl CoefficientDiagnostics {
    /// Only the boundedness conditions; used when the factor is frozen and the
    /// lower bound on `b^2` is not needed.
    pub fn bounded(&self) -> bool {
        [self.sup_abs_a, self.sup_abs_b, self.sup_abs_b_prime, self.sup_lambda]
            .iter()
            .all(|v| v.is_finite())
    }
}

/// Samples the coefficients on `z_nodes`. `b'` uses central differences with the local
/// node spacing (one-sided at the ends). Never fails: non-finite samples show up as
/// infinite suprema and `passed = false`.
pub fn validate_coefficients<T: Scalar>(model: &MarketModel<T>, z_nodes: &[T]) -> CoefficientDiagnostics {
    let mut b_sq_min = f64::INFINITY;
    let mut sup_a = 0f64;
    let mut sup_b = 0f64;
    let mut sup_bp = 0f64;
    let mut sup_lambda = 0f64;
    let n = z_nodes.len();
    let bad = |v: f64| if v.is_finite() { v } else { f64::INFINITY };
    for (i, &z) in z_nodes.iter().enumerate() {
        let a = model.a().eval(z).to_f64_lossy();
        let b = model.b().eval(z).to_f64_lossy();
        sup_a = sup_a.max(bad(a.abs()));
        sup_b = sup_b.max(bad(b.abs()));
        b_sq_min = b_sq_min.min(if b.is_finite() { b * b } else { 0.0 });
        let lambda = match model.pde_coefficients(z) {
            Ok(c) => bad(c.lambda.to_f64_lossy()),
            Err(_) => f64::INFINITY,
        };
        sup_lambda = sup_lambda.max(lambda);
        if n >= 2 {
            let (lo, hi) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            let (zl, zh) = (z_nodes[lo], z_nodes[hi]);
            let bp = (model.b().eval(zh) - model.b().eval(zl)) / (zh - zl);
            sup_bp = sup_bp.max(bad(bp.to_f64_lossy().abs()));
        }
    }
    if n == 0 {
        b_sq_min = 0.0;
    }
    let mut d = CoefficientDiagnostics {
        b_sq_lower_bound: b_sq_min,
        sup_abs_a: sup_a,
        sup_abs_b: sup_b,
        sup_abs_b_prime: sup_bp,
        sup_lambda,
        passed: false,
    };
    d.passed = d.b_sq_lower_bound > 0.0 && d.bounded();
    d
}

/// Checks the pointwise market invariants on `z_nodes`: `sigma > 0`, `gamma > -1` at
/// every mark, finite jump moments.
pub fn check_market_invariants<T: Scalar>(model: &MarketModel<T>, z_nodes: &[T]) -> Result<()> {
    let marks = model.levy().extreme_marks();
    for &z in z_nodes {
        let pc = model.point(z)?;
        if !(pc.sigma > T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "sigma({}) = {} must be > 0",
                z, pc.sigma
            )));
        }
        for &p in &marks {
            let g = model.gamma_at(z, p);
            if !(g > -T::one()) {
                return Err(Error::InvalidParameter(format!(
                    "gamma({z}, {p}) = {g} must be > -1"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{CoefficientFn, JumpFn, LevyMeasure, MarketParams};

    fn with_factor(a: CoefficientFn<f64>, b: CoefficientFn<f64>) -> MarketModel<f64> {
        MarketModel::new(MarketParams {
            mu: CoefficientFn::constant(0.1),
            sigma: CoefficientFn::constant(0.2),
            gamma: JumpFn::Mark,
            a,
            b,
            rho_w: 0.3,
            r: 0.04,
            levy: LevyMeasure::none(),
        })
        .unwrap()
    }

    fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn constants_pass() {
        let m = with_factor(CoefficientFn::constant(0.1), CoefficientFn::constant(0.3));
        let d = validate_coefficients(&m, &linspace(-2.0, 2.0, 41));
        assert!(d.passed);
        assert!((d.b_sq_lower_bound - 0.09).abs() < 1e-15);
        assert_eq!(d.sup_abs_b_prime, 0.0);
    }

    #[test]
    fn vanishing_diffusion_fails() {
        let m = with_factor(
            CoefficientFn::constant(0.1),
            CoefficientFn::Affine {
                intercept: 0.0,
                slope: 1.0,
            },
        );
        let d = validate_coefficients(&m, &linspace(-1.0, 1.0, 21));
        assert_eq!(d.b_sq_lower_bound, 0.0);
        assert!(!d.passed);
    }

    #[test]
    fn square_root_diffusion_on_positive_grid() {
        let m = with_factor(
            CoefficientFn::MeanReverting {
                speed: 1.0,
                level: 1.0,
            },
            CoefficientFn::Sqrt { scale: 1.0 },
        );
        let d = validate_coefficients(&m, &linspace(0.01, 4.0, 400));
        assert!((d.b_sq_lower_bound - 0.01).abs() < 1e-12);
        assert!(d.passed);
    }

    #[test]
    fn invariants_catch_bad_jump() {
        let mut p = with_factor(CoefficientFn::constant(0.0), CoefficientFn::constant(0.0)).params();
        p.levy = LevyMeasure::from_atoms(vec![crate::market::Atom {
            mark: -1.0,
            weight: 1.0,
        }])
        .unwrap();
        let m = MarketModel::new(p).unwrap();
        assert!(check_market_invariants(&m, &[0.0]).is_err());
    }
}
