use super::solution::PdeSolution;
use super::solver::NodeCoefficients;
use crate::market::MarketModel;
use crate::{Result, Scalar};

/// Max-abs interior residual of the `F` equation, central differences in `z` and `t`.
pub fn residual_f_equation<T: Scalar>(sol: &PdeSolution<T>, model: &MarketModel<T>) -> Result<T> {
    max_residual(sol, sol.f(), model, |c, i, _u, uz| {
        (T::half() - c.beta[i]) * c.b_sq[i] * uz * uz + c.lambda[i]
    })
}

/// Max-abs interior residual of
/// `G_t + alpha G_z + b^2 G_zz / 2 - beta b^2 G_z^2 / G + lambda G = 0`.
pub fn residual_g_equation<T: Scalar>(sol: &PdeSolution<T>, model: &MarketModel<T>) -> Result<T> {
    max_residual(sol, sol.g(), model, |c, i, u, uz| {
        -c.beta[i] * c.b_sq[i] * uz * uz / u + c.lambda[i] * u
    })
}

/// Max-abs interior residual of
/// `H_t + alpha H_z + b^2 H_zz / 2 - (1 - beta) b^2 H_z^2 / H - lambda H = 0`.
pub fn residual_h_equation<T: Scalar>(sol: &PdeSolution<T>, model: &MarketModel<T>) -> Result<T> {
    max_residual(sol, sol.h(), model, |c, i, u, uz| {
        -(T::one() - c.beta[i]) * c.b_sq[i] * uz * uz / u - c.lambda[i] * u
    })
}

/// Interior time levels use a central difference in `t`; a single-step grid falls back
/// to the forward difference at `t_start`.
fn max_residual<T, N>(sol: &PdeSolution<T>, u: &[T], model: &MarketModel<T>, nonlinear: N) -> Result<T>
where
    T: Scalar,
    N: Fn(&NodeCoefficients<T>, usize, T, T) -> T,
{
    let grid = sol.grid();
    let coef = NodeCoefficients::on(model, grid)?;
    let n = grid.n_z;
    let h = grid.dz();
    let dt = grid.dt();
    let (levels, forward): (Vec<usize>, bool) = if grid.n_t >= 2 {
        ((1..grid.n_t).collect(), false)
    } else {
        (vec![0], true)
    };
    let mut worst = T::zero();
    for j in levels {
        for i in 1..n - 1 {
            let k = j * n + i;
            let ut = if forward {
                (u[k + n] - u[k]) / dt
            } else {
                (u[k + n] - u[k - n]) / (T::two() * dt)
            };
            let uz = (u[k + 1] - u[k - 1]) / (T::two() * h);
            let uzz = (u[k + 1] - T::two() * u[k] + u[k - 1]) / (h * h);
            let res = ut
                + coef.alpha[i] * uz
                + T::half() * coef.b_sq[i] * uzz
                + nonlinear(&coef, i, u[k], uz);
            worst = worst.max(res.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Atom, CoefficientFn, JumpFn, LevyMeasure, MarketParams};
    use crate::pde::{solve_f_pde, Grid};

    fn flat_model() -> MarketModel<f64> {
        MarketModel::new(MarketParams {
            mu: CoefficientFn::constant(0.04),
            sigma: CoefficientFn::constant(0.2),
            gamma: JumpFn::Mark,
            a: CoefficientFn::constant(0.1),
            b: CoefficientFn::constant(0.3),
            rho_w: 0.3,
            r: 0.04,
            levy: LevyMeasure::from_atoms(vec![Atom {
                mark: 0.05,
                weight: 2.0,
            }])
            .unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn trivial_solution_has_zero_residual() {
        let m = flat_model();
        let grid = Grid::new(-1.0, 1.0, 21, 0.0, 1.0, 20).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        assert_eq!(residual_g_equation(&sol, &m).unwrap(), 0.0);
        assert_eq!(residual_h_equation(&sol, &m).unwrap(), 0.0);
    }

    #[test]
    fn perturbation_raises_residual() {
        let m = MarketModel::new(MarketParams {
            mu: CoefficientFn::constant(0.1),
            ..flat_model().params()
        })
        .unwrap();
        let grid = Grid::new(-1.0, 1.0, 21, 0.0, 1.0, 20).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        let before = residual_g_equation(&sol, &m).unwrap();
        let mut g = sol.g().to_vec();
        let k = sol.index(10, 10);
        g[k] += 0.01;
        let bumped = sol.with_g(g).unwrap();
        assert!(residual_g_equation(&bumped, &m).unwrap() > before);
    }

    #[test]
    fn h_from_g_agrees_with_primary_path() {
        let m = MarketModel::new(MarketParams {
            mu: CoefficientFn::constant(0.1),
            ..flat_model().params()
        })
        .unwrap();
        let grid = Grid::around(&m, 0.0, 0.0, 1.0, 61, 60).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        let alt = sol.with_h_from_g();
        let a = residual_h_equation(&sol, &m).unwrap();
        let b = residual_h_equation(&alt, &m).unwrap();
        assert!((a - b).abs() <= 1e-10);
    }
}
