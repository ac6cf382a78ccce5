use super::residual::{residual_f_equation, residual_g_equation, residual_h_equation};
use super::solution::{PdeSolution, Scheme};
use super::tridiag::Tridiagonal;
use super::Grid;
use crate::market::{check_market_invariants, validate_coefficients, MarketModel};
use crate::{Error, Result, Scalar};

/// Fixed-point sweeps per time step after the predictor.
pub const CORRECTOR_SWEEPS: u32 = 1;

/// Per-node coefficients of `F_t + alpha F_z + b^2 F_zz / 2 + (1/2 - beta) b^2 F_z^2 + lambda = 0`.
#[derive(Debug, Clone)]
pub(crate) struct NodeCoefficients<T> {
    pub alpha: Vec<T>,
    pub beta: Vec<T>,
    pub lambda: Vec<T>,
    pub b_sq: Vec<T>,
}

impl<T: Scalar> NodeCoefficients<T> {
    pub(crate) fn on(model: &MarketModel<T>, grid: &Grid<T>) -> Result<Self> {
        let n = grid.n_z;
        let mut out = Self {
            alpha: Vec::with_capacity(n),
            beta: Vec::with_capacity(n),
            lambda: Vec::with_capacity(n),
            b_sq: Vec::with_capacity(n),
        };
        for z in grid.z_nodes() {
            let c = model.pde_coefficients(z)?;
            let b = model.b().eval(z);
            if !b.is_finite() {
                return Err(Error::CoefficientDomain {
                    name: "b",
                    z: z.to_f64_lossy(),
                });
            }
            out.alpha.push(c.alpha);
            out.beta.push(c.beta);
            out.lambda.push(c.lambda);
            out.b_sq.push(b * b);
        }
        Ok(out)
    }
}

/// Solves the transformed value-function equation for `F` backward from `F(., T) = 0`.
///
/// When both `a` and `b` vanish identically the equation decouples into one ODE per node
/// and `F = lambda(z) (T - t)` is written down directly. Otherwise the linear part is
/// treated implicitly and the gradient-quadratic term and the source explicitly, with
/// [`CORRECTOR_SWEEPS`] re-evaluations per step. Far-field condition: `F_zz = 0`.
pub fn solve_f_pde<T: Scalar>(model: &MarketModel<T>, grid: &Grid<T>) -> Result<PdeSolution<T>> {
    let z_nodes = grid.z_nodes();
    let diag = validate_coefficients(model, &z_nodes);
    let ok = if model.b().is_zero() {
        // no diffusion at all: the lower bound on b^2 cannot hold and is not needed
        diag.bounded()
    } else {
        diag.passed
    };
    if !ok {
        return Err(Error::Diagnostics(Box::new(diag)));
    }
    check_market_invariants(model, &z_nodes)?;
    let coef = NodeCoefficients::on(model, grid)?;

    let (f, scheme) = if model.factor_is_frozen() {
        (exact_ode(grid, &coef), Scheme::ExactOde)
    } else {
        march(grid, &coef)?
    };
    let mut sol = PdeSolution::from_f(*grid, f)?;
    sol.scheme = scheme;
    sol.max_residual_f = residual_f_equation(&sol, model)?;
    sol.max_residual_g = residual_g_equation(&sol, model)?;
    sol.max_residual_h = residual_h_equation(&sol, model)?;
    if sol.boundary_warning() {
        log::warn!(
            "boundary slope |F_z| = {:e} exceeds truncation threshold",
            sol.boundary_gradient
        );
    }
    Ok(sol)
}

fn exact_ode<T: Scalar>(grid: &Grid<T>, coef: &NodeCoefficients<T>) -> Vec<T> {
    let mut f = Vec::with_capacity(grid.n_z * (grid.n_t + 1));
    for j in 0..=grid.n_t {
        let tau = grid.t_end - grid.t(j);
        f.extend(coef.lambda.iter().map(|&l| l * tau));
    }
    f
}

fn march<T: Scalar>(grid: &Grid<T>, coef: &NodeCoefficients<T>) -> Result<(Vec<T>, Scheme)> {
    let n = grid.n_z;
    let h = grid.dz();
    let dt = grid.dt();
    let inv_h = T::one() / h;
    let inv_2h = T::half() * inv_h;
    let inv_h2 = inv_h * inv_h;

    // Rows of L, so that (L F)_i = lo[i] F_{i-1} + mid[i] F_i + up[i] F_{i+1}.
    let mut lo = vec![T::zero(); n];
    let mut mid = vec![T::zero(); n];
    let mut up = vec![T::zero(); n];
    let mut upwind_nodes = 0usize;
    for i in 1..n - 1 {
        let a = coef.alpha[i];
        let d = T::half() * coef.b_sq[i] * inv_h2;
        let (l, u) = (d - a * inv_2h, d + a * inv_2h);
        if l >= T::zero() && u >= T::zero() {
            lo[i] = l;
            up[i] = u;
            mid[i] = -(l + u);
        } else {
            upwind_nodes += 1;
            if a > T::zero() {
                lo[i] = d;
                up[i] = d + a * inv_h;
            } else {
                lo[i] = d - a * inv_h;
                up[i] = d;
            }
            mid[i] = -(lo[i] + up[i]);
        }
    }
    // F_zz = 0 leaves alpha F_z at the ends; implicit when the characteristic enters the
    // domain, lagged otherwise.
    let inward_lo = coef.alpha[0] >= T::zero();
    let inward_hi = coef.alpha[n - 1] <= T::zero();
    if inward_lo {
        mid[0] = -coef.alpha[0] * inv_h;
        up[0] = coef.alpha[0] * inv_h;
    }
    if inward_hi {
        mid[n - 1] = coef.alpha[n - 1] * inv_h;
        lo[n - 1] = -coef.alpha[n - 1] * inv_h;
    }

    let sub: Vec<T> = lo.iter().map(|&v| -dt * v).collect();
    let dg: Vec<T> = mid.iter().map(|&v| T::one() - dt * v).collect();
    let sp: Vec<T> = up.iter().map(|&v| -dt * v).collect();
    let system = Tridiagonal::new(sub, &dg, &sp);

    let gq: Vec<T> = (0..n)
        .map(|i| (T::half() - coef.beta[i]) * coef.b_sq[i])
        .collect();

    let total = n * (grid.n_t + 1);
    let mut f = vec![T::zero(); total];
    let mut rhs = vec![T::zero(); n];
    let mut star = vec![T::zero(); n];
    for j in (0..grid.n_t).rev() {
        let (head, tail) = f.split_at_mut((j + 1) * n);
        let next = &tail[..n];
        let cur = &mut head[j * n..];
        star.copy_from_slice(next);
        for _ in 0..=CORRECTOR_SWEEPS {
            for i in 0..n {
                let fz = if i == 0 {
                    (star[1] - star[0]) * inv_h
                } else if i == n - 1 {
                    (star[n - 1] - star[n - 2]) * inv_h
                } else {
                    (star[i + 1] - star[i - 1]) * inv_2h
                };
                rhs[i] = next[i] + dt * (gq[i] * fz * fz + coef.lambda[i]);
            }
            if !inward_lo {
                rhs[0] += dt * coef.alpha[0] * (next[1] - next[0]) * inv_h;
            }
            if !inward_hi {
                rhs[n - 1] += dt * coef.alpha[n - 1] * (next[n - 1] - next[n - 2]) * inv_h;
            }
            system.solve_in_place(&mut rhs);
            star.copy_from_slice(&rhs);
        }
        if let Some(i) = star.iter().position(|v| !v.is_finite()) {
            return Err(Error::Instability {
                z: grid.z(i).to_f64_lossy(),
                t: grid.t(j).to_f64_lossy(),
            });
        }
        cur.copy_from_slice(&star);
    }
    Ok((
        f,
        Scheme::ImplicitLagged {
            corrector_sweeps: CORRECTOR_SWEEPS,
            upwind_nodes,
        },
    ))
}

/// `G(t) = -exp((mu - r)^2 (T - t) / Sigma)` for a model whose coefficients do not depend
/// on the factor.
pub fn closed_form_g_constant<T: Scalar>(model: &MarketModel<T>, t: T, t_end: T) -> Result<T> {
    if !model.is_constant() {
        return Err(Error::NotApplicable(
            "closed form needs mu, sigma and gamma constant in z".into(),
        ));
    }
    let lambda = model.pde_coefficients(T::zero())?.lambda;
    Ok(-(lambda * (t_end - t)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Atom, CoefficientFn, JumpFn, LevyMeasure, MarketParams};

    fn constant_model(gamma: f64) -> MarketModel<f64> {
        let levy = if gamma == 0.0 {
            LevyMeasure::none()
        } else {
            LevyMeasure::from_atoms(vec![Atom {
                mark: gamma,
                weight: 2.0,
            }])
            .unwrap()
        };
        MarketModel::constant(0.1, 0.2, 0.04, levy).unwrap()
    }

    fn ou_model(b: f64) -> MarketModel<f64> {
        MarketModel::new(MarketParams {
            mu: CoefficientFn::Tanh {
                base: 0.10,
                amplitude: 0.04,
                center: 0.0,
                width: 1.0,
            },
            sigma: CoefficientFn::constant(0.2),
            gamma: JumpFn::Mark,
            a: CoefficientFn::MeanReverting {
                speed: 1.0,
                level: 0.0,
            },
            b: CoefficientFn::constant(b),
            rho_w: -0.5,
            r: 0.04,
            levy: LevyMeasure::from_atoms(vec![
                Atom {
                    mark: -0.05,
                    weight: 1.0,
                },
                Atom {
                    mark: 0.04,
                    weight: 0.5,
                },
            ])
            .unwrap(),
        })
        .unwrap()
    }

    fn mid_value(sol: &PdeSolution<f64>) -> f64 {
        let gr = sol.grid();
        sol.g_at(0.5 * (gr.z_min + gr.z_max), gr.t_start).unwrap()
    }

    #[test]
    fn constant_model_matches_closed_form() {
        let m = constant_model(0.05);
        let grid = Grid::around(&m, 0.0, 0.0, 1.0, 401, 1000).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        assert_eq!(sol.scheme(), Scheme::ExactOde);
        let exact = closed_form_g_constant(&m, 0.0, 1.0).unwrap();
        assert!((exact + 1.0832870676749586).abs() < 1e-12);
        assert!((mid_value(&sol) - exact).abs() < 1e-12);
        assert!((sol.f()[0] - 0.08).abs() < 1e-14);
    }

    #[test]
    fn brownian_reduction() {
        let m = constant_model(0.0);
        let g = closed_form_g_constant(&m, 0.0, 1.0).unwrap();
        assert!((g + 0.09f64.exp()).abs() < 1e-12);
        assert!((g + 1.0941743).abs() < 1e-7);
        assert_eq!(closed_form_g_constant(&m, 1.0, 1.0).unwrap(), -1.0);
    }

    #[test]
    fn zero_premium_gives_trivial_solution() {
        let m = ou_model(0.3).with_r(0.0);
        let m = MarketModel::new(MarketParams {
            mu: CoefficientFn::constant(0.04),
            r: 0.04,
            ..m.params()
        })
        .unwrap();
        let grid = Grid::around(&m, 0.0, 0.0, 1.0, 41, 50).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        assert!(sol.f().iter().all(|&v| v == 0.0));
        assert!(sol.g().iter().all(|&v| v == -1.0));
        assert!(sol.h().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn closed_form_rejects_factor_dependence() {
        let m = ou_model(0.3);
        assert!(matches!(
            closed_form_g_constant(&m, 0.0, 1.0),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn vanishing_diffusion_fails_preconditions() {
        let mut p = ou_model(0.3).params();
        p.b = CoefficientFn::Affine {
            intercept: 0.0,
            slope: 1.0,
        };
        let m = MarketModel::new(p).unwrap();
        let grid = Grid::new(-1.0, 1.0, 21, 0.0, 1.0, 10).unwrap();
        assert!(matches!(solve_f_pde(&m, &grid), Err(Error::Diagnostics(_))));
    }

    #[test]
    fn factor_model_invariants_and_convergence() {
        let m = ou_model(0.3);
        let base = Grid::around(&m, 0.0, 0.0, 1.0, 51, 125).unwrap();
        let fine = Grid {
            n_z: 801,
            n_t: 2000,
            ..base
        };
        let reference = mid_value(&solve_f_pde(&m, &fine).unwrap());
        let mut errs = Vec::new();
        let mut grid = base;
        for _ in 0..3 {
            let sol = solve_f_pde(&m, &grid).unwrap();
            let n = grid.n_z;
            let last = grid.n_t * n;
            assert!(sol.g()[last..].iter().all(|&g| g == -1.0));
            assert!(sol.h()[last..].iter().all(|&h| h == 1.0));
            assert!(sol.g().iter().all(|&g| g <= -1.0));
            let prod = sol
                .g()
                .iter()
                .zip(sol.h())
                .map(|(g, h)| (g * h + 1.0).abs())
                .fold(0.0, f64::max);
            assert!(prod <= 1e-12);
            assert!(sol.max_residual_g() <= 10.0 * sol.max_residual_f());
            assert!(sol.max_residual_h() <= 10.0 * sol.max_residual_f());
            errs.push((mid_value(&sol) - reference).abs());
            grid = grid.refined();
        }
        assert!(errs[0] / errs[1] >= 1.8, "{errs:?}");
        assert!(errs[1] / errs[2] >= 1.8, "{errs:?}");
    }

    #[test]
    fn f32_solve_runs() {
        let m = ou_model(0.3).cast::<f32>();
        let grid = Grid::around(&m, 0.0, 0.0, 1.0, 41, 40).unwrap();
        let sol = solve_f_pde(&m, &grid).unwrap();
        assert!(sol.g().iter().all(|g| g.is_finite()));
    }
}
