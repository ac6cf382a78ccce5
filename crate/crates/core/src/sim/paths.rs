use rayon::prelude::*;

use super::noise::{NoiseRecord, NoiseSource};
use super::PathConfig;
use crate::market::MarketModel;
use crate::pde::PdeSolution;
use crate::strategy::InitialState;
use crate::{Error, Result, Scalar};

/// Share of excluded paths above which a bundle is reported as unreliable.
pub const EXCLUSION_WARNING_RATE: f64 = 0.01;

/// Which investment rule drives the wealth process.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlSource<T> {
    /// Optimal MMV control `(X - x + 2 y G(z, t)) zeta`.
    Mmv,
    /// Auxiliary MV control `(X - D) zeta` for target `D`.
    MvTarget(T),
    /// Constant amount in the risky asset. `Y` and `R` are not advanced.
    Frozen(T),
}

/// Terminal values and pathwise statistics of one simulated path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathSummary<T> {
    pub path_id: u64,
    pub x: T,
    pub y: T,
    pub r: T,
    pub z: T,
    /// Smallest `zeta gamma` over the jumps of the path; `+inf` without jumps.
    pub min_zeta_gamma: T,
    /// `|2 Y G(Z, s) - (X - x + 2 y G(z, t))|` at `s = t`.
    pub initial_deviation: T,
    /// The same deviation maximised over the time grid.
    pub max_deviation: T,
    pub terminal_deviation: T,
    /// `Y` reached a nonpositive value after some jump.
    pub y_nonpositive: bool,
    /// The factor left the solution grid; the remaining fields are meaningless.
    pub excluded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint<T> {
    pub s: T,
    pub z: T,
    pub x: T,
    pub y: T,
    pub r: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    pub path_id: u64,
    pub points: Vec<TrajectoryPoint<T>>,
}

/// Simulated paths of `(Z, X, Y, R)` driven by a common noise record per path.
#[derive(Debug, Clone)]
pub struct PathBundle<T> {
    pub cfg: PathConfig<T>,
    pub state: InitialState<T>,
    pub source: ControlSource<T>,
    /// `G(z, t)` at the anchor; `-1` when no solution was supplied.
    pub g0: T,
    pub paths: Vec<PathSummary<T>>,
    pub trajectories: Vec<Trajectory<T>>,
    pub n_excluded: usize,
    noise: NoiseSource<T>,
}

impl<T: Scalar> PathBundle<T> {
    /// Paths that stayed inside the solution grid.
    pub fn included(&self) -> impl Iterator<Item = &PathSummary<T>> {
        self.paths.iter().filter(|p| !p.excluded)
    }

    pub fn n_included(&self) -> usize {
        self.paths.len() - self.n_excluded
    }

    pub fn exclusion_rate(&self) -> f64 {
        self.n_excluded as f64 / self.paths.len() as f64
    }

    pub fn terminal_x(&self) -> Vec<T> {
        self.included().map(|p| p.x).collect()
    }

    pub fn terminal_r(&self) -> Vec<T> {
        self.included().map(|p| p.r).collect()
    }

    pub fn terminal_y(&self) -> Vec<T> {
        self.included().map(|p| p.y).collect()
    }

    /// Regenerates the driving noise of a path.
    pub fn noise(&self, path_id: u64) -> NoiseRecord<T> {
        self.noise.path(path_id)
    }
}

/// Euler scheme for the wealth, density, `R` and factor processes on a fixed grid.
///
/// Controls are evaluated at the left end of each step. Jumps inside a step are applied
/// one after another in draw order, with the wealth control re-evaluated after each.
/// Paths run in parallel; results are gathered in path order, so the bundle does not
/// depend on the thread count.
pub fn simulate_bundle<T: Scalar>(
    model: &MarketModel<T>,
    sol: Option<&PdeSolution<T>>,
    state: &InitialState<T>,
    cfg: &PathConfig<T>,
    source: ControlSource<T>,
) -> Result<PathBundle<T>> {
    cfg.validate()?;
    let tol = T::of(1e-9) * (cfg.t_end - cfg.t_start).max(T::one());
    if (state.t - cfg.t_start).abs() > tol {
        return Err(Error::InvalidParameter(format!(
            "simulation starts at {} but the investor is anchored at t = {}",
            cfg.t_start, state.t
        )));
    }
    let needs_solution = !matches!(source, ControlSource::Frozen(_));
    let g0 = match sol {
        Some(s) => {
            let gr = s.grid();
            if (gr.t_end - cfg.t_end).abs() > tol {
                return Err(Error::InvalidParameter(format!(
                    "solution horizon {} differs from simulation horizon {}",
                    gr.t_end, cfg.t_end
                )));
            }
            s.g_at(state.z, state.t)?
        }
        None if needs_solution => {
            return Err(Error::InvalidParameter(
                "optimal controls need a value-function solution".into(),
            ))
        }
        None => -T::one(),
    };
    let noise = NoiseSource::new(model.levy(), cfg)?;
    let ctx = PathContext {
        model,
        sol,
        state,
        cfg,
        source,
        g0,
        noise: &noise,
        advance_density: needs_solution,
    };
    let results: Vec<(PathSummary<T>, Option<Trajectory<T>>)> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|id| ctx.run(id))
        .collect::<Result<_>>()?;
    let mut paths = Vec::with_capacity(results.len());
    let mut trajectories = Vec::new();
    for (p, tr) in results {
        paths.push(p);
        if let Some(tr) = tr {
            trajectories.push(tr);
        }
    }
    let n_excluded = paths.iter().filter(|p| p.excluded).count();
    let bundle = PathBundle {
        cfg: *cfg,
        state: *state,
        source,
        g0,
        paths,
        trajectories,
        n_excluded,
        noise,
    };
    if bundle.exclusion_rate() > EXCLUSION_WARNING_RATE {
        log::warn!(
            "{} of {} paths left the solution grid ({:.2}%)",
            bundle.n_excluded,
            cfg.n_paths,
            100.0 * bundle.exclusion_rate()
        );
    }
    Ok(bundle)
}

struct PathContext<'a, T> {
    model: &'a MarketModel<T>,
    sol: Option<&'a PdeSolution<T>>,
    state: &'a InitialState<T>,
    cfg: &'a PathConfig<T>,
    source: ControlSource<T>,
    g0: T,
    noise: &'a NoiseSource<T>,
    advance_density: bool,
}

impl<T: Scalar> PathContext<'_, T> {
    fn run(&self, id: u64) -> Result<(PathSummary<T>, Option<Trajectory<T>>)> {
        let m = self.model;
        let cfg = self.cfg;
        let noise = self.noise.path(id);
        let dt = cfg.dt;
        let (x0, y0) = (self.state.x, self.state.y());
        let offset = T::two() * y0 * self.g0;
        let (rho, rho_bar) = (m.rho_w(), m.rho_bar());

        let (mut x, mut y, mut r, mut z) = (x0, y0, T::one(), self.state.z);
        let mut q = match self.sol {
            Some(s) => Some(s.sample(z, cfg.t_start)?),
            None => None,
        };
        let deviation = |x: T, y: T, g: T| (T::two() * y * g - (x - x0 + offset)).abs();
        let initial_deviation = q.map_or(T::zero(), |q| deviation(x, y, q.g));
        let mut max_deviation = initial_deviation;
        let mut terminal_deviation = initial_deviation;
        let mut min_zeta_gamma = T::infinity();
        let mut y_nonpositive = false;
        let mut excluded = false;

        let keep = (id as usize) < cfg.keep_trajectories;
        let mut points = Vec::new();
        if keep {
            points.push(TrajectoryPoint {
                s: cfg.t_start,
                z,
                x,
                y,
                r,
            });
        }

        let n_steps = noise.dw1.len();
        let mut jump_offset = 0usize;
        for k in 0..n_steps {
            let pc = m.point(z)?;
            let (ze, eta1, eta2) = match (q, self.advance_density) {
                (Some(q), true) => {
                    let slope = q.g_z / q.g;
                    if !(pc.big_sigma > T::zero()) {
                        return Err(Error::DegenerateMarket {
                            z: z.to_f64_lossy(),
                            reason: "Sigma = 0".into(),
                        });
                    }
                    // zeta = -(mu - r - sigma b rho G_z / G) / Sigma
                    let ze = -(pc.mu - m.r() - pc.sigma * pc.b * rho * slope) / pc.big_sigma;
                    (
                        ze,
                        ze * pc.sigma - rho * pc.b * slope,
                        -rho_bar * pc.b * slope,
                    )
                }
                _ => (T::zero(), T::zero(), T::zero()),
            };
            let control = |x: T| match self.source {
                ControlSource::Mmv => (x - x0 + offset) * ze,
                ControlSource::MvTarget(d) => (x - d) * ze,
                ControlSource::Frozen(p) => p,
            };
            let (dw1, dw2) = (noise.dw1[k], noise.dw2[k]);
            let premium = pc.mu - m.r();
            let pi = control(x);
            x += pi * (premium * dt + pc.sigma * dw1 - pc.m1 * dt);
            if self.advance_density {
                y *= T::one() + eta1 * dw1 + eta2 * dw2 - ze * pc.m1 * dt;
                r *= T::one() + ze * premium * dt + ze * pc.sigma * dw1 - ze * pc.m1 * dt;
            }
            for &p in noise.step_marks(k, jump_offset) {
                let g = m.gamma_at(z, p);
                x += control(x) * g;
                if self.advance_density {
                    let zg = ze * g;
                    y *= T::one() + zg;
                    r *= T::one() + zg;
                    min_zeta_gamma = min_zeta_gamma.min(zg);
                    y_nonpositive |= y <= T::zero();
                }
            }
            jump_offset += noise.jump_counts[k] as usize;
            z += pc.a * dt + pc.b * (rho * dw1 + rho_bar * dw2);
            let s = if k + 1 == n_steps {
                cfg.t_end
            } else {
                cfg.t_start + dt * T::of((k + 1) as f64)
            };
            if let Some(sol) = self.sol {
                if !sol.grid().contains(z, s) {
                    excluded = true;
                    break;
                }
                let next = sol.sample_inside(z, s);
                let d = deviation(x, y, next.g);
                if self.advance_density {
                    max_deviation = max_deviation.max(d);
                    terminal_deviation = d;
                }
                q = Some(next);
            }
            if keep {
                points.push(TrajectoryPoint { s, z, x, y, r });
            }
        }
        let summary = PathSummary {
            path_id: id,
            x,
            y,
            r,
            z,
            min_zeta_gamma,
            initial_deviation,
            max_deviation,
            terminal_deviation,
            y_nonpositive,
            excluded,
        };
        let traj = keep.then_some(Trajectory {
            path_id: id,
            points,
        });
        Ok((summary, traj))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::{Atom, LevyMeasure, MarketParams, CoefficientFn};
    use crate::pde::{solve_f_pde, Grid};

    fn constant_model() -> MarketModel<f64> {
        let levy = LevyMeasure::from_atoms(vec![Atom {
            mark: 0.05,
            weight: 2.0,
        }])
        .unwrap();
        MarketModel::constant(0.1, 0.2, 0.04, levy).unwrap()
    }

    fn solve(m: &MarketModel<f64>) -> PdeSolution<f64> {
        let grid = Grid::around(m, 0.0, 0.0, 1.0, 41, 100).unwrap();
        solve_f_pde(m, &grid).unwrap()
    }

    #[test]
    fn zero_noise_is_deterministic_drift() {
        let m = MarketModel::new(MarketParams {
            sigma: CoefficientFn::constant(0.0),
            ..MarketModel::constant(0.1, 0.0, 0.04, LevyMeasure::none())
                .unwrap()
                .params()
        })
        .unwrap();
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg: PathConfig<f64> = PathConfig::new(3, 0.01, 5, 0.0, 1.0).unwrap();
        let b = simulate_bundle(&m, None, &st, &cfg, ControlSource::Frozen(2.0)).unwrap();
        for p in &b.paths {
            assert!((p.x - (1.0 + 2.0 * 0.06)).abs() < 1e-12);
            assert_eq!(p.r, 1.0);
        }
    }

    #[test]
    fn zero_premium_keeps_r_at_one() {
        let m = MarketModel::constant(0.04, 0.2, 0.04, constant_model().levy().clone()).unwrap();
        let sol = solve(&m);
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(50, 0.01, 5, 0.0, 1.0).unwrap();
        let b = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        for p in &b.paths {
            assert_eq!(p.r, 1.0);
            assert_eq!(p.x, 1.0);
            assert_eq!(p.y, 0.5);
            assert_eq!(p.max_deviation, 0.0);
        }
    }

    #[test]
    fn bundle_is_reproducible_and_prefix_stable() {
        let m = constant_model();
        let sol = solve(&m);
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(200, 0.01, 42, 0.0, 1.0)
            .unwrap()
            .with_trajectories(3);
        let a = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        let b = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        assert_eq!(a.paths, b.paths);
        assert_eq!(a.trajectories, b.trajectories);
        assert_eq!(a.trajectories.len(), 3);
        assert_eq!(a.trajectories[0].points.len(), 101);
        let more = cfg.with_paths(300).unwrap();
        let c = simulate_bundle(&m, Some(&sol), &st, &more, ControlSource::Mmv).unwrap();
        assert_eq!(&c.paths[..200], &a.paths[..]);
    }

    #[test]
    fn starts_from_anchor() {
        let m = constant_model();
        let sol = solve(&m);
        let st = InitialState::new(1.0, 2.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(20, 0.01, 1, 0.0, 1.0).unwrap().with_trajectories(20);
        let b = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        for (p, tr) in b.paths.iter().zip(&b.trajectories) {
            assert_eq!(p.initial_deviation, 0.0);
            let first = tr.points[0];
            assert_eq!((first.x, first.y, first.r), (1.0, 0.25, 1.0));
        }
    }

    #[test]
    fn mmv_and_mv_with_optimal_target_agree() {
        let m = constant_model();
        let sol = solve(&m);
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(50, 0.01, 9, 0.0, 1.0).unwrap();
        let d = st.x - sol.g_at(0.0, 0.0).unwrap() / st.theta;
        let a = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        let b = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::MvTarget(d)).unwrap();
        for (p, q) in a.paths.iter().zip(&b.paths) {
            assert!((p.x - q.x).abs() < 1e-10);
            assert_eq!(p.r, q.r);
        }
    }

    #[test]
    fn optimal_controls_need_a_solution() {
        let m = constant_model();
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(5, 0.01, 9, 0.0, 1.0).unwrap();
        assert!(simulate_bundle(&m, None, &st, &cfg, ControlSource::Mmv).is_err());
    }

    #[test]
    fn brownian_r_stays_positive() {
        let m = MarketModel::constant(0.1, 0.2, 0.04, LevyMeasure::none()).unwrap();
        let sol = solve(&m);
        let st = InitialState::new(1.0, 1.0, 0.0, 0.0).unwrap();
        let cfg = PathConfig::new(100, 0.01, 3, 0.0, 1.0).unwrap().with_trajectories(100);
        let b = simulate_bundle(&m, Some(&sol), &st, &cfg, ControlSource::Mmv).unwrap();
        for tr in &b.trajectories {
            assert!(tr.points.iter().all(|p| p.r > 0.0));
        }
    }
}
