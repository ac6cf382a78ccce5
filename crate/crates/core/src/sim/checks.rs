use super::estimate::{
    mean_estimate, mean_variance_utility, second_moment_estimate, variance_estimate,
    wilson_lower_bound, McEstimate, Z_99,
};
use super::{simulate_bundle, ControlSource, PathBundle, PathConfig};
use crate::market::MarketModel;
use crate::pde::PdeSolution;
use crate::strategy::InitialState;
use crate::{Error, Result, Scalar};

/// Leakage tolerated by the monotonicity-domain check on admissible models.
pub const MONOTONICITY_LEAKAGE: f64 = 1e-3;

/// An estimate compared with its oracle under a `3 SE + 2 dt` band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandCheck<T> {
    pub estimate: McEstimate<T>,
    pub target: T,
    pub band: T,
    pub passed: bool,
}

impl<T: Scalar> BandCheck<T> {
    pub fn new(estimate: McEstimate<T>, target: T, dt: T) -> Self {
        let band = estimate.band(T::two() * dt);
        Self {
            estimate,
            target,
            band,
            passed: (estimate.mean - target).abs() <= band,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeynmanKacReport<T> {
    /// `E[R_T]` against `H(z, t)`.
    pub first: BandCheck<T>,
    /// `E[R_T^2]` against `H(z, t)`.
    pub second: BandCheck<T>,
    /// `E[R_T^2] - E[R_T]^2` from the two estimates.
    pub var_rt: T,
    pub passed: bool,
}

pub fn feynman_kac_check<T: Scalar>(bundle: &PathBundle<T>, h_value: T) -> Result<FeynmanKacReport<T>> {
    let r = bundle.terminal_r();
    let e1 = mean_estimate(&r)?;
    let e2 = second_moment_estimate(&r)?;
    let dt = bundle.cfg.dt;
    let first = BandCheck::new(e1, h_value, dt);
    let second = BandCheck::new(e2, h_value, dt);
    Ok(FeynmanKacReport {
        first,
        second,
        var_rt: e2.mean - e1.mean * e1.mean,
        passed: first.passed && second.passed,
    })
}

/// Distribution of the pathwise gap `|2 Y_s G(Z_s, s) - (X_s - x + 2 y G(z, t))|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YRepresentationReport<T> {
    pub dt: T,
    pub n: usize,
    /// Largest gap at `s = t` over all paths.
    pub initial_max: T,
    /// Root mean square over paths of the per-path maximum gap.
    pub rms_max: T,
    /// Root mean square over paths of the gap at `T`.
    pub rms_terminal: T,
    pub mean_max: T,
    pub max: T,
}

pub fn y_representation_stats<T: Scalar>(bundle: &PathBundle<T>) -> Result<YRepresentationReport<T>> {
    let n = bundle.n_included();
    if n == 0 {
        return Err(Error::InsufficientSample("every path was excluded".into()));
    }
    let (mut init, mut sq_max, mut sq_term, mut sum_max, mut max) = (0f64, 0f64, 0f64, 0f64, 0f64);
    for p in bundle.included() {
        let m = p.max_deviation.to_f64_lossy();
        let t = p.terminal_deviation.to_f64_lossy();
        init = init.max(p.initial_deviation.to_f64_lossy());
        sq_max += m * m;
        sq_term += t * t;
        sum_max += m;
        max = max.max(m);
    }
    let nf = n as f64;
    Ok(YRepresentationReport {
        dt: bundle.cfg.dt,
        n,
        initial_max: T::of(init),
        rms_max: T::of((sq_max / nf).sqrt()),
        rms_terminal: T::of((sq_term / nf).sqrt()),
        mean_max: T::of(sum_max / nf),
        max: T::of(max),
    })
}

/// Simulates under the MMV control and measures the Y-representation gap.
pub fn verify_y_representation<T: Scalar>(
    model: &MarketModel<T>,
    sol: &PdeSolution<T>,
    state: &InitialState<T>,
    cfg: &PathConfig<T>,
) -> Result<YRepresentationReport<T>> {
    let bundle = simulate_bundle(model, Some(sol), state, cfg, ControlSource::Mmv)?;
    y_representation_stats(&bundle)
}

/// [`verify_y_representation`] at each `dt` with the same seed and path count.
pub fn y_representation_refinement<T: Scalar>(
    model: &MarketModel<T>,
    sol: &PdeSolution<T>,
    state: &InitialState<T>,
    cfg: &PathConfig<T>,
    dts: &[T],
) -> Result<Vec<YRepresentationReport<T>>> {
    dts.iter()
        .map(|&dt| verify_y_representation(model, sol, state, &cfg.with_dt(dt)?))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierMcReport<T> {
    /// `E[X_T]` against `x - (G + 1) / theta`.
    pub mean: BandCheck<T>,
    /// `Var(X_T)` against `-(G + 1) / theta^2`.
    pub variance: BandCheck<T>,
    pub passed: bool,
}

pub fn frontier_mc_check<T: Scalar>(
    bundle: &PathBundle<T>,
    g0: T,
    state: &InitialState<T>,
) -> Result<FrontierMcReport<T>> {
    let x = bundle.terminal_x();
    let dt = bundle.cfg.dt;
    let excess = -(g0 + T::one());
    let mean = BandCheck::new(mean_estimate(&x)?, state.x + excess / state.theta, dt);
    let variance = BandCheck::new(
        variance_estimate(&x)?,
        excess / (state.theta * state.theta),
        dt,
    );
    Ok(FrontierMcReport {
        mean,
        variance,
        passed: mean.passed && variance.passed,
    })
}

/// MC estimate of `E[X_T] - theta / 2 Var(X_T)`.
pub fn utility_check<T: Scalar>(bundle: &PathBundle<T>, target: T) -> Result<BandCheck<T>> {
    let u = mean_variance_utility(&bundle.terminal_x(), bundle.state.theta)?;
    Ok(BandCheck::new(u, target, bundle.cfg.dt))
}

/// Whether the MMV and MV optima coincide on the simulated sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Terminal wealth stays in the monotonicity domain; the two problems agree.
    Coincide,
    /// `R_T < 0` on a significant share of paths: the MV optimum leaves the
    /// monotonicity domain and the MMV optimum differs from it.
    Separate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonotonicityReport {
    pub n: usize,
    /// Paths with `X_T - mean(X_T) > 1 / theta`.
    pub outside_domain: usize,
    pub outside_fraction: f64,
    pub r_negative: usize,
    pub r_negative_fraction: f64,
    /// One-sided 99% Wilson lower bound on the `R_T < 0` probability.
    pub r_negative_lower_99: f64,
    pub regime: Regime,
    /// Both fractions within [`MONOTONICITY_LEAKAGE`].
    pub within_leakage: bool,
}

pub fn monotonicity_domain_check<T: Scalar>(
    bundle: &PathBundle<T>,
    state: &InitialState<T>,
) -> Result<MonotonicityReport> {
    let x = bundle.terminal_x();
    let mean = mean_estimate(&x)?.mean;
    let limit = T::one() / state.theta;
    let n = x.len();
    let outside = x.iter().filter(|&&v| v - mean > limit).count();
    let r_negative = bundle.included().filter(|p| p.r < T::zero()).count();
    let lower = wilson_lower_bound(r_negative, n, Z_99);
    let (of, rf) = (outside as f64 / n as f64, r_negative as f64 / n as f64);
    Ok(MonotonicityReport {
        n,
        outside_domain: outside,
        outside_fraction: of,
        r_negative,
        r_negative_fraction: rf,
        r_negative_lower_99: lower,
        regime: if lower > 0.0 {
            Regime::Separate
        } else {
            Regime::Coincide
        },
        within_leakage: of <= MONOTONICITY_LEAKAGE && rf <= MONOTONICITY_LEAKAGE,
    })
}
