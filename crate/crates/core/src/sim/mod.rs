//! Monte Carlo simulation of wealth, density and factor paths, and the estimator checks
//! built on it.

mod checks;
mod config;
mod estimate;
mod noise;
mod paths;

pub use checks::{
    feynman_kac_check, frontier_mc_check, monotonicity_domain_check, utility_check,
    verify_y_representation, y_representation_refinement, y_representation_stats, BandCheck,
    FeynmanKacReport, FrontierMcReport, MonotonicityReport, Regime, YRepresentationReport,
    MONOTONICITY_LEAKAGE,
};
pub use config::{PathConfig, MAX_TRAJECTORIES};
pub use estimate::{
    mean_estimate, mean_variance_utility, second_moment_estimate, variance_estimate,
    wilson_lower_bound, McEstimate, Z_99,
};
pub use noise::{NoiseRecord, NoiseSource};
pub use paths::{
    simulate_bundle, ControlSource, PathBundle, PathSummary, Trajectory, TrajectoryPoint,
    EXCLUSION_WARNING_RATE,
};
