//! Optimal controls, multipliers, the efficient frontier and closed-form comparisons.

mod assumption;
mod closed_form;
mod controls;
mod frontier;
mod state;

pub use assumption::{check_assumption, AssumptionReport};
pub use closed_form::{constant_case_summary, strategy_comparison, ConstantCaseSummary, StrategyRow};
pub use controls::{
    mmv_control, mmv_control_with_g0, mv_auxiliary_control, zeta, zeta_from_g, zeta_from_h,
    ControlStatus, ControlVector,
};
pub use frontier::{
    efficient_frontier, frontier_identity_gap, lagrange_quantities, FrontierPoint,
    LagrangeQuantities,
};
pub use state::InitialState;
