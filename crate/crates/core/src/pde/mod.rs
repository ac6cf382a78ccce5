//! Finite-difference solver for the transformed value-function equation.

mod consistency;
mod grid;
mod residual;
mod solution;
mod solver;
mod tridiag;

pub use grid::Grid;
pub use residual::{residual_f_equation, residual_g_equation, residual_h_equation};
pub use solution::{GSample, PdeSolution, Scheme, BOUNDARY_GRADIENT_WARNING};
pub use solver::{closed_form_g_constant, solve_f_pde, CORRECTOR_SWEEPS};
pub use consistency::{
    consistency_report, ConsistencyReport, EXACT_RESIDUAL_TOLERANCE, PRODUCT_TOLERANCE,
    RESIDUAL_RATIO,
};
