//! Market coefficients, the jump measure and every derived coefficient function.

mod coefficient;
mod diagnostics;
mod levy;
mod model;

pub use coefficient::{CoefficientFn, JumpFn};
pub use diagnostics::{check_market_invariants, validate_coefficients, CoefficientDiagnostics};
pub use levy::{Atom, LevyMeasure, MarkLaw};
pub use model::{MarketModel, MarketParams, PdeCoefficients, PointCoefficients};
