//! Monotone and classical mean-variance investment in a jump-diffusion market driven by
//! an untradable stochastic factor.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the aliases below
//! fix the double-precision versions used by the command-line tool.

pub mod config;
pub mod error;
pub mod market;
pub mod pde;
mod scalar;
pub mod sim;
pub mod strategy;
pub mod table;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Model = market::MarketModel<f64>;
pub type Levy = market::LevyMeasure<f64>;
pub type SolutionGrid = pde::Grid<f64>;
pub type Solution = pde::PdeSolution<f64>;
pub type State = strategy::InitialState<f64>;
pub type Controls = strategy::ControlVector<f64>;
pub type Frontier = Vec<strategy::FrontierPoint<f64>>;
pub type Paths = sim::PathBundle<f64>;
pub type Estimate = sim::McEstimate<f64>;
pub type StockRecord = table::StockParamRecord<f64>;

pub type Model32 = market::MarketModel<f32>;
pub type Solution32 = pde::PdeSolution<f32>;
