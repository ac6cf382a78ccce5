use std::path::PathBuf;

use clap::{Parser, Subcommand};

/// Mean-variance investment laboratory: value-function solver, controls, Monte Carlo
/// verification, efficient frontier and the jump-size table.
#[derive(Debug, Clone, Parser)]
#[command(name = "mmv", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Model configuration (TOML, `schema_version = 1`).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Directory for CSV outputs; created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,

    /// RNG seed, overriding `simulation.seed`.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Number of Monte Carlo paths, overriding `simulation.n_paths`.
    #[arg(long, global = true, value_name = "N")]
    pub paths: Option<usize>,

    /// Simulation time step, overriding `simulation.dt`.
    #[arg(long, global = true, value_name = "F")]
    pub dt: Option<f64>,

    /// Risk-free rate, overriding the model's `r` (and the table default of 0.04).
    #[arg(long, global = true, value_name = "F", allow_hyphen_values = true)]
    pub r: Option<f64>,

    /// Comma-separated risk-aversion levels, overriding `frontier.thetas`.
    #[arg(long, global = true, value_name = "LIST", value_delimiter = ',')]
    pub theta: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve the value-function equation and report residuals.
    Solve {
        /// Also write every grid node as `pde_solution.csv`.
        #[arg(long)]
        dump: bool,
    },
    /// Run the Monte Carlo checks against the solver.
    Verify {
        /// Write up to this many full trajectories (capped at 100).
        #[arg(long, default_value_t = 0)]
        trajectories: usize,
    },
    /// Efficient frontier points for each theta.
    Frontier,
    /// Optimal amount in the risky asset against current wealth, with and without jumps.
    Figure1 {
        /// Also estimate both utilities by simulation.
        #[arg(long)]
        mc: bool,
    },
    /// Jump-size condition for each row of a stock-parameter table.
    Table1 {
        /// CSV with header `ticker,drift,sigma,nu,gamma`; the bundled table by default.
        #[arg(long, value_name = "PATH")]
        input: Option<PathBuf>,
    },
    /// Evaluate `zeta * gamma >= -1` over the solution grid.
    CheckAssumption,
}
