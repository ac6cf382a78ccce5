//! TOML model configuration.
//!
//! ```toml
//! schema_version = 1
//!
//! [model]
//! mu = 0.1                                   # bare number = constant
//! sigma = { family = "constant", value = 0.2 }
//! gamma = { family = "mark" }
//! a = { family = "mean_reverting", speed = 1.0, level = 0.0 }
//! b = 0.3
//! rho_w = -0.5
//! r = 0.04
//! levy = { atoms = [[0.05, 2.0]] }           # [mark, weight] pairs
//!
//! [horizon]
//! t = 0.0
//! t_end = 1.0
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::market::{Atom, CoefficientFn, JumpFn, LevyMeasure, MarketModel, MarketParams};
use crate::pde::Grid;
use crate::sim::PathConfig;
use crate::strategy::InitialState;
use crate::{Error, Result, Scalar};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub schema_version: u32,
    pub model: MarketSection,
    #[serde(default)]
    pub horizon: HorizonSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub simulation: SimulationSection,
    #[serde(default)]
    pub frontier: FrontierSection,
    #[serde(default)]
    pub figure1: Figure1Section,
}

/// A coefficient given either as a bare number or as a tagged family.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum CoefficientSpec {
    Value(f64),
    Family(CoefficientFn<f64>),
}

impl CoefficientSpec {
    fn build(self) -> CoefficientFn<f64> {
        match self {
            Self::Value(v) => CoefficientFn::constant(v),
            Self::Family(f) => f,
        }
    }
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        Self::Value(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub mu: CoefficientSpec,
    pub sigma: CoefficientSpec,
    #[serde(default = "default_gamma")]
    pub gamma: JumpFn<f64>,
    #[serde(default)]
    pub a: CoefficientSpec,
    #[serde(default)]
    pub b: CoefficientSpec,
    #[serde(default)]
    pub rho_w: f64,
    pub r: f64,
    #[serde(default)]
    pub levy: LevySection,
    /// Take `rho_bar = -sqrt(1 - rho_w^2)` instead of the positive root.
    #[serde(default)]
    pub negative_rho_bar: bool,
}

fn default_gamma() -> JumpFn<f64> {
    JumpFn::Mark
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevySection {
    /// `[mark, weight]` pairs.
    #[serde(default)]
    pub atoms: Vec<[f64; 2]>,
    /// Optional declared `nu(R)`, checked against the atom weights.
    pub total_intensity: Option<f64>,
    /// Marks uniform on `[low, high]` with intensity `total_intensity`.
    pub uniform: Option<UniformMarks>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniformMarks {
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HorizonSection {
    pub t: f64,
    pub t_end: f64,
}

impl Default for HorizonSection {
    fn default() -> Self {
        Self { t: 0.0, t_end: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    pub x: f64,
    pub z: f64,
    pub theta: f64,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self {
            x: 1.0,
            z: 0.0,
            theta: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSection {
    pub n_z: usize,
    pub n_t: usize,
    /// Explicit domain; by default six diffusion scales around `initial.z`.
    pub z_min: Option<f64>,
    pub z_max: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n_z: 401,
            n_t: 1000,
            z_min: None,
            z_max: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimulationSection {
    pub n_paths: usize,
    pub dt: f64,
    pub seed: u64,
    pub trajectories: usize,
}

impl Default for SimulationSection {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: 1e-3,
            seed: 42,
            trajectories: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontierSection {
    pub thetas: Vec<f64>,
}

impl Default for FrontierSection {
    fn default() -> Self {
        Self {
            thetas: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Figure1Section {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

impl Default for Figure1Section {
    fn default() -> Self {
        Self {
            x_min: 0.0,
            x_max: 3.0,
            points: 31,
        }
    }
}

impl Figure1Section {
    pub fn wealth_levels(&self) -> Vec<f64> {
        match self.points {
            0 => Vec::new(),
            1 => vec![self.x_min],
            n => (0..n)
                .map(|k| self.x_min + (self.x_max - self.x_min) * k as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

impl ModelConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let version: toml::Table =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        match version.get("schema_version") {
            None => return Err(Error::Config("missing mandatory `schema_version`".into())),
            Some(toml::Value::Integer(v)) if *v == SCHEMA_VERSION as i64 => {}
            Some(v) => {
                return Err(Error::Config(format!(
                    "unsupported schema_version {v}; this build reads {SCHEMA_VERSION}"
                )))
            }
        }
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.build_model::<f64>()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn build_model<T: Scalar>(&self) -> Result<MarketModel<T>> {
        let m = &self.model;
        let levy = build_levy(&m.levy)?;
        let model = MarketModel::new(MarketParams {
            mu: m.mu.build(),
            sigma: m.sigma.build(),
            gamma: m.gamma,
            a: m.a.build(),
            b: m.b.build(),
            rho_w: m.rho_w,
            r: m.r,
            levy,
        })?;
        let model = if m.negative_rho_bar {
            model.with_negative_rho_bar()
        } else {
            model
        };
        Ok(model.cast())
    }

    pub fn initial_state<T: Scalar>(&self) -> Result<InitialState<T>> {
        let i = &self.initial;
        InitialState::new(T::of(i.x), T::of(i.theta), T::of(i.z), T::of(self.horizon.t))
    }

    pub fn build_grid<T: Scalar>(&self, model: &MarketModel<T>) -> Result<Grid<T>> {
        let g = &self.grid;
        let (t, t_end) = (T::of(self.horizon.t), T::of(self.horizon.t_end));
        match (g.z_min, g.z_max) {
            (Some(lo), Some(hi)) => Grid::new(T::of(lo), T::of(hi), g.n_z, t, t_end, g.n_t),
            (None, None) => Grid::around(model, T::of(self.initial.z), t, t_end, g.n_z, g.n_t),
            _ => Err(Error::Config("grid.z_min and grid.z_max go together".into())),
        }
    }

    pub fn path_config<T: Scalar>(&self) -> Result<PathConfig<T>> {
        let s = &self.simulation;
        Ok(PathConfig::new(
            s.n_paths,
            T::of(s.dt),
            s.seed,
            T::of(self.horizon.t),
            T::of(self.horizon.t_end),
        )?
        .with_trajectories(s.trajectories))
    }
}

fn build_levy(l: &LevySection) -> Result<LevyMeasure<f64>> {
    match (&l.uniform, l.atoms.is_empty()) {
        (Some(_), false) => Err(Error::Config(
            "levy: give either `atoms` or `uniform`, not both".into(),
        )),
        (Some(u), true) => {
            let total = l.total_intensity.ok_or_else(|| {
                Error::Config("levy.uniform needs levy.total_intensity".into())
            })?;
            LevyMeasure::uniform(total, u.low, u.high)
        }
        (None, _) => {
            let atoms = l
                .atoms
                .iter()
                .map(|&[mark, weight]| Atom { mark, weight })
                .collect();
            match l.total_intensity {
                Some(total) => LevyMeasure::from_atoms_with_total(atoms, total),
                None => LevyMeasure::from_atoms(atoms),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CONSTANT: &str = r#"
schema_version = 1
[model]
mu = 0.1
sigma = 0.2
r = 0.04
levy = { atoms = [[0.05, 2.0]] }
"#;

    #[test]
    fn constant_model_parses() {
        let c = ModelConfig::from_toml_str(CONSTANT).unwrap();
        let m = c.build_model::<f64>().unwrap();
        assert!((m.big_sigma(0.0).unwrap() - 0.045).abs() < 1e-15);
        assert!(m.factor_is_frozen());
        assert_eq!(c.grid.n_z, 401);
        assert_eq!(c.path_config::<f64>().unwrap().n_steps(), 1000);
    }

    #[test]
    fn schema_version_is_mandatory() {
        let text = CONSTANT.replace("schema_version = 1", "");
        assert!(matches!(ModelConfig::from_toml_str(&text), Err(Error::Config(m)) if m.contains("schema_version")));
        let text = CONSTANT.replace("schema_version = 1", "schema_version = 7");
        assert!(matches!(ModelConfig::from_toml_str(&text), Err(Error::Config(_))));
    }

    #[test]
    fn families_and_sections() {
        let text = r#"
schema_version = 1
[model]
mu = { family = "tanh", base = 0.1, amplitude = 0.04, center = 0.0, width = 1.0 }
sigma = 0.2
a = { family = "mean_reverting", speed = 1.0, level = 0.0 }
b = 0.3
rho_w = -0.5
r = 0.04
levy = { atoms = [[-0.05, 1.0], [0.04, 0.5]], total_intensity = 1.5 }
[simulation]
n_paths = 10
dt = 0.01
seed = 3
[frontier]
thetas = [1.0]
"#;
        let c = ModelConfig::from_toml_str(text).unwrap();
        let m = c.build_model::<f32>().unwrap();
        assert!(!m.is_constant());
        assert_eq!(c.simulation.seed, 3);
        assert_eq!(c.frontier.thetas, vec![1.0]);
        let g = c.build_grid(&m).unwrap();
        assert!(g.z_min < 0.0 && g.z_max > 0.0);
    }

    #[test]
    fn inconsistent_intensity_is_rejected() {
        let text = CONSTANT.replace("[[0.05, 2.0]]", "[[0.05, 2.0]], total_intensity = 3.0");
        assert!(ModelConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = CONSTANT.replace("r = 0.04", "r = 0.04\nvolatility = 3");
        assert!(ModelConfig::from_toml_str(&text).is_err());
    }

    #[test]
    fn wealth_levels() {
        let f = Figure1Section {
            x_min: 0.0,
            x_max: 2.0,
            points: 5,
        };
        assert_eq!(f.wealth_levels(), vec![0.0, 0.5, 1.0, 1.5, 2.0]);
    }
}
