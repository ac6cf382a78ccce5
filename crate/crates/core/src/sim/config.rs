use crate::{Error, Result, Scalar};

/// Largest number of full trajectories a bundle will keep.
pub const MAX_TRAJECTORIES: usize = 100;

/// Monte Carlo settings: `n_paths` paths of `[t_start, t_end]` in steps of `dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig<T> {
    pub n_paths: usize,
    pub dt: T,
    pub seed: u64,
    pub t_start: T,
    pub t_end: T,
    /// Full trajectories to record, capped at [`MAX_TRAJECTORIES`].
    pub keep_trajectories: usize,
}

impl<T: Scalar> PathConfig<T> {
    pub fn new(n_paths: usize, dt: T, seed: u64, t_start: T, t_end: T) -> Result<Self> {
        let cfg = Self {
            n_paths,
            dt,
            seed,
            t_start,
            t_end,
            keep_trajectories: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::InvalidParameter("n_paths must be >= 1".into()));
        }
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return Err(Error::InvalidParameter(format!("dt = {} must be > 0", self.dt)));
        }
        if !(self.t_start < self.t_end) {
            return Err(Error::InvalidParameter("horizon must have t < T".into()));
        }
        let span = (self.t_end - self.t_start).to_f64_lossy();
        let dt = self.dt.to_f64_lossy();
        let steps = (span / dt).round();
        if steps < 1.0 || (steps * dt - span).abs() > 1e-12 * span.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "dt = {dt} does not divide T - t = {span}"
            )));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        ((self.t_end - self.t_start).to_f64_lossy() / self.dt.to_f64_lossy()).round() as usize
    }

    pub fn with_trajectories(mut self, n: usize) -> Self {
        self.keep_trajectories = n.min(MAX_TRAJECTORIES);
        self
    }

    pub fn with_dt(mut self, dt: T) -> Result<Self> {
        self.dt = dt;
        self.validate()?;
        Ok(self)
    }

    pub fn with_paths(mut self, n_paths: usize) -> Result<Self> {
        self.n_paths = n_paths;
        self.validate()?;
        Ok(self)
    }

    /// Time of step `k`; the last step lands exactly on `t_end`.
    #[inline]
    pub fn time(&self, k: usize) -> T {
        if k == self.n_steps() {
            self.t_end
        } else {
            self.t_start + self.dt * T::of(k as f64)
        }
    }
}
