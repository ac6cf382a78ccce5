use crate::market::MarketModel;
use crate::{Error, Result, Scalar};

/// Uniform `(z, t)` grid; `n_z` nodes in `z`, `n_t` steps in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid<T> {
    pub z_min: T,
    pub z_max: T,
    pub n_z: usize,
    pub t_start: T,
    pub t_end: T,
    pub n_t: usize,
}

/// Half-width used when the factor has no diffusion anywhere near `z0`.
const FROZEN_FACTOR_HALF_WIDTH: f64 = 1.0;

impl<T: Scalar> Grid<T> {
    pub fn new(z_min: T, z_max: T, n_z: usize, t_start: T, t_end: T, n_t: usize) -> Result<Self> {
        if !(z_min < z_max) || !z_min.is_finite() || !z_max.is_finite() {
            return Err(Error::InvalidGrid(format!("need z_min < z_max, got [{z_min}, {z_max}]")));
        }
        if n_z < 3 {
            return Err(Error::InvalidGrid(format!("need n_z >= 3, got {n_z}")));
        }
        if !(t_start < t_end) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "need t_start < T, got [{t_start}, {t_end}]"
            )));
        }
        if n_t < 1 {
            return Err(Error::InvalidGrid("need n_t >= 1".into()));
        }
        Ok(Self {
            z_min,
            z_max,
            n_z,
            t_start,
            t_end,
            n_t,
        })
    }

    /// Truncated domain `z0 +/- 6 sup|b| sqrt(T - t)`, where the supremum is taken over
    /// the domain itself (found by a short fixed-point iteration).
    pub fn around(
        model: &MarketModel<T>,
        z0: T,
        t_start: T,
        t_end: T,
        n_z: usize,
        n_t: usize,
    ) -> Result<Self> {
        let horizon = (t_end - t_start).max(T::zero()).sqrt();
        let mut half = T::of(6.0) * model.b().eval(z0).abs() * horizon;
        for _ in 0..8 {
            let sup_b = (0..=100)
                .map(|k| {
                    let z = z0 - half + T::two() * half * T::of(k as f64 / 100.0);
                    model.b().eval(z).abs()
                })
                .fold(T::zero(), T::max);
            let next = T::of(6.0) * sup_b * horizon;
            if (next - half).abs() <= T::of(1e-9) * half.max(T::one()) {
                half = next;
                break;
            }
            half = next;
        }
        if !(half > T::zero()) || !half.is_finite() {
            half = T::of(FROZEN_FACTOR_HALF_WIDTH);
        }
        Self::new(z0 - half, z0 + half, n_z, t_start, t_end, n_t)
    }

    #[inline]
    pub fn dz(&self) -> T {
        (self.z_max - self.z_min) / T::of((self.n_z - 1) as f64)
    }

    #[inline]
    pub fn dt(&self) -> T {
        (self.t_end - self.t_start) / T::of(self.n_t as f64)
    }

    #[inline]
    pub fn z(&self, i: usize) -> T {
        if i == self.n_z - 1 {
            self.z_max
        } else {
            self.z_min + self.dz() * T::of(i as f64)
        }
    }

    #[inline]
    pub fn t(&self, j: usize) -> T {
        if j == self.n_t {
            self.t_end
        } else {
            self.t_start + self.dt() * T::of(j as f64)
        }
    }

    pub fn z_nodes(&self) -> Vec<T> {
        (0..self.n_z).map(|i| self.z(i)).collect()
    }

    pub fn t_nodes(&self) -> Vec<T> {
        (0..=self.n_t).map(|j| self.t(j)).collect()
    }

    /// Same domain with `dz` and `dt` halved.
    pub fn refined(&self) -> Self {
        Self {
            n_z: 2 * (self.n_z - 1) + 1,
            n_t: 2 * self.n_t,
            ..*self
        }
    }

    pub fn contains(&self, z: T, t: T) -> bool {
        let tol_z = T::of(1e-12) * (self.z_max - self.z_min);
        let tol_t = T::of(1e-12) * (self.t_end - self.t_start).max(T::one());
        z >= self.z_min - tol_z
            && z <= self.z_max + tol_z
            && t >= self.t_start - tol_t
            && t <= self.t_end + tol_t
    }
}
