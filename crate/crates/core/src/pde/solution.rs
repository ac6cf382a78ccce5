use super::Grid;
use crate::{Error, Result, Scalar};

/// How a [`PdeSolution`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Frozen factor with `alpha = 0`: `F(z, t) = lambda(z) (T - t)` evaluated directly.
    ExactOde,
    /// Backward march, implicit linear operator, lagged gradient-quadratic term and source.
    ImplicitLagged {
        corrector_sweeps: u32,
        /// Interior nodes where central convection would lose monotonicity and the
        /// upwind stencil was used instead.
        upwind_nodes: usize,
    },
    /// Arrays supplied by the caller.
    External,
}

/// The transformed value function `F` on a grid together with
/// `G = -exp(F)`, `H = exp(-F)` and `G_z`.
///
/// Arrays are stored time-major: entry `(i, j)` (node `z_i`, time `t_j`) lives at
/// `j * n_z + i`, with `j = 0` the initial time and `j = n_t` the terminal time.
#[derive(Debug, Clone)]
pub struct PdeSolution<T> {
    pub(crate) grid: Grid<T>,
    pub(crate) f: Vec<T>,
    pub(crate) g: Vec<T>,
    pub(crate) h: Vec<T>,
    pub(crate) g_z: Vec<T>,
    pub(crate) scheme: Scheme,
    pub(crate) max_residual_f: T,
    pub(crate) max_residual_g: T,
    pub(crate) max_residual_h: T,
    pub(crate) boundary_gradient: T,
}

/// `G`, `G_z`, `H`, `H_z` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSample<T> {
    pub g: T,
    pub g_z: T,
    pub h: T,
    pub h_z: T,
}

/// Boundary slopes of `F` above this are flagged as truncation-sensitive.
pub const BOUNDARY_GRADIENT_WARNING: f64 = 1e-3;

impl<T: Scalar> PdeSolution<T> {
    /// Builds a solution from an `F` array, deriving `G`, `H` and `G_z`. Residuals are left
    /// at zero; the solver fills them in.
    pub fn from_f(grid: Grid<T>, f: Vec<T>) -> Result<Self> {
        let expected = grid.n_z * (grid.n_t + 1);
        if f.len() != expected {
            return Err(Error::InvalidSolution(format!(
                "F has {} entries, grid needs {expected}",
                f.len()
            )));
        }
        let g: Vec<T> = f.iter().map(|&v| -v.exp()).collect();
        let h: Vec<T> = f.iter().map(|&v| (-v).exp()).collect();
        let g_z = z_slopes(&grid, &g);
        let boundary_gradient = boundary_slope(&grid, &f);
        Ok(Self {
            grid,
            f,
            g,
            h,
            g_z,
            scheme: Scheme::External,
            max_residual_f: T::zero(),
            max_residual_g: T::zero(),
            max_residual_h: T::zero(),
            boundary_gradient,
        })
    }

    /// Copy with `H` recomputed as `-1/G` instead of `exp(-F)`.
    pub fn with_h_from_g(&self) -> Self {
        let mut out = self.clone();
        out.h = self.g.iter().map(|&g| -T::one() / g).collect();
        out
    }

    /// Copy with `G` replaced; `G_z` is recomputed from it.
    pub fn with_g(&self, g: Vec<T>) -> Result<Self> {
        if g.len() != self.g.len() {
            return Err(Error::InvalidSolution("G array has the wrong length".into()));
        }
        let mut out = self.clone();
        out.g_z = z_slopes(&self.grid, &g);
        out.g = g;
        Ok(out)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
    pub fn f(&self) -> &[T] {
        &self.f
    }
    pub fn g(&self) -> &[T] {
        &self.g
    }
    pub fn h(&self) -> &[T] {
        &self.h
    }
    pub fn g_z(&self) -> &[T] {
        &self.g_z
    }
    pub fn max_residual_f(&self) -> T {
        self.max_residual_f
    }
    pub fn max_residual_g(&self) -> T {
        self.max_residual_g
    }
    pub fn max_residual_h(&self) -> T {
        self.max_residual_h
    }

    /// Largest `|F_z|` over the two boundary columns.
    pub fn boundary_gradient(&self) -> T {
        self.boundary_gradient
    }

    pub fn boundary_warning(&self) -> bool {
        self.boundary_gradient > T::of(BOUNDARY_GRADIENT_WARNING)
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.grid.n_z + i
    }

    /// `G(z0, t0)` at the initial-time node nearest to `z0`, interpolated in `z`.
    pub fn g_at(&self, z: T, t: T) -> Result<T> {
        Ok(self.sample(z, t)?.g)
    }

    /// Bilinear interpolation of `G` and `G_z`; `H = -1/G`, `H_z = G_z / G^2`.
    pub fn sample(&self, z: T, t: T) -> Result<GSample<T>> {
        let gr = &self.grid;
        if !gr.contains(z, t) || !z.is_finite() || !t.is_finite() {
            return Err(Error::OutOfGrid {
                z: z.to_f64_lossy(),
                t: t.to_f64_lossy(),
            });
        }
        Ok(self.sample_inside(z, t))
    }

    /// [`Self::sample`] without the range check; callers guarantee `(z, t)` is in the grid.
    #[inline]
    pub(crate) fn sample_inside(&self, z: T, t: T) -> GSample<T> {
        let gr = &self.grid;
        let inv_dz = T::of((gr.n_z - 1) as f64) / (gr.z_max - gr.z_min);
        let inv_dt = T::of(gr.n_t as f64) / (gr.t_end - gr.t_start);
        let (i0, wz) = locate((z - gr.z_min) * inv_dz, gr.n_z - 1);
        let (j0, wt) = locate((t - gr.t_start) * inv_dt, gr.n_t);
        let k00 = self.index(i0, j0);
        let k10 = k00 + 1;
        let k01 = k00 + gr.n_z;
        let k11 = k01 + 1;
        let blend = |a: &[T]| {
            let lo = a[k00] + wz * (a[k10] - a[k00]);
            let hi = a[k01] + wz * (a[k11] - a[k01]);
            lo + wt * (hi - lo)
        };
        let g = blend(&self.g);
        let g_z = blend(&self.g_z);
        GSample {
            g,
            g_z,
            h: -T::one() / g,
            h_z: g_z / (g * g),
        }
    }
}

/// Cell index (clamped to `[0, cells - 1]`) and fractional offset for a position given in
/// units of the grid step.
#[inline]
fn locate<T: Scalar>(pos: T, cells: usize) -> (usize, T) {
    let pos = pos.max(T::zero());
    let cell = pos.to_usize().unwrap_or(0).min(cells - 1);
    let w = (pos - T::of(cell as f64)).min(T::one());
    (cell, w)
}

/// `d/dz` by central differences, one-sided at the two boundary nodes.
pub(crate) fn z_slopes<T: Scalar>(grid: &Grid<T>, values: &[T]) -> Vec<T> {
    let n = grid.n_z;
    let inv_h = T::one() / grid.dz();
    let inv_2h = T::half() * inv_h;
    let mut out = vec![T::zero(); values.len()];
    for j in 0..=grid.n_t {
        let row = &values[j * n..(j + 1) * n];
        let dst = &mut out[j * n..(j + 1) * n];
        dst[0] = (row[1] - row[0]) * inv_h;
        dst[n - 1] = (row[n - 1] - row[n - 2]) * inv_h;
        for i in 1..n - 1 {
            dst[i] = (row[i + 1] - row[i - 1]) * inv_2h;
        }
    }
    out
}

fn boundary_slope<T: Scalar>(grid: &Grid<T>, f: &[T]) -> T {
    let n = grid.n_z;
    let inv_h = T::one() / grid.dz();
    (0..=grid.n_t)
        .map(|j| {
            let row = &f[j * n..(j + 1) * n];
            ((row[1] - row[0]) * inv_h)
                .abs()
                .max(((row[n - 1] - row[n - 2]) * inv_h).abs())
        })
        .fold(T::zero(), T::max)
}
