use super::{CoefficientFn, JumpFn, LevyMeasure};
use crate::{Error, Result, Scalar};

/// Plain-data description of a market, validated by [`MarketModel::new`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarketParams<T> {
    pub mu: CoefficientFn<T>,
    pub sigma: CoefficientFn<T>,
    pub gamma: JumpFn<T>,
    pub a: CoefficientFn<T>,
    pub b: CoefficientFn<T>,
    pub rho_w: T,
    pub r: T,
    pub levy: LevyMeasure<T>,
}

/// Jump-diffusion market driven by an untradable factor `Z`.
///
/// The risky asset has drift `mu(z)`, volatility `sigma(z)` and relative jumps
/// `gamma(z, p)` against the compensated Poisson measure with intensity `levy`; the
/// factor follows `dZ = a(Z) dt + b(Z) (rho_w dW1 + rho_bar dW2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketModel<T> {
    mu: CoefficientFn<T>,
    sigma: CoefficientFn<T>,
    gamma: JumpFn<T>,
    a: CoefficientFn<T>,
    b: CoefficientFn<T>,
    rho_w: T,
    rho_bar: T,
    r: T,
    levy: LevyMeasure<T>,
}

/// Every coefficient evaluated at a single factor level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointCoefficients<T> {
    pub mu: T,
    pub sigma: T,
    pub a: T,
    pub b: T,
    /// `int gamma nu(dp)`
    pub m1: T,
    /// `int gamma^2 nu(dp)`
    pub m2: T,
    /// `sigma^2 + m2`
    pub big_sigma: T,
}

/// Coefficients of the value-function equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdeCoefficients<T> {
    pub alpha: T,
    pub beta: T,
    pub lambda: T,
}

impl<T: Scalar> MarketModel<T> {
    pub fn new(p: MarketParams<T>) -> Result<Self> {
        if !p.rho_w.is_finite() || p.rho_w.abs() > T::one() {
            return Err(Error::InvalidParameter(format!(
                "rho_w = {} must lie in [-1, 1]",
                p.rho_w
            )));
        }
        if !p.r.is_finite() {
            return Err(Error::InvalidParameter("r must be finite".into()));
        }
        let rho_bar = (T::one() - p.rho_w * p.rho_w).max(T::zero()).sqrt();
        Ok(Self {
            mu: p.mu,
            sigma: p.sigma,
            gamma: p.gamma,
            a: p.a,
            b: p.b,
            rho_w: p.rho_w,
            rho_bar,
            r: p.r,
            levy: p.levy,
        })
    }

    /// Constant-coefficient market without a factor (`a = b = 0`, `gamma(z, p) = p`).
    pub fn constant(mu: T, sigma: T, r: T, levy: LevyMeasure<T>) -> Result<Self> {
        Self::new(MarketParams {
            mu: CoefficientFn::constant(mu),
            sigma: CoefficientFn::constant(sigma),
            gamma: JumpFn::Mark,
            a: CoefficientFn::constant(T::zero()),
            b: CoefficientFn::constant(T::zero()),
            rho_w: T::zero(),
            r,
            levy,
        })
    }

    pub fn params(&self) -> MarketParams<T> {
        MarketParams {
            mu: self.mu,
            sigma: self.sigma,
            gamma: self.gamma,
            a: self.a,
            b: self.b,
            rho_w: self.rho_w,
            r: self.r,
            levy: self.levy.clone(),
        }
    }

    /// Same market with the jump measure removed (pure Brownian market).
    pub fn without_jumps(&self) -> Self {
        Self {
            levy: LevyMeasure::none(),
            ..self.clone()
        }
    }

    pub fn with_r(&self, r: T) -> Self {
        Self { r, ..self.clone() }
    }

    /// Same market with `rho_bar = -sqrt(1 - rho_w^2)`, i.e. `W2` replaced by `-W2`.
    pub fn with_negative_rho_bar(&self) -> Self {
        Self {
            rho_bar: -self.rho_bar.abs(),
            ..self.clone()
        }
    }

    pub fn mu(&self) -> &CoefficientFn<T> {
        &self.mu
    }
    pub fn sigma(&self) -> &CoefficientFn<T> {
        &self.sigma
    }
    pub fn gamma(&self) -> &JumpFn<T> {
        &self.gamma
    }
    pub fn a(&self) -> &CoefficientFn<T> {
        &self.a
    }
    pub fn b(&self) -> &CoefficientFn<T> {
        &self.b
    }
    pub fn rho_w(&self) -> T {
        self.rho_w
    }
    pub fn rho_bar(&self) -> T {
        self.rho_bar
    }
    pub fn r(&self) -> T {
        self.r
    }
    pub fn levy(&self) -> &LevyMeasure<T> {
        &self.levy
    }

    /// `mu`, `sigma` and `gamma` do not depend on the factor.
    pub fn is_constant(&self) -> bool {
        self.mu.is_constant() && self.sigma.is_constant() && self.gamma.is_constant_in_z()
    }

    /// The factor neither drifts nor diffuses.
    pub fn factor_is_frozen(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    #[inline]
    pub fn gamma_at(&self, z: T, p: T) -> T {
        self.gamma.eval(z, p)
    }

    /// `(int gamma nu(dp), int gamma^2 nu(dp))` at factor level `z`.
    pub fn levy_moments(&self, z: T) -> Result<(T, T)> {
        let (m1, m2) = self.levy.gamma_moments(&self.gamma, z);
        finite("levy_m1", m1, z)?;
        finite("levy_m2", m2, z)?;
        Ok((m1, m2))
    }

    /// `Sigma(z) = sigma(z)^2 + int gamma(z,p)^2 nu(dp)`.
    pub fn big_sigma(&self, z: T) -> Result<T> {
        Ok(self.point(z)?.big_sigma)
    }

    pub fn point(&self, z: T) -> Result<PointCoefficients<T>> {
        let mu = finite("mu", self.mu.eval(z), z)?;
        let sigma = finite("sigma", self.sigma.eval(z), z)?;
        let a = finite("a", self.a.eval(z), z)?;
        let b = finite("b", self.b.eval(z), z)?;
        let (m1, m2) = self.levy_moments(z)?;
        Ok(PointCoefficients {
            mu,
            sigma,
            a,
            b,
            m1,
            m2,
            big_sigma: sigma * sigma + m2,
        })
    }

    /// `alpha`, `beta`, `lambda` at `z`.
    pub fn pde_coefficients(&self, z: T) -> Result<PdeCoefficients<T>> {
        let pc = self.point(z)?;
        if !(pc.big_sigma > T::zero()) {
            return Err(Error::DegenerateMarket {
                z: z.to_f64_lossy(),
                reason: "sigma^2 + int gamma^2 nu(dp) = 0".into(),
            });
        }
        let excess = pc.mu - self.r;
        let alpha = pc.a - T::two() * self.rho_w * excess * pc.sigma * pc.b / pc.big_sigma;
        let beta =
            (self.rho_bar * self.rho_bar * pc.sigma * pc.sigma + pc.m2) / pc.big_sigma;
        let lambda = excess * excess / pc.big_sigma;
        Ok(PdeCoefficients {
            alpha,
            beta,
            lambda,
        })
    }

    pub fn cast<U: Scalar>(&self) -> MarketModel<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        MarketModel {
            mu: self.mu.cast(),
            sigma: self.sigma.cast(),
            gamma: self.gamma.cast(),
            a: self.a.cast(),
            b: self.b.cast(),
            rho_w: c(self.rho_w),
            rho_bar: c(self.rho_bar),
            r: c(self.r),
            levy: self.levy.cast(),
        }
    }
}

#[inline]
fn finite<T: Scalar>(name: &'static str, v: T, z: T) -> Result<T> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::CoefficientDomain {
            name,
            z: z.to_f64_lossy(),
        })
    }
}
