//! Built-in coefficient families.
//!
//! Market coefficients are selected from a closed set of parametric families so that
//! configuration files stay portable and every family can be validated on a grid.

use serde::{Deserialize, Serialize};

use crate::Scalar;

/// A scalar coefficient as a function of the factor level `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum CoefficientFn<T> {
    /// `value`
    Constant { value: T },
    /// `intercept + slope * z`
    Affine { intercept: T, slope: T },
    /// `speed * (level - z)`, the drift of an Ornstein-Uhlenbeck factor.
    MeanReverting { speed: T, level: T },
    /// `scale * sqrt(max(z, 0))`, a square-root (CIR / Heston-like) diffusion.
    Sqrt { scale: T },
    /// `base + amplitude * tanh((z - center) / width)`, bounded and smooth.
    Tanh {
        base: T,
        amplitude: T,
        center: T,
        width: T,
    },
}

impl<T: Scalar> CoefficientFn<T> {
    pub fn constant(value: T) -> Self {
        Self::Constant { value }
    }

    #[inline]
    pub fn eval(&self, z: T) -> T {
        match *self {
            Self::Constant { value } => value,
            Self::Affine { intercept, slope } => intercept + slope * z,
            Self::MeanReverting { speed, level } => speed * (level - z),
            Self::Sqrt { scale } => scale * z.max(T::zero()).sqrt(),
            Self::Tanh {
                base,
                amplitude,
                center,
                width,
            } => base + amplitude * ((z - center) / width).tanh(),
        }
    }

    /// True when the function does not depend on `z`.
    pub fn is_constant(&self) -> bool {
        match *self {
            Self::Constant { .. } => true,
            Self::Affine { slope, .. } => slope == T::zero(),
            Self::MeanReverting { speed, .. } => speed == T::zero(),
            Self::Sqrt { scale } => scale == T::zero(),
            Self::Tanh { amplitude, .. } => amplitude == T::zero(),
        }
    }

    /// True when the function is identically zero.
    pub fn is_zero(&self) -> bool {
        self.is_constant() && self.eval(T::zero()) == T::zero()
    }

    pub fn cast<U: Scalar>(&self) -> CoefficientFn<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        match *self {
            Self::Constant { value } => CoefficientFn::Constant { value: c(value) },
            Self::Affine { intercept, slope } => CoefficientFn::Affine {
                intercept: c(intercept),
                slope: c(slope),
            },
            Self::MeanReverting { speed, level } => CoefficientFn::MeanReverting {
                speed: c(speed),
                level: c(level),
            },
            Self::Sqrt { scale } => CoefficientFn::Sqrt { scale: c(scale) },
            Self::Tanh {
                base,
                amplitude,
                center,
                width,
            } => CoefficientFn::Tanh {
                base: c(base),
                amplitude: c(amplitude),
                center: c(center),
                width: c(width),
            },
        }
    }
}

/// Jump strength `gamma(z, p)` of the risky asset for a jump with mark `p`.
///
/// Every family is affine in the mark, `gamma(z, p) = intercept(z) + slope(z) * p`,
/// which keeps all jump moments exact for both atom lists and parametric marks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum JumpFn<T> {
    /// `gamma(z, p) = p`: the mark is the relative jump size.
    Mark,
    /// `gamma(z, p) = value` for every mark.
    Constant { value: T },
    /// `gamma(z, p) = factor(z) * p`.
    ScaledMark { factor: CoefficientFn<T> },
}

impl<T: Scalar> JumpFn<T> {
    #[inline]
    pub fn eval(&self, z: T, p: T) -> T {
        let (i, s) = self.affine_in_mark(z);
        i + s * p
    }

    /// `(intercept, slope)` such that `gamma(z, p) = intercept + slope * p`.
    #[inline]
    pub fn affine_in_mark(&self, z: T) -> (T, T) {
        match *self {
            Self::Mark => (T::zero(), T::one()),
            Self::Constant { value } => (value, T::zero()),
            Self::ScaledMark { factor } => (T::zero(), factor.eval(z)),
        }
    }

    pub fn is_constant_in_z(&self) -> bool {
        match self {
            Self::Mark | Self::Constant { .. } => true,
            Self::ScaledMark { factor } => factor.is_constant(),
        }
    }

    pub fn cast<U: Scalar>(&self) -> JumpFn<U> {
        match *self {
            Self::Mark => JumpFn::Mark,
            Self::Constant { value } => JumpFn::Constant {
                value: U::of(value.to_f64_lossy()),
            },
            Self::ScaledMark { factor } => JumpFn::ScaledMark {
                factor: factor.cast(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_evaluate() {
        assert_eq!(CoefficientFn::constant(0.3).eval(7.0), 0.3);
        let ou = CoefficientFn::MeanReverting {
            speed: 2.0,
            level: 0.5,
        };
        assert_eq!(ou.eval(1.0), -1.0);
        let sq = CoefficientFn::Sqrt { scale: 1.0 };
        assert_eq!(sq.eval(4.0), 2.0);
        assert_eq!(sq.eval(-1.0), 0.0);
        let th: CoefficientFn<f64> = CoefficientFn::Tanh {
            base: 0.1,
            amplitude: 0.02,
            center: 0.0,
            width: 1.0,
        };
        assert!((th.eval(100.0) - 0.12).abs() < 1e-12);
        assert!(!th.is_constant());
        assert!(CoefficientFn::Affine { intercept: 0.0, slope: 0.0 }.is_zero());
    }

    #[test]
    fn jump_families_are_affine_in_mark() {
        let g = JumpFn::ScaledMark {
            factor: CoefficientFn::Affine {
                intercept: 1.0,
                slope: 0.5,
            },
        };
        assert_eq!(g.eval(2.0, 0.1), 0.2);
        assert_eq!(JumpFn::<f64>::Mark.eval(3.0, -0.2), -0.2);
        assert_eq!(JumpFn::Constant { value: 0.05 }.eval(3.0, 99.0), 0.05);
    }

    #[test]
    fn serde_tagged_roundtrip() {
        let src = r#"family = "tanh"
base = 0.1
amplitude = 0.02
center = 0.0
width = 1.5
"#;
        let f: CoefficientFn<f64> = toml::from_str(src).unwrap();
        assert_eq!(
            f,
            CoefficientFn::Tanh {
                base: 0.1,
                amplitude: 0.02,
                center: 0.0,
                width: 1.5
            }
        );
    }
}
