//! Finite-activity Lévy measures.

use serde::{Deserialize, Serialize};

use super::JumpFn;
use crate::{Error, Result, Scalar};

/// Jump mark `p` carrying intensity `weight`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom<T> {
    pub mark: T,
    pub weight: T,
}

/// Distribution of jump marks under `nu / nu(R)`.
#[derive(Debug, Clone, PartialEq)]
pub enum MarkLaw<T> {
    /// Finite list of weighted atoms. The canonical representation.
    Atoms(Vec<Atom<T>>),
    /// Marks uniform on `[low, high]`.
    Uniform { low: T, high: T },
}

/// Finite Lévy measure `nu` with total mass `nu(R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure<T> {
    total_intensity: T,
    law: MarkLaw<T>,
}

impl<T: Scalar> LevyMeasure<T> {
    /// Measure with no jumps.
    pub fn none() -> Self {
        Self {
            total_intensity: T::zero(),
            law: MarkLaw::Atoms(Vec::new()),
        }
    }

    /// Builds a measure from weighted atoms; the total intensity is the sum of the weights.
    pub fn from_atoms(atoms: Vec<Atom<T>>) -> Result<Self> {
        let mut total = T::zero();
        for (k, a) in atoms.iter().enumerate() {
            if !a.mark.is_finite() {
                return Err(Error::InvalidMeasure(format!("atom {k} has a non-finite mark")));
            }
            if !(a.weight >= T::zero()) || !a.weight.is_finite() {
                return Err(Error::InvalidMeasure(format!(
                    "atom {k} has weight {} (must be finite and >= 0)",
                    a.weight
                )));
            }
            total += a.weight;
        }
        Ok(Self {
            total_intensity: total,
            law: MarkLaw::Atoms(atoms),
        })
    }

    /// Like [`Self::from_atoms`] but also checks a declared total against the weight sum
    /// (relative tolerance `1e-12`).
    pub fn from_atoms_with_total(atoms: Vec<Atom<T>>, declared_total: T) -> Result<Self> {
        let m = Self::from_atoms(atoms)?;
        let scale = declared_total.abs().max(T::one());
        if (m.total_intensity - declared_total).abs() > T::of(1e-12) * scale {
            return Err(Error::InvalidMeasure(format!(
                "atom weights sum to {} but total_intensity is {}",
                m.total_intensity, declared_total
            )));
        }
        Ok(m)
    }

    pub fn uniform(total_intensity: T, low: T, high: T) -> Result<Self> {
        if !(total_intensity >= T::zero()) || !total_intensity.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "total intensity {total_intensity} must be finite and >= 0"
            )));
        }
        if !(low < high) || !low.is_finite() || !high.is_finite() {
            return Err(Error::InvalidMeasure(format!(
                "uniform mark support [{low}, {high}] is empty or unbounded"
            )));
        }
        Ok(Self {
            total_intensity,
            law: MarkLaw::Uniform { low, high },
        })
    }

    pub fn total_intensity(&self) -> T {
        self.total_intensity
    }

    pub fn law(&self) -> &MarkLaw<T> {
        &self.law
    }

    /// Atoms of the measure, or an empty slice for parametric laws.
    pub fn atoms(&self) -> &[Atom<T>] {
        match &self.law {
            MarkLaw::Atoms(a) => a,
            MarkLaw::Uniform { .. } => &[],
        }
    }

    pub fn has_jumps(&self) -> bool {
        self.total_intensity > T::zero()
    }

    /// Marks at which an affine-in-mark `gamma` attains its extremes over the support.
    pub fn extreme_marks(&self) -> Vec<T> {
        match &self.law {
            MarkLaw::Atoms(a) => a
                .iter()
                .filter(|a| a.weight > T::zero())
                .map(|a| a.mark)
                .collect(),
            MarkLaw::Uniform { low, high } => {
                if self.has_jumps() {
                    vec![*low, *high]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// First two raw moments of the mark under the normalised law.
    fn mark_moments(&self) -> (T, T) {
        match &self.law {
            MarkLaw::Atoms(atoms) => {
                if self.total_intensity == T::zero() {
                    return (T::zero(), T::zero());
                }
                let (s1, s2) = atoms.iter().fold((T::zero(), T::zero()), |(s1, s2), a| {
                    (s1 + a.weight * a.mark, s2 + a.weight * a.mark * a.mark)
                });
                (s1 / self.total_intensity, s2 / self.total_intensity)
            }
            MarkLaw::Uniform { low, high } => {
                let (l, h) = (*low, *high);
                ((l + h) * T::half(), (l * l + l * h + h * h) / T::of(3.0))
            }
        }
    }

    /// `(int gamma(z,p) nu(dp), int gamma(z,p)^2 nu(dp))`.
    ///
    /// Atom lists are summed directly; parametric laws use their exact mark moments,
    /// which is exact because `gamma` is affine in the mark.
    pub fn gamma_moments(&self, gamma: &JumpFn<T>, z: T) -> (T, T) {
        match &self.law {
            MarkLaw::Atoms(atoms) => atoms.iter().fold((T::zero(), T::zero()), |(m1, m2), a| {
                let g = gamma.eval(z, a.mark);
                (m1 + a.weight * g, m2 + a.weight * g * g)
            }),
            MarkLaw::Uniform { .. } => {
                let (e1, e2) = self.mark_moments();
                let (i, s) = gamma.affine_in_mark(z);
                let nu = self.total_intensity;
                (
                    nu * (i + s * e1),
                    nu * (i * i + T::two() * i * s * e1 + s * s * e2),
                )
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> LevyMeasure<U> {
        let c = |v: T| U::of(v.to_f64_lossy());
        LevyMeasure {
            total_intensity: c(self.total_intensity),
            law: match &self.law {
                MarkLaw::Atoms(a) => MarkLaw::Atoms(
                    a.iter()
                        .map(|a| Atom {
                            mark: c(a.mark),
                            weight: c(a.weight),
                        })
                        .collect(),
                ),
                MarkLaw::Uniform { low, high } => MarkLaw::Uniform {
                    low: c(*low),
                    high: c(*high),
                },
            },
        }
    }
}
