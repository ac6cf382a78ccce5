use crate::{Error, Result, Scalar};

/// Precommitment anchor `(x, theta, z, t)`: the state at which the investor optimises.
///
/// Controls take this separately from the current state, since both problems are solved
/// in the precommitment sense and never re-anchored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialState<T> {
    pub x: T,
    pub theta: T,
    pub z: T,
    pub t: T,
}

impl<T: Scalar> InitialState<T> {
    pub fn new(x: T, theta: T, z: T, t: T) -> Result<Self> {
        if !(theta > T::zero()) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("theta = {theta} must be > 0")));
        }
        if !x.is_finite() || !z.is_finite() || !t.is_finite() {
            return Err(Error::InvalidParameter("initial state must be finite".into()));
        }
        Ok(Self { x, theta, z, t })
    }

    /// `y = 1 / (2 theta)`, the initial value of the density process.
    pub fn y(&self) -> T {
        T::one() / (T::two() * self.theta)
    }

    pub fn with_theta(&self, theta: T) -> Result<Self> {
        Self::new(self.x, theta, self.z, self.t)
    }
}
