use crate::{Error, Result, Scalar};

/// Lagrange-multiplier quantities recovering the MV solution from the auxiliary
/// quadratic problem, given the first two moments of `R_T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangeQuantities<T> {
    pub x: T,
    pub e_rt: T,
    /// Optimal target `d* = A* + c*(A*)`.
    pub d_star: T,
    /// Optimal expected terminal wealth.
    pub a_star: T,
}

impl<T: Scalar> LagrangeQuantities<T> {
    /// `c*(A) = (A - x) E[R_T] / (1 - E[R_T])`.
    pub fn c_star(&self, a: T) -> T {
        (a - self.x) * self.e_rt / (T::one() - self.e_rt)
    }
}

pub fn lagrange_quantities<T: Scalar>(x: T, theta: T, e_rt: T, var_rt: T) -> Result<LagrangeQuantities<T>> {
    if !(theta > T::zero()) {
        return Err(Error::InvalidParameter(format!("theta = {theta} must be > 0")));
    }
    if e_rt == T::one() || !(var_rt > T::zero()) {
        return Err(Error::DegenerateMarket {
            z: f64::NAN,
            reason: format!("E[R_T] = {e_rt}, Var(R_T) = {var_rt}: zero risk premium"),
        });
    }
    let gap = T::one() - e_rt;
    Ok(LagrangeQuantities {
        x,
        e_rt,
        d_star: x + gap / (theta * var_rt),
        a_star: x + gap * gap / (theta * var_rt),
    })
}

/// One point of the mean-variance efficient frontier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontierPoint<T> {
    pub theta: T,
    pub mean: T,
    pub variance: T,
}

/// `mean = x - (g0 + 1) / theta`, `variance = -(g0 + 1) / theta^2` for each `theta`.
pub fn efficient_frontier<T: Scalar>(g0: T, x: T, thetas: &[T]) -> Result<Vec<FrontierPoint<T>>> {
    if !(g0 <= -T::one()) {
        return Err(Error::InvalidSolution(format!("G = {g0} must be <= -1")));
    }
    let excess = -(g0 + T::one());
    thetas
        .iter()
        .map(|&theta| {
            if !(theta > T::zero()) || !theta.is_finite() {
                return Err(Error::InvalidParameter(format!("theta = {theta} must be > 0")));
            }
            Ok(FrontierPoint {
                theta,
                mean: x + excess / theta,
                variance: excess / (theta * theta),
            })
        })
        .collect()
}

/// `|mean - x - sqrt((-g0 - 1) variance)|` for a generated point.
pub fn frontier_identity_gap<T: Scalar>(p: &FrontierPoint<T>, g0: T, x: T) -> T {
    (p.mean - x - ((-g0 - T::one()) * p.variance).sqrt()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn textbook_multipliers() {
        let q = lagrange_quantities(0.0f64, 1.0, 0.5, 0.25).unwrap();
        assert_eq!(q.d_star, 2.0);
        assert_eq!(q.a_star, 1.0);
        // d* = A* + c*(A*)
        assert!((q.a_star + q.c_star(q.a_star) - q.d_star).abs() < 1e-15);
    }

    #[test]
    fn multipliers_from_feynman_kac_moments() {
        let g = -0.08f64.exp();
        let h = -1.0 / g;
        assert!((h - 0.923116).abs() < 1e-6);
        let q = lagrange_quantities(1.0, 1.0, h, h - h * h).unwrap();
        assert!((q.d_star - (1.0 - g)).abs() < 1e-12);
        assert!((q.d_star - 2.083287).abs() < 1e-6);
        for theta in [0.5, 2.0, 3.0] {
            let q = lagrange_quantities(1.0, theta, h, h * (1.0 - h)).unwrap();
            assert!((q.d_star - (1.0 + 1.0 / (theta * h))).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_moments_are_rejected() {
        assert!(matches!(
            lagrange_quantities(1.0, 1.0, 1.0, 0.0),
            Err(Error::DegenerateMarket { .. })
        ));
    }

    #[test]
    fn frontier_points() {
        let g = -0.08f64.exp();
        let pts = efficient_frontier(g, 1.0, &[0.5, 1.0, 2.0]).unwrap();
        assert!((pts[1].mean - 1.083287).abs() < 1e-6);
        assert!((pts[1].variance - 0.083287).abs() < 1e-6);
        assert!(((pts[2].mean - 1.0) * 2.0 - (pts[1].mean - 1.0)).abs() < 1e-15);
        assert!((pts[2].variance * 4.0 - pts[1].variance).abs() < 1e-15);
        for p in &pts {
            assert!(frontier_identity_gap(p, g, 1.0) <= 1e-12);
        }
    }

    #[test]
    fn flat_frontier() {
        let pts = efficient_frontier(-1.0, 1.0, &[0.5, 1.0]).unwrap();
        assert!(pts.iter().all(|p| p.mean == 1.0 && p.variance == 0.0));
        assert!(efficient_frontier(-0.9, 1.0, &[1.0]).is_err());
    }
}
