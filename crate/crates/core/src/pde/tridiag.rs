use crate::Scalar;

/// Pre-factored tridiagonal system `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = d[i]`
/// solved by the Thomas algorithm. The matrices built here are diagonally dominant, so no
/// pivoting is needed.
#[derive(Debug, Clone)]
pub(crate) struct Tridiagonal<T> {
    sub: Vec<T>,
    c_prime: Vec<T>,
    inv_denom: Vec<T>,
}

impl<T: Scalar> Tridiagonal<T> {
    pub(crate) fn new(sub: Vec<T>, diag: &[T], sup: &[T]) -> Self {
        let n = diag.len();
        let mut c_prime = vec![T::zero(); n];
        let mut inv_denom = vec![T::zero(); n];
        for i in 0..n {
            let denom = if i == 0 {
                diag[0]
            } else {
                diag[i] - sub[i] * c_prime[i - 1]
            };
            inv_denom[i] = T::one() / denom;
            c_prime[i] = sup[i] * inv_denom[i];
        }
        Self {
            sub,
            c_prime,
            inv_denom,
        }
    }

    /// Overwrites `d` with the solution.
    pub(crate) fn solve_in_place(&self, d: &mut [T]) {
        let n = d.len();
        d[0] *= self.inv_denom[0];
        for i in 1..n {
            d[i] = (d[i] - self.sub[i] * d[i - 1]) * self.inv_denom[i];
        }
        for i in (0..n - 1).rev() {
            let next = d[i + 1];
            d[i] -= self.c_prime[i] * next;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_system() {
        // [2 1 0; 1 3 1; 0 1 2] x = [3 5 3] has x = [1 1 1].
        let t = Tridiagonal::new(vec![0.0, 1.0, 1.0], &[2.0, 3.0, 2.0], &[1.0, 1.0, 0.0]);
        let mut d = vec![3.0, 5.0, 3.0];
        t.solve_in_place(&mut d);
        for v in d {
            assert!((v - 1.0f64).abs() < 1e-14);
        }
    }
}
