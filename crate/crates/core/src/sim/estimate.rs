use crate::{Error, Result, Scalar};

/// One-sided 99% normal quantile.
pub const Z_99: f64 = 2.326_347_874_040_841;

/// Sample mean with its standard error `s / sqrt(n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate<T> {
    pub mean: T,
    pub std_error: T,
    pub n: usize,
}

impl<T: Scalar> McEstimate<T> {
    /// `3 SE + allowance`.
    pub fn band(&self, allowance: T) -> T {
        T::of(3.0) * self.std_error + allowance
    }

    pub fn covers(&self, target: T, allowance: T) -> bool {
        (self.mean - target).abs() <= self.band(allowance)
    }
}

fn need_two(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InsufficientSample(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    Ok(())
}

fn moments(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

fn to_f64<T: Scalar>(samples: &[T]) -> Vec<f64> {
    samples.iter().map(|v| v.to_f64_lossy()).collect()
}

fn pack<T: Scalar>(mean: f64, se: f64, n: usize) -> McEstimate<T> {
    McEstimate {
        mean: T::of(mean),
        std_error: T::of(se),
        n,
    }
}

/// Mean of the samples. Accumulates in `f64` whatever the scalar type.
pub fn mean_estimate<T: Scalar>(samples: &[T]) -> Result<McEstimate<T>> {
    need_two(samples.len())?;
    let (mean, var) = moments(&to_f64(samples));
    Ok(pack(mean, (var / samples.len() as f64).sqrt(), samples.len()))
}

/// Mean of the squared samples.
pub fn second_moment_estimate<T: Scalar>(samples: &[T]) -> Result<McEstimate<T>> {
    let sq: Vec<T> = samples.iter().map(|&v| v * v).collect();
    mean_estimate(&sq)
}

/// Unbiased sample variance; the standard error uses the fourth central moment,
/// `sqrt((m4 - s^4) / n)`.
pub fn variance_estimate<T: Scalar>(samples: &[T]) -> Result<McEstimate<T>> {
    need_two(samples.len())?;
    let v = to_f64(samples);
    let n = v.len() as f64;
    let (mean, var) = moments(&v);
    let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let se = ((m4 - var * var).max(0.0) / n).sqrt();
    Ok(pack(var, se, v.len()))
}

/// `E[X] - theta / 2 Var(X)` from per-sample contributions
/// `X_i - theta / 2 (X_i - mean)^2 n / (n - 1)`, whose average is exactly the plug-in value.
pub fn mean_variance_utility<T: Scalar>(samples: &[T], theta: T) -> Result<McEstimate<T>> {
    need_two(samples.len())?;
    let v = to_f64(samples);
    let n = v.len() as f64;
    let (mean, _) = moments(&v);
    let th = theta.to_f64_lossy();
    let u: Vec<f64> = v
        .iter()
        .map(|x| x - 0.5 * th * (x - mean).powi(2) * n / (n - 1.0))
        .collect();
    let (um, uv) = moments(&u);
    Ok(pack(um, (uv / n).sqrt(), v.len()))
}

/// Wilson score lower bound for a binomial proportion `k / n` at normal quantile `z`.
pub fn wilson_lower_bound(k: usize, n: usize, z: f64) -> f64 {
    if n == 0 || k == 0 {
        return 0.0;
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let centre = p + z2 / (2.0 * n);
    let spread = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - spread) / (1.0 + z2 / n)).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_estimates() {
        let s = [1.0f64, 2.0, 3.0, 4.0];
        let m = mean_estimate(&s).unwrap();
        assert_eq!(m.mean, 2.5);
        assert!((m.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        let v = variance_estimate(&s).unwrap();
        assert!((v.mean - 5.0 / 3.0).abs() < 1e-15);
        let q = second_moment_estimate(&s).unwrap();
        assert_eq!(q.mean, 7.5);
        assert!(mean_estimate(&[1.0f64]).is_err());
    }

    #[test]
    fn utility_matches_plug_in() {
        let s = [1.0f64, 1.5, 0.7, 2.2, 1.1];
        let u = mean_variance_utility(&s, 2.0).unwrap();
        let m = mean_estimate(&s).unwrap().mean;
        let v = variance_estimate(&s).unwrap().mean;
        assert!((u.mean - (m - v)).abs() < 1e-14);
    }

    #[test]
    fn wilson_bounds() {
        assert_eq!(wilson_lower_bound(0, 100, Z_99), 0.0);
        let lb = wilson_lower_bound(50, 100, Z_99);
        assert!(lb > 0.38 && lb < 0.5);
        assert!(wilson_lower_bound(5, 100_000, Z_99) > 0.0);
    }
}
