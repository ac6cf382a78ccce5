use rand::distr::weighted::WeightedIndex;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Poisson, StandardNormal};

use super::PathConfig;
use crate::market::{LevyMeasure, MarkLaw};
use crate::{Error, Result, Scalar};

/// Sampler for the driving noise of one path.
#[derive(Debug, Clone)]
pub struct NoiseSource<T> {
    seed: u64,
    n_steps: usize,
    sqrt_dt: f64,
    rate: Option<Poisson<f64>>,
    marks: MarkSampler<T>,
}

#[derive(Debug, Clone)]
enum MarkSampler<T> {
    None,
    Atoms(WeightedIndex<f64>, Vec<T>),
    Uniform(Uniform<f64>),
}

/// Driving noise of one path: two independent Brownian increment streams, per-step jump
/// counts and the marks of those jumps in draw order.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRecord<T> {
    pub path_id: u64,
    pub dw1: Vec<T>,
    pub dw2: Vec<T>,
    pub jump_counts: Vec<u32>,
    pub marks: Vec<T>,
}

impl<T: Scalar> NoiseRecord<T> {
    /// Marks of the jumps in step `k`, given `offset` = number of earlier jumps.
    #[inline]
    pub fn step_marks(&self, k: usize, offset: usize) -> &[T] {
        &self.marks[offset..offset + self.jump_counts[k] as usize]
    }
}

impl<T: Scalar> NoiseSource<T> {
    pub fn new(levy: &LevyMeasure<T>, cfg: &PathConfig<T>) -> Result<Self> {
        cfg.validate()?;
        let dt = cfg.dt.to_f64_lossy();
        let intensity = levy.total_intensity().to_f64_lossy();
        let (rate, marks) = if intensity > 0.0 {
            let rate = Poisson::new(intensity * dt)
                .map_err(|e| Error::InvalidMeasure(format!("jump rate: {e}")))?;
            let marks = match levy.law() {
                MarkLaw::Atoms(atoms) => {
                    let w = WeightedIndex::new(atoms.iter().map(|a| a.weight.to_f64_lossy()))
                        .map_err(|e| Error::InvalidMeasure(format!("atom weights: {e}")))?;
                    MarkSampler::Atoms(w, atoms.iter().map(|a| a.mark).collect())
                }
                MarkLaw::Uniform { low, high } => MarkSampler::Uniform(
                    Uniform::new_inclusive(low.to_f64_lossy(), high.to_f64_lossy())
                        .map_err(|e| Error::InvalidMeasure(format!("mark range: {e}")))?,
                ),
            };
            (Some(rate), marks)
        } else {
            (None, MarkSampler::None)
        };
        Ok(Self {
            seed: cfg.seed,
            n_steps: cfg.n_steps(),
            sqrt_dt: dt.sqrt(),
            rate,
            marks,
        })
    }

    /// Independent substream for `path_id`: the same seed and id always give the same
    /// record, whatever the number of paths.
    pub fn path(&self, path_id: u64) -> NoiseRecord<T> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(path_id);
        let n = self.n_steps;
        let mut rec = NoiseRecord {
            path_id,
            dw1: Vec::with_capacity(n),
            dw2: Vec::with_capacity(n),
            jump_counts: Vec::with_capacity(n),
            marks: Vec::new(),
        };
        for _ in 0..n {
            let a: f64 = StandardNormal.sample(&mut rng);
            let b: f64 = StandardNormal.sample(&mut rng);
            rec.dw1.push(T::of(a * self.sqrt_dt));
            rec.dw2.push(T::of(b * self.sqrt_dt));
            let count = match &self.rate {
                Some(p) => p.sample(&mut rng) as u32,
                None => 0,
            };
            rec.jump_counts.push(count);
            for _ in 0..count {
                let m = match &self.marks {
                    MarkSampler::None => unreachable!("jumps drawn without a mark law"),
                    MarkSampler::Atoms(w, marks) => marks[w.sample(&mut rng)],
                    MarkSampler::Uniform(u) => T::of(u.sample(&mut rng)),
                };
                rec.marks.push(m);
            }
        }
        rec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::Atom;

    fn source(seed: u64) -> NoiseSource<f64> {
        let levy = LevyMeasure::from_atoms(vec![
            Atom {
                mark: 0.1,
                weight: 3.0,
            },
            Atom {
                mark: -0.2,
                weight: 1.0,
            },
        ])
        .unwrap();
        let cfg = PathConfig::new(10, 1e-2, seed, 0.0, 1.0).unwrap();
        NoiseSource::new(&levy, &cfg).unwrap()
    }

    #[test]
    fn deterministic_per_path() {
        let s = source(7);
        assert_eq!(s.path(3), s.path(3));
        assert_ne!(s.path(3).dw1, s.path(4).dw1);
        assert_ne!(source(8).path(3).dw1, s.path(3).dw1);
    }

    #[test]
    fn increments_and_jump_rates() {
        let s = source(11);
        let (mut sum, mut sq, mut jumps, mut up, mut n) = (0.0, 0.0, 0u64, 0u64, 0usize);
        for id in 0..400 {
            let r = s.path(id);
            for (&a, &b) in r.dw1.iter().zip(&r.dw2) {
                sum += a;
                sq += a * a + b * b;
                n += 1;
            }
            jumps += r.jump_counts.iter().map(|&c| c as u64).sum::<u64>();
            up += r.marks.iter().filter(|&&m| m > 0.0).count() as u64;
            assert_eq!(r.marks.len() as u32, r.jump_counts.iter().sum::<u32>());
        }
        let dt = 1e-2;
        assert!((sum / n as f64).abs() < 4.0 * (dt / n as f64).sqrt());
        assert!((sq / (2 * n) as f64 / dt - 1.0).abs() < 0.03);
        // 400 paths * 4 per unit time = 1600 expected jumps
        assert!((jumps as f64 - 1600.0).abs() < 4.0 * 40.0);
        assert!((up as f64 / jumps as f64 - 0.75).abs() < 0.05);
    }

    #[test]
    fn no_jumps_without_intensity() {
        let cfg = PathConfig::new(1, 0.1, 1, 0.0, 1.0).unwrap();
        let s = NoiseSource::new(&LevyMeasure::<f64>::none(), &cfg).unwrap();
        let r = s.path(0);
        assert!(r.jump_counts.iter().all(|&c| c == 0));
        assert!(r.marks.is_empty());
    }
}
