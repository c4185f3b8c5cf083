use serde::{Deserialize, Serialize};

use super::StatsError;

/// Streaming central moments up to order four, mergeable across threads.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
    min: f64,
    max: f64,
}

/// Finalized statistics of a [`MomentAccumulator`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: u64,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub std_dev: f64,
    /// Standard error of the mean.
    pub stderr: f64,
    /// `None` when the variance vanishes or fewer than 4 samples were seen.
    pub skewness: Option<f64>,
    pub excess_kurtosis: Option<f64>,
    pub min: f64,
    pub max: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        MomentAccumulator {
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
            ..Default::default()
        }
    }

    pub fn from_slice(xs: &[f64]) -> Self {
        let mut acc = Self::new();
        xs.iter().for_each(|&x| acc.push(x));
        acc
    }

    pub fn push(&mut self, x: f64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = x - self.mean;
        let dn = delta / n;
        let dn2 = dn * dn;
        let term1 = delta * dn * n1;
        self.mean += dn;
        self.m4 += term1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * self.m2 - 4.0 * dn * self.m3;
        self.m3 += term1 * dn * (n - 2.0) - 3.0 * dn * self.m2;
        self.m2 += term1;
        self.min = self.min.min(x);
        self.max = self.max.max(x);
    }

    /// Combines two accumulators as if all samples had been pushed to one.
    pub fn merge(&mut self, other: &MomentAccumulator) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        self.mean += delta * nb / n;
        self.m2 = m2;
        self.m3 = m3;
        self.m4 = m4;
        self.count += other.count;
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// `M2 / (n - 1)`; NaN below two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        self.m2 / (self.count - 1) as f64
    }

    pub fn finalize(&self) -> Result<Summary, StatsError> {
        if self.count < 2 {
            return Err(StatsError::InsufficientCount {
                needed: 2,
                found: self.count as usize,
            });
        }
        let n = self.count as f64;
        let variance = (self.m2 / (n - 1.0)).max(0.0);
        let shape_defined = self.count >= 4 && self.m2 > 0.0;
        let skewness = shape_defined.then(|| n.sqrt() * self.m3 / self.m2.powf(1.5));
        let excess_kurtosis = shape_defined.then(|| n * self.m4 / (self.m2 * self.m2) - 3.0);
        Ok(Summary {
            count: self.count,
            mean: self.mean,
            variance,
            std_dev: variance.sqrt(),
            stderr: (variance / n).sqrt(),
            skewness,
            excess_kurtosis,
            min: self.min,
            max: self.max,
        })
    }
}

/// Standard error of the unbiased sample variance, estimated from the
/// fourth central moment: `sqrt((m4 - σ⁴ (n-3)/(n-1)) / n)`.
pub fn variance_stderr(s: &Summary) -> f64 {
    let n = s.count as f64;
    let k = s.excess_kurtosis.unwrap_or(0.0);
    let var = s.variance;
    let m4 = (k + 3.0) * var * var;
    ((m4 - var * var * (n - 3.0) / (n - 1.0)).max(0.0) / n).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn constant_samples() {
        let s = MomentAccumulator::from_slice(&[2.0; 10]).finalize().unwrap();
        assert_eq!(s.variance, 0.0);
        assert!(s.skewness.is_none());
    }

    #[test]
    fn too_few_samples() {
        assert!(MomentAccumulator::from_slice(&[1.0]).finalize().is_err());
        let s = MomentAccumulator::from_slice(&[1.0, 2.0, 4.0]).finalize().unwrap();
        assert!(s.excess_kurtosis.is_none());
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let a = MomentAccumulator::from_slice(&[1.0, 5.0, 2.0, 8.0]);
        let mut b = a.clone();
        b.merge(&MomentAccumulator::new());
        assert_eq!(a, b);
        let mut e = MomentAccumulator::new();
        e.merge(&a);
        assert_eq!(e, a);
    }

    #[test]
    fn split_merge_matches_single_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..100_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let whole = MomentAccumulator::from_slice(&xs).finalize().unwrap();
        let mut a = MomentAccumulator::from_slice(&xs[..37_113]);
        a.merge(&MomentAccumulator::from_slice(&xs[37_113..]));
        let merged = a.finalize().unwrap();
        assert!(rel(merged.mean, whole.mean) < 1e-9);
        assert!(rel(merged.variance, whole.variance) < 1e-9);
        assert!(rel(merged.skewness.unwrap(), whole.skewness.unwrap()) < 1e-9);
        assert!(rel(merged.excess_kurtosis.unwrap(), whole.excess_kurtosis.unwrap()) < 1e-9);
    }

    #[test]
    fn known_moments() {
        // Samples 1..=5: mean 3, variance 2.5, skewness 0, excess kurtosis -1.3.
        let s = MomentAccumulator::from_slice(&[1.0, 2.0, 3.0, 4.0, 5.0]).finalize().unwrap();
        assert!((s.mean - 3.0).abs() < 1e-15);
        assert!((s.variance - 2.5).abs() < 1e-15);
        assert!(s.skewness.unwrap().abs() < 1e-15);
        assert!((s.excess_kurtosis.unwrap() + 1.3).abs() < 1e-12);
    }
}
