use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use super::StatsError;

/// Minimum sample size for the asymptotic KS p-values.
pub const KS_MIN_SAMPLES: usize = 50;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    /// Anderson-Darling `A²` against the same law (one-sample test only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anderson_darling: Option<f64>,
}

/// `Φ(z)`, accurate in both tails.
pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// `1 - Φ(z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * erfc(z / std::f64::consts::SQRT_2)
}

/// Survival function of the Kolmogorov distribution,
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2k²λ²)`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let k = k as f64;
        let term = (-2.0 * k * k * lambda * lambda).exp();
        sum += if k as u64 % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Stephens' finite-sample adjustment of the asymptotic p-value.
fn ks_p_value(d: f64, n_eff: f64) -> f64 {
    let s = n_eff.sqrt();
    kolmogorov_sf((s + 0.12 + 0.11 / s) * d)
}

fn sorted(xs: &[f64]) -> Result<Vec<f64>, StatsError> {
    if xs.iter().any(|x| x.is_nan()) {
        return Err(StatsError::NonFinite);
    }
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(v)
}

/// One-sample Kolmogorov-Smirnov test against `N(mean, variance)`.
pub fn ks_normal(samples: &[f64], mean: f64, variance: f64) -> Result<KsResult, StatsError> {
    if samples.len() < KS_MIN_SAMPLES {
        return Err(StatsError::InsufficientCount {
            needed: KS_MIN_SAMPLES,
            found: samples.len(),
        });
    }
    if !(variance > 0.0 && variance.is_finite()) {
        return Err(StatsError::DegenerateVariance);
    }
    let xs = sorted(samples)?;
    let n = xs.len() as f64;
    let sd = variance.sqrt();
    let cdf: Vec<f64> = xs.iter().map(|x| normal_cdf((x - mean) / sd)).collect();
    let mut d: f64 = 0.0;
    for (i, f) in cdf.iter().enumerate() {
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    let tiny = 1e-300;
    let a2 = -n
        - cdf
            .iter()
            .enumerate()
            .map(|(i, f)| {
                let g = cdf[cdf.len() - 1 - i];
                (2.0 * i as f64 + 1.0) * (f.max(tiny).ln() + (1.0 - g).max(tiny).ln())
            })
            .sum::<f64>()
            / n;
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, n),
        anderson_darling: Some(a2),
    })
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult, StatsError> {
    for s in [a, b] {
        if s.len() < KS_MIN_SAMPLES {
            return Err(StatsError::InsufficientCount {
                needed: KS_MIN_SAMPLES,
                found: s.len(),
            });
        }
    }
    let (xa, xb) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < xa.len() && j < xb.len() {
        let x = xa[i].min(xb[j]);
        while i < xa.len() && xa[i] <= x {
            i += 1;
        }
        while j < xb.len() && xb[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult {
        statistic: d,
        p_value: ks_p_value(d, na * nb / (na + nb)),
        anderson_darling: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    /// `max |Ĉ(s,t) - C(s,t)| / se(Ĉ(s,t))` over the grid.
    pub max_standardized_deviation: f64,
    /// Grid indices `(i, j)` attaining the maximum.
    pub worst: (usize, usize),
    pub empirical: Vec<Vec<f64>>,
    pub model: Vec<Vec<f64>>,
    pub standard_errors: Vec<Vec<f64>>,
}

/// Minimum number of trajectories for [`process_covariance_check`].
pub const COVARIANCE_MIN_TRAJECTORIES: usize = 1000;

/// Compares the empirical covariance of process values on a time grid with
/// a model covariance. Each standard error is the sample deviation of the
/// centred products divided by `√n`.
pub fn process_covariance_check(
    trajectories: &[Vec<f64>],
    times: &[f64],
    model: impl Fn(f64, f64) -> f64,
) -> Result<CovarianceCheck, StatsError> {
    let n = trajectories.len();
    if n < COVARIANCE_MIN_TRAJECTORIES {
        return Err(StatsError::InsufficientCount {
            needed: COVARIANCE_MIN_TRAJECTORIES,
            found: n,
        });
    }
    let k = times.len();
    if trajectories.iter().any(|t| t.len() != k) {
        return Err(StatsError::GridMismatch);
    }
    let nf = n as f64;
    let means: Vec<f64> = (0..k)
        .map(|i| trajectories.iter().map(|t| t[i]).sum::<f64>() / nf)
        .collect();
    let mut empirical = vec![vec![0.0; k]; k];
    let mut ses = vec![vec![0.0; k]; k];
    let mut modelled = vec![vec![0.0; k]; k];
    let mut worst = (0, 0);
    let mut max_dev: f64 = 0.0;
    for i in 0..k {
        for j in i..k {
            let products: Vec<f64> = trajectories
                .iter()
                .map(|t| (t[i] - means[i]) * (t[j] - means[j]))
                .collect();
            let acc = super::MomentAccumulator::from_slice(&products);
            let c = acc.mean() * nf / (nf - 1.0);
            let se = (acc.sample_variance().max(0.0) / nf).sqrt();
            let m = model(times[i], times[j]);
            let dev = if se > 0.0 {
                (c - m).abs() / se
            } else if (c - m).abs() <= 1e-12 * m.abs().max(1e-300) || c == m {
                0.0
            } else {
                f64::INFINITY
            };
            if dev > max_dev {
                max_dev = dev;
                worst = (i, j);
            }
            for (a, b) in [(i, j), (j, i)] {
                empirical[a][b] = c;
                ses[a][b] = se;
                modelled[a][b] = m;
            }
        }
    }
    Ok(CovarianceCheck {
        max_standardized_deviation: max_dev,
        worst,
        empirical,
        model: modelled,
        standard_errors: ses,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailResult {
    pub threshold_sigmas: f64,
    pub exceedances: u64,
    pub empirical_tail: f64,
    pub gaussian_tail: f64,
    /// `ln(empirical / gaussian)`; positive for a heavier upper tail. A zero
    /// count is floored at half an observation.
    pub log_ratio: f64,
    /// Binomial z-score of the exceedance count under the Gaussian tail.
    pub z_score: f64,
}

/// Minimum sample size for [`upper_tail_excess`].
pub const TAIL_MIN_SAMPLES: usize = 10_000;

/// Compares `P(X > mean + kσ)` (sample mean and deviation) with `1 - Φ(k)`.
pub fn upper_tail_excess(samples: &[f64], threshold_sigmas: f64) -> Result<TailResult, StatsError> {
    if samples.len() < TAIL_MIN_SAMPLES {
        return Err(StatsError::InsufficientCount {
            needed: TAIL_MIN_SAMPLES,
            found: samples.len(),
        });
    }
    if !(threshold_sigmas > 0.0) {
        return Err(StatsError::InvalidThreshold(threshold_sigmas));
    }
    let s = super::MomentAccumulator::from_slice(samples).finalize()?;
    if !(s.std_dev > 0.0) {
        return Err(StatsError::DegenerateVariance);
    }
    let cut = s.mean + threshold_sigmas * s.std_dev;
    let count = samples.iter().filter(|&&x| x > cut).count() as u64;
    let n = samples.len() as f64;
    let g = normal_sf(threshold_sigmas);
    let emp = count as f64 / n;
    Ok(TailResult {
        threshold_sigmas,
        exceedances: count,
        empirical_tail: emp,
        gaussian_tail: g,
        log_ratio: (emp.max(0.5 / n) / g).ln(),
        z_score: (count as f64 - n * g) / (n * g * (1.0 - g)).sqrt(),
    })
}

/// Per-test level for `m` simultaneous tests at family level `alpha`.
pub fn bonferroni(alpha: f64, m: usize) -> f64 {
    alpha / m.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Exp1, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn kolmogorov_tail_values() {
        // Classical critical values: Q(1.3581) = 0.05, Q(1.6276) = 0.01.
        assert!((kolmogorov_sf(1.3581) - 0.05).abs() < 1e-4);
        assert!((kolmogorov_sf(1.6276) - 0.01).abs() < 1e-4);
    }

    #[test]
    fn ks_normal_detects_shift() {
        let xs: Vec<f64> = normals(1000, 1).into_iter().map(|x| x + 5.0).collect();
        assert!(ks_normal(&xs, 0.0, 1.0).unwrap().p_value < 1e-6);
        assert!(ks_normal(&xs[..49], 0.0, 1.0).is_err());
        assert!(ks_normal(&xs, 0.0, 0.0).is_err());
    }

    #[test]
    fn ks_normal_calibration() {
        let rejections = (0..300)
            .filter(|&s| ks_normal(&normals(500, 100 + s), 0.0, 1.0).unwrap().p_value < 0.05)
            .count();
        // Binomial(300, 0.05): mean 15, sd 3.8.
        assert!((3..=30).contains(&rejections), "{rejections}");
    }

    #[test]
    fn two_sample_extremes() {
        let a = normals(200, 2);
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 100.0).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn covariance_of_a_wiener_process() {
        let times = [0.25, 0.5, 0.75, 1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let paths: Vec<Vec<f64>> = (0..4000)
            .map(|_| {
                let mut w = 0.0;
                let mut prev = 0.0;
                times
                    .iter()
                    .map(|&t| {
                        let z: f64 = StandardNormal.sample(&mut rng);
                        w += 2.0 * z * (t - prev as f64).sqrt();
                        prev = t;
                        w
                    })
                    .collect()
            })
            .collect();
        let ok = process_covariance_check(&paths, &times, |s, t| 4.0 * s.min(t)).unwrap();
        assert!(ok.max_standardized_deviation < 3.5, "{}", ok.max_standardized_deviation);
        let bad = process_covariance_check(&paths, &times, |s, t| 8.0 * s.min(t)).unwrap();
        assert!(bad.max_standardized_deviation > 5.0);
        let zeros = vec![vec![0.0; 4]; 1000];
        let z = process_covariance_check(&zeros, &times, |_, _| 0.0).unwrap();
        assert_eq!(z.max_standardized_deviation, 0.0);
        assert!(process_covariance_check(&zeros[..999], &times, |_, _| 0.0).is_err());
        assert!(process_covariance_check(&zeros, &times[..3], |_, _| 0.0).is_err());
    }

    #[test]
    fn tail_excess() {
        let z = upper_tail_excess(&normals(100_000, 4), 3.0).unwrap();
        assert!(z.log_ratio.abs() < 0.3, "{}", z.log_ratio);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let e: Vec<f64> = (0..20_000).map(|_| Exp1.sample(&mut rng)).collect();
        let r = upper_tail_excess(&e, 3.0).unwrap();
        assert!(r.log_ratio > 0.0 && r.z_score > 3.0);
        assert!(upper_tail_excess(&e, 0.0).is_err());
        assert!(upper_tail_excess(&e[..9999], 3.0).is_err());
    }
}
