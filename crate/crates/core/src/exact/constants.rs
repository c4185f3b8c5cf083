use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use super::ExactError;
use crate::functionals::{section_volumes, FaceFunctional};
use crate::geometry::ConvexPolytope;
use crate::measures::HyperplaneMeasureSpec;
use crate::mnw::run_mnw;
use crate::rng::stream;
use crate::stats::MomentAccumulator;

/// `V_W` for the isotropic measure with unit surface density:
/// `Vol_d(W) 2^{d-1} π^{d-3/2} Γ((d+1)/2)^{d-1} Γ(d/2)^{2-d} E ζ²`.
pub fn v_w_isotropic(d: usize, vol_w: f64, zeta_square_mean: f64) -> f64 {
    assert!(d >= 2, "V_W needs d >= 2");
    let df = d as f64;
    vol_w
        * 2f64.powf(df - 1.0)
        * std::f64::consts::PI.powf(df - 1.5)
        * gamma((df + 1.0) / 2.0).powf(df - 1.0)
        * gamma(df / 2.0).powf(2.0 - df)
        * zeta_square_mean
}

/// Simulation estimate of `V_W` with diagnostics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VwEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub replications: usize,
    /// Mean number of cells in a sampled section.
    pub mean_section_cells: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// Estimates `V_W` by `R^{-d} A_{φ²}(Y(1, W_R))`, averaging over
/// `replications` tessellations and `hyperplanes` sampled sections each.
/// Replication `i` uses stream `i` of `(seed, "v_w_empirical")`.
pub fn v_w_empirical(
    spec: &HyperplaneMeasureSpec,
    window: &ConvexPolytope,
    phi: &FaceFunctional,
    r: f64,
    replications: usize,
    hyperplanes: usize,
    seed: u64,
) -> Result<VwEstimate, ExactError> {
    if replications < 2 || hyperplanes == 0 {
        return Err(ExactError::Config("need at least 2 replications and 1 hyperplane".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(ExactError::Config(format!("R must be positive, got {r}")));
    }
    let d = spec.dimension();
    let big = window.scaled(r);
    let cap = spec.capacity(&big);
    if !(cap > 0.0) {
        return Err(ExactError::ZeroSections);
    }
    let norm = r.powi(d as i32);
    let per_rep: Vec<Result<(f64, f64), ExactError>> = (0..replications)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream(seed, "v_w_empirical", i as u64);
            let state = run_mnw(big.clone(), spec, 1.0, &mut rng)?;
            let (mut sum, mut cells) = (0.0, 0usize);
            for _ in 0..hyperplanes {
                let h = spec.sample_hitting(&big, &mut rng)?;
                let z = phi.zeta(h.normal());
                let vols = section_volumes(&state, &h);
                cells += vols.len();
                sum += cap * z * z * vols.iter().map(|v| v * v).sum::<f64>();
            }
            Ok((sum / hyperplanes as f64 / norm, cells as f64 / hyperplanes as f64))
        })
        .collect();
    let mut acc = MomentAccumulator::new();
    let mut cells = 0.0;
    for res in per_rep {
        let (v, c) = res?;
        acc.push(v);
        cells += c;
    }
    let mean_section_cells = cells / replications as f64;
    if mean_section_cells == 0.0 {
        return Err(ExactError::ZeroSections);
    }
    let warning = (mean_section_cells < 10.0)
        .then(|| format!("sections hold {mean_section_cells:.1} cells on average; R is probably too small"));
    Ok(VwEstimate {
        estimate: acc.mean(),
        std_error: (acc.sample_variance().max(0.0) / replications as f64).sqrt(),
        replications,
        mean_section_cells,
        warning,
    })
}

/// `V ∫_{s0}^{t} s^{1-d} ds`.
pub fn increment_variance_profile(v: f64, s0: f64, t: f64, d: usize) -> Result<f64, ExactError> {
    if !(s0 > 0.0 && s0 <= t && t.is_finite()) {
        return Err(ExactError::DivergesAtZero { s0, t });
    }
    Ok(if d == 2 {
        v * (t / s0).ln()
    } else {
        let k = d as f64 - 2.0;
        v * (s0.powf(-k) - t.powf(-k)) / k
    })
}

/// `τ(s, R) = R^{s-1} (log R)^{1-s}`.
pub fn tau(s: f64, r: f64) -> Result<f64, ExactError> {
    if !(r > std::f64::consts::E && r.is_finite()) {
        return Err(ExactError::SmallR(r));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(ExactError::BadS(s));
    }
    let l = r.ln();
    Ok(((l - l.ln()) * (s - 1.0)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn isotropic_constants() {
        assert!((v_w_isotropic(2, PI, 1.0) - PI * PI).abs() < 1e-12);
        assert!((v_w_isotropic(3, 4.0 * PI / 3.0, 1.0) - 32.0 * PI * PI / 3.0).abs() < 1e-10);
        assert!((v_w_isotropic(2, 1.0, 1.0) - PI).abs() < 1e-12);
        // Half-integer gamma values by hand for d = 4: Γ(5/2) = 3√π/4.
        let g = 0.75 * PI.sqrt();
        let by_hand = 8.0 * PI.powf(2.5) * g.powi(3) / 1.0;
        assert!((v_w_isotropic(4, 1.0, 1.0) - by_hand).abs() / by_hand < 1e-12);
    }

    #[test]
    fn profile_and_time_change() {
        assert_eq!(increment_variance_profile(1.0, 0.5, 0.5, 2).unwrap(), 0.0);
        assert!((increment_variance_profile(PI, 0.5, 1.0, 2).unwrap() - PI * 2f64.ln()).abs() < 1e-12);
        assert!((increment_variance_profile(1.0, 0.25, 1.0, 3).unwrap() - 3.0).abs() < 1e-12);
        assert!(matches!(
            increment_variance_profile(1.0, 0.0, 1.0, 2),
            Err(ExactError::DivergesAtZero { .. })
        ));
        let r = 100.0;
        assert!((tau(1.0, r).unwrap() - 1.0).abs() < 1e-15);
        assert!((tau(0.0, r).unwrap() - r.ln() / r).abs() < 1e-15);
        let h = 1e-6;
        let fd = (tau(0.5 + h, r).unwrap() - tau(0.5 - h, r).unwrap()) / (2.0 * h);
        let exact = tau(0.5, r).unwrap() * (r.ln() - r.ln().ln());
        assert!((fd - exact).abs() / exact < 1e-6);
        assert!(tau(0.5, 2.0).is_err());
        assert!(tau(1.5, 10.0).is_err());
    }
}
