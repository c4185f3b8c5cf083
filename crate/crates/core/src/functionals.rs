//! Facet functionals `φ(f) = Vol_{d-1}(f) · ζ(n(f))` and hyperplane
//! sections of tessellations.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolytope, Hyperplane, SNAP_TOLERANCE};
use crate::measures::{HyperplaneMeasureSpec, MeasureError};
use crate::mnw::{MaxPolytopeRecord, Tessellation};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error("no exact mean available")]
    NoExactMean,
    #[error("at least one sample is required")]
    NoSamples,
    #[error("window has zero capacity")]
    ZeroCapacity,
    #[error("invalid direction weight: {0}")]
    InvalidZeta(String),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// The direction weight `ζ`, an even bounded function on the sphere.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Zeta {
    Constant {
        value: f64,
    },
    /// 1 on normals within `cos_tolerance` of `±u` for a listed `u`, else 0.
    DirectionIndicator {
        directions: Vec<Vec<f64>>,
        #[serde(default = "default_cos_tolerance")]
        cos_tolerance: f64,
    },
    /// Piecewise constant in `|n[axis]|` over equal bins of `[0, 1]`.
    AxisProfile { axis: usize, values: Vec<f64> },
}

fn default_cos_tolerance() -> f64 {
    1e-9
}

/// `φ(f) = Vol_{d-1}(f) ζ(n(f))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Zeta", into = "Zeta")]
pub struct FaceFunctional {
    zeta: Zeta,
    bound: f64,
}

impl TryFrom<Zeta> for FaceFunctional {
    type Error = FunctionalError;

    fn try_from(zeta: Zeta) -> Result<Self, FunctionalError> {
        let bound = match &zeta {
            Zeta::Constant { value } => value.abs(),
            Zeta::DirectionIndicator {
                directions,
                cos_tolerance,
            } => {
                if directions.iter().any(|u| !(u.iter().map(|c| c * c).sum::<f64>() > 0.0))
                    || !(*cos_tolerance >= 0.0)
                {
                    return Err(FunctionalError::InvalidZeta("bad indicator directions".into()));
                }
                1.0
            }
            Zeta::AxisProfile { values, .. } => {
                if values.is_empty() {
                    return Err(FunctionalError::InvalidZeta("empty profile".into()));
                }
                values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
            }
        };
        if !bound.is_finite() {
            return Err(FunctionalError::InvalidZeta("unbounded".into()));
        }
        Ok(FaceFunctional { zeta, bound })
    }
}

impl From<FaceFunctional> for Zeta {
    fn from(f: FaceFunctional) -> Self {
        f.zeta
    }
}

impl FaceFunctional {
    /// `ζ ≡ 1`: total facet `(d-1)`-volume.
    pub fn surface() -> Self {
        Self::constant(1.0)
    }

    pub fn constant(value: f64) -> Self {
        FaceFunctional::try_from(Zeta::Constant { value }).expect("finite constant")
    }

    pub fn direction_indicator(directions: Vec<Vec<f64>>) -> Result<Self, FunctionalError> {
        let directions = directions
            .into_iter()
            .map(|u| {
                let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
                u.into_iter().map(|c| c / n).collect()
            })
            .collect();
        FaceFunctional::try_from(Zeta::DirectionIndicator {
            directions,
            cos_tolerance: default_cos_tolerance(),
        })
    }

    pub fn axis_profile(axis: usize, values: Vec<f64>) -> Result<Self, FunctionalError> {
        FaceFunctional::try_from(Zeta::AxisProfile { axis, values })
    }

    pub fn zeta_kind(&self) -> &Zeta {
        &self.zeta
    }

    /// Upper bound for `|ζ|`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn is_surface(&self) -> bool {
        self.zeta == Zeta::Constant { value: 1.0 }
    }

    /// `ζ(u)` for a unit normal `u`.
    pub fn zeta(&self, u: &[f64]) -> f64 {
        let v = match &self.zeta {
            Zeta::Constant { value } => *value,
            Zeta::DirectionIndicator {
                directions,
                cos_tolerance,
            } => {
                let hit = directions.iter().any(|d| {
                    let c: f64 = d.iter().zip(u).map(|(a, b)| a * b).sum();
                    c.abs() >= 1.0 - cos_tolerance
                });
                f64::from(u8::from(hit))
            }
            Zeta::AxisProfile { axis, values } => {
                let c = u.get(*axis).copied().unwrap_or(0.0).abs().min(1.0);
                let k = ((c * values.len() as f64) as usize).min(values.len() - 1);
                values[k]
            }
        };
        assert!(v.abs() <= self.bound, "ζ exceeds its declared bound");
        v
    }

    /// `φ(f)` for a maximal polytope.
    pub fn value(&self, m: &MaxPolytopeRecord) -> f64 {
        m.measure * self.zeta(&m.normal)
    }

    /// Mean of `ζ²` under the uniform distribution on the sphere in
    /// dimension `d` (2 or 3 for profiles).
    pub fn zeta_square_mean(&self, d: usize) -> f64 {
        match &self.zeta {
            Zeta::Constant { value } => value * value,
            // Finitely many directions carry no surface measure.
            Zeta::DirectionIndicator { .. } => 0.0,
            Zeta::AxisProfile { values, .. } => {
                let m = values.len() as f64;
                values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| {
                        let (a, b) = (k as f64 / m, (k + 1) as f64 / m);
                        // Law of |u_axis|: arcsine-type in the plane,
                        // uniform on [0, 1] in space.
                        let p = match d {
                            2 => 2.0 / PI * (b.asin() - a.asin()),
                            3 => b - a,
                            _ => panic!("profile means are available for d = 2, 3"),
                        };
                        v * v * p
                    })
                    .sum()
            }
        }
    }
}

/// `Σ_φ(Y)`: the sum of `φ` over all maximal polytopes.
pub fn sigma_phi(state: &Tessellation, phi: &FaceFunctional) -> f64 {
    sum_phi(state.maximal_polytopes(), phi)
}

/// `Σ_φ(Y(s))` of the coupled tessellation at an earlier time `s`.
pub fn sigma_phi_at(state: &Tessellation, phi: &FaceFunctional, s: f64) -> f64 {
    sum_phi(state.maximal_polytopes_until(s), phi)
}

fn sum_phi(facets: &[MaxPolytopeRecord], phi: &FaceFunctional) -> f64 {
    facets.iter().map(|m| phi.value(m)).sum()
}

/// Where the centring constant of `Σ_φ` comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MeanSource {
    /// `t · Vol_d(W) · surface density`, available for `ζ ≡ 1`.
    Exact,
    /// A mean supplied by the caller, typically from a replication batch.
    Empirical(f64),
}

/// The exact mean of the total surface at time `t` in `W`.
pub fn exact_mean_surface(spec: &HyperplaneMeasureSpec, window: &ConvexPolytope, t: f64) -> f64 {
    t * window.volume() * spec.surface_density()
}

/// `Σ_φ - E Σ_φ`.
pub fn centred_sigma(state: &Tessellation, phi: &FaceFunctional, mean: MeanSource) -> Result<f64, FunctionalError> {
    let m = match mean {
        MeanSource::Exact if phi.is_surface() => exact_mean_surface(state.spec(), state.window(), state.horizon()),
        MeanSource::Exact => return Err(FunctionalError::NoExactMean),
        MeanSource::Empirical(m) => m,
    };
    Ok(sigma_phi(state, phi) - m)
}

/// Subtracts the sample mean in place and returns it.
pub fn centre_empirically(values: &mut [f64]) -> f64 {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    values.iter_mut().for_each(|v| *v -= m);
    m
}

fn hits_interior(p: &ConvexPolytope, h: &Hyperplane) -> bool {
    let (lo, hi) = p.support_range(h.normal());
    lo + SNAP_TOLERANCE < h.offset() && h.offset() < hi - SNAP_TOLERANCE
}

/// Cells of the section tessellation `Y ∩ H` inside `W ∩ H`.
pub fn section_tessellation(state: &Tessellation, h: &Hyperplane) -> Vec<ConvexPolytope> {
    if !hits_interior(state.window(), h) {
        return Vec::new();
    }
    state
        .cells()
        .iter()
        .filter(|c| hits_interior(&c.polytope, h))
        .filter_map(|c| c.polytope.intersect_with_hyperplane(h).ok().flatten())
        .collect()
}

/// `(d-1)`-volumes of the section cells.
pub fn section_volumes(state: &Tessellation, h: &Hyperplane) -> Vec<f64> {
    section_tessellation(state, h).iter().map(ConvexPolytope::volume).collect()
}

/// Monte Carlo estimate of `A_{φ²}(Y) = ∫_{[W]} Σ_{f ∈ Y∩H} φ²(f) Λ(dH)`
/// from `n_samples` hyperplanes; returns `(estimate, standard error)`.
pub fn estimate_a_phi2<R: Rng + ?Sized>(
    state: &Tessellation,
    spec: &HyperplaneMeasureSpec,
    phi: &FaceFunctional,
    n_samples: usize,
    rng: &mut R,
) -> Result<(f64, f64), FunctionalError> {
    if n_samples == 0 {
        return Err(FunctionalError::NoSamples);
    }
    let cap = spec.capacity(state.window());
    if !(cap > 0.0) {
        return Err(FunctionalError::ZeroCapacity);
    }
    let mut acc = crate::stats::MomentAccumulator::new();
    for _ in 0..n_samples {
        let h = spec.sample_hitting(state.window(), rng)?;
        let z = phi.zeta(h.normal());
        let x = if z == 0.0 {
            0.0
        } else {
            cap * z * z * section_volumes(state, &h).iter().map(|v| v * v).sum::<f64>()
        };
        acc.push(x);
    }
    let se = if n_samples > 1 {
        (acc.sample_variance().max(0.0) / n_samples as f64).sqrt()
    } else {
        f64::INFINITY
    };
    Ok((acc.mean(), se))
}

/// Largest `φ(f)` over the maximal polytopes; 0 without facets.
pub fn max_facet_value(state: &Tessellation, phi: &FaceFunctional) -> f64 {
    state
        .maximal_polytopes()
        .iter()
        .map(|m| phi.value(m))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mnw::run_mnw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Unit square split once by a vertical line, built through the engine
    /// by stopping right after the first split.
    fn single_split() -> Tessellation {
        let spec = HyperplaneMeasureSpec::discrete(2, vec![vec![1.0, 0.0], vec![0.0, 1.0]], vec![0.999_999, 0.000_001], 1.0)
            .unwrap();
        for seed in 0.. {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut t = Tessellation::new(ConvexPolytope::unit_cube(2), &spec, &mut rng).unwrap();
            let first = t.cells()[0].death_time();
            t.advance_to(first, &mut rng).unwrap();
            let m = &t.maximal_polytopes()[0];
            if m.normal[0] == 1.0 {
                return t;
            }
        }
        unreachable!()
    }

    #[test]
    fn single_split_values() {
        let t = single_split();
        assert!((sigma_phi(&t, &FaceFunctional::surface()) - 1.0).abs() < 1e-15);
        let ind = FaceFunctional::direction_indicator(vec![vec![0.0, 1.0]]).unwrap();
        assert_eq!(sigma_phi(&t, &ind), 0.0);
        assert!((max_facet_value(&t, &FaceFunctional::surface()) - 1.0).abs() < 1e-15);
        let sec = section_tessellation(&t, &Hyperplane::axis(2, 1, 0.3));
        assert_eq!(sec.len(), 2);
        let total: f64 = sec.iter().map(|s| s.volume()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn empty_tessellation_values() {
        let spec = HyperplaneMeasureSpec::axis_aligned(2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = run_mnw(ConvexPolytope::unit_cube(2), &spec, 0.0, &mut rng).unwrap();
        assert_eq!(sigma_phi(&t, &FaceFunctional::surface()), 0.0);
        assert_eq!(max_facet_value(&t, &FaceFunctional::surface()), 0.0);
        let (a, se) = estimate_a_phi2(&t, &spec, &FaceFunctional::surface(), 100, &mut rng).unwrap();
        assert!((a - 2.0).abs() < 1e-12 && se < 1e-12);
        let (z, _) = estimate_a_phi2(&t, &spec, &FaceFunctional::constant(0.0), 10, &mut rng).unwrap();
        assert_eq!(z, 0.0);
        assert!(section_tessellation(&t, &Hyperplane::axis(2, 1, 2.0)).is_empty());
    }

    #[test]
    fn exact_mean_requires_unit_zeta() {
        let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
        let t = run_mnw(ConvexPolytope::unit_cube(2), &spec, 1.0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        let s = sigma_phi(&t, &FaceFunctional::surface());
        assert!((centred_sigma(&t, &FaceFunctional::surface(), MeanSource::Exact).unwrap() - (s - 1.0)).abs() < 1e-15);
        assert_eq!(
            centred_sigma(&t, &FaceFunctional::constant(2.0), MeanSource::Exact),
            Err(FunctionalError::NoExactMean)
        );
        assert_eq!(centred_sigma(&t, &FaceFunctional::surface(), MeanSource::Empirical(s)).unwrap(), 0.0);
    }

    #[test]
    fn zeta_square_means() {
        let half = FaceFunctional::axis_profile(0, vec![0.0, 1.0]).unwrap();
        // P(|cos θ| ≥ 1/2) = 2/3 in the plane, 1/2 in space.
        assert!((half.zeta_square_mean(2) - 2.0 / 3.0).abs() < 1e-12);
        assert!((half.zeta_square_mean(3) - 0.5).abs() < 1e-12);
        assert_eq!(FaceFunctional::constant(3.0).zeta_square_mean(3), 9.0);
        let f: FaceFunctional = toml::from_str("kind = \"axis_profile\"\naxis = 1\nvalues = [0.5, 2.0]").unwrap();
        assert_eq!(f.bound(), 2.0);
        assert_eq!(f.zeta(&[0.0, 1.0]), 2.0);
    }
}
