//! QMC evaluation of `∫_{[W]} ζ²(n(H)) ∬_{(W∩H)²} k(Λ([xy])) dx dy Λ(dH)`.
//!
//! A point of the unit cube is mapped to a hyperplane (direction, then an
//! offset uniform over the support interval) and to two points uniform in
//! the section `W ∩ H`; the integrand carries the Jacobian
//! `scale · width(W, u) · Vol_{d-1}(W ∩ H)²`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::qmc::{random_shift, shifted_halton, NeumaierSum, MAX_DIM};
use super::ExactError;
use crate::functionals::FaceFunctional;
use crate::geometry::{ConvexPolytope, Hyperplane, ShapeKind};
use crate::measures::{HyperplaneMeasureSpec, MeasureKind};
use crate::rng::stream;
use crate::stats::MomentAccumulator;

/// Quasi-Monte Carlo settings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    /// Halton points per random shift.
    pub points: usize,
    /// Independent Cranley-Patterson shifts; their spread is the error bar.
    pub shifts: usize,
    /// Pairs with `Λ([xy]) < epsilon` are excluded from singular integrands.
    pub epsilon: f64,
    /// Add the analytic contribution of the excluded pairs.
    pub shell_correction: bool,
    pub seed: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            points: 1 << 16,
            shifts: 10,
            epsilon: 0.0,
            shell_correction: true,
            seed: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<(), ExactError> {
        if self.points < 1000 {
            return Err(ExactError::Config("at least 1000 points per shift".into()));
        }
        if self.shifts < 2 {
            return Err(ExactError::Config("at least 2 shifts are needed for an error estimate".into()));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(ExactError::Config("epsilon must be finite and non-negative".into()));
        }
        Ok(())
    }
}

/// A reference value with its integration error (one standard error over
/// the random shifts).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub value: f64,
    pub error: f64,
    /// Value before the shell correction, when one was applied.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncorrected: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shell_correction: Option<f64>,
}

/// Uniform sampling in a `(d-1)`-dimensional section.
enum SectionSampler {
    Segment { a: Vec<f64>, b: Vec<f64> },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Fan { verts: Vec<Vec<f64>>, cumulative: Vec<f64> },
}

impl SectionSampler {
    fn new(p: &ConvexPolytope) -> Self {
        if let Some((lo, hi)) = p.box_bounds() {
            return SectionSampler::Box {
                lo: lo.to_vec(),
                hi: hi.to_vec(),
            };
        }
        let verts = p.vertices();
        match p.kind() {
            ShapeKind::Segment => SectionSampler::Segment {
                a: verts[0].clone(),
                b: verts[1].clone(),
            },
            _ => {
                let area = |a: &[f64], b: &[f64], c: &[f64]| {
                    let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
                    let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
                    let x = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
                    0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt()
                };
                let mut cumulative = Vec::with_capacity(verts.len() - 2);
                let mut acc = 0.0;
                for k in 1..verts.len() - 1 {
                    acc += area(&verts[0], &verts[k], &verts[k + 1]);
                    cumulative.push(acc);
                }
                cumulative.iter_mut().for_each(|c| *c /= acc);
                SectionSampler::Fan { verts, cumulative }
            }
        }
    }

    fn point(&self, c: &[f64], out: &mut [f64]) {
        match self {
            SectionSampler::Segment { a, b } => {
                for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
                    *o = x + c[0] * (y - x);
                }
            }
            SectionSampler::Box { lo, hi } => {
                let mut k = 0;
                for i in 0..lo.len() {
                    out[i] = if hi[i] > lo[i] {
                        k += 1;
                        lo[i] + c[k - 1] * (hi[i] - lo[i])
                    } else {
                        lo[i]
                    };
                }
            }
            SectionSampler::Fan { verts, cumulative } => {
                let j = cumulative.partition_point(|&q| q < c[0]).min(cumulative.len() - 1);
                let (a, b, cc) = (&verts[0], &verts[j + 1], &verts[j + 2]);
                let r = c[1].sqrt();
                let (wa, wb, wc) = (1.0 - r, r * (1.0 - c[2]), r * c[2]);
                for i in 0..3 {
                    out[i] = wa * a[i] + wb * b[i] + wc * cc[i];
                }
            }
        }
    }
}

/// Number of unit-cube coordinates used per section point.
fn point_dims(d: usize) -> usize {
    match d {
        2 => 1,
        3 => 3,
        _ => d - 1,
    }
}

fn direction_dims(spec: &HyperplaneMeasureSpec) -> usize {
    match spec.kind() {
        MeasureKind::Isotropic => spec.dimension() - 1,
        _ => 0,
    }
}

/// Generic driver; `kernel` receives `Λ([xy])` and returns the inner
/// integrand, `None` meaning the pair is excluded.
fn integrate(
    spec: &HyperplaneMeasureSpec,
    window: &ConvexPolytope,
    phi: &FaceFunctional,
    cfg: &IntegratorConfig,
    kernel: impl Fn(f64) -> f64 + Sync,
) -> Result<(f64, f64), ExactError> {
    cfg.validate()?;
    let d = spec.dimension();
    if window.ambient_dimension() != d || window.intrinsic_dimension() != d {
        return Err(ExactError::Config("window must be a full-dimensional polytope of the measure's dimension".into()));
    }
    if d > 3 && window.box_bounds().is_none() {
        return Err(ExactError::Unsupported("windows in dimension > 3 must be boxes".into()));
    }
    let dir_dims = direction_dims(spec);
    let pd = point_dims(d);
    let dim = dir_dims + 1 + 2 * pd;
    if dim > MAX_DIM {
        return Err(ExactError::Unsupported(format!("integration dimension {dim} exceeds {MAX_DIM}")));
    }
    let atoms: Vec<(Vec<f64>, f64)> = spec.atoms().map(|(u, w)| (u.to_vec(), w)).collect();
    let scale = spec.scale();
    let eval = |c: &[f64], u: &[f64], weight: f64, x: &mut [f64], y: &mut [f64]| -> f64 {
        let z = phi.zeta(u);
        if z == 0.0 {
            return 0.0;
        }
        let (lo, hi) = window.support_range(u);
        let width = hi - lo;
        if !(width > 0.0) {
            return 0.0;
        }
        let h = Hyperplane::from_unnormalized(u.to_vec(), lo + c[dir_dims] * width).expect("unit direction");
        let Ok(Some(section)) = window.intersect_with_hyperplane(&h) else {
            return 0.0;
        };
        let area = section.volume();
        let sampler = SectionSampler::new(&section);
        let base = dir_dims + 1;
        sampler.point(&c[base..base + pd], x);
        sampler.point(&c[base + pd..base + 2 * pd], y);
        let k = kernel(spec.segment_capacity(x, y));
        scale * weight * z * z * width * area * area * k
    };
    let shift_values: Vec<f64> = (0..cfg.shifts)
        .into_par_iter()
        .map(|s| {
            let shift = random_shift(dim, &mut stream(cfg.seed, "qmc-shift", s as u64));
            let mut c = vec![0.0; dim];
            let (mut x, mut y) = (vec![0.0; d], vec![0.0; d]);
            let mut sum = NeumaierSum::default();
            for i in 1..=cfg.points as u64 {
                shifted_halton(i, &shift, &mut c);
                let v = match spec.kind() {
                    MeasureKind::Isotropic if d == 2 => {
                        let theta = PI * c[0];
                        eval(&c, &[theta.cos(), theta.sin()], 1.0, &mut x, &mut y)
                    }
                    MeasureKind::Isotropic => {
                        let zc = 2.0 * c[0] - 1.0;
                        let r = (1.0 - zc * zc).max(0.0).sqrt();
                        let ph = 2.0 * PI * c[1];
                        eval(&c, &[r * ph.cos(), r * ph.sin(), zc], 1.0, &mut x, &mut y)
                    }
                    _ => atoms.iter().map(|(u, w)| eval(&c, u, *w, &mut x, &mut y)).sum(),
                };
                sum.add(v);
            }
            sum.value() / cfg.points as f64
        })
        .collect();
    let acc = MomentAccumulator::from_slice(&shift_values);
    let error = (acc.sample_variance().max(0.0) / cfg.shifts as f64).sqrt();
    Ok((acc.mean(), error))
}

/// `Var Σ_φ(Y(t, W)) = ∫_{[W]} ζ² ∬ (1 - e^{-tΛ([xy])}) / Λ([xy]) dx dy Λ(dH)`.
pub fn variance_exact(
    spec: &HyperplaneMeasureSpec,
    window: &ConvexPolytope,
    t: f64,
    phi: &FaceFunctional,
    cfg: &IntegratorConfig,
) -> Result<ExactValue, ExactError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(ExactError::NegativeTime(t));
    }
    if cfg.epsilon != 0.0 {
        return Err(ExactError::Config("the variance integrand is bounded; epsilon must be 0".into()));
    }
    let (value, error) = integrate(spec, window, phi, cfg, |l| {
        if l > 0.0 {
            -(-t * l).exp_m1() / l
        } else {
            t
        }
    })?;
    Ok(ExactValue {
        value,
        error,
        uncorrected: None,
        shell_correction: None,
    })
}

/// `∬_{|x-y|_1 < ε} |x-y|_1^{-1} dx dy` over a box with the given sides:
/// exact for two sides, leading order in `ε` otherwise.
pub fn l1_shell(sides: &[f64], eps: f64) -> f64 {
    let m = sides.len();
    match m {
        0 => 0.0,
        1 => {
            // 2 ∫_0^ε (L - r) / r dr diverges: there is no finite shell.
            f64::INFINITY
        }
        2 => {
            let (a, b) = (sides[0], sides[1]);
            4.0 * (a * b * eps - (a + b) * eps * eps / 4.0 + eps.powi(3) / 18.0)
        }
        _ => {
            let vol: f64 = sides.iter().product();
            let fact: f64 = (1..m).map(|k| k as f64).product();
            2f64.powi(m as i32) * eps.powi(m as i32 - 1) / (fact * (m - 1) as f64) * vol
        }
    }
}

/// Variance of the non-Gaussian limit `Ξ(W)`,
/// `∫_{[W]} ζ² ∬ Λ([xy])^{-1} dx dy Λ(dH)`, for axis-aligned measures and
/// box windows in `d ≥ 3`.
pub fn xi_variance(
    spec: &HyperplaneMeasureSpec,
    window: &ConvexPolytope,
    phi: &FaceFunctional,
    cfg: &IntegratorConfig,
) -> Result<ExactValue, ExactError> {
    let d = spec.dimension();
    if d < 3 {
        return Err(ExactError::XiNeedsDimension3(d));
    }
    if spec.kind() != MeasureKind::AxisAligned {
        return Err(ExactError::Unsupported("Ξ variance is implemented for axis-aligned measures".into()));
    }
    let Some((lo, hi)) = window.box_bounds() else {
        return Err(ExactError::Unsupported("Ξ variance is implemented for box windows".into()));
    };
    let eps = cfg.epsilon;
    let (raw, error) = integrate(spec, window, phi, cfg, |l| if l < eps || l <= 0.0 { 0.0 } else { 1.0 / l })?;
    let correction = (cfg.shell_correction && eps > 0.0).then(|| {
        spec.atoms()
            .enumerate()
            .map(|(k, (u, w))| {
                let sides: Vec<f64> = (0..d).filter(|&i| i != k).map(|i| hi[i] - lo[i]).collect();
                let z = phi.zeta(u);
                spec.scale() * w * (hi[k] - lo[k]) * z * z * l1_shell(&sides, eps)
            })
            .sum::<f64>()
    });
    Ok(ExactValue {
        value: raw + correction.unwrap_or(0.0),
        error,
        uncorrected: correction.map(|_| raw),
        shell_correction: correction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(points: usize) -> IntegratorConfig {
        IntegratorConfig {
            points,
            ..Default::default()
        }
    }

    #[test]
    fn zero_time_gives_zero() {
        let s = HyperplaneMeasureSpec::isotropic(2).unwrap();
        let v = variance_exact(&s, &ConvexPolytope::unit_cube(2), 0.0, &FaceFunctional::surface(), &cfg(1000)).unwrap();
        assert_eq!(v.value, 0.0);
    }

    #[test]
    fn bad_configurations() {
        let s = HyperplaneMeasureSpec::axis_aligned(2);
        let w = ConvexPolytope::unit_cube(2);
        let phi = FaceFunctional::surface();
        assert!(variance_exact(&s, &w, 1.0, &phi, &cfg(999)).is_err());
        let eps = IntegratorConfig {
            epsilon: 1e-3,
            ..cfg(1000)
        };
        assert!(variance_exact(&s, &w, 1.0, &phi, &eps).is_err());
        assert!(matches!(
            xi_variance(&s, &w, &phi, &cfg(1000)),
            Err(ExactError::XiNeedsDimension3(2))
        ));
    }

    #[test]
    fn shell_formula_matches_leading_order() {
        let eps = 1e-4;
        let exact = l1_shell(&[1.0, 2.0], eps);
        let leading = 4.0 * eps * 2.0;
        assert!((exact - leading).abs() / leading < 1e-3);
    }
}
