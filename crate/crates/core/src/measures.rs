//! Translation-invariant hyperplane measures `Λ = scale · ℓ ⊗ R`.
//!
//! Hyperplanes are parametrized by an unoriented unit normal `u` and a
//! signed offset `p ∈ ℝ`. The capacity of a convex body `K` is
//! `Λ([K]) = scale · ∫ width(K, u) R(du)`, and the surface density of the
//! associated Poisson hyperplane process (and of the STIT tessellation at
//! time 1) equals `scale`.
//!
//! For the isotropic kind `R` is the uniform distribution, so with scale 1
//! the capacity is the mean width: `perimeter / π` in the plane and
//! `(1/4π) Σ_e ℓ_e θ_e` for polyhedra (edge lengths times exterior angles).
//! The axis-aligned kind puts mass `1/d` on each coordinate axis with scale
//! `d`, so its capacity is the sum of the axis extents.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{ConvexPolytope, Hyperplane, ShapeKind};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("isotropic measures are supported in dimensions 2 and 3, not {0}")]
    UnsupportedDimension(usize),
    #[error("direction weights must be positive and sum to 1")]
    BadWeights,
    #[error("directions do not span the space")]
    Degenerate,
    #[error("direction {0} has the wrong dimension or zero length")]
    BadDirection(usize),
    #[error("scale must be positive and finite")]
    BadScale,
    #[error("cell cannot be hit")]
    ZeroCapacity,
    #[error("dimension mismatch: measure has dimension {expected}, polytope {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureKind {
    Isotropic,
    AxisAligned,
    DiscreteDirections,
}

/// A non-degenerate translation-invariant hyperplane measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct HyperplaneMeasureSpec {
    dimension: usize,
    kind: MeasureKind,
    directions: Vec<Vec<f64>>,
    weights: Vec<f64>,
    scale: f64,
}

/// Serialized form: `kind`, plus `directions`/`weights` for the discrete
/// kind and an optional `scale`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawSpec {
    pub dimension: usize,
    pub kind: MeasureKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub directions: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
}

impl TryFrom<RawSpec> for HyperplaneMeasureSpec {
    type Error = MeasureError;

    fn try_from(raw: RawSpec) -> Result<Self, MeasureError> {
        let spec = match raw.kind {
            MeasureKind::Isotropic => HyperplaneMeasureSpec::isotropic(raw.dimension)?,
            MeasureKind::AxisAligned => HyperplaneMeasureSpec::axis_aligned(raw.dimension),
            MeasureKind::DiscreteDirections => {
                let dirs = raw.directions.unwrap_or_default();
                let weights = raw.weights.unwrap_or_default();
                return HyperplaneMeasureSpec::discrete(raw.dimension, dirs, weights, raw.scale.unwrap_or(1.0));
            }
        };
        match raw.scale {
            Some(s) => spec.with_scale(s),
            None => Ok(spec),
        }
    }
}

impl From<HyperplaneMeasureSpec> for RawSpec {
    fn from(s: HyperplaneMeasureSpec) -> Self {
        let discrete = s.kind == MeasureKind::DiscreteDirections;
        RawSpec {
            dimension: s.dimension,
            kind: s.kind,
            directions: discrete.then(|| s.directions.clone()),
            weights: discrete.then(|| s.weights.clone()),
            scale: Some(s.scale),
        }
    }
}

impl HyperplaneMeasureSpec {
    /// Uniform directional distribution with unit surface density.
    pub fn isotropic(dimension: usize) -> Result<Self, MeasureError> {
        if !(2..=3).contains(&dimension) {
            return Err(MeasureError::UnsupportedDimension(dimension));
        }
        Ok(HyperplaneMeasureSpec {
            dimension,
            kind: MeasureKind::Isotropic,
            directions: Vec::new(),
            weights: Vec::new(),
            scale: 1.0,
        })
    }

    /// Hyperplanes orthogonal to the coordinate axes, each family with unit
    /// intensity (total scale `d`).
    pub fn axis_aligned(dimension: usize) -> Self {
        let directions = (0..dimension)
            .map(|i| {
                let mut e = vec![0.0; dimension];
                e[i] = 1.0;
                e
            })
            .collect();
        HyperplaneMeasureSpec {
            dimension,
            kind: MeasureKind::AxisAligned,
            directions,
            weights: vec![1.0 / dimension as f64; dimension],
            scale: dimension as f64,
        }
    }

    /// Finitely many directions with probability weights. Directions are
    /// normalized; they must span `ℝ^d`.
    pub fn discrete(
        dimension: usize,
        directions: Vec<Vec<f64>>,
        weights: Vec<f64>,
        scale: f64,
    ) -> Result<Self, MeasureError> {
        if directions.is_empty() || directions.len() != weights.len() {
            return Err(MeasureError::BadWeights);
        }
        if weights.iter().any(|w| !(*w > 0.0) || !w.is_finite())
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(MeasureError::BadWeights);
        }
        let mut unit = Vec::with_capacity(directions.len());
        for (i, u) in directions.into_iter().enumerate() {
            let n = u.iter().map(|c| c * c).sum::<f64>().sqrt();
            if u.len() != dimension || !(n > 0.0) || !n.is_finite() {
                return Err(MeasureError::BadDirection(i));
            }
            unit.push(u.into_iter().map(|c| c / n).collect::<Vec<f64>>());
        }
        if rank(&unit, dimension) < dimension {
            return Err(MeasureError::Degenerate);
        }
        HyperplaneMeasureSpec {
            dimension,
            kind: MeasureKind::DiscreteDirections,
            directions: unit,
            weights,
            scale: 1.0,
        }
        .with_scale(scale)
    }

    /// The same directional law with a different total intensity.
    pub fn with_scale(mut self, scale: f64) -> Result<Self, MeasureError> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(MeasureError::BadScale);
        }
        self.scale = scale;
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn kind(&self) -> MeasureKind {
        self.kind
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `(direction, weight)` atoms; empty for the isotropic kind.
    pub fn atoms(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.directions.iter().map(Vec::as_slice).zip(self.weights.iter().copied())
    }

    /// Mean `(d-1)`-volume of hyperplane pieces per unit volume for the
    /// Poisson hyperplane process with this intensity measure.
    pub fn surface_density(&self) -> f64 {
        self.scale
    }

    /// `Λ([P])`, the measure of hyperplanes hitting `P`.
    pub fn capacity(&self, p: &ConvexPolytope) -> f64 {
        debug_assert_eq!(p.ambient_dimension(), self.dimension);
        let raw = match self.kind {
            MeasureKind::Isotropic => mean_width(p),
            _ => self.atoms().map(|(u, w)| w * p.width(u)).sum(),
        };
        self.scale * raw
    }

    /// Capacity of the closed segment `[x, y]`.
    pub fn segment_capacity(&self, x: &[f64], y: &[f64]) -> f64 {
        match self.kind {
            MeasureKind::Isotropic => {
                let len = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                self.scale * isotropic_segment_constant(self.dimension) * len
            }
            _ => {
                self.scale
                    * self
                        .atoms()
                        .map(|(u, w)| {
                            w * u
                                .iter()
                                .zip(x.iter().zip(y))
                                .map(|(c, (a, b))| c * (a - b))
                                .sum::<f64>()
                                .abs()
                        })
                        .sum::<f64>()
            }
        }
    }

    /// Draws `H` from `Λ` restricted to `[P]` and normalized.
    pub fn sample_hitting<R: Rng + ?Sized>(
        &self,
        p: &ConvexPolytope,
        rng: &mut R,
    ) -> Result<Hyperplane, MeasureError> {
        if p.ambient_dimension() != self.dimension {
            return Err(MeasureError::DimensionMismatch {
                expected: self.dimension,
                found: p.ambient_dimension(),
            });
        }
        let u = match self.kind {
            MeasureKind::Isotropic if self.dimension == 2 => sample_direction_2d(p, rng)?,
            MeasureKind::Isotropic => sample_direction_3d(p, rng)?,
            _ => self.sample_atom(p, rng)?,
        };
        let (lo, hi) = p.support_range(&u);
        if !(hi > lo) {
            return Err(MeasureError::ZeroCapacity);
        }
        let offset = lo + (hi - lo) * rng.random::<f64>();
        Ok(Hyperplane::from_unnormalized(u, offset).expect("unit direction"))
    }

    fn sample_atom<R: Rng + ?Sized>(&self, p: &ConvexPolytope, rng: &mut R) -> Result<Vec<f64>, MeasureError> {
        let masses: Vec<f64> = self.atoms().map(|(u, w)| w * p.width(u)).collect();
        let total: f64 = masses.iter().sum();
        if !(total > 0.0) {
            return Err(MeasureError::ZeroCapacity);
        }
        let mut x = total * rng.random::<f64>();
        for (i, m) in masses.iter().enumerate() {
            if x < *m {
                return Ok(self.directions[i].clone());
            }
            x -= m;
        }
        let last = masses.iter().rposition(|m| *m > 0.0).expect("positive mass");
        Ok(self.directions[last].clone())
    }
}

/// `Λ_iso([x y]) / |x - y|` for unit surface density: `2/π` in the plane,
/// `1/2` in space.
pub fn isotropic_segment_constant(d: usize) -> f64 {
    match d {
        2 => 2.0 / PI,
        3 => 0.5,
        _ => panic!("isotropic measures exist in dimensions 2 and 3 only"),
    }
}

/// Mean width (over uniformly distributed unoriented directions).
fn mean_width(p: &ConvexPolytope) -> f64 {
    let d = p.ambient_dimension();
    if let Some((lo, hi)) = p.box_bounds() {
        let extents: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).sum();
        return match d {
            2 => 2.0 / PI * extents,
            _ => 0.5 * extents,
        };
    }
    match (d, p.kind()) {
        (_, ShapeKind::Segment) => isotropic_segment_constant(d) * p.volume(),
        (2, _) => p.perimeter().expect("planar polygon") / PI,
        (3, ShapeKind::Polygon) => p.perimeter().expect("polygon") / 4.0,
        (3, _) => {
            p.edges_with_exterior_angles()
                .expect("polyhedron")
                .iter()
                .map(|(l, a)| l * a)
                .sum::<f64>()
                / (4.0 * PI)
        }
        _ => unreachable!("isotropic measures exist in dimensions 2 and 3 only"),
    }
}

/// Edge mixture: the boundary projects onto the line through `u` twice, so
/// `width(u) = ½ Σ_j ℓ_j |<u, e_j>|` with unit edge tangents `e_j`. Pick an
/// edge with probability proportional to its length and then an angle `φ`
/// from its tangent with density `cos φ / 2` on `(-π/2, π/2)`.
fn sample_direction_2d<R: Rng + ?Sized>(p: &ConvexPolytope, rng: &mut R) -> Result<Vec<f64>, MeasureError> {
    let mut verts = p.vertices();
    if p.kind() == ShapeKind::Box && verts.len() == 4 {
        // Box corners come in bit order; walk them as a loop.
        verts.swap(2, 3);
    }
    let n = verts.len();
    let edges: Vec<[f64; 2]> = (0..if n == 2 { 1 } else { n })
        .map(|i| {
            let (a, b) = (&verts[i], &verts[(i + 1) % n]);
            [b[0] - a[0], b[1] - a[1]]
        })
        .collect();
    let lens: Vec<f64> = edges.iter().map(|e| e[0].hypot(e[1])).collect();
    let total: f64 = lens.iter().sum();
    if !(total > 0.0) {
        return Err(MeasureError::ZeroCapacity);
    }
    let mut x = total * rng.random::<f64>();
    let mut j = lens.len() - 1;
    for (i, l) in lens.iter().enumerate() {
        if x < *l {
            j = i;
            break;
        }
        x -= l;
    }
    let e = edges[j];
    let alpha = e[1].atan2(e[0]);
    let phi = (2.0 * rng.random::<f64>() - 1.0).asin();
    let theta = alpha + phi;
    Ok(vec![theta.cos(), theta.sin()])
}

/// Rejection from the uniform law on the sphere with acceptance probability
/// `width(u) / diameter`.
fn sample_direction_3d<R: Rng + ?Sized>(p: &ConvexPolytope, rng: &mut R) -> Result<Vec<f64>, MeasureError> {
    let bound = p.diameter();
    if !(bound > 0.0) {
        return Err(MeasureError::ZeroCapacity);
    }
    loop {
        let z: f64 = 2.0 * rng.random::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.random::<f64>();
        let r = (1.0 - z * z).max(0.0).sqrt();
        let u = vec![r * phi.cos(), r * phi.sin(), z];
        if rng.random::<f64>() * bound < p.width(&u) {
            return Ok(u);
        }
    }
}

/// Numerical rank by Gram-Schmidt with a relative threshold.
fn rank(vectors: &[Vec<f64>], d: usize) -> usize {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(d);
    for v in vectors {
        let mut w = v.clone();
        for b in &basis {
            let c: f64 = w.iter().zip(b).map(|(x, y)| x * y).sum();
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let n = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            basis.push(w.into_iter().map(|x| x / n).collect());
        }
    }
    basis.len()
}
