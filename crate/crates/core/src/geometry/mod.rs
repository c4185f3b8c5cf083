//! Exact convex-polytope primitives.
//!
//! Cells and windows are full-dimensional convex polytopes; maximal polytopes
//! and section cells are codimension-one polytopes carrying the hyperplane
//! they live in. Polygons (d = 2) and polyhedra (d = 3) are stored by vertex
//! with explicit combinatorics: an ordered loop in 2D and oriented face loops
//! in 3D. In any dimension axis-aligned boxes are supported, split by
//! axis-aligned hyperplanes.
//!
//! Vertices within [`SNAP_TOLERANCE`] of a cutting hyperplane are treated as
//! lying on it, which keeps repeated splits from producing sliver faces.

mod clip;
mod hyperplane;
mod polytope;
mod repr;

pub use hyperplane::Hyperplane;
pub use polytope::{ConvexPolytope, ShapeKind, Split};
pub use repr::PolytopeRepr;

use thiserror::Error;

/// Absolute on-plane classification tolerance (window units of order one).
pub const SNAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("empty polytope")]
    EmptyPolytope,
    #[error("non-splitting hyperplane")]
    NonSplitting,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("normal vector must be non-zero and finite")]
    DegenerateNormal,
    #[error("invalid polytope: {0}")]
    Invalid(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[inline]
pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub(crate) fn sub3(a: &[f64], b: &[f64]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Orthonormal pair spanning the plane orthogonal to the unit vector `n`,
/// oriented so that `e1 × e2 = n`.
pub(crate) fn plane_basis(n: &[f64]) -> ([f64; 3], [f64; 3]) {
    let n = [n[0], n[1], n[2]];
    let helper = if n[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if n[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let mut e1 = cross3(helper, n);
    let l = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1 = [e1[0] / l, e1[1] / l, e1[2] / l];
    let e2 = cross3(n, e1);
    (e1, e2)
}
