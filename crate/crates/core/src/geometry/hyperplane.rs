use serde::{Deserialize, Serialize};

use super::{dot, norm, GeometryError, Result};

/// The hyperplane `{x : <x, normal> = offset}` with a unit normal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHyperplane", into = "RawHyperplane")]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

#[derive(Serialize, Deserialize)]
struct RawHyperplane {
    normal: Vec<f64>,
    offset: f64,
}

impl TryFrom<RawHyperplane> for Hyperplane {
    type Error = GeometryError;

    fn try_from(raw: RawHyperplane) -> Result<Self> {
        Hyperplane::from_unnormalized(raw.normal, raw.offset)
    }
}

impl From<Hyperplane> for RawHyperplane {
    fn from(h: Hyperplane) -> Self {
        RawHyperplane {
            normal: h.normal,
            offset: h.offset,
        }
    }
}

impl Hyperplane {
    /// Builds a hyperplane from a normal that is already of unit length
    /// (within 1e-12).
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !n.is_finite() || (n - 1.0).abs() > 1e-12 || !offset.is_finite() {
            return Err(GeometryError::DegenerateNormal);
        }
        Ok(Hyperplane { normal, offset })
    }

    /// Normalizes `normal` and rescales `offset` accordingly, so the point
    /// set `{x : <x, normal> = offset}` is unchanged.
    pub fn from_unnormalized(mut normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if !(n.is_finite() && n > 0.0) || !offset.is_finite() {
            return Err(GeometryError::DegenerateNormal);
        }
        normal.iter_mut().for_each(|c| *c /= n);
        Ok(Hyperplane {
            normal,
            offset: offset / n,
        })
    }

    /// `{x : x[axis] = offset}` in dimension `dim`.
    pub fn axis(dim: usize, axis: usize, offset: f64) -> Self {
        assert!(axis < dim, "axis {axis} out of range for dimension {dim}");
        let mut normal = vec![0.0; dim];
        normal[axis] = 1.0;
        Hyperplane { normal, offset }
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `<x, normal> - offset`; positive on the side the normal points to.
    #[inline]
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(x, &self.normal) - self.offset
    }

    /// The index `i` if the normal is `±e_i`.
    pub fn axis_index(&self) -> Option<usize> {
        let mut found = None;
        for (i, &c) in self.normal.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            if c.abs() == 1.0 && found.is_none() {
                found = Some(i);
            } else {
                return None;
            }
        }
        found
    }

    /// The same hyperplane after scaling space by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        Hyperplane {
            normal: self.normal.clone(),
            offset: self.offset * factor,
        }
    }

    /// The normal flipped so that its first non-zero coordinate is positive.
    /// Direction weights are even functions, so this is the representative
    /// used when evaluating them.
    pub fn canonical_normal(&self) -> Vec<f64> {
        canonical_direction(&self.normal)
    }
}

pub(crate) fn canonical_direction(u: &[f64]) -> Vec<f64> {
    let flip = u.iter().find(|c| **c != 0.0).is_some_and(|c| *c < 0.0);
    if flip {
        u.iter().map(|c| -c).collect()
    } else {
        u.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnormalized_input_is_rescaled() {
        let h = Hyperplane::from_unnormalized(vec![3.0, 4.0], 10.0).unwrap();
        assert!((norm(h.normal()) - 1.0).abs() < 1e-15);
        assert!((h.offset() - 2.0).abs() < 1e-15);
        assert!(h.signed_distance(&[1.2, 1.6]).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_unit_and_zero_normals() {
        assert_eq!(
            Hyperplane::new(vec![1.0, 1.0], 0.0),
            Err(GeometryError::DegenerateNormal)
        );
        assert_eq!(
            Hyperplane::from_unnormalized(vec![0.0, 0.0, 0.0], 1.0),
            Err(GeometryError::DegenerateNormal)
        );
    }

    #[test]
    fn axis_detection() {
        assert_eq!(Hyperplane::axis(3, 2, 0.5).axis_index(), Some(2));
        let h = Hyperplane::new(vec![0.0, -1.0], 0.5).unwrap();
        assert_eq!(h.axis_index(), Some(1));
        let h = Hyperplane::from_unnormalized(vec![1.0, 1.0], 0.5).unwrap();
        assert_eq!(h.axis_index(), None);
    }

    #[test]
    fn canonical_normal_is_even() {
        let h = Hyperplane::new(vec![0.0, -0.6, 0.8], 0.0).unwrap();
        assert_eq!(h.canonical_normal(), vec![0.0, 0.6, -0.8]);
    }
}
