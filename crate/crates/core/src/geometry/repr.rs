use serde::{Deserialize, Serialize};

use super::polytope::{ConvexPolytope, Shape};
use super::{GeometryError, Hyperplane};

/// Serializable form of a [`ConvexPolytope`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolytopeRepr {
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carrier: Option<Hyperplane>,
    },
    Segment {
        vertices: [Vec<f64>; 2],
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carrier: Option<Hyperplane>,
    },
    Polygon {
        vertices: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        carrier: Option<Hyperplane>,
    },
    Polyhedron {
        vertices: Vec<[f64; 3]>,
        faces: Vec<Vec<usize>>,
    },
}

impl From<&ConvexPolytope> for PolytopeRepr {
    fn from(p: &ConvexPolytope) -> Self {
        let carrier = p.carrier().cloned();
        match &p.shape {
            Shape::Box { lo, hi } => PolytopeRepr::Box {
                lo: lo.clone(),
                hi: hi.clone(),
                carrier,
            },
            Shape::Segment { .. } => {
                let v = p.vertices();
                PolytopeRepr::Segment {
                    vertices: [v[0].clone(), v[1].clone()],
                    carrier,
                }
            }
            Shape::Polygon { .. } => PolytopeRepr::Polygon {
                vertices: p.vertices(),
                carrier,
            },
            Shape::Polyhedron { .. } => PolytopeRepr::Polyhedron {
                vertices: p.vertices().iter().map(|v| [v[0], v[1], v[2]]).collect(),
                faces: p.faces().expect("polyhedron"),
            },
        }
    }
}

impl From<ConvexPolytope> for PolytopeRepr {
    fn from(p: ConvexPolytope) -> Self {
        PolytopeRepr::from(&p)
    }
}

impl TryFrom<PolytopeRepr> for ConvexPolytope {
    type Error = GeometryError;

    fn try_from(r: PolytopeRepr) -> Result<Self, GeometryError> {
        let attach = |p: ConvexPolytope, carrier: Option<Hyperplane>| match carrier {
            Some(h) if h.dim() != p.ambient_dimension() => Err(GeometryError::DimensionMismatch {
                expected: p.ambient_dimension(),
                found: h.dim(),
            }),
            Some(h) => Ok(p.with_carrier(h)),
            None => Ok(p),
        };
        match r {
            PolytopeRepr::Box { lo, hi, carrier } => attach(ConvexPolytope::axis_box(lo, hi)?, carrier),
            PolytopeRepr::Segment {
                vertices: [a, b],
                carrier,
            } => attach(ConvexPolytope::segment(a, b)?, carrier),
            PolytopeRepr::Polygon { vertices, carrier } => {
                let dim = vertices.first().map_or(0, Vec::len);
                if vertices.iter().any(|v| v.len() != dim) {
                    return Err(GeometryError::Invalid("ragged vertex list".into()));
                }
                match dim {
                    2 => {
                        let pts: Vec<[f64; 2]> = vertices.iter().map(|v| [v[0], v[1]]).collect();
                        attach(ConvexPolytope::polygon(&pts)?, carrier)
                    }
                    3 => {
                        if vertices.len() < 3 {
                            return Err(GeometryError::Invalid("a polygon needs at least 3 vertices".into()));
                        }
                        let coords = vertices.into_iter().flatten().collect();
                        attach(ConvexPolytope::from_shape(3, Shape::Polygon { coords }, None), carrier)
                    }
                    _ => Err(GeometryError::Unsupported(format!("polygons in dimension {dim}"))),
                }
            }
            PolytopeRepr::Polyhedron { vertices, faces } => ConvexPolytope::polyhedron(&vertices, &faces),
        }
    }
}

impl Serialize for ConvexPolytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PolytopeRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for ConvexPolytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = PolytopeRepr::deserialize(d)?;
        ConvexPolytope::try_from(r).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let shapes = vec![
            ConvexPolytope::unit_cube(3),
            ConvexPolytope::unit_cube(3).to_general(),
            ConvexPolytope::regular_polygon(7, 2.0).unwrap(),
        ];
        for p in shapes {
            let json = serde_json::to_string(&p).unwrap();
            let q: ConvexPolytope = serde_json::from_str(&json).unwrap();
            assert!((p.volume() - q.volume()).abs() < 1e-12);
            assert_eq!(p.num_vertices(), q.num_vertices());
        }
        let cube = ConvexPolytope::unit_cube(3).to_general();
        let h = Hyperplane::from_unnormalized(vec![1.0, 2.0, 3.0], 2.0).unwrap();
        let facet = cube.intersect_with_hyperplane(&h).unwrap().unwrap();
        let json = serde_json::to_string(&facet).unwrap();
        let back: ConvexPolytope = serde_json::from_str(&json).unwrap();
        assert_eq!(back.carrier(), facet.carrier());
        assert!((back.volume() - facet.volume()).abs() < 1e-12);
    }

    #[test]
    fn malformed_input_is_rejected() {
        let bad = r#"{"kind":"box","lo":[0,0],"hi":[1]}"#;
        assert!(serde_json::from_str::<ConvexPolytope>(bad).is_err());
        let bad = r#"{"kind":"polygon","vertices":[[0,0],[1,0],[0.5,0.2],[1,1],[0,1]]}"#;
        assert!(serde_json::from_str::<ConvexPolytope>(bad).is_err());
    }
}
