use std::collections::HashMap;

use super::{
    clip, cross3, dist, dot, sub3, GeometryError, Hyperplane, Result, SNAP_TOLERANCE,
};

/// A bounded convex polytope.
///
/// Full-dimensional cells have `intrinsic_dimension() == ambient_dimension()`.
/// Facets and section cells have intrinsic dimension `d - 1` and carry the
/// hyperplane they lie in.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolytope {
    dim: usize,
    pub(crate) shape: Shape,
    carrier: Option<Hyperplane>,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Shape {
    /// Axis-aligned box; axes with `lo == hi` are degenerate.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Two endpoints, stored flat.
    Segment { coords: Vec<f64> },
    /// Vertex loop, stored flat with stride `dim`. Counter-clockwise in 2D;
    /// counter-clockwise around the carrier normal in 3D.
    Polygon { coords: Vec<f64> },
    /// 3D polyhedron. Face `f` is `indices[starts[f]..starts[f + 1]]`,
    /// counter-clockwise when seen from outside.
    Polyhedron {
        coords: Vec<f64>,
        starts: Vec<u32>,
        indices: Vec<u32>,
    },
}

/// Coarse shape classification, mostly for diagnostics and serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Box,
    Segment,
    Polygon,
    Polyhedron,
}

/// Result of cutting a polytope with a hyperplane.
#[derive(Clone, Debug)]
pub struct Split {
    /// The part on the side the hyperplane normal points to.
    pub plus: ConvexPolytope,
    pub minus: ConvexPolytope,
    /// `P ∩ H`, carried by `H`.
    pub interface: ConvexPolytope,
}

impl ConvexPolytope {
    pub(crate) fn from_shape(dim: usize, shape: Shape, carrier: Option<Hyperplane>) -> Self {
        ConvexPolytope {
            dim,
            shape,
            carrier,
        }
    }

    /// The box `[lo_1, hi_1] × … × [lo_d, hi_d]`.
    pub fn axis_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(GeometryError::EmptyPolytope);
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a.is_finite() && b.is_finite() && a <= b))
        {
            return Err(GeometryError::Invalid("box bounds must satisfy lo <= hi".into()));
        }
        Ok(ConvexPolytope {
            dim: lo.len(),
            shape: Shape::Box { lo, hi },
            carrier: None,
        })
    }

    /// `[0, side]^dim`.
    pub fn cube(dim: usize, side: f64) -> Self {
        Self::axis_box(vec![0.0; dim], vec![side; dim]).expect("valid cube")
    }

    pub fn unit_cube(dim: usize) -> Self {
        Self::cube(dim, 1.0)
    }

    /// Convex polygon in the plane. Orientation is normalized to
    /// counter-clockwise; non-convex or degenerate input is rejected.
    pub fn polygon(points: &[[f64; 2]]) -> Result<Self> {
        if points.len() < 3 {
            return Err(GeometryError::Invalid("a polygon needs at least 3 vertices".into()));
        }
        let mut coords: Vec<f64> = points.iter().flat_map(|p| [p[0], p[1]]).collect();
        if clip::signed_area_2d(&coords) < 0.0 {
            let n = points.len();
            coords = (0..n)
                .rev()
                .flat_map(|i| [points[i][0], points[i][1]])
                .collect();
        }
        if clip::signed_area_2d(&coords) <= 0.0 {
            return Err(GeometryError::Invalid("polygon has zero area".into()));
        }
        let n = points.len();
        for i in 0..n {
            let (a, b, c) = (i, (i + 1) % n, (i + 2) % n);
            let e1 = [coords[2 * b] - coords[2 * a], coords[2 * b + 1] - coords[2 * a + 1]];
            let e2 = [coords[2 * c] - coords[2 * b], coords[2 * c + 1] - coords[2 * b + 1]];
            let scale = (e1[0].hypot(e1[1]) * e2[0].hypot(e2[1])).max(f64::MIN_POSITIVE);
            if (e1[0] * e2[1] - e1[1] * e2[0]) < -1e-12 * scale {
                return Err(GeometryError::Invalid("polygon is not convex".into()));
            }
        }
        Ok(ConvexPolytope {
            dim: 2,
            shape: Shape::Polygon { coords },
            carrier: None,
        })
    }

    /// Regular `n`-gon inscribed in the circle of the given radius about the
    /// origin; used as a polygonal disk.
    pub fn regular_polygon(n: usize, radius: f64) -> Result<Self> {
        if n < 3 || !(radius > 0.0) {
            return Err(GeometryError::Invalid("regular polygon needs n >= 3 and radius > 0".into()));
        }
        let coords = (0..n)
            .flat_map(|k| {
                let a = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                [radius * a.cos(), radius * a.sin()]
            })
            .collect();
        Ok(ConvexPolytope {
            dim: 2,
            shape: Shape::Polygon { coords },
            carrier: None,
        })
    }

    /// The closed segment `[a, b]`.
    pub fn segment(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(GeometryError::DimensionMismatch {
                expected: a.len(),
                found: b.len(),
            });
        }
        let dim = a.len();
        let mut coords = a;
        coords.extend(b);
        Ok(ConvexPolytope {
            dim,
            shape: Shape::Segment { coords },
            carrier: None,
        })
    }

    /// A 3D polyhedron from vertices and face loops. Each face is reoriented
    /// to be counter-clockwise from outside; the vertex set must be in convex
    /// position.
    pub fn polyhedron(vertices: &[[f64; 3]], faces: &[Vec<usize>]) -> Result<Self> {
        if vertices.len() < 4 || faces.len() < 4 {
            return Err(GeometryError::Invalid("a polyhedron needs at least 4 vertices and faces".into()));
        }
        let coords: Vec<f64> = vertices.iter().flat_map(|v| v.iter().copied()).collect();
        let centre = {
            let mut c = [0.0; 3];
            for v in vertices {
                (0..3).for_each(|k| c[k] += v[k] / vertices.len() as f64);
            }
            c
        };
        let mut starts = vec![0u32];
        let mut indices = Vec::new();
        for face in faces {
            if face.len() < 3 || face.iter().any(|&i| i >= vertices.len()) {
                return Err(GeometryError::Invalid("bad face loop".into()));
            }
            let n = clip::newell_normal(&coords, face.iter().map(|&i| i as u32));
            let p = vertices[face[0]];
            let outward = dot(&n, &sub3(&p, &centre)) > 0.0;
            if outward {
                indices.extend(face.iter().map(|&i| i as u32));
            } else {
                indices.extend(face.iter().rev().map(|&i| i as u32));
            }
            starts.push(indices.len() as u32);
        }
        let p = ConvexPolytope {
            dim: 3,
            shape: Shape::Polyhedron {
                coords,
                starts,
                indices,
            },
            carrier: None,
        };
        for v in vertices {
            if !p.contains_with_tolerance(v, 1e-9) {
                return Err(GeometryError::Invalid("vertices are not in convex position".into()));
            }
        }
        if p.volume() <= 0.0 {
            return Err(GeometryError::Invalid("polyhedron has zero volume".into()));
        }
        Ok(p)
    }

    pub fn tetrahedron(p: [[f64; 3]; 4]) -> Result<Self> {
        let faces = vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]];
        Self::polyhedron(&p, &faces)
    }

    /// Geodesic polyhedron inscribed in the sphere of the given radius about
    /// the origin: an icosahedron with each triangle subdivided
    /// `subdivisions` times (20·4^k faces).
    pub fn icosphere(subdivisions: u32, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(GeometryError::Invalid("radius must be positive".into()));
        }
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<[f64; 3]> = vec![
            [-1.0, t, 0.0],
            [1.0, t, 0.0],
            [-1.0, -t, 0.0],
            [1.0, -t, 0.0],
            [0.0, -1.0, t],
            [0.0, 1.0, t],
            [0.0, -1.0, -t],
            [0.0, 1.0, -t],
            [t, 0.0, -1.0],
            [t, 0.0, 1.0],
            [-t, 0.0, -1.0],
            [-t, 0.0, 1.0],
        ];
        let unit = |v: [f64; 3]| {
            let l = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            [v[0] / l, v[1] / l, v[2] / l]
        };
        verts.iter_mut().for_each(|v| *v = unit(*v));
        let mut tris: Vec<[usize; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
            let mut mid = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| -> usize {
                let key = (a.min(b), a.max(b));
                *midpoint.entry(key).or_insert_with(|| {
                    let (p, q) = (verts[a], verts[b]);
                    verts.push(unit([p[0] + q[0], p[1] + q[1], p[2] + q[2]]));
                    verts.len() - 1
                })
            };
            let mut next = Vec::with_capacity(tris.len() * 4);
            for [a, b, c] in tris {
                let ab = mid(a, b, &mut verts);
                let bc = mid(b, c, &mut verts);
                let ca = mid(c, a, &mut verts);
                next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
            }
            tris = next;
        }
        let verts: Vec<[f64; 3]> = verts
            .into_iter()
            .map(|v| [v[0] * radius, v[1] * radius, v[2] * radius])
            .collect();
        let faces: Vec<Vec<usize>> = tris.into_iter().map(|t| t.to_vec()).collect();
        Self::polyhedron(&verts, &faces)
    }

    /// Polytope approximation of the ball of the given radius about the
    /// origin: a 512-gon in 2D, a 3-times subdivided icosphere in 3D.
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        match dim {
            2 => Self::regular_polygon(512, radius),
            3 => Self::icosphere(3, radius),
            _ => Err(GeometryError::Unsupported(format!("ball windows in dimension {dim}"))),
        }
    }

    pub fn ambient_dimension(&self) -> usize {
        self.dim
    }

    pub fn intrinsic_dimension(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, hi } => lo.iter().zip(hi).filter(|(a, b)| b > a).count(),
            Shape::Segment { .. } => 1,
            Shape::Polygon { .. } => 2,
            Shape::Polyhedron { .. } => 3,
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match &self.shape {
            Shape::Box { .. } => ShapeKind::Box,
            Shape::Segment { .. } => ShapeKind::Segment,
            Shape::Polygon { .. } => ShapeKind::Polygon,
            Shape::Polyhedron { .. } => ShapeKind::Polyhedron,
        }
    }

    pub fn carrier(&self) -> Option<&Hyperplane> {
        self.carrier.as_ref()
    }

    pub(crate) fn with_carrier(mut self, carrier: Hyperplane) -> Self {
        self.carrier = Some(carrier);
        self
    }

    /// Box bounds, if this is an axis-aligned box.
    pub fn box_bounds(&self) -> Option<(&[f64], &[f64])> {
        match &self.shape {
            Shape::Box { lo, hi } => Some((lo, hi)),
            _ => None,
        }
    }

    /// Flat vertex coordinates for vertex-represented shapes.
    pub(crate) fn coords(&self) -> Option<&[f64]> {
        match &self.shape {
            Shape::Segment { coords } | Shape::Polygon { coords } | Shape::Polyhedron { coords, .. } => {
                Some(coords)
            }
            Shape::Box { .. } => None,
        }
    }

    /// All vertices. For boxes these are the distinct corners.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let free: Vec<usize> = (0..self.dim).filter(|&i| hi[i] > lo[i]).collect();
                (0..1usize << free.len())
                    .map(|mask| {
                        let mut p = lo.clone();
                        for (bit, &axis) in free.iter().enumerate() {
                            if mask >> bit & 1 == 1 {
                                p[axis] = hi[axis];
                            }
                        }
                        p
                    })
                    .collect()
            }
            _ => self
                .coords()
                .expect("vertex shape")
                .chunks_exact(self.dim)
                .map(<[f64]>::to_vec)
                .collect(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        match &self.shape {
            Shape::Box { lo, hi } => 1 << lo.iter().zip(hi).filter(|(a, b)| b > a).count(),
            _ => self.coords().map_or(0, |c| c.len() / self.dim),
        }
    }

    /// Face loops (vertex indices) of a polyhedron.
    pub fn faces(&self) -> Option<Vec<Vec<usize>>> {
        match &self.shape {
            Shape::Polyhedron { starts, indices, .. } => Some(
                starts
                    .windows(2)
                    .map(|w| indices[w[0] as usize..w[1] as usize].iter().map(|&i| i as usize).collect())
                    .collect(),
            ),
            _ => None,
        }
    }

    /// `h(P, u) = max_v <v, u>`.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        self.check_dim(u.len())?;
        Ok(self.support_range(u).1)
    }

    /// `(min_v <v, u>, max_v <v, u>)` over the vertices.
    pub fn support_range(&self, u: &[f64]) -> (f64, f64) {
        match &self.shape {
            Shape::Box { lo, hi } => {
                let (mut mn, mut mx) = (0.0, 0.0);
                for i in 0..self.dim {
                    let (a, b) = (lo[i] * u[i], hi[i] * u[i]);
                    mn += a.min(b);
                    mx += a.max(b);
                }
                (mn, mx)
            }
            _ => {
                let (mut mn, mut mx) = (f64::INFINITY, f64::NEG_INFINITY);
                for v in self.coords().expect("vertex shape").chunks_exact(self.dim) {
                    let p = dot(v, u);
                    mn = mn.min(p);
                    mx = mx.max(p);
                }
                (mn, mx)
            }
        }
    }

    /// Extent of the projection onto the line spanned by the unit vector `u`.
    pub fn width(&self, u: &[f64]) -> f64 {
        let (a, b) = self.support_range(u);
        b - a
    }

    /// Intrinsic volume of the polytope's own dimension (length, area, …).
    /// Degenerate vertex sets give 0.
    pub fn volume(&self) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .map(|(a, b)| b - a)
                .filter(|e| *e > 0.0)
                .product(),
            Shape::Segment { coords } => dist(&coords[..self.dim], &coords[self.dim..]),
            Shape::Polygon { coords } => match self.dim {
                2 => clip::signed_area_2d(coords).abs(),
                3 => {
                    let n = clip::newell_normal(coords, 0..(coords.len() / 3) as u32);
                    0.5 * dot(&n, &n).sqrt()
                }
                _ => 0.0,
            },
            Shape::Polyhedron {
                coords,
                starts,
                indices,
            } => {
                let r = &coords[0..3];
                let mut six_v = 0.0;
                for w in starts.windows(2) {
                    let face = &indices[w[0] as usize..w[1] as usize];
                    let a = &coords[3 * face[0] as usize..3 * face[0] as usize + 3];
                    let ra = sub3(a, r);
                    for k in 1..face.len() - 1 {
                        let b = &coords[3 * face[k] as usize..3 * face[k] as usize + 3];
                        let c = &coords[3 * face[k + 1] as usize..3 * face[k + 1] as usize + 3];
                        six_v += dot(&ra, &cross3(sub3(b, r), sub3(c, r)));
                    }
                }
                (six_v / 6.0).max(0.0)
            }
        }
    }

    /// Largest distance between two vertices.
    pub fn diameter(&self) -> f64 {
        match &self.shape {
            Shape::Box { lo, hi } => dist(lo, hi),
            _ => {
                let c = self.coords().expect("vertex shape");
                let d = self.dim;
                let n = c.len() / d;
                let mut best2: f64 = 0.0;
                for i in 0..n {
                    for j in i + 1..n {
                        let mut s = 0.0;
                        for k in 0..d {
                            let t = c[i * d + k] - c[j * d + k];
                            s += t * t;
                        }
                        best2 = best2.max(s);
                    }
                }
                best2.sqrt()
            }
        }
    }

    /// Boundary length of a 2D-intrinsic polytope (polygon or 2D box).
    pub fn perimeter(&self) -> Option<f64> {
        match &self.shape {
            Shape::Polygon { coords } => {
                let d = self.dim;
                let n = coords.len() / d;
                Some(
                    (0..n)
                        .map(|i| {
                            let j = (i + 1) % n;
                            dist(&coords[i * d..i * d + d], &coords[j * d..j * d + d])
                        })
                        .sum(),
                )
            }
            Shape::Box { lo, hi } if self.intrinsic_dimension() == 2 => Some(
                2.0 * lo.iter().zip(hi).map(|(a, b)| b - a).sum::<f64>(),
            ),
            _ => None,
        }
    }

    /// Vertex average.
    pub fn centroid(&self) -> Vec<f64> {
        match &self.shape {
            Shape::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| 0.5 * (a + b)).collect(),
            _ => {
                let c = self.coords().expect("vertex shape");
                let n = (c.len() / self.dim) as f64;
                let mut m = vec![0.0; self.dim];
                for v in c.chunks_exact(self.dim) {
                    m.iter_mut().zip(v).for_each(|(a, b)| *a += b / n);
                }
                m
            }
        }
    }

    /// Closed-membership test for full-dimensional polytopes, with the
    /// default snap tolerance.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_with_tolerance(x, SNAP_TOLERANCE)
    }

    /// Membership with an explicit tolerance; a negative tolerance tests
    /// for points strictly inside.
    pub fn contains_with_tolerance(&self, x: &[f64], tol: f64) -> bool {
        if x.len() != self.dim {
            return false;
        }
        match &self.shape {
            Shape::Box { lo, hi } => (0..self.dim).all(|i| x[i] >= lo[i] - tol && x[i] <= hi[i] + tol),
            Shape::Polygon { coords } if self.dim == 2 => {
                let n = coords.len() / 2;
                (0..n).all(|i| {
                    let j = (i + 1) % n;
                    let e = [coords[2 * j] - coords[2 * i], coords[2 * j + 1] - coords[2 * i + 1]];
                    let w = [x[0] - coords[2 * i], x[1] - coords[2 * i + 1]];
                    e[0] * w[1] - e[1] * w[0] >= -tol * e[0].hypot(e[1])
                })
            }
            Shape::Polyhedron {
                coords,
                starts,
                indices,
            } => starts.windows(2).all(|w| {
                let face = &indices[w[0] as usize..w[1] as usize];
                let n = clip::newell_normal(coords, face.iter().copied());
                let ln = dot(&n, &n).sqrt();
                let a = &coords[3 * face[0] as usize..3 * face[0] as usize + 3];
                dot(&n, &sub3(x, a)) <= tol * ln
            }),
            _ => false,
        }
    }

    /// The polytope scaled by `factor` about the origin.
    pub fn scaled(&self, factor: f64) -> Self {
        let shape = match &self.shape {
            Shape::Box { lo, hi } => {
                let (a, b): (Vec<f64>, Vec<f64>) = lo
                    .iter()
                    .zip(hi)
                    .map(|(l, h)| {
                        let (x, y) = (l * factor, h * factor);
                        (x.min(y), x.max(y))
                    })
                    .unzip();
                Shape::Box { lo: a, hi: b }
            }
            Shape::Segment { coords } => Shape::Segment {
                coords: coords.iter().map(|c| c * factor).collect(),
            },
            Shape::Polygon { coords } => Shape::Polygon {
                coords: coords.iter().map(|c| c * factor).collect(),
            },
            Shape::Polyhedron {
                coords,
                starts,
                indices,
            } => Shape::Polyhedron {
                coords: coords.iter().map(|c| c * factor).collect(),
                starts: starts.clone(),
                indices: indices.clone(),
            },
        };
        ConvexPolytope {
            dim: self.dim,
            shape,
            carrier: self.carrier.as_ref().map(|h| h.scaled(factor)),
        }
    }

    /// Vertex representation of a full-dimensional box in 2D or 3D; any
    /// other polytope is returned unchanged.
    pub fn to_general(&self) -> Self {
        let Shape::Box { lo, hi } = &self.shape else {
            return self.clone();
        };
        if self.intrinsic_dimension() != self.dim {
            return self.clone();
        }
        match self.dim {
            2 => ConvexPolytope {
                dim: 2,
                shape: Shape::Polygon {
                    coords: vec![lo[0], lo[1], hi[0], lo[1], hi[0], hi[1], lo[0], hi[1]],
                },
                carrier: None,
            },
            3 => {
                let v: Vec<[f64; 3]> = (0..8)
                    .map(|m| {
                        [
                            if m & 1 == 0 { lo[0] } else { hi[0] },
                            if m & 2 == 0 { lo[1] } else { hi[1] },
                            if m & 4 == 0 { lo[2] } else { hi[2] },
                        ]
                    })
                    .collect();
                let faces = vec![
                    vec![0, 2, 3, 1],
                    vec![4, 5, 7, 6],
                    vec![0, 1, 5, 4],
                    vec![2, 6, 7, 3],
                    vec![0, 4, 6, 2],
                    vec![1, 3, 7, 5],
                ];
                Self::polyhedron(&v, &faces).expect("box corners form a polyhedron")
            }
            _ => self.clone(),
        }
    }

    /// Cuts the polytope into the parts on either side of `h`.
    ///
    /// Fails with [`GeometryError::NonSplitting`] unless some vertex lies
    /// strictly (beyond the snap tolerance) on each side.
    pub fn split(&self, h: &Hyperplane) -> Result<Split> {
        self.check_dim(h.dim())?;
        if self.intrinsic_dimension() != self.dim {
            return Err(GeometryError::Unsupported(
                "only full-dimensional polytopes can be split".into(),
            ));
        }
        match &self.shape {
            Shape::Box { lo, hi } => match h.axis_index() {
                Some(axis) => clip::split_box(lo, hi, axis, h),
                None if self.dim == 2 || self.dim == 3 => self.to_general().split(h),
                None => Err(GeometryError::Unsupported(format!(
                    "oblique hyperplanes in dimension {}",
                    self.dim
                ))),
            },
            Shape::Polygon { coords } => clip::split_polygon(coords, h),
            Shape::Polyhedron {
                coords,
                starts,
                indices,
            } => clip::split_polyhedron(coords, starts, indices, h),
            Shape::Segment { .. } => Err(GeometryError::Unsupported("splitting segments".into())),
        }
    }

    /// `P ∩ H` as a `(d-1)`-polytope carried by `H`, or `None` when the
    /// intersection is lower-dimensional (including when `H` only touches the
    /// boundary).
    pub fn intersect_with_hyperplane(&self, h: &Hyperplane) -> Result<Option<ConvexPolytope>> {
        self.check_dim(h.dim())?;
        if self.intrinsic_dimension() != self.dim {
            return Err(GeometryError::Unsupported(
                "sections of lower-dimensional polytopes".into(),
            ));
        }
        match &self.shape {
            Shape::Box { lo, hi } => match h.axis_index() {
                Some(axis) => Ok(clip::slice_box(lo, hi, axis, h)),
                None if self.dim == 2 || self.dim == 3 => self.to_general().intersect_with_hyperplane(h),
                None => Err(GeometryError::Unsupported(format!(
                    "oblique hyperplanes in dimension {}",
                    self.dim
                ))),
            },
            Shape::Polygon { coords } => Ok(clip::section_polygon(coords, h)),
            Shape::Polyhedron {
                coords,
                starts,
                indices,
            } => Ok(clip::section_polyhedron(coords, starts, indices, h)),
            Shape::Segment { .. } => Err(GeometryError::Unsupported("sections of segments".into())),
        }
    }

    /// Edge lengths of a polyhedron with the angle between the outward
    /// normals of the two adjacent faces (π minus the dihedral angle).
    pub(crate) fn edges_with_exterior_angles(&self) -> Option<Vec<(f64, f64)>> {
        let Shape::Polyhedron {
            coords,
            starts,
            indices,
        } = &self.shape
        else {
            return None;
        };
        let nf = starts.len() - 1;
        let normals: Vec<[f64; 3]> = (0..nf)
            .map(|f| {
                let face = &indices[starts[f] as usize..starts[f + 1] as usize];
                let n = clip::newell_normal(coords, face.iter().copied());
                let l = dot(&n, &n).sqrt();
                [n[0] / l, n[1] / l, n[2] / l]
            })
            .collect();
        let mut owner: HashMap<(u32, u32), usize> = HashMap::with_capacity(indices.len());
        for f in 0..nf {
            let face = &indices[starts[f] as usize..starts[f + 1] as usize];
            for k in 0..face.len() {
                owner.insert((face[k], face[(k + 1) % face.len()]), f);
            }
        }
        let mut out = Vec::with_capacity(indices.len() / 2);
        for (&(a, b), &f) in &owner {
            if a > b {
                continue;
            }
            let Some(&g) = owner.get(&(b, a)) else {
                continue;
            };
            let len = dist(
                &coords[3 * a as usize..3 * a as usize + 3],
                &coords[3 * b as usize..3 * b as usize + 3],
            );
            let c = dot(&normals[f], &normals[g]).clamp(-1.0, 1.0);
            out.push((len, c.acos()));
        }
        Some(out)
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(GeometryError::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    #[test]
    fn support_function_examples() {
        let sq = ConvexPolytope::unit_cube(2);
        assert_eq!(sq.support(&[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(sq.support(&[-1.0, 0.0]).unwrap(), 0.0);
        let cube = ConvexPolytope::unit_cube(3);
        let u = [1.0 / SQRT3; 3];
        assert!((cube.support(&u).unwrap() - SQRT3).abs() < 1e-12);
        assert!((cube.to_general().support(&u).unwrap() - SQRT3).abs() < 1e-12);
    }

    #[test]
    fn support_dimension_mismatch() {
        let sq = ConvexPolytope::unit_cube(2);
        assert!(matches!(
            sq.support(&[1.0, 0.0, 0.0]),
            Err(GeometryError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_inputs_are_rejected() {
        assert_eq!(
            ConvexPolytope::axis_box(vec![], vec![]),
            Err(GeometryError::EmptyPolytope)
        );
        assert!(ConvexPolytope::polygon(&[[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn volume_examples() {
        assert_eq!(ConvexPolytope::unit_cube(2).volume(), 1.0);
        assert!((ConvexPolytope::unit_cube(2).to_general().volume() - 1.0).abs() < 1e-15);
        let seg = ConvexPolytope::segment(vec![0.0, 0.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(seg.volume(), 1.0);
        for r in [0.5, 2.0, 3.7] {
            let c = ConvexPolytope::unit_cube(3).to_general().scaled(r);
            assert!((c.volume() - r * r * r).abs() < 1e-12 * r * r * r);
        }
        let degenerate = ConvexPolytope::axis_box(vec![0.0, 0.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(degenerate.intrinsic_dimension(), 1);
        assert_eq!(degenerate.volume(), 1.0);
    }

    #[test]
    fn diameter_examples() {
        assert!((ConvexPolytope::unit_cube(2).diameter() - 2f64.sqrt()).abs() < 1e-15);
        assert!((ConvexPolytope::unit_cube(2).to_general().diameter() - 2f64.sqrt()).abs() < 1e-15);
        let seg = ConvexPolytope::segment(vec![1.0, 1.0], vec![4.0, 5.0]).unwrap();
        assert!((seg.diameter() - 5.0).abs() < 1e-15);
        assert!((ConvexPolytope::unit_cube(3).to_general().diameter() - SQRT3).abs() < 1e-15);
    }

    #[test]
    fn polygon_orientation_and_convexity() {
        let cw = ConvexPolytope::polygon(&[[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]]).unwrap();
        assert!((cw.volume() - 1.0).abs() < 1e-15);
        assert!(cw.contains(&[0.5, 0.5]));
        assert!(ConvexPolytope::polygon(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.2], [1.0, 2.0]]).is_err());
    }

    #[test]
    fn icosphere_approximates_the_ball() {
        let b = ConvexPolytope::icosphere(3, 1.0).unwrap();
        assert_eq!(b.faces().unwrap().len(), 1280);
        let v = b.volume();
        let exact = 4.0 / 3.0 * std::f64::consts::PI;
        assert!(v < exact && v > 0.98 * exact, "volume {v}");
        assert!(b.contains(&[0.0, 0.0, 0.0]));
        assert!(!b.contains(&[0.0, 0.0, 1.01]));
    }

    #[test]
    fn tetrahedron_volume() {
        let t = ConvexPolytope::tetrahedron([
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        .unwrap();
        assert!((t.volume() - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn cube_exterior_angles() {
        let edges = ConvexPolytope::unit_cube(3)
            .to_general()
            .edges_with_exterior_angles()
            .unwrap();
        assert_eq!(edges.len(), 12);
        for (l, a) in edges {
            assert!((l - 1.0).abs() < 1e-15);
            assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        }
    }
}
