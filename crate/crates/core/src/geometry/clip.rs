//! Hyperplane clipping for boxes, polygons and polyhedra.

use std::collections::HashMap;

use super::polytope::{ConvexPolytope, Shape, Split};
use super::{dot, plane_basis, GeometryError, Hyperplane, Result, SNAP_TOLERANCE};

pub(crate) fn signed_area_2d(coords: &[f64]) -> f64 {
    let n = coords.len() / 2;
    let mut a = 0.0;
    for i in 0..n {
        let j = (i + 1) % n;
        a += coords[2 * i] * coords[2 * j + 1] - coords[2 * j] * coords[2 * i + 1];
    }
    0.5 * a
}

/// Newell's area vector of a 3D loop; its length is twice the area and it
/// points along the right-hand normal of the loop.
pub(crate) fn newell_normal(coords: &[f64], loop_: impl Iterator<Item = u32> + Clone) -> [f64; 3] {
    let first = loop_.clone().next();
    let mut n = [0.0; 3];
    let mut it = loop_.peekable();
    while let Some(i) = it.next() {
        let j = match it.peek() {
            Some(&j) => j,
            None => first.expect("non-empty loop"),
        };
        let (a, b) = (&coords[3 * i as usize..], &coords[3 * j as usize..]);
        n[0] += (a[1] - b[1]) * (a[2] + b[2]);
        n[1] += (a[2] - b[2]) * (a[0] + b[0]);
        n[2] += (a[0] - b[0]) * (a[1] + b[1]);
    }
    n
}

#[inline]
fn snapped(s: f64) -> f64 {
    if s.abs() <= SNAP_TOLERANCE {
        0.0
    } else {
        s
    }
}

fn crosses(s: &[f64]) -> bool {
    s.iter().any(|&x| x > 0.0) && s.iter().any(|&x| x < 0.0)
}

/// Axis coordinate of the axis-aligned hyperplane `h` with normal `±e_axis`.
fn axis_position(h: &Hyperplane, axis: usize) -> f64 {
    h.offset() * h.normal()[axis]
}

pub(crate) fn split_box(lo: &[f64], hi: &[f64], axis: usize, h: &Hyperplane) -> Result<Split> {
    let x = axis_position(h, axis);
    if !(x > lo[axis] + SNAP_TOLERANCE && x < hi[axis] - SNAP_TOLERANCE) {
        return Err(GeometryError::NonSplitting);
    }
    let dim = lo.len();
    let (mut lower_hi, mut upper_lo) = (hi.to_vec(), lo.to_vec());
    lower_hi[axis] = x;
    upper_lo[axis] = x;
    let lower = ConvexPolytope::from_shape(
        dim,
        Shape::Box {
            lo: lo.to_vec(),
            hi: lower_hi,
        },
        None,
    );
    let upper = ConvexPolytope::from_shape(
        dim,
        Shape::Box {
            lo: upper_lo,
            hi: hi.to_vec(),
        },
        None,
    );
    let interface = slice_at(lo, hi, axis, x).with_carrier(h.clone());
    let (plus, minus) = if h.normal()[axis] > 0.0 {
        (upper, lower)
    } else {
        (lower, upper)
    };
    Ok(Split {
        plus,
        minus,
        interface,
    })
}

fn slice_at(lo: &[f64], hi: &[f64], axis: usize, x: f64) -> ConvexPolytope {
    let (mut a, mut b) = (lo.to_vec(), hi.to_vec());
    a[axis] = x;
    b[axis] = x;
    ConvexPolytope::from_shape(lo.len(), Shape::Box { lo: a, hi: b }, None)
}

pub(crate) fn slice_box(lo: &[f64], hi: &[f64], axis: usize, h: &Hyperplane) -> Option<ConvexPolytope> {
    let x = axis_position(h, axis);
    (x > lo[axis] + SNAP_TOLERANCE && x < hi[axis] - SNAP_TOLERANCE)
        .then(|| slice_at(lo, hi, axis, x).with_carrier(h.clone()))
}

#[inline]
fn lerp(a: &[f64], b: &[f64], sa: f64, sb: f64) -> Vec<f64> {
    let t = sa / (sa - sb);
    a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
}

/// Endpoints of the chord through the on-plane points, ordered along the
/// line direction `(-n_y, n_x)`.
fn chord(points: &[Vec<f64>], h: &Hyperplane) -> Option<ConvexPolytope> {
    let dir = [-h.normal()[1], h.normal()[0]];
    let key = |p: &Vec<f64>| p[0] * dir[0] + p[1] * dir[1];
    let a = points.iter().min_by(|p, q| key(p).total_cmp(&key(q)))?;
    let b = points.iter().max_by(|p, q| key(p).total_cmp(&key(q)))?;
    if key(b) - key(a) <= SNAP_TOLERANCE {
        return None;
    }
    Some(
        ConvexPolytope::segment(a.clone(), b.clone())
            .expect("planar endpoints")
            .with_carrier(h.clone()),
    )
}

pub(crate) fn split_polygon(coords: &[f64], h: &Hyperplane) -> Result<Split> {
    let n = coords.len() / 2;
    let s: Vec<f64> = coords
        .chunks_exact(2)
        .map(|p| snapped(h.signed_distance(p)))
        .collect();
    if !crosses(&s) {
        return Err(GeometryError::NonSplitting);
    }
    let mut plus = Vec::with_capacity(coords.len() + 4);
    let mut minus = Vec::with_capacity(coords.len() + 4);
    let mut on_plane: Vec<Vec<f64>> = Vec::with_capacity(2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (&coords[2 * i..2 * i + 2], &coords[2 * j..2 * j + 2]);
        if s[i] >= 0.0 {
            plus.extend_from_slice(a);
        }
        if s[i] <= 0.0 {
            minus.extend_from_slice(a);
        }
        if s[i] == 0.0 {
            on_plane.push(a.to_vec());
        }
        if s[i] * s[j] < 0.0 {
            let p = lerp(a, b, s[i], s[j]);
            plus.extend_from_slice(&p);
            minus.extend_from_slice(&p);
            on_plane.push(p);
        }
    }
    let interface = chord(&on_plane, h).ok_or(GeometryError::NonSplitting)?;
    Ok(Split {
        plus: ConvexPolytope::from_shape(2, Shape::Polygon { coords: plus }, None),
        minus: ConvexPolytope::from_shape(2, Shape::Polygon { coords: minus }, None),
        interface,
    })
}

pub(crate) fn section_polygon(coords: &[f64], h: &Hyperplane) -> Option<ConvexPolytope> {
    let n = coords.len() / 2;
    let s: Vec<f64> = coords
        .chunks_exact(2)
        .map(|p| snapped(h.signed_distance(p)))
        .collect();
    if !crosses(&s) {
        return None;
    }
    let mut on_plane = Vec::with_capacity(2);
    for i in 0..n {
        let j = (i + 1) % n;
        let (a, b) = (&coords[2 * i..2 * i + 2], &coords[2 * j..2 * j + 2]);
        if s[i] == 0.0 {
            on_plane.push(a.to_vec());
        } else if s[i] * s[j] < 0.0 {
            on_plane.push(lerp(a, b, s[i], s[j]));
        }
    }
    chord(&on_plane, h)
}

/// A point on the cutting plane: an original vertex or an edge crossing.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum CutPoint {
    Vertex(u32),
    Edge(u32, u32),
}

/// Sorts on-plane points counter-clockwise around the plane normal `n`.
fn sort_around(points: &mut [(CutPoint, [f64; 3])], n: &[f64]) {
    let (e1, e2) = plane_basis(n);
    let k = points.len() as f64;
    let mut c = [0.0; 3];
    for (_, p) in points.iter() {
        (0..3).for_each(|i| c[i] += p[i] / k);
    }
    let angle = |p: &[f64; 3]| {
        let q = [p[0] - c[0], p[1] - c[1], p[2] - c[2]];
        dot(&q, &e2).atan2(dot(&q, &e1))
    };
    points.sort_by(|a, b| angle(&a.1).total_cmp(&angle(&b.1)));
}

struct Side {
    coords: Vec<f64>,
    map: HashMap<CutPoint, u32>,
    starts: Vec<u32>,
    indices: Vec<u32>,
}

impl Side {
    fn new(capacity: usize) -> Self {
        Side {
            coords: Vec::with_capacity(3 * capacity),
            map: HashMap::with_capacity(capacity),
            starts: vec![0],
            indices: Vec::new(),
        }
    }

    fn index(&mut self, key: CutPoint, point: &[f64]) -> u32 {
        let coords = &mut self.coords;
        *self.map.entry(key).or_insert_with(|| {
            coords.extend_from_slice(point);
            (coords.len() / 3 - 1) as u32
        })
    }

    fn push_face(&mut self, face: &[u32]) {
        if face.len() >= 3 {
            self.indices.extend_from_slice(face);
            self.starts.push(self.indices.len() as u32);
        }
    }

    fn finish(self) -> ConvexPolytope {
        ConvexPolytope::from_shape(
            3,
            Shape::Polyhedron {
                coords: self.coords,
                starts: self.starts,
                indices: self.indices,
            },
            None,
        )
    }
}

fn edge_point(coords: &[f64], s: &[f64], a: u32, b: u32) -> (CutPoint, [f64; 3]) {
    let (lo, hi) = (a.min(b), a.max(b));
    let (pa, pb) = (&coords[3 * lo as usize..3 * lo as usize + 3], &coords[3 * hi as usize..3 * hi as usize + 3]);
    let (sa, sb) = (s[lo as usize], s[hi as usize]);
    let t = sa / (sa - sb);
    (
        CutPoint::Edge(lo, hi),
        [
            pa[0] + t * (pb[0] - pa[0]),
            pa[1] + t * (pb[1] - pa[1]),
            pa[2] + t * (pb[2] - pa[2]),
        ],
    )
}

fn cap_loop(points: HashMap<CutPoint, [f64; 3]>, n: &[f64]) -> Option<Vec<(CutPoint, [f64; 3])>> {
    if points.len() < 3 {
        return None;
    }
    let mut pts: Vec<(CutPoint, [f64; 3])> = points.into_iter().collect();
    // Hash order is not deterministic; sort by coordinates first so that
    // ties in the angular sort resolve identically on every run.
    pts.sort_by(|a, b| a.1.partial_cmp(&b.1).expect("finite coordinates"));
    sort_around(&mut pts, n);
    let flat: Vec<f64> = pts.iter().flat_map(|(_, p)| *p).collect();
    let v = newell_normal(&flat, 0..pts.len() as u32);
    (0.5 * dot(&v, &v).sqrt() > SNAP_TOLERANCE * SNAP_TOLERANCE).then_some(pts)
}

pub(crate) fn split_polyhedron(coords: &[f64], starts: &[u32], indices: &[u32], h: &Hyperplane) -> Result<Split> {
    let nv = coords.len() / 3;
    let s: Vec<f64> = coords
        .chunks_exact(3)
        .map(|p| snapped(h.signed_distance(p)))
        .collect();
    if !crosses(&s) {
        return Err(GeometryError::NonSplitting);
    }
    let mut plus = Side::new(nv + 8);
    let mut minus = Side::new(nv + 8);
    let mut cap: HashMap<CutPoint, [f64; 3]> = HashMap::new();
    let mut pf = Vec::with_capacity(16);
    let mut mf = Vec::with_capacity(16);
    for w in starts.windows(2) {
        let face = &indices[w[0] as usize..w[1] as usize];
        pf.clear();
        mf.clear();
        for k in 0..face.len() {
            let (a, b) = (face[k], face[(k + 1) % face.len()]);
            let (sa, sb) = (s[a as usize], s[b as usize]);
            let pa = &coords[3 * a as usize..3 * a as usize + 3];
            if sa >= 0.0 {
                pf.push(plus.index(CutPoint::Vertex(a), pa));
            }
            if sa <= 0.0 {
                mf.push(minus.index(CutPoint::Vertex(a), pa));
            }
            if sa == 0.0 {
                cap.insert(CutPoint::Vertex(a), [pa[0], pa[1], pa[2]]);
            }
            if sa * sb < 0.0 {
                let (key, p) = edge_point(coords, &s, a, b);
                pf.push(plus.index(key, &p));
                mf.push(minus.index(key, &p));
                cap.insert(key, p);
            }
        }
        plus.push_face(&pf);
        minus.push_face(&mf);
    }
    let n = h.normal();
    let pts = cap_loop(cap, n).ok_or(GeometryError::NonSplitting)?;
    // `pts` runs counter-clockwise around `n`: outward for the minus side.
    let mf: Vec<u32> = pts.iter().map(|(k, p)| minus.index(*k, p)).collect();
    minus.push_face(&mf);
    let mut pf: Vec<u32> = pts.iter().map(|(k, p)| plus.index(*k, p)).collect();
    pf.reverse();
    plus.push_face(&pf);
    let interface = ConvexPolytope::from_shape(
        3,
        Shape::Polygon {
            coords: pts.iter().flat_map(|(_, p)| *p).collect(),
        },
        Some(h.clone()),
    );
    Ok(Split {
        plus: plus.finish(),
        minus: minus.finish(),
        interface,
    })
}

pub(crate) fn section_polyhedron(coords: &[f64], starts: &[u32], indices: &[u32], h: &Hyperplane) -> Option<ConvexPolytope> {
    let s: Vec<f64> = coords
        .chunks_exact(3)
        .map(|p| snapped(h.signed_distance(p)))
        .collect();
    if !crosses(&s) {
        return None;
    }
    let mut cap: HashMap<CutPoint, [f64; 3]> = HashMap::new();
    for w in starts.windows(2) {
        let face = &indices[w[0] as usize..w[1] as usize];
        for k in 0..face.len() {
            let (a, b) = (face[k], face[(k + 1) % face.len()]);
            let (sa, sb) = (s[a as usize], s[b as usize]);
            if sa == 0.0 {
                let pa = &coords[3 * a as usize..3 * a as usize + 3];
                cap.insert(CutPoint::Vertex(a), [pa[0], pa[1], pa[2]]);
            } else if sa * sb < 0.0 {
                let (key, p) = edge_point(coords, &s, a, b);
                cap.insert(key, p);
            }
        }
    }
    let pts = cap_loop(cap, h.normal())?;
    Some(ConvexPolytope::from_shape(
        3,
        Shape::Polygon {
            coords: pts.iter().flat_map(|(_, p)| *p).collect(),
        },
        Some(h.clone()),
    ))
}
