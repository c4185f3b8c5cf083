//! Static pictures of tessellations: SVG in the plane, Wavefront OBJ in
//! space.

use std::fmt::Write as _;
use std::str::FromStr;

use super::HarnessError;
use crate::geometry::{ConvexPolytope, ShapeKind};
use crate::mnw::Tessellation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RenderFormat {
    Svg,
    Obj,
}

impl FromStr for RenderFormat {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "svg" => Ok(RenderFormat::Svg),
            "obj" => Ok(RenderFormat::Obj),
            _ => Err(HarnessError::Unsupported(format!("render format `{s}`"))),
        }
    }
}

pub fn render(state: &Tessellation, format: RenderFormat) -> Result<String, HarnessError> {
    match (format, state.dimension()) {
        (RenderFormat::Svg, 2) => Ok(render_svg(state)),
        (RenderFormat::Obj, 3) => Ok(render_obj(state)),
        (f, d) => Err(HarnessError::Unsupported(format!("{f:?} output for d = {d}"))),
    }
}

/// Vertices of a 2-dimensional face in cyclic order.
fn face_loop(p: &ConvexPolytope) -> Vec<Vec<f64>> {
    let v = p.vertices();
    if p.kind() == ShapeKind::Box && v.len() == 4 {
        vec![v[0].clone(), v[1].clone(), v[3].clone(), v[2].clone()]
    } else {
        v
    }
}

/// Blue (early) to red (late).
fn ramp(x: f64) -> String {
    let x = x.clamp(0.0, 1.0);
    format!("rgb({},{},{})", (255.0 * x) as u8, 40, (255.0 * (1.0 - x)) as u8)
}

fn points_attr(loop_: &[Vec<f64>]) -> String {
    loop_
        .iter()
        .map(|p| format!("{},{}", p[0], p[1]))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Window outline, cells (once there is more than one) and maximal
/// segments coloured by birth time. The y axis points up.
pub fn render_svg(state: &Tessellation) -> String {
    let w = state.window();
    let (x0, x1) = w.support_range(&[1.0, 0.0]);
    let (y0, y1) = w.support_range(&[0.0, 1.0]);
    let stroke = 0.002 * (x1 - x0).max(y1 - y0);
    let horizon = state.horizon();
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"#,
        x0,
        -y1,
        x1 - x0,
        y1 - y0
    );
    let _ = writeln!(s, r#"<g transform="scale(1,-1)" fill="none" stroke-width="{stroke}">"#);
    let _ = writeln!(s, r#"<polygon class="window" stroke="black" points="{}"/>"#, points_attr(&face_loop(w)));
    if state.cells().len() > 1 {
        for c in state.cells() {
            let _ = writeln!(
                s,
                r#"<polygon class="cell" stroke="lightgray" points="{}"/>"#,
                points_attr(&face_loop(&c.polytope))
            );
        }
    }
    for m in state.maximal_polytopes() {
        let v = m.facet.vertices();
        let x = if horizon > 0.0 { m.birth_time / horizon } else { 0.0 };
        let _ = writeln!(
            s,
            r#"<line class="facet" data-birth="{}" stroke="{}" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
            m.birth_time,
            ramp(x),
            v[0][0],
            v[0][1],
            v[1][0],
            v[1][1]
        );
    }
    s.push_str("</g>\n</svg>\n");
    s
}

fn attr(tag: &str, name: &str) -> Option<f64> {
    let key = format!(" {name}=\"");
    let start = tag.find(&key)? + key.len();
    let end = start + tag[start..].find('"')?;
    tag[start..end].parse().ok()
}

/// Maximal segments `[x1, y1, x2, y2]` of an SVG written by [`render_svg`].
pub fn parse_svg_segments(svg: &str) -> Vec<[f64; 4]> {
    svg.lines()
        .filter(|l| l.contains("<line") && l.contains("class=\"facet\""))
        .filter_map(|l| Some([attr(l, "x1")?, attr(l, "y1")?, attr(l, "x2")?, attr(l, "y2")?]))
        .collect()
}

/// Number of `<polygon>` elements, the window outline included.
pub fn count_svg_polygons(svg: &str) -> usize {
    svg.matches("<polygon").count()
}

/// Window faces as object `window`, maximal polygons as object `facets`
/// with their birth times in comments.
pub fn render_obj(state: &Tessellation) -> String {
    let mut s = String::from("# STIT tessellation\n");
    let mut next = 1usize;
    let mut emit = |s: &mut String, face: &[Vec<f64>]| {
        for p in face {
            let _ = writeln!(s, "v {} {} {}", p[0], p[1], p[2]);
        }
        let idx: Vec<String> = (next..next + face.len()).map(|i| i.to_string()).collect();
        let _ = writeln!(s, "f {}", idx.join(" "));
        next += face.len();
    };
    let w = state.window().to_general();
    s.push_str("o window\n");
    if let Some(faces) = w.faces() {
        let verts = w.vertices();
        for f in faces {
            let face: Vec<Vec<f64>> = f.iter().map(|&i| verts[i].clone()).collect();
            emit(&mut s, &face);
        }
    }
    s.push_str("o facets\n");
    for m in state.maximal_polytopes() {
        let _ = writeln!(s, "# birth {}", m.birth_time);
        emit(&mut s, &face_loop(&m.facet));
    }
    s
}

/// Faces listed under `o facets` in an OBJ written by [`render_obj`].
pub fn count_obj_facets(obj: &str) -> usize {
    obj.split("o facets").nth(1).map_or(0, |rest| rest.lines().filter(|l| l.starts_with("f ")).count())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::HyperplaneMeasureSpec;
    use crate::mnw::run_mnw;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_tessellation_is_the_outline() {
        let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let st = run_mnw(ConvexPolytope::unit_cube(2), &spec, 0.0, &mut rng).unwrap();
        let svg = render_svg(&st);
        assert_eq!(count_svg_polygons(&svg), 1);
        assert!(parse_svg_segments(&svg).is_empty());
    }

    #[test]
    fn svg_round_trip() {
        let spec = HyperplaneMeasureSpec::isotropic(2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let st = run_mnw(ConvexPolytope::unit_cube(2), &spec, 5.0, &mut rng).unwrap();
        let segs = parse_svg_segments(&render_svg(&st));
        assert_eq!(segs.len(), st.maximal_polytopes().len());
        for (s, m) in segs.iter().zip(st.maximal_polytopes()) {
            let v = m.facet.vertices();
            assert_eq!(*s, [v[0][0], v[0][1], v[1][0], v[1][1]]);
        }
    }

    #[test]
    fn obj_lists_every_facet() {
        let spec = HyperplaneMeasureSpec::axis_aligned(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let st = run_mnw(ConvexPolytope::unit_cube(3), &spec, 2.0, &mut rng).unwrap();
        let obj = render_obj(&st);
        assert_eq!(count_obj_facets(&obj), st.maximal_polytopes().len());
        assert!(render(&st, RenderFormat::Svg).is_err());
    }
}
