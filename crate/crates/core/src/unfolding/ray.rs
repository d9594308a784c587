//! Straight-line flow on the surface.

use crate::error::{FlatError, Result};
use crate::polygon::barycentric;
use crate::scalar::{lit, Placement, Scalar, Vec2};
use crate::surface::{FlatSurface, SurfacePoint};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Terminal {
    /// Stopped at a singular vertex class.
    ConePoint(usize),
    /// Consumed the full length.
    Cutoff,
}

/// Portion of a trajectory inside one polygon, in that polygon's chart.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RaySegment<T> {
    pub polygon: usize,
    pub entry: Vec2<T>,
    pub exit: Vec2<T>,
}

#[derive(Clone, Debug)]
pub struct Trajectory<T> {
    pub start: SurfacePoint<T>,
    /// Unit direction in the start polygon's chart.
    pub direction: Vec2<T>,
    pub segments: Vec<RaySegment<T>>,
    pub length: T,
    pub terminal: Terminal,
    /// Final position and unit direction in the final polygon's chart.
    pub end: SurfacePoint<T>,
    pub end_direction: Vec2<T>,
    /// Regular vertex classes passed straight through.
    pub regular_passages: Vec<usize>,
}

/// Developed state of the walker: current triangle and its chart→plane map.
/// The ray is `s ↦ s·dir` in the developed plane.
struct Walker<T> {
    tri: usize,
    placement: Placement<T>,
    /// Corner of `tri` the ray currently sits on, if any.
    at_corner: Option<usize>,
    entry: Option<usize>,
}

/// Initial triangle for a ray leaving chart point `p` of polygon `poly` in
/// chart direction `d`; returns the triangle, its chart, and the start corner.
pub(crate) fn start_cell<T: Scalar>(
    s: &FlatSurface<T>,
    poly: usize,
    p: Vec2<T>,
    d: Vec2<T>,
) -> Result<(usize, Placement<T>, Option<usize>)> {
    let mesh = s.mesh();
    let tol = s.tolerance();
    let not_on = || FlatError::PointNotOnSurface(format!("polygon {poly} at ({}, {})", p.x, p.y));
    if poly >= mesh.poly_tris.len() {
        return Err(not_on());
    }
    // a vertex start: pick the corner whose wedge contains d
    if s.vertex_class_at(&SurfacePoint::new(poly, p)).is_some() {
        for &t in &mesh.poly_tris[poly] {
            for c in 0..3 {
                let tri = &mesh.tris[t];
                if tri.pts[c].dist(p) > tol {
                    continue;
                }
                let e1 = tri.pts[(c + 1) % 3] - tri.pts[c];
                let a = e1.ccw_angle_to(d);
                let wedge = tri.corner_angle(c);
                let gap = T::PI() + T::PI() - wedge;
                if a < wedge || a > T::PI() + T::PI() - gap * lit(1e-9) {
                    return Ok((t, Placement::translation(-tri.pts[c]), Some(c)));
                }
            }
        }
        return Err(FlatError::InvalidParameter(format!(
            "direction ({}, {}) leaves polygon {poly} at a vertex",
            d.x, d.y
        )));
    }
    let scale = mesh.tris[mesh.poly_tris[poly][0]].pts[0].norm().max(T::one());
    let eta = scale * lit::<T>(1e-7).max(T::geometric_eps() * lit(100.0));
    let probe = p + d.scale(eta);
    let t = mesh.locate(poly, p, tol).ok_or_else(not_on)?;
    if let Some(tp) = mesh.locate(poly, probe, T::zero()) {
        let tri = &mesh.tris[tp];
        let l = barycentric(p, tri.pts[0], tri.pts[1], tri.pts[2]);
        if l.iter().all(|&x| x >= -tol) {
            return Ok((tp, Placement::translation(-p), None));
        }
    }
    // leaving the polygon through a side: start in the neighbour
    let tri = &mesh.tris[t];
    for e in 0..3 {
        let a = tri.pts[e];
        let b = tri.pts[(e + 1) % 3];
        if crate::polygon::point_segment_distance(p, a, b) <= tol && (b - a).cross(d) < T::zero() {
            let (t2, _, pl) = mesh.cross(t, e, &Placement::translation(-p));
            return Ok((t2, pl, None));
        }
    }
    Ok((t, Placement::translation(-p), None))
}

/// [`start_cell`], also accepting a start at a regular vertex whose wedges in
/// `poly` miss `d`; returns the developed direction to walk along.
fn start_frame<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    d: Vec2<T>,
) -> Result<(usize, Placement<T>, Option<usize>, Vec2<T>)> {
    match start_cell(s, p.polygon, p.position, d) {
        Ok((t, pl, c)) => Ok((t, pl, c, d)),
        Err(e) => {
            let Some(class) = s.vertex_class_at(p) else { return Err(e) };
            if s.is_singular(class) {
                return Err(e);
            }
            let mesh = s.mesh();
            let tol = s.tolerance();
            let Some((t, c)) = mesh.poly_tris[p.polygon]
                .iter()
                .flat_map(|&t| (0..3).map(move |c| (t, c)))
                .find(|&(t, c)| mesh.tris[t].pts[c].dist(p.position) <= tol)
            else {
                return Err(e);
            };
            let (_, idx) = mesh.corner_info[t][c];
            let tri = &mesh.tris[t];
            let a = (tri.pts[(c + 1) % 3] - tri.pts[c]).ccw_angle_to(d);
            let (t2, c2, d2) = mesh.direction_at(class, mesh.stars[class].offsets[idx] + a);
            Ok((t2, Placement::translation(-mesh.tris[t2].pts[c2]), Some(c2), d2.normalized()))
        }
    }
}

/// Straight-line flow from `p` in direction angle `theta` (in `p`'s polygon
/// chart) for length `len`, stopping early at singular vertices.
pub fn develop_ray<T: Scalar>(s: &FlatSurface<T>, p: &SurfacePoint<T>, theta: T, len: T) -> Result<Trajectory<T>> {
    if !(len > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("ray length must be positive, got {len}")));
    }
    let (tri, placement, at_corner, d) = start_frame(s, p, Vec2::from_angle(theta))?;
    let (mut traj, _) = walk(s, Walker { tri, placement, at_corner, entry: None }, d, len)?;
    traj.start = *p;
    Ok(traj)
}

/// Triangles visited by a developed walk with their chart→plane maps. The
/// ray runs from the origin along its unit direction in the developed plane.
pub(crate) type Cells<T> = Vec<(usize, Placement<T>)>;

/// Like [`develop_ray`] with a direction vector, also returning the cells.
pub(crate) fn trace<T: Scalar>(s: &FlatSurface<T>, p: &SurfacePoint<T>, dir: Vec2<T>, len: T) -> Result<(Trajectory<T>, Cells<T>)> {
    let (tri, placement, at_corner, d) = start_frame(s, p, dir.normalized())?;
    let (mut traj, cells) = walk(s, Walker { tri, placement, at_corner, entry: None }, d, len)?;
    traj.start = *p;
    Ok((traj, cells))
}

/// Flow leaving vertex `class` at star angle coordinate `angle`.
pub(crate) fn trace_from_vertex<T: Scalar>(
    s: &FlatSurface<T>,
    class: usize,
    angle: T,
    len: T,
) -> Result<(Trajectory<T>, Cells<T>)> {
    let mesh = s.mesh();
    let (t, c, d) = mesh.direction_at(class, angle);
    let placement = Placement::translation(-mesh.tris[t].pts[c]);
    walk(s, Walker { tri: t, placement, at_corner: Some(c), entry: None }, d.normalized(), len)
}

/// Walks the developed ray `s ↦ s·dir` from the origin.
fn walk<T: Scalar>(
    s: &FlatSurface<T>,
    mut w: Walker<T>,
    dir: Vec2<T>,
    len: T,
) -> Result<(Trajectory<T>, Cells<T>)> {
    let mesh = s.mesh();
    let tol = s.tolerance();
    let chart = |w: &Walker<T>, x: T| w.placement.unapply(dir.scale(x));
    let start_pt = SurfacePoint::new(mesh.tris[w.tri].polygon, chart(&w, T::zero()));
    let mut segments: Vec<RaySegment<T>> = Vec::new();
    let mut regular_passages = Vec::new();
    let mut pos = T::zero();
    let mut seg_start = T::zero();
    let mut cells = Vec::new();
    let mut steps = 0usize;
    let max_steps = 100_000_000usize;
    loop {
        steps += 1;
        if steps > max_steps {
            return Err(FlatError::BudgetExhausted { budget: max_steps });
        }
        let tri = &mesh.tris[w.tri];
        cells.push((w.tri, w.placement));
        let pts: [Vec2<T>; 3] = [0, 1, 2].map(|k| w.placement.apply(tri.pts[k]));
        let along = |x: T| x > pos + tol * lit(1e-3);
        // nearest vertex on the ray ahead
        let mut vhit: Option<(T, usize)> = None;
        for k in 0..3 {
            if Some(k) == w.at_corner {
                continue;
            }
            let sk = pts[k].dot(dir);
            let perp = dir.cross(pts[k]).abs();
            if along(sk) && perp <= tol && vhit.is_none_or(|(b, _)| sk < b) {
                vhit = Some((sk, k));
            }
        }
        // exit edge
        let mut ehit: Option<(T, usize)> = None;
        for e in 0..3 {
            if Some(e) == w.entry {
                continue;
            }
            let a = pts[e];
            let b = pts[(e + 1) % 3];
            let ab = b - a;
            let den = dir.cross(ab);
            if den.abs() <= T::epsilon() {
                continue;
            }
            let sx = a.cross(ab) / den;
            let u = a.cross(dir) / den;
            let slack = lit::<T>(1e-9);
            if along(sx) && u >= -slack && u <= T::one() + slack && ehit.is_none_or(|(b, _)| sx < b) {
                ehit = Some((sx, e));
            }
        }
        let exit_at = ehit.map(|(x, _)| x);
        let vertex_first = match (vhit, exit_at) {
            (Some((sv, _)), Some(se)) => sv <= se + tol,
            (Some(_), None) => true,
            _ => false,
        };
        let next = if vertex_first { vhit.map(|(x, _)| x) } else { exit_at };
        let Some(next) = next else {
            return Err(FlatError::InvalidParameter("ray lost inside a triangle".into()));
        };
        let polygon = tri.polygon;
        if next >= len {
            push_segment(&mut segments, polygon, chart(&w, seg_start), chart(&w, len));
            let end = SurfacePoint::new(polygon, chart(&w, len));
            let traj = Trajectory {
                start: start_pt,
                direction: dir,
                segments,
                length: len,
                terminal: Terminal::Cutoff,
                end,
                end_direction: w.placement.unapply_dir(dir),
                regular_passages,
            };
            return Ok((traj, cells));
        }
        if vertex_first {
            let (sv, k) = vhit.unwrap();
            let class = mesh.class_of(w.tri, k);
            push_segment(&mut segments, polygon, chart(&w, seg_start), tri.pts[k]);
            if s.is_singular(class) {
                let traj = Trajectory {
                    start: start_pt,
                    direction: dir,
                    segments,
                    length: sv,
                    terminal: Terminal::ConePoint(class),
                    end: SurfacePoint::new(polygon, tri.pts[k]),
                    end_direction: w.placement.unapply_dir(dir),
                    regular_passages,
                };
                return Ok((traj, cells));
            }
            // straight through a regular vertex
            regular_passages.push(class);
            let back = w.placement.unapply_dir(-dir);
            let a_in = mesh.angle_coordinate(w.tri, k, back);
            let (t2, c2, d2) = mesh.direction_at(class, a_in + T::PI());
            let sign = if d2.dot(dir) >= T::zero() { T::one() } else { -T::one() };
            let vdev = dir.scale(sv);
            let placement = Placement { sign, offset: vdev - mesh.tris[t2].pts[c2].scale(sign) };
            w = Walker { tri: t2, placement, at_corner: Some(c2), entry: None };
            pos = sv;
            seg_start = sv;
            continue;
        }
        let (se, e) = ehit.unwrap();
        let adj = tri.adj[e];
        if adj.polygon_edge.is_some() {
            push_segment(&mut segments, polygon, chart(&w, seg_start), chart(&w, se));
            seg_start = se;
        }
        let (t2, e2, p2) = mesh.cross(w.tri, e, &w.placement);
        w = Walker { tri: t2, placement: p2, at_corner: None, entry: Some(e2) };
        pos = se;
    }
}

fn push_segment<T: Scalar>(segs: &mut Vec<RaySegment<T>>, polygon: usize, entry: Vec2<T>, exit: Vec2<T>) {
    if entry.dist(exit) > T::zero() || segs.is_empty() {
        segs.push(RaySegment { polygon, entry, exit });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::surface::EdgeRef;

    #[test]
    fn torus_horizontal_wraps() {
        let s = fixtures::torus::<f64>();
        let p = SurfacePoint::new(0, Vec2::new(0.5, 0.5));
        let t = develop_ray(&s, &p, 0.0, 2.0).unwrap();
        assert_eq!(t.terminal, Terminal::Cutoff);
        assert!(t.end.position.dist(Vec2::new(0.5, 0.5)) < 1e-12);
        assert_eq!(t.segments.len(), 3);
    }

    #[test]
    fn torus_diagonal_passes_regular_points() {
        let s = fixtures::torus::<f64>();
        let p = SurfacePoint::new(0, Vec2::new(0.5, 0.5));
        let len = 2f64.sqrt() * 10.0;
        let t = develop_ray(&s, &p, 1f64.atan2(1.0), len).unwrap();
        assert_eq!(t.terminal, Terminal::Cutoff);
        assert_eq!(t.regular_passages.len(), 10);
        assert!((t.length - len).abs() < 1e-12);
        assert!(t.end.position.dist(Vec2::new(0.5, 0.5)) < 1e-9);
    }

    #[test]
    fn octagon_side_from_cone_point() {
        let s = fixtures::octagon::<f64>();
        let v0 = s.polygons()[0].vertices[0];
        let side = s.description().edge_vector(EdgeRef::new(0, 0));
        let t = develop_ray(&s, &SurfacePoint::new(0, v0), side.angle(), 1.0).unwrap();
        assert_eq!(t.terminal, Terminal::ConePoint(0));
        assert!((t.length - side.norm()).abs() < 1e-12);
    }

    #[test]
    fn outward_start_on_side_enters_neighbour() {
        let s = fixtures::torus::<f64>();
        let p = SurfacePoint::new(0, Vec2::new(1.0, 0.3));
        let t = develop_ray(&s, &p, 0.0, 0.25).unwrap();
        assert!(t.end.position.dist(Vec2::new(0.25, 0.3)) < 1e-12);
    }
}
