//! Internal triangulation of a glued polygon complex.
//!
//! Each polygon is ear-clipped into triangles that keep the polygon's chart
//! coordinates. Triangle edges are glued either to a sibling triangle of the
//! same polygon (internal diagonal, identity chart change) or, for polygon
//! sides, to the partner triangle given by the surface gluing. Around every
//! vertex class the triangle corners form a cyclic *star*; angle coordinates
//! around a cone point are measured along that star.

use crate::error::{FlatError, Result};
use crate::polygon::triangulate;
use crate::scalar::{lit, Placement, Scalar, Vec2};

use super::{GlueKind, SurfaceDescription};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Adjacent {
    pub tri: usize,
    pub edge: usize,
    /// Chart change across the edge is `x ↦ -x + c` instead of `x ↦ x + c`.
    pub half_turn: bool,
    /// Polygon side index when this triangle edge lies on the polygon boundary.
    pub polygon_edge: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct Tri<T> {
    pub polygon: usize,
    pub poly_vertex: [usize; 3],
    pub pts: [Vec2<T>; 3],
    pub adj: [Adjacent; 3],
}

impl<T: Scalar> Tri<T> {
    pub fn corner_angle(&self, c: usize) -> T {
        let p = self.pts[c];
        let e1 = self.pts[(c + 1) % 3] - p;
        let e2 = self.pts[(c + 2) % 3] - p;
        e1.ccw_angle_to(e2)
    }

    pub fn area(&self) -> T {
        (self.pts[1] - self.pts[0]).cross(self.pts[2] - self.pts[0]) / lit(2.0)
    }
}

/// Cyclic counterclockwise sequence of triangle corners around a vertex class.
#[derive(Clone, Debug)]
pub struct Star<T> {
    pub corners: Vec<(usize, usize)>,
    /// Angle coordinate at which each corner's wedge starts.
    pub offsets: Vec<T>,
    pub angle: T,
}

#[derive(Clone, Debug)]
pub struct Mesh<T> {
    pub tris: Vec<Tri<T>>,
    pub poly_tris: Vec<Vec<usize>>,
    pub stars: Vec<Star<T>>,
    /// `(class, index in star)` for every triangle corner.
    pub corner_info: Vec<[(usize, usize); 3]>,
}

impl<T: Scalar> Mesh<T> {
    pub fn build(desc: &SurfaceDescription<T>, tol: T) -> Result<Self> {
        let eps = T::geometric_eps();
        let mut tris: Vec<Tri<T>> = Vec::new();
        let mut poly_tris = Vec::with_capacity(desc.polygons.len());
        let dummy = Adjacent { tri: usize::MAX, edge: 0, half_turn: false, polygon_edge: None };
        for (pi, poly) in desc.polygons.iter().enumerate() {
            let n = poly.vertices.len();
            let local = triangulate(&poly.vertices, eps).ok_or_else(|| FlatError::InvalidPolygon {
                id: poly.id,
                reason: "cannot be triangulated".into(),
            })?;
            let mut ids = Vec::with_capacity(local.len());
            for t in local {
                let mut adj = [dummy; 3];
                for (i, a) in adj.iter_mut().enumerate() {
                    if t[(i + 1) % 3] == (t[i] + 1) % n {
                        a.polygon_edge = Some(t[i]);
                    }
                }
                ids.push(tris.len());
                tris.push(Tri {
                    polygon: pi,
                    poly_vertex: t,
                    pts: [poly.vertices[t[0]], poly.vertices[t[1]], poly.vertices[t[2]]],
                    adj,
                });
            }
            // internal diagonals
            for &a in &ids {
                for ea in 0..3 {
                    if tris[a].adj[ea].polygon_edge.is_some() || tris[a].adj[ea].tri != usize::MAX {
                        continue;
                    }
                    let (u, v) = (tris[a].poly_vertex[ea], tris[a].poly_vertex[(ea + 1) % 3]);
                    let mut found = None;
                    for &b in &ids {
                        if b == a {
                            continue;
                        }
                        for eb in 0..3 {
                            if tris[b].poly_vertex[eb] == v && tris[b].poly_vertex[(eb + 1) % 3] == u {
                                found = Some((b, eb));
                            }
                        }
                    }
                    let (b, eb) = found.ok_or_else(|| FlatError::InvalidPolygon {
                        id: poly.id,
                        reason: "inconsistent triangulation".into(),
                    })?;
                    tris[a].adj[ea] = Adjacent { tri: b, edge: eb, half_turn: false, polygon_edge: None };
                    tris[b].adj[eb] = Adjacent { tri: a, edge: ea, half_turn: false, polygon_edge: None };
                }
            }
            poly_tris.push(ids);
        }

        let find_edge = |tris: &Vec<Tri<T>>, poly: usize, edge: usize| -> (usize, usize) {
            for &t in &poly_tris[poly] {
                for e in 0..3 {
                    if tris[t].adj[e].polygon_edge == Some(edge) {
                        return (t, e);
                    }
                }
            }
            unreachable!("every polygon side belongs to one triangle")
        };

        for g in &desc.gluings {
            let (ta, ea) = find_edge(&tris, g.side_a.polygon, g.side_a.edge);
            let (tb, eb) = find_edge(&tris, g.side_b.polygon, g.side_b.edge);
            let va = desc.edge_vector(g.side_a);
            let vb = desc.edge_vector(g.side_b);
            let residual = match g.kind {
                GlueKind::Translation => (va + vb).norm(),
                GlueKind::HalfTranslation => (va - vb).norm(),
            };
            if residual > tol * T::one().max(va.norm()) {
                return Err(FlatError::EdgeMismatch {
                    a: desc.edge_label(g.side_a),
                    b: desc.edge_label(g.side_b),
                    residual: crate::scalar::to_f64(residual),
                });
            }
            let half_turn = g.kind == GlueKind::HalfTranslation;
            tris[ta].adj[ea].tri = tb;
            tris[ta].adj[ea].edge = eb;
            tris[ta].adj[ea].half_turn = half_turn;
            tris[tb].adj[eb].tri = ta;
            tris[tb].adj[eb].edge = ea;
            tris[tb].adj[eb].half_turn = half_turn;
        }
        for (pi, poly) in desc.polygons.iter().enumerate() {
            for &t in &poly_tris[pi] {
                for e in 0..3 {
                    if tris[t].adj[e].tri == usize::MAX {
                        return Err(FlatError::UnmatchedEdge {
                            polygon: poly.id,
                            edge: tris[t].adj[e].polygon_edge.unwrap_or(0),
                        });
                    }
                }
            }
        }

        let mut corner_info = vec![[(usize::MAX, 0usize); 3]; tris.len()];
        let mut stars = Vec::new();
        for t0 in 0..tris.len() {
            for c0 in 0..3 {
                if corner_info[t0][c0].0 != usize::MAX {
                    continue;
                }
                let class = stars.len();
                let mut star = Star { corners: Vec::new(), offsets: Vec::new(), angle: T::zero() };
                let (mut t, mut c) = (t0, c0);
                loop {
                    corner_info[t][c] = (class, star.corners.len());
                    star.corners.push((t, c));
                    star.offsets.push(star.angle);
                    star.angle = star.angle + tris[t].corner_angle(c);
                    let a = tris[t].adj[(c + 2) % 3];
                    t = a.tri;
                    c = a.edge;
                    if (t, c) == (t0, c0) {
                        break;
                    }
                    if corner_info[t][c].0 != usize::MAX {
                        return Err(FlatError::InvalidPolygon { id: -1, reason: "vertex link is not a cycle".into() });
                    }
                }
                stars.push(star);
            }
        }
        Ok(Mesh { tris, poly_tris, stars, corner_info })
    }

    pub fn class_of(&self, tri: usize, corner: usize) -> usize {
        self.corner_info[tri][corner].0
    }

    /// Placement of the neighbour across `edge` of `tri`, given the placement of `tri`.
    pub fn cross(&self, tri: usize, edge: usize, placement: &Placement<T>) -> (usize, usize, Placement<T>) {
        let a = self.tris[tri].adj[edge];
        let s = if a.half_turn { -T::one() } else { T::one() };
        let start = self.tris[tri].pts[edge];
        let partner_end = self.tris[a.tri].pts[(a.edge + 1) % 3];
        let c = start - partner_end.scale(s);
        let local = Placement { sign: s, offset: c };
        (a.tri, a.edge, placement.compose(&local))
    }

    /// Angle coordinate of chart direction `dir` at corner `(tri, c)`.
    pub fn angle_coordinate(&self, tri: usize, c: usize, dir: Vec2<T>) -> T {
        let (class, idx) = self.corner_info[tri][c];
        let t = &self.tris[tri];
        let e1 = t.pts[(c + 1) % 3] - t.pts[c];
        let mut a = e1.ccw_angle_to(dir);
        let wedge = t.corner_angle(c);
        // directions marginally clockwise of the wedge start belong to its start
        if a > wedge + (T::PI() + T::PI() - wedge) / lit(2.0) {
            a = T::zero();
        }
        crate::scalar::wrap_angle(self.stars[class].offsets[idx] + a, self.stars[class].angle)
    }

    /// Corner of the star of `class` containing angle coordinate `angle`, and the
    /// chart direction of that angle inside the corner's triangle.
    pub fn direction_at(&self, class: usize, angle: T) -> (usize, usize, Vec2<T>) {
        let star = &self.stars[class];
        let a = crate::scalar::wrap_angle(angle, star.angle);
        let k = match star.offsets.binary_search_by(|o| o.partial_cmp(&a).unwrap()) {
            Ok(i) => i,
            Err(i) => i.saturating_sub(1),
        };
        let (t, c) = star.corners[k];
        let tri = &self.tris[t];
        let e1 = (tri.pts[(c + 1) % 3] - tri.pts[c]).normalized();
        (t, c, e1.rotate(a - star.offsets[k]))
    }

    /// Triangle of polygon `poly` that contains `p` (closed), if any.
    pub fn locate(&self, poly: usize, p: Vec2<T>, eps: T) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for &t in self.poly_tris.get(poly)? {
            let tri = &self.tris[t];
            let l = crate::polygon::barycentric(p, tri.pts[0], tri.pts[1], tri.pts[2]);
            let m = l[0].min(l[1]).min(l[2]);
            if best.is_none_or(|(_, bm)| m > bm) {
                best = Some((t, m));
            }
        }
        best.filter(|&(_, m)| m >= -eps).map(|(t, _)| t)
    }

    /// Vertex of triangle `tri` coinciding with `p`, if any.
    pub fn vertex_at(&self, tri: usize, p: Vec2<T>, tol: T) -> Option<usize> {
        (0..3).find(|&c| self.tris[tri].pts[c].dist(p) <= tol)
    }
}
