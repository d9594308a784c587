use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{FlatError, Result};
use crate::scalar::{Scalar, Vec2};
use crate::surface::{EdgeRef, FlatSurface};

use super::visibility::{visibility, Source};

/// Default cap on processed windows per visibility search.
pub const DEFAULT_WINDOW_BUDGET: usize = 50_000_000;

/// A straight segment between two vertex classes with no vertex in its interior.
///
/// Angles are angle coordinates in the stars of the endpoints: `start_angle`
/// is the outgoing direction at `start`, `end_angle` the direction at `end`
/// pointing back along the segment.
#[derive(Clone, Debug, PartialEq)]
pub struct SaddleConnection<T> {
    pub start: usize,
    pub end: usize,
    pub start_angle: T,
    pub end_angle: T,
    /// Displacement in the chart of the starting triangle.
    pub holonomy: Vec2<T>,
    pub length: T,
    /// Polygon sides crossed, in order.
    pub crossings: Vec<EdgeRef>,
    /// Triangle-level crossings `(triangle, edge)`.
    pub edge_path: Vec<(usize, usize)>,
    /// Triangle containing the initial piece, and the one containing the final piece.
    pub start_tri: usize,
    pub end_tri: usize,
    /// `±1`: chart orientation of the end triangle relative to the start chart.
    pub end_sign: T,
}

impl<T: Scalar> SaddleConnection<T> {
    /// The same segment traversed backwards.
    pub fn reversed(&self, s: &FlatSurface<T>) -> Self {
        let mesh = s.mesh();
        let edge_path = self
            .edge_path
            .iter()
            .rev()
            .map(|&(t, e)| {
                let a = mesh.tris[t].adj[e];
                (a.tri, a.edge)
            })
            .collect();
        let crossings = self
            .crossings
            .iter()
            .rev()
            .map(|&e| {
                let g = s.gluings().iter().find(|g| g.side_a == e || g.side_b == e).expect("glued side");
                if g.side_a == e {
                    g.side_b
                } else {
                    g.side_a
                }
            })
            .collect();
        SaddleConnection {
            start: self.end,
            end: self.start,
            start_angle: self.end_angle,
            end_angle: self.start_angle,
            holonomy: -self.holonomy.scale(self.end_sign),
            length: self.length,
            crossings,
            edge_path,
            start_tri: self.end_tri,
            end_tri: self.start_tri,
            end_sign: self.end_sign,
        }
    }

    /// Direction angle of the holonomy in the start chart, in `(-π, π]`.
    pub fn direction(&self) -> T {
        self.holonomy.angle()
    }
}

pub(crate) fn canonical_order<T: Scalar>(a: &SaddleConnection<T>, b: &SaddleConnection<T>) -> Ordering {
    a.length
        .partial_cmp(&b.length)
        .unwrap_or(Ordering::Equal)
        .then(a.direction().partial_cmp(&b.direction()).unwrap_or(Ordering::Equal))
        .then(a.start.cmp(&b.start))
        .then(a.start_angle.partial_cmp(&b.start_angle).unwrap_or(Ordering::Equal))
}

/// Saddle connections of length at most `max_len` leaving vertex class `class`.
pub(crate) fn from_class<T: Scalar>(
    s: &FlatSurface<T>,
    class: usize,
    max_len: T,
    budget: usize,
) -> Result<Vec<SaddleConnection<T>>> {
    let mesh = s.mesh();
    let vis = visibility(mesh, &Source::Vertex(class), max_len, &[], budget)?;
    let mut out = Vec::with_capacity(vis.vertices.len());
    for hit in &vis.vertices {
        let root = &vis.roots[hit.root];
        let (t0, c0) = mesh.stars[class].corners[root.corner.expect("vertex source")];
        let start_angle = mesh.angle_coordinate(t0, c0, hit.pos);
        let back = hit.placement.unapply_dir(-hit.pos);
        let end_angle = mesh.angle_coordinate(hit.tri, hit.corner, back);
        let edge_path = vis.vertex_crossings(hit);
        let crossings = edge_path
            .iter()
            .filter_map(|&(t, e)| mesh.tris[t].adj[e].polygon_edge.map(|pe| EdgeRef::new(mesh.tris[t].polygon, pe)))
            .collect();
        out.push(SaddleConnection {
            start: class,
            end: hit.class,
            start_angle,
            end_angle,
            holonomy: hit.pos,
            length: hit.pos.norm(),
            crossings,
            edge_path,
            start_tri: t0,
            end_tri: hit.tri,
            end_sign: hit.placement.sign,
        });
    }
    out.sort_by(canonical_order);
    Ok(out)
}

/// All saddle connections of length at most `max_len`, once per orientation,
/// sorted by length, then holonomy angle.
pub fn enumerate_saddle_connections<T: Scalar>(s: &FlatSurface<T>, max_len: T) -> Result<Vec<SaddleConnection<T>>> {
    enumerate_with_budget(s, max_len, DEFAULT_WINDOW_BUDGET)
}

pub fn enumerate_with_budget<T: Scalar>(
    s: &FlatSurface<T>,
    max_len: T,
    budget: usize,
) -> Result<Vec<SaddleConnection<T>>> {
    if s.cone_points().is_empty() {
        return Err(FlatError::NoConePoints);
    }
    if !(max_len > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("length bound must be positive, got {max_len}")));
    }
    let per_class: Vec<Result<Vec<_>>> =
        (0..s.cone_points().len()).into_par_iter().map(|c| from_class(s, c, max_len, budget)).collect();
    let mut all = Vec::new();
    for r in per_class {
        all.extend(r?);
    }
    all.sort_by(canonical_order);
    Ok(all)
}

/// Saddle connections grouped by start class, each list sorted by length.
#[derive(Clone, Debug)]
pub struct SaddleCatalog<T> {
    pub max_len: T,
    pub by_class: Vec<Vec<SaddleConnection<T>>>,
}

impl<T: Scalar> SaddleCatalog<T> {
    pub fn build(s: &FlatSurface<T>, max_len: T) -> Result<Self> {
        Self::build_with_budget(s, max_len, DEFAULT_WINDOW_BUDGET)
    }

    pub fn build_with_budget(s: &FlatSurface<T>, max_len: T, budget: usize) -> Result<Self> {
        if s.cone_points().is_empty() {
            return Err(FlatError::NoConePoints);
        }
        let by_class: Vec<Result<Vec<_>>> =
            (0..s.cone_points().len()).into_par_iter().map(|c| from_class(s, c, max_len, budget)).collect();
        let by_class = by_class.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(SaddleCatalog { max_len, by_class })
    }

    pub fn len(&self) -> usize {
        self.by_class.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn shortest(&self) -> Option<&SaddleConnection<T>> {
        self.by_class
            .iter()
            .filter_map(|v| v.first())
            .min_by(|a, b| canonical_order(a, b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn octagon_sides() {
        let s = fixtures::octagon::<f64>();
        let side = s.description().edge_vector(EdgeRef::new(0, 0)).norm();
        let scs = enumerate_saddle_connections(&s, side + 1e-6).unwrap();
        assert_eq!(scs.len(), 8);
        for sc in &scs {
            assert!((sc.length - side).abs() < 1e-12);
        }
        assert!(enumerate_saddle_connections(&s, side * 0.99).unwrap().is_empty());
    }

    #[test]
    fn reversal_is_an_involution() {
        let s = fixtures::octagon::<f64>();
        let scs = enumerate_saddle_connections(&s, 1.2).unwrap();
        for sc in &scs {
            let r = sc.reversed(&s);
            assert!(scs.iter().any(|o| (o.start_angle - r.start_angle).abs() < 1e-9
                && (o.length - r.length).abs() < 1e-9
                && (o.end_angle - r.end_angle).abs() < 1e-9));
            assert_eq!(r.reversed(&s), *sc);
        }
    }

    #[test]
    fn torus_counts_primitive_vectors() {
        let s = fixtures::torus::<f64>();
        let scs = enumerate_saddle_connections(&s, 5.0).unwrap();
        let brute = (-5i32..=5)
            .flat_map(|a| (-5i32..=5).map(move |b| (a, b)))
            .filter(|&(a, b)| (a, b) != (0, 0) && a * a + b * b <= 25 && gcd(a.abs(), b.abs()) == 1)
            .count();
        assert_eq!(scs.len(), brute);
    }

    fn gcd(a: i32, b: i32) -> i32 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
}
