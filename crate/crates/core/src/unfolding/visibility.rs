//! Straight-line visibility from a source by propagating angular windows
//! through the triangulation.
//!
//! The source sits at the origin of a developed plane. A window is an open
//! cone of directions `(lo, hi)` (counterclockwise, opening < π) that enters a
//! triangle through one of its edges. When the opposite vertex lies strictly
//! inside the window it is visible and splits the window in two; otherwise the
//! whole window leaves through one edge. Windows whose entry edge is farther
//! than the length bound are dropped.

use crate::error::{FlatError, Result};
use crate::polygon::{barycentric, point_segment_distance};
use crate::scalar::{lit, Placement, Scalar, Vec2};
use crate::surface::Mesh;

#[derive(Clone, Debug)]
pub(crate) enum Source<T> {
    /// A vertex class; every corner of its star is a separate root.
    Vertex(usize),
    /// A point in the chart of a triangle.
    Point { tri: usize, pos: Vec2<T> },
}

#[derive(Clone, Debug)]
pub(crate) struct Root<T> {
    pub placement: Placement<T>,
    /// Star corner of the source vertex, for vertex sources.
    pub corner: Option<usize>,
}

#[derive(Clone, Debug)]
struct Node<T> {
    parent: Option<usize>,
    /// Triangle and edge crossed to reach this node.
    from: (usize, usize),
    placement: Placement<T>,
}

#[derive(Clone, Debug)]
pub(crate) struct VertexHit<T> {
    pub class: usize,
    pub tri: usize,
    pub corner: usize,
    /// Developed position relative to the source.
    pub pos: Vec2<T>,
    pub placement: Placement<T>,
    pub root: usize,
    node: Option<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct TargetHit<T> {
    pub target: usize,
    pub pos: Vec2<T>,
}

/// A point to detect, given by triangle and chart position.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Target<T> {
    pub tri: usize,
    pub pos: Vec2<T>,
}

#[derive(Clone, Debug)]
pub(crate) struct Visibility<T> {
    nodes: Vec<Node<T>>,
    pub roots: Vec<Root<T>>,
    pub vertices: Vec<VertexHit<T>>,
    pub targets: Vec<TargetHit<T>>,
}

impl<T: Scalar> Visibility<T> {
    fn chain(&self, node: Option<usize>) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut cur = node;
        while let Some(n) = cur {
            out.push(self.nodes[n].from);
            cur = self.nodes[n].parent;
        }
        out.reverse();
        out
    }

    /// Triangle-level crossings `(triangle, edge)` from the root to a vertex hit.
    pub fn vertex_crossings(&self, hit: &VertexHit<T>) -> Vec<(usize, usize)> {
        self.chain(hit.node)
    }
}

#[inline]
fn strictly_inside<T: Scalar>(lo: Vec2<T>, hi: Vec2<T>, w: Vec2<T>, eps: T) -> bool {
    let s = w.norm();
    lo.cross(w) > eps * lo.norm() * s && w.cross(hi) > eps * hi.norm() * s
}

#[inline]
fn weakly_inside<T: Scalar>(lo: Vec2<T>, hi: Vec2<T>, w: Vec2<T>, eps: T) -> bool {
    let s = w.norm();
    lo.cross(w) >= -eps * lo.norm() * s && w.cross(hi) >= -eps * hi.norm() * s
}

/// Runs the window propagation up to distance `max_len`.
///
/// `budget` caps the number of processed windows.
pub(crate) fn visibility<T: Scalar>(
    mesh: &Mesh<T>,
    source: &Source<T>,
    max_len: T,
    targets: &[Target<T>],
    budget: usize,
) -> Result<Visibility<T>> {
    let eps = T::geometric_eps() * lit(0.1);
    let slack = max_len * T::epsilon() * lit(64.0) + T::geometric_eps();
    let within = |p: Vec2<T>| p.norm() <= max_len + slack;
    let mut by_tri: Vec<Vec<usize>> = Vec::new();
    if !targets.is_empty() {
        by_tri = vec![Vec::new(); mesh.tris.len()];
        for (i, t) in targets.iter().enumerate() {
            by_tri[t.tri].push(i);
        }
    }
    let mut vis = Visibility { nodes: Vec::new(), roots: Vec::new(), vertices: Vec::new(), targets: Vec::new() };
    // (node, lo, hi, exit edge) for windows about to leave their triangle,
    // and plain (node, lo, hi) for windows entering one.
    let mut exits: Vec<(Option<usize>, usize, usize, Vec2<T>, Vec2<T>, usize)> = Vec::new();

    let add_root_targets = |vis: &mut Visibility<T>, tri: usize, placement: Placement<T>| {
        if let Some(list) = by_tri.get(tri) {
            for &i in list {
                let pos = placement.apply(targets[i].pos);
                if within(pos) {
                    vis.targets.push(TargetHit { target: i, pos });
                }
            }
        }
    };

    match *source {
        Source::Vertex(class) => {
            for (k, &(t, c)) in mesh.stars[class].corners.iter().enumerate() {
                let tri = &mesh.tris[t];
                let placement = Placement::translation(-tri.pts[c]);
                let root = vis.roots.len();
                vis.roots.push(Root { placement, corner: Some(k) });
                add_root_targets(&mut vis, t, placement);
                let e1 = placement.apply(tri.pts[(c + 1) % 3]);
                let e2 = placement.apply(tri.pts[(c + 2) % 3]);
                if within(e1) {
                    vis.vertices.push(VertexHit {
                        class: mesh.class_of(t, (c + 1) % 3),
                        tri: t,
                        corner: (c + 1) % 3,
                        pos: e1,
                        placement,
                        root,
                        node: None,
                    });
                }
                exits.push((None, root, t, e1, e2, (c + 1) % 3));
            }
        }
        Source::Point { tri: t0, pos } => {
            let tri = &mesh.tris[t0];
            let l = barycentric(pos, tri.pts[0], tri.pts[1], tri.pts[2]);
            let scale = (tri.pts[1] - tri.pts[0]).norm().max((tri.pts[2] - tri.pts[0]).norm());
            // barycentric l[k] vanishes on edge (k + 1)
            let on_edge = (0..3).find(|&k| l[k].abs() * scale <= T::geometric_eps() * scale.max(T::one()));
            let placement = Placement::translation(-pos);
            let root = vis.roots.len();
            vis.roots.push(Root { placement, corner: None });
            add_root_targets(&mut vis, t0, placement);
            for k in 0..3 {
                vis.vertices.push(VertexHit {
                    class: mesh.class_of(t0, k),
                    tri: t0,
                    corner: k,
                    pos: placement.apply(tri.pts[k]),
                    placement,
                    root,
                    node: None,
                });
            }
            match on_edge {
                None => {
                    for e in 0..3 {
                        let lo = placement.apply(tri.pts[e]);
                        let hi = placement.apply(tri.pts[(e + 1) % 3]);
                        exits.push((None, root, t0, lo, hi, e));
                    }
                }
                Some(k) => {
                    let e = (k + 1) % 3;
                    for d in [1, 2] {
                        let ee = (e + d) % 3;
                        let lo = placement.apply(tri.pts[ee]);
                        let hi = placement.apply(tri.pts[(ee + 1) % 3]);
                        exits.push((None, root, t0, lo, hi, ee));
                    }
                    let (t1, j, p1) = mesh.cross(t0, e, &placement);
                    let root1 = vis.roots.len();
                    vis.roots.push(Root { placement: p1, corner: None });
                    add_root_targets(&mut vis, t1, p1);
                    let other = &mesh.tris[t1];
                    let w = (j + 2) % 3;
                    vis.vertices.push(VertexHit {
                        class: mesh.class_of(t1, w),
                        tri: t1,
                        corner: w,
                        pos: p1.apply(other.pts[w]),
                        placement: p1,
                        root: root1,
                        node: None,
                    });
                    for d in [1, 2] {
                        let ee = (j + d) % 3;
                        let lo = p1.apply(other.pts[ee]);
                        let hi = p1.apply(other.pts[(ee + 1) % 3]);
                        exits.push((None, root1, t1, lo, hi, ee));
                    }
                }
            }
            vis.vertices.retain(|h| within(h.pos) && h.pos.norm() > T::zero());
        }
    }

    let mut work = 0usize;
    while let Some((parent, root, t, lo, hi, edge)) = exits.pop() {
        work += 1;
        if work > budget {
            return Err(FlatError::BudgetExhausted { budget });
        }
        let placement = match parent {
            Some(n) => vis.nodes[n].placement,
            None => vis.roots[root].placement,
        };
        let tri = &mesh.tris[t];
        let a = placement.apply(tri.pts[edge]);
        let b = placement.apply(tri.pts[(edge + 1) % 3]);
        if point_segment_distance(Vec2::zero(), a, b) > max_len + slack {
            continue;
        }
        let (t2, entry, p2) = mesh.cross(t, edge, &placement);
        let node = vis.nodes.len();
        vis.nodes.push(Node { parent, from: (t, edge), placement: p2 });

        let tri2 = &mesh.tris[t2];
        if let Some(list) = by_tri.get(t2) {
            for &i in list {
                let pos = p2.apply(targets[i].pos);
                if within(pos) && weakly_inside(lo, hi, pos, eps) {
                    vis.targets.push(TargetHit { target: i, pos });
                }
            }
        }
        let wc = (entry + 2) % 3;
        let w = p2.apply(tri2.pts[wc]);
        if strictly_inside(lo, hi, w, eps) {
            if within(w) {
                vis.vertices.push(VertexHit {
                    class: mesh.class_of(t2, wc),
                    tri: t2,
                    corner: wc,
                    pos: w,
                    placement: p2,
                    root,
                    node: Some(node),
                });
            }
            exits.push((Some(node), root, t2, lo, w, (entry + 1) % 3));
            exits.push((Some(node), root, t2, w, hi, (entry + 2) % 3));
        } else if lo.cross(w) <= T::zero() {
            exits.push((Some(node), root, t2, lo, hi, (entry + 2) % 3));
        } else {
            exits.push((Some(node), root, t2, lo, hi, (entry + 1) % 3));
        }
    }
    Ok(vis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_vertex_sees_primitive_vectors() {
        let s = fixtures::torus::<f64>();
        let v = visibility(s.mesh(), &Source::Vertex(0), 1.5, &[], 1 << 20).unwrap();
        let mut lens: Vec<f64> = v.vertices.iter().map(|h| h.pos.norm()).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // (±1,0),(0,±1) then (±1,±1)
        assert_eq!(lens.len(), 8, "{lens:?}");
        assert!((lens[0] - 1.0).abs() < 1e-12 && (lens[3] - 1.0).abs() < 1e-12);
        assert!((lens[4] - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn point_source_sees_target() {
        let s = fixtures::torus::<f64>();
        let t0 = s.mesh().locate(0, Vec2::new(0.1, 0.1), 1e-9).unwrap();
        let t1 = s.mesh().locate(0, Vec2::new(0.9, 0.1), 1e-9).unwrap();
        let targets = [Target { tri: t1, pos: Vec2::new(0.9, 0.1) }];
        let v = visibility(s.mesh(), &Source::Point { tri: t0, pos: Vec2::new(0.1, 0.1) }, 0.5, &targets, 1 << 20).unwrap();
        let best = v.targets.iter().map(|h| h.pos.norm()).fold(f64::INFINITY, f64::min);
        assert!((best - 0.2).abs() < 1e-12);
    }
}
