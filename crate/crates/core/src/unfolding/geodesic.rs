//! Geodesic paths as chains of straight legs, the local-geodesic test at
//! vertex visits, shortest-path distance and the Gromov product.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FlatError, Result};
use crate::scalar::{wrap_angle, Scalar, Vec2};
use crate::surface::{FlatSurface, SurfacePoint};

use super::saddle::{from_class, DEFAULT_WINDOW_BUDGET};
use super::visibility::{visibility, Source, Target};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Waypoint<T> {
    Point(SurfacePoint<T>),
    Vertex(usize),
}

/// One straight piece of a path. Angles are star coordinates at vertex
/// endpoints: `start_angle` points along the leg, `end_angle` points back.
#[derive(Clone, Debug, PartialEq)]
pub struct Leg<T> {
    /// Displacement in the chart of the triangle where the leg starts.
    pub vector: Vec2<T>,
    pub length: T,
    pub start_angle: Option<T>,
    pub end_angle: Option<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicPath<T> {
    pub waypoints: Vec<Waypoint<T>>,
    pub legs: Vec<Leg<T>>,
    /// Closed curve: the last leg returns to the first waypoint.
    pub closed: bool,
}

impl<T: Scalar> GeodesicPath<T> {
    pub fn empty_at(w: Waypoint<T>) -> Self {
        GeodesicPath { waypoints: vec![w], legs: Vec::new(), closed: false }
    }

    pub fn length(&self) -> T {
        self.legs.iter().map(|l| l.length).sum()
    }
}

/// Angles on both sides of a path at one vertex visit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AngleCheck<T> {
    pub waypoint: usize,
    pub class: usize,
    pub left: T,
    pub right: T,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicCheck<T> {
    pub ok: bool,
    pub vertices: Vec<AngleCheck<T>>,
}

impl<T: Scalar> GeodesicCheck<T> {
    pub fn offending(&self) -> impl Iterator<Item = &AngleCheck<T>> {
        self.vertices.iter().filter(|c| !c.ok)
    }
}

/// Left and right angles at a vertex of total angle `theta`, for a path that
/// arrives with back direction `back` and leaves along `out`.
pub fn side_angles<T: Scalar>(theta: T, back: T, out: T) -> (T, T) {
    let left = wrap_angle(back - out, theta);
    (left, theta - left)
}

/// Both side angles at least `π − tol`.
pub fn junction_ok<T: Scalar>(theta: T, back: T, out: T, tol: T) -> bool {
    let (l, r) = side_angles(theta, back, out);
    l >= T::PI() - tol && r >= T::PI() - tol
}

pub(crate) fn angle_tolerance<T: Scalar>(s: &FlatSurface<T>) -> T {
    s.tolerance().max(T::geometric_eps() * T::from_f64(1e3).unwrap())
}

/// Checks the angle condition at every interior vertex visit (and at the
/// basepoint of a closed path).
pub fn is_local_geodesic<T: Scalar>(s: &FlatSurface<T>, path: &GeodesicPath<T>) -> Result<GeodesicCheck<T>> {
    let n = path.legs.len();
    let expected = if path.closed { n } else { n + 1 };
    if path.waypoints.len() != expected || path.waypoints.is_empty() {
        return Err(FlatError::MalformedPath(format!("{} waypoints for {} legs", path.waypoints.len(), n)));
    }
    let tol = angle_tolerance(s);
    let mut vertices = Vec::new();
    let interior: Vec<usize> = if path.closed { (0..n).collect() } else { (1..n).collect() };
    for i in interior {
        let Waypoint::Vertex(class) = path.waypoints[i] else { continue };
        let cone = s
            .cone_points()
            .get(class)
            .ok_or_else(|| FlatError::MalformedPath(format!("unknown vertex class {class}")))?;
        let incoming = &path.legs[(i + n - 1) % n];
        let outgoing = &path.legs[i];
        let (Some(back), Some(out)) = (incoming.end_angle, outgoing.start_angle) else {
            return Err(FlatError::MalformedPath(format!("missing angles at waypoint {i}")));
        };
        let (left, right) = side_angles(cone.angle, back, out);
        let ok = left >= T::PI() - tol && right >= T::PI() - tol;
        vertices.push(AngleCheck { waypoint: i, class, left, right, ok });
    }
    for (i, l) in path.legs.iter().enumerate() {
        if !(l.length >= T::zero()) {
            return Err(FlatError::MalformedPath(format!("leg {i} has negative length")));
        }
    }
    Ok(GeodesicCheck { ok: vertices.iter().all(|c| c.ok), vertices })
}

/// Where a surface point sits: on a vertex class or inside a triangle.
pub(crate) enum Located<T> {
    Vertex(usize),
    Interior { tri: usize, pos: Vec2<T> },
}

pub(crate) fn locate_point<T: Scalar>(s: &FlatSurface<T>, p: &SurfacePoint<T>) -> Result<Located<T>> {
    if let Some(c) = s.vertex_class_at(p) {
        return Ok(Located::Vertex(c));
    }
    let tri = s.locate(p)?;
    Ok(Located::Interior { tri, pos: p.position })
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem<T> {
    d: T,
    class: usize,
}

impl<T: PartialOrd> Eq for HeapItem<T> {}

impl<T: PartialOrd> Ord for HeapItem<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.partial_cmp(&self.d).unwrap_or(Ordering::Equal).then(o.class.cmp(&self.class))
    }
}

impl<T: PartialOrd> PartialOrd for HeapItem<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Shortest path between two surface points, searched exhaustively up to
/// `cutoff`. Returns `CutoffExceeded` when no path of length `≤ cutoff` exists.
pub fn distance<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    q: &SurfacePoint<T>,
    cutoff: T,
) -> Result<(T, GeodesicPath<T>)> {
    if !(cutoff > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    // The search cost grows exponentially with its radius, so deepen from
    // roughly the diameter scale instead of starting at `cutoff`.
    let mut r = s.area().sqrt().min(cutoff);
    loop {
        match distance_within(s, p, q, r) {
            Err(FlatError::CutoffExceeded { .. }) if r < cutoff => r = (r + r).min(cutoff),
            res => return res,
        }
    }
}

fn distance_within<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    q: &SurfacePoint<T>,
    cutoff: T,
) -> Result<(T, GeodesicPath<T>)> {
    let mesh = s.mesh();
    let lp = locate_point(s, p)?;
    let lq = locate_point(s, q)?;
    let wp = match lp {
        Located::Vertex(c) => Waypoint::Vertex(c),
        _ => Waypoint::Point(*p),
    };
    let wq = match lq {
        Located::Vertex(c) => Waypoint::Vertex(c),
        _ => Waypoint::Point(*q),
    };
    if let (Located::Vertex(a), Located::Vertex(b)) = (&lp, &lq) {
        if a == b {
            return Ok((T::zero(), GeodesicPath::empty_at(wp)));
        }
    }
    let nclass = s.cone_points().len();
    let inf = T::infinity();
    let mut dist = vec![inf; nclass];
    // how each class was reached: None = it is p, Some((prev, leg))
    let mut via: Vec<Option<(Option<usize>, Leg<T>)>> = vec![None; nclass];
    let mut heap = BinaryHeap::new();
    let mut best = inf;
    let mut best_end: Option<(Option<usize>, Leg<T>)> = None;

    match lp {
        Located::Vertex(c) => {
            dist[c] = T::zero();
            heap.push(HeapItem { d: T::zero(), class: c });
        }
        Located::Interior { tri, pos } => {
            let targets: Vec<Target<T>> = match lq {
                Located::Interior { tri: tq, pos: pq } => vec![Target { tri: tq, pos: pq }],
                _ => Vec::new(),
            };
            let vis = visibility(mesh, &Source::Point { tri, pos }, cutoff, &targets, DEFAULT_WINDOW_BUDGET)?;
            for h in &vis.targets {
                let len = h.pos.norm();
                if len < best {
                    best = len;
                    best_end = Some((None, Leg { vector: h.pos, length: len, start_angle: None, end_angle: None }));
                }
            }
            for h in &vis.vertices {
                let len = h.pos.norm();
                if len < dist[h.class] {
                    dist[h.class] = len;
                    let back = h.placement.unapply_dir(-h.pos);
                    let end_angle = mesh.angle_coordinate(h.tri, h.corner, back);
                    via[h.class] = Some((None, Leg { vector: h.pos, length: len, start_angle: None, end_angle: Some(end_angle) }));
                }
            }
            for c in 0..nclass {
                if dist[c] < inf {
                    heap.push(HeapItem { d: dist[c], class: c });
                }
            }
        }
    }

    // direct legs from each class to q, when q is not a vertex
    let mut to_q: Vec<Option<Leg<T>>> = vec![None; nclass];
    if let Located::Interior { tri, pos } = lq {
        let vis = visibility(mesh, &Source::Point { tri, pos }, cutoff, &[], DEFAULT_WINDOW_BUDGET)?;
        for h in &vis.vertices {
            let len = h.pos.norm();
            if to_q[h.class].as_ref().is_none_or(|l| len < l.length) {
                let v = h.placement.unapply_dir(-h.pos);
                let start_angle = mesh.angle_coordinate(h.tri, h.corner, v);
                to_q[h.class] = Some(Leg { vector: v, length: len, start_angle: Some(start_angle), end_angle: None });
            }
        }
    }

    let mut done = vec![false; nclass];
    let mut target_class = None;
    while let Some(HeapItem { d, class: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        if d >= best {
            break;
        }
        done[u] = true;
        if let Located::Vertex(cq) = lq {
            if u == cq {
                best = d;
                target_class = Some(u);
                break;
            }
        }
        if let Some(leg) = &to_q[u] {
            if d + leg.length < best {
                best = d + leg.length;
                best_end = Some((Some(u), leg.clone()));
            }
        }
        let budget = cutoff - d;
        if !(budget > T::zero()) {
            continue;
        }
        for sc in from_class(s, u, budget, DEFAULT_WINDOW_BUDGET)? {
            let nd = d + sc.length;
            if nd < dist[sc.end] && !done[sc.end] {
                dist[sc.end] = nd;
                via[sc.end] = Some((
                    Some(u),
                    Leg {
                        vector: sc.holonomy,
                        length: sc.length,
                        start_angle: Some(sc.start_angle),
                        end_angle: Some(sc.end_angle),
                    },
                ));
                heap.push(HeapItem { d: nd, class: sc.end });
            }
        }
    }
    let slack = cutoff * T::epsilon() * T::from_f64(16.0).unwrap();
    if !(best <= cutoff + slack) {
        return Err(FlatError::CutoffExceeded { cutoff: crate::scalar::to_f64(cutoff) });
    }

    let mut legs = Vec::new();
    let mut waypoints = vec![wq];
    let mut cur = match target_class {
        Some(c) => Some(c),
        None => {
            let (prev, leg) = best_end.expect("a path was found");
            legs.push(leg);
            prev
        }
    };
    while let Some(c) = cur {
        waypoints.push(Waypoint::Vertex(c));
        match via[c].clone() {
            Some((prev, leg)) => {
                legs.push(leg);
                cur = prev;
            }
            None => cur = None,
        }
    }
    if !matches!(lp, Located::Vertex(_)) {
        waypoints.push(wp);
    }
    legs.reverse();
    waypoints.reverse();
    Ok((best, GeodesicPath { waypoints, legs, closed: false }))
}

/// Distances from `p` to each of `qs` (infinite beyond `cutoff`), from one
/// Dijkstra pass over the vertex classes.
pub(crate) fn distances_from<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    qs: &[SurfacePoint<T>],
    cutoff: T,
) -> Result<Vec<T>> {
    let mesh = s.mesh();
    let nclass = s.cone_points().len();
    let inf = T::infinity();
    let mut out = vec![inf; qs.len()];
    let mut targets = Vec::new();
    let mut target_of = Vec::new();
    let mut at_class: Vec<(usize, usize)> = Vec::new();
    for (i, q) in qs.iter().enumerate() {
        match locate_point(s, q)? {
            Located::Vertex(c) => at_class.push((i, c)),
            Located::Interior { tri, pos } => {
                targets.push(Target { tri, pos });
                target_of.push(i);
            }
        }
    }
    let mut dist = vec![inf; nclass];
    let relax_targets = |vis: &super::visibility::Visibility<T>, base: T, out: &mut Vec<T>| {
        for h in &vis.targets {
            let i = target_of[h.target];
            out[i] = out[i].min(base + h.pos.norm());
        }
    };
    match locate_point(s, p)? {
        Located::Vertex(c) => dist[c] = T::zero(),
        Located::Interior { tri, pos } => {
            let vis = visibility(mesh, &Source::Point { tri, pos }, cutoff, &targets, DEFAULT_WINDOW_BUDGET)?;
            relax_targets(&vis, T::zero(), &mut out);
            for h in &vis.vertices {
                dist[h.class] = dist[h.class].min(h.pos.norm());
            }
        }
    }
    let mut heap: BinaryHeap<HeapItem<T>> =
        (0..nclass).filter(|&c| dist[c] < inf).map(|c| HeapItem { d: dist[c], class: c }).collect();
    let mut done = vec![false; nclass];
    while let Some(HeapItem { d, class: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        done[u] = true;
        let budget = cutoff - d;
        if !(budget > T::zero()) {
            continue;
        }
        let vis = visibility(mesh, &Source::Vertex(u), budget, &targets, DEFAULT_WINDOW_BUDGET)?;
        relax_targets(&vis, d, &mut out);
        for h in &vis.vertices {
            let nd = d + h.pos.norm();
            if nd < dist[h.class] && !done[h.class] {
                dist[h.class] = nd;
                heap.push(HeapItem { d: nd, class: h.class });
            }
        }
    }
    for (i, c) in at_class {
        out[i] = dist[c];
    }
    for x in out.iter_mut() {
        if *x > cutoff {
            *x = inf;
        }
    }
    Ok(out)
}

/// Distance from `p` to the nearest singular class, with that class, if one
/// lies within `cutoff`. Regular classes are crossed as ordinary points.
pub fn distance_to_singularities<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    cutoff: T,
) -> Result<Option<(T, usize)>> {
    let mesh = s.mesh();
    let nclass = s.cone_points().len();
    let inf = T::infinity();
    let mut dist = vec![inf; nclass];
    match locate_point(s, p)? {
        Located::Vertex(c) => dist[c] = T::zero(),
        Located::Interior { tri, pos } => {
            let vis = visibility(mesh, &Source::Point { tri, pos }, cutoff, &[], DEFAULT_WINDOW_BUDGET)?;
            for h in &vis.vertices {
                dist[h.class] = dist[h.class].min(h.pos.norm());
            }
        }
    }
    let mut heap: BinaryHeap<HeapItem<T>> =
        (0..nclass).filter(|&c| dist[c] < inf).map(|c| HeapItem { d: dist[c], class: c }).collect();
    let mut done = vec![false; nclass];
    while let Some(HeapItem { d, class: u }) = heap.pop() {
        if done[u] || d > dist[u] {
            continue;
        }
        if d > cutoff {
            break;
        }
        if s.is_singular(u) {
            return Ok(Some((d, u)));
        }
        done[u] = true;
        for sc in from_class(s, u, cutoff - d, DEFAULT_WINDOW_BUDGET)? {
            let nd = d + sc.length;
            if nd < dist[sc.end] && !done[sc.end] {
                dist[sc.end] = nd;
                heap.push(HeapItem { d: nd, class: sc.end });
            }
        }
    }
    Ok(None)
}

/// `(x, y)_p = ½ (d(x, p) + d(y, p) − d(x, y))`.
pub fn gromov_product<T: Scalar>(
    s: &FlatSurface<T>,
    p: &SurfacePoint<T>,
    x: &SurfacePoint<T>,
    y: &SurfacePoint<T>,
    cutoff: T,
) -> Result<T> {
    let dxp = distance(s, x, p, cutoff)?.0;
    let dyp = distance(s, y, p, cutoff)?.0;
    let dxy = distance(s, x, y, cutoff)?.0;
    Ok((dxp + dyp - dxy) / T::from_f64(2.0).unwrap())
}
