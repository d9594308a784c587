//! Maximal flat cylinders, the high-cylinder decomposition and the systole.
//!
//! A cylinder is found from one side of a saddle connection: a line parallel
//! to it and slightly to its left is flowed until it closes up, then swept
//! sideways in both directions until a level containing a cone point is
//! reached. The triangles crossed by a closed line cover the whole strip up
//! to the nearest vertex level above it, so each sweep step jumps straight to
//! the next vertex level.

mod decomposition;
mod systole;

pub use decomposition::{high_cylinder_decomposition, Component, Decomposition, DEFAULT_C_HEIGHT};
pub use systole::{systole, SystoleKind, SystoleRecord};

use rayon::prelude::*;

use crate::error::{FlatError, Result};
use crate::scalar::{lit, Scalar, Vec2};
use crate::surface::{FlatSurface, SurfacePoint};
use crate::unfolding::ray::{trace, trace_from_vertex};
use crate::unfolding::{enumerate_saddle_connections, SaddleConnection, Terminal};

const MAX_SWEEP_STEPS: usize = 10_000;

/// Boundary piece between two consecutive cone points on one side of a cylinder.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundarySegment<T> {
    pub start: usize,
    pub end: usize,
    pub length: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CylinderRecord<T> {
    /// Unit core direction in the chart of `core_point`, with angle in `[0, π)`.
    pub direction: Vec2<T>,
    pub circumference: T,
    pub height: T,
    /// A point of the core curve, halfway between the two boundaries.
    pub core_point: SurfacePoint<T>,
    /// Boundary to the right and to the left of `direction`.
    pub bottom: Vec<BoundarySegment<T>>,
    pub top: Vec<BoundarySegment<T>>,
    pub maximal: bool,
    /// No cone point bounds the sweep: the cylinder is the whole surface.
    pub whole_surface: bool,
    /// Polygon-side crossings of the core, used to tell cylinders apart.
    marks: Vec<(usize, Vec2<T>)>,
}

impl<T: Scalar> CylinderRecord<T> {
    pub fn area(&self) -> T {
        self.circumference * self.height
    }

    /// Angle of `direction`, in `[0, π)`.
    pub fn angle(&self) -> T {
        self.direction.angle()
    }

    fn same_as(&self, o: &Self, eps: T) -> bool {
        let mut da = (self.angle() - o.angle()).abs();
        da = da.min(T::PI() - da);
        if da > eps || (self.circumference - o.circumference).abs() > eps || (self.height - o.height).abs() > eps {
            return false;
        }
        if self.whole_surface || o.whole_surface {
            return self.whole_surface == o.whole_surface;
        }
        match self.marks.first() {
            Some(&(poly, p)) => o.marks.iter().any(|&(q, x)| q == poly && x.dist(p) <= eps),
            None => o.marks.is_empty(),
        }
    }
}

/// A point with a unit direction in its polygon chart.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Frame<T> {
    pub p: SurfacePoint<T>,
    pub d: Vec2<T>,
}

/// Moves `f` sideways by `dist` (to the left for `side = 1`), carrying the
/// direction along. `None` if a cone point is in the way.
pub(crate) fn shift<T: Scalar>(s: &FlatSurface<T>, f: &Frame<T>, side: T, dist: T) -> Result<Option<Frame<T>>> {
    if !(dist > T::zero()) {
        return Ok(Some(*f));
    }
    let n = f.d.perp().scale(side);
    let (traj, _) = trace(s, &f.p, n, dist)?;
    if traj.terminal != Terminal::Cutoff {
        return Ok(None);
    }
    Ok(Some(Frame { p: traj.end, d: traj.end_direction.perp().scale(-side) }))
}

fn closure_tol<T: Scalar>(s: &FlatSurface<T>) -> T {
    s.tolerance().max(lit(1e-9)) * lit(100.0)
}

/// Length after which the line through `f` closes up, if it does so within
/// `max_len` without meeting a cone point.
pub(crate) fn closing_length<T: Scalar>(s: &FlatSurface<T>, f: &Frame<T>, max_len: T) -> Result<Option<T>> {
    let ctol = closure_tol(s);
    let (traj, cells) = trace(s, &f.p, f.d, max_len + ctol)?;
    let t0 = cells[0].0;
    let mut best: Option<T> = None;
    for &(t, pl) in cells.iter().skip(1) {
        if t != t0 || pl.sign < T::zero() {
            continue;
        }
        let q = pl.apply(f.p.position);
        let x = f.d.dot(q);
        if f.d.cross(q).abs() <= ctol && x > ctol && x <= traj.length + ctol && best.is_none_or(|b| x < b) {
            best = Some(x);
        }
    }
    Ok(best)
}

enum Climb<T> {
    /// Distance to the first level holding a cone point, and the cone points
    /// on it with their position along the line.
    Boundary { height: T, hits: Vec<(usize, T)> },
    /// The sweep passed `cap` without meeting a cone point.
    Cap,
}

fn climb<T: Scalar>(s: &FlatSurface<T>, start: &Frame<T>, c: T, side: T, cap: T, eta: T) -> Result<Option<Climb<T>>> {
    let mesh = s.mesh();
    let lvl = eta * lit(0.25);
    let mut f = *start;
    let mut acc = T::zero();
    for step in 0..MAX_SWEEP_STEPS {
        let (traj, cells) = trace(s, &f.p, f.d, c)?;
        if let Terminal::ConePoint(class) = traj.terminal {
            return Ok(Some(Climb::Boundary { height: acc, hits: vec![(class, traj.length)] }));
        }
        let n = f.d.perp().scale(side);
        let mut verts = Vec::with_capacity(cells.len() * 3);
        for &(t, pl) in &cells {
            for k in 0..3 {
                let v = pl.apply(mesh.tris[t].pts[k]);
                verts.push((n.dot(v), f.d.dot(v), mesh.class_of(t, k)));
            }
        }
        let level_hits = |y: T| -> Vec<(usize, T)> {
            verts.iter().filter(|v| (v.0 - y).abs() <= lvl && s.is_singular(v.2)).map(|v| (v.2, v.1)).collect()
        };
        if step > 0 {
            // the level stepped over by the last shift
            let low = verts
                .iter()
                .filter(|v| v.0 <= lvl && v.0 > -eta - lvl && s.is_singular(v.2))
                .map(|v| v.0)
                .fold(T::infinity(), |a, b| a.min(b));
            if low.is_finite() {
                return Ok(Some(Climb::Boundary { height: acc + low, hits: level_hits(low) }));
            }
        }
        let up = verts.iter().filter(|v| v.0 > lvl).map(|v| v.0).fold(T::infinity(), |a, b| a.min(b));
        if !up.is_finite() {
            return Ok(None);
        }
        if acc + up >= cap {
            return Ok(Some(Climb::Cap));
        }
        let hits = level_hits(up);
        if !hits.is_empty() {
            return Ok(Some(Climb::Boundary { height: acc + up, hits }));
        }
        let Some(next) = shift(s, &f, side, up + eta)? else {
            return Ok(None);
        };
        f = next;
        acc = acc + up + eta;
    }
    Ok(None)
}

/// Consecutive cone points along a boundary line of length `c`.
fn boundary_segments<T: Scalar>(hits: &[(usize, T)], c: T, eps: T) -> Vec<BoundarySegment<T>> {
    let mut pts: Vec<(T, usize)> = hits.iter().map(|&(k, x)| (crate::scalar::wrap_angle(x, c), k)).collect();
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut uniq: Vec<(T, usize)> = Vec::new();
    for p in pts {
        if uniq.last().is_none_or(|l| p.0 - l.0 > eps) {
            uniq.push(p);
        }
    }
    if uniq.len() > 1 && uniq[0].0 + c - uniq[uniq.len() - 1].0 <= eps {
        uniq.pop();
    }
    let n = uniq.len();
    (0..n)
        .map(|i| {
            let (x0, a) = uniq[i];
            let (x1, b) = uniq[(i + 1) % n];
            let len = if i + 1 < n { x1 - x0 } else { x1 + c - x0 };
            BoundarySegment { start: a, end: b, length: len }
        })
        .collect()
}

/// Points where the closed line through `f` of length `c` crosses polygon sides.
fn core_marks<T: Scalar>(s: &FlatSurface<T>, f: &Frame<T>, c: T) -> Result<Vec<(usize, Vec2<T>)>> {
    let (traj, _) = trace(s, &f.p, f.d, c)?;
    let segs = &traj.segments;
    let mut marks = Vec::new();
    for (i, seg) in segs.iter().enumerate() {
        if i > 0 {
            marks.push((seg.polygon, seg.entry));
        }
        if i + 1 < segs.len() {
            marks.push((seg.polygon, seg.exit));
        }
    }
    marks.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.x.partial_cmp(&b.1.x).unwrap())
            .then(a.1.y.partial_cmp(&b.1.y).unwrap())
    });
    Ok(marks)
}

/// The cylinder on the left of `sc`, if its left side bounds one of
/// circumference at most `c_max`.
fn cylinder_left_of<T: Scalar>(s: &FlatSurface<T>, sc: &SaddleConnection<T>, c_max: T) -> Result<Option<CylinderRecord<T>>> {
    let scale = s.area().sqrt();
    let eta = (scale * lit(1e-7)).max(s.tolerance() * lit(100.0));
    let half = sc.length / lit(2.0);
    let (traj, _) = trace_from_vertex(s, sc.start, sc.start_angle, half)?;
    if traj.terminal != Terminal::Cutoff {
        return Ok(None);
    }
    let mid = Frame { p: traj.end, d: traj.end_direction };
    let one = T::one();
    let Some(f0) = shift(s, &mid, one, eta)? else {
        return Ok(None);
    };
    let Some(c) = closing_length(s, &f0, c_max)? else {
        return Ok(None);
    };
    let cap = s.area() / c * (one + lit(1e-9));
    let eps = closure_tol(s);
    let (up, down) = match climb(s, &f0, c, one, cap, eta)? {
        None => return Ok(None),
        Some(Climb::Cap) => (None, None),
        Some(Climb::Boundary { height, hits }) => match climb(s, &f0, c, -one, cap, eta)? {
            Some(Climb::Boundary { height: hd, hits: dh }) => (Some((height, hits)), Some((hd, dh))),
            Some(Climb::Cap) | None => return Ok(None),
        },
    };
    let (core, height, top, bottom, whole) = match (up, down) {
        (Some((hu, th)), Some((hd, bh))) => {
            let off = (hu - hd) / lit(2.0);
            let side = if off >= T::zero() { one } else { -one };
            let Some(core) = shift(s, &f0, side, off.abs())? else {
                return Ok(None);
            };
            (core, hu + hd, boundary_segments(&th, c, eps), boundary_segments(&bh, c, eps), false)
        }
        _ => (f0, s.area() / c, Vec::new(), Vec::new(), true),
    };
    let mut d = core.d;
    let (mut top, mut bottom) = (top, bottom);
    let a = d.angle();
    if a < T::zero() || a >= T::PI() {
        d = -d;
        std::mem::swap(&mut top, &mut bottom);
    }
    let marks = core_marks(s, &core, c)?;
    let maximal = whole || (!top.is_empty() && !bottom.is_empty());
    Ok(Some(CylinderRecord {
        direction: d,
        circumference: c,
        height,
        core_point: core.p,
        bottom,
        top,
        maximal,
        whole_surface: whole,
        marks,
    }))
}

fn cmp_cylinders<T: Scalar>(a: &CylinderRecord<T>, b: &CylinderRecord<T>) -> std::cmp::Ordering {
    let key = |c: &CylinderRecord<T>| c.marks.first().map(|m| (m.0, m.1.x, m.1.y));
    a.angle()
        .partial_cmp(&b.angle())
        .unwrap()
        .then(a.circumference.partial_cmp(&b.circumference).unwrap())
        .then(a.height.partial_cmp(&b.height).unwrap())
        .then(key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal))
}

/// Maximal cylinders with height at least `h_min` and circumference at most
/// `c_max`, ordered by direction angle, then size and position.
pub fn detect_cylinders<T: Scalar>(s: &FlatSurface<T>, h_min: T, c_max: T) -> Result<Vec<CylinderRecord<T>>> {
    if !(h_min > T::zero()) || !(c_max > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("need h_min > 0 and c_max > 0, got {h_min}, {c_max}")));
    }
    if !c_max.is_finite() {
        return Err(FlatError::InvalidParameter("c_max must be finite".into()));
    }
    let scs = enumerate_saddle_connections(s, c_max)?;
    let found: Vec<Result<Option<CylinderRecord<T>>>> =
        scs.par_iter().map(|sc| cylinder_left_of(s, sc, c_max)).collect();
    let eps = closure_tol(s) * lit(10.0);
    let mut out: Vec<CylinderRecord<T>> = Vec::new();
    for r in found {
        let Some(cyl) = r? else { continue };
        if cyl.height + eps < h_min || cyl.circumference > c_max + eps {
            continue;
        }
        if !out.iter().any(|o| o.same_as(&cyl, eps)) {
            out.push(cyl);
        }
    }
    out.sort_by(cmp_cylinders);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn unit_torus_horizontal_cylinder() {
        let s = fixtures::torus::<f64>();
        let cyls = detect_cylinders(&s, 0.1, 1.01).unwrap();
        assert_eq!(cyls.len(), 2);
        let h = &cyls[0];
        assert!(h.whole_surface && h.maximal);
        assert_relative_eq!(h.angle(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(h.circumference, 1.0, epsilon = 1e-9);
        assert_relative_eq!(h.height, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn rectangle_torus_short_direction() {
        let s = fixtures::rect_torus::<f64>();
        let cyls = detect_cylinders(&s, 0.1, 0.6).unwrap();
        assert_eq!(cyls.len(), 1);
        assert_relative_eq!(cyls[0].circumference, 0.5, epsilon = 1e-9);
        assert_relative_eq!(cyls[0].height, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn one_cylinder_surface_horizontal() {
        let s = fixtures::one_cylinder::<f64>();
        let side = 1.0 / 3f64.sqrt();
        let cyls = detect_cylinders(&s, 0.1, 2.0).unwrap();
        let h: Vec<_> = cyls.iter().filter(|c| c.angle().abs() < 1e-9).collect();
        assert_eq!(h.len(), 1, "{cyls:#?}");
        assert_relative_eq!(h[0].circumference, 3.0 * side, epsilon = 1e-9);
        assert_relative_eq!(h[0].height, side, epsilon = 1e-9);
        assert!(h[0].maximal && !h[0].whole_surface);
        let total: f64 = h[0].top.iter().map(|b| b.length).sum();
        assert_relative_eq!(total, 3.0 * side, epsilon = 1e-9);
    }

    #[test]
    fn octagon_side_direction_area_budget() {
        let s = fixtures::octagon::<f64>();
        let cyls = detect_cylinders(&s, 1e-3, 1.5).unwrap();
        assert!(!cyls.is_empty());
        let mut by_dir: Vec<(f64, f64)> = Vec::new();
        for c in &cyls {
            assert!(c.maximal && !c.whole_surface);
            match by_dir.iter_mut().find(|(a, _)| (a - c.angle()).abs() < 1e-9) {
                Some(e) => e.1 += c.area(),
                None => by_dir.push((c.angle(), c.area())),
            }
        }
        for (_, a) in by_dir {
            assert!(a <= 1.0 + 1e-9);
        }
    }
}
