//! Shortest representatives of homotopy classes of paths.
//!
//! A path is first traced into a *sleeve*: a start, the sequence of triangle
//! edges it crosses, and an end. The shortest path inside the developed sleeve
//! is found with a funnel algorithm; it bends only at sleeve vertices. A bend
//! where the angle on the side away from the sleeve is below π is not locally
//! geodesic, and the sleeve is rerouted around the other side of that vertex
//! (homotopic, since vertices are points of the closed surface). This repeats
//! until every bend satisfies the angle condition.

use crate::error::{FlatError, Result};
use crate::scalar::{lit, Placement, Scalar, Vec2};
use crate::surface::{FlatSurface, Mesh, SurfacePoint};

use super::geodesic::{junction_ok, side_angles, GeodesicPath, Leg, Waypoint};
use super::ray::start_cell;

/// A polyline on the surface: a start point and successive displacement
/// vectors, all expressed in the chart of the start point's polygon and
/// continued by developing.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewisePath<T> {
    pub start: SurfacePoint<T>,
    pub legs: Vec<Vec2<T>>,
}

#[derive(Clone, Debug)]
pub struct Tightened<T> {
    pub path: GeodesicPath<T>,
    pub length: T,
    /// False when the iteration limit stopped the search (best so far returned).
    pub converged: bool,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum End<T> {
    /// Chart position in the end triangle.
    Point(Vec2<T>),
    /// Corner of the end triangle.
    Vertex(usize),
}

#[derive(Clone, Debug)]
struct Sleeve<T> {
    start_tri: usize,
    start: End<T>,
    crossings: Vec<(usize, usize)>,
    end: End<T>,
}

impl<T: Scalar> Sleeve<T> {
    fn tris(&self, mesh: &Mesh<T>) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.crossings.len() + 1);
        out.push(self.start_tri);
        for &(t, e) in &self.crossings {
            out.push(mesh.tris[t].adj[e].tri);
        }
        out
    }

    fn end_tri(&self, mesh: &Mesh<T>) -> usize {
        self.crossings.last().map_or(self.start_tri, |&(t, e)| mesh.tris[t].adj[e].tri)
    }

    /// Drops immediate back-and-forth crossings and crossings that only
    /// rotate around a vertex endpoint.
    fn normalize(&mut self, mesh: &Mesh<T>) {
        let mut stack: Vec<(usize, usize)> = Vec::with_capacity(self.crossings.len());
        for &(t, e) in &self.crossings {
            if let Some(&(pt, pe)) = stack.last() {
                let a = mesh.tris[pt].adj[pe];
                if a.tri == t && a.edge == e {
                    stack.pop();
                    continue;
                }
            }
            stack.push((t, e));
        }
        self.crossings = stack;
        if let End::Vertex(mut c) = self.start {
            let mut k = 0;
            while k < self.crossings.len() {
                let (t, e) = self.crossings[k];
                debug_assert_eq!(t, self.start_tri);
                let a = mesh.tris[t].adj[e];
                if e == c {
                    c = (a.edge + 1) % 3;
                } else if e == (c + 2) % 3 {
                    c = a.edge;
                } else {
                    break;
                }
                self.start_tri = a.tri;
                k += 1;
            }
            self.crossings.drain(..k);
            self.start = End::Vertex(c);
        }
        if let End::Vertex(mut c) = self.end {
            while let Some(&(t, e)) = self.crossings.last() {
                let a = mesh.tris[t].adj[e];
                if a.edge == c {
                    c = (e + 1) % 3;
                } else if a.edge == (c + 2) % 3 {
                    c = e;
                } else {
                    break;
                }
                self.crossings.pop();
            }
            self.end = End::Vertex(c);
        }
    }
}

/// Moves ccw (`+1`) or cw (`-1`) around the vertex at corner `c` of `t`.
fn star_step<T: Scalar>(mesh: &Mesh<T>, t: usize, c: usize, ccw: bool) -> ((usize, usize), usize, usize) {
    if ccw {
        let e = (c + 2) % 3;
        let a = mesh.tris[t].adj[e];
        ((t, e), a.tri, a.edge)
    } else {
        let a = mesh.tris[t].adj[c];
        ((t, c), a.tri, (a.edge + 1) % 3)
    }
}

/// Angle from the first edge of corner `c` to `d`, mapped into `(-gap/2, wedge + gap/2]`.
fn angle_in_corner<T: Scalar>(mesh: &Mesh<T>, t: usize, c: usize, d: Vec2<T>) -> T {
    let tri = &mesh.tris[t];
    let e1 = tri.pts[(c + 1) % 3] - tri.pts[c];
    let a = e1.ccw_angle_to(d);
    let w = tri.corner_angle(c);
    let two_pi = T::PI() + T::PI();
    if a > w + (two_pi - w) / lit(2.0) {
        a - two_pi
    } else {
        a
    }
}

/// Tracer state: current triangle, its chart→developed map, and corner if
/// sitting on a vertex (with the developed back direction of arrival).
struct Cursor<T> {
    tri: usize,
    placement: Placement<T>,
    corner: Option<usize>,
    back: Option<Vec2<T>>,
    entry: Option<usize>,
}

/// Turns counterclockwise at the current vertex from the arrival back
/// direction to developed direction `out`, recording star crossings.
fn turn<T: Scalar>(mesh: &Mesh<T>, cur: &mut Cursor<T>, out: Vec2<T>, crossings: &mut Vec<(usize, usize)>) {
    let c = cur.corner.expect("turning at a vertex");
    let Some(back) = cur.back else { return };
    let back_chart = cur.placement.unapply_dir(back);
    let mut u = angle_in_corner(mesh, cur.tri, c, back_chart) + back.ccw_angle_to(out);
    let (mut t, mut k, mut p) = (cur.tri, c, cur.placement);
    let slack = T::geometric_eps();
    let mut guard = 0;
    loop {
        let w = mesh.tris[t].corner_angle(k);
        if u <= w + slack || guard > 10_000 {
            break;
        }
        u = u - w;
        let (cr, t2, k2) = star_step(mesh, t, k, true);
        let (_, _, p2) = mesh.cross(t, cr.1, &p);
        crossings.push(cr);
        t = t2;
        k = k2;
        p = p2;
        guard += 1;
    }
    *cur = Cursor { tri: t, placement: p, corner: Some(k), back: None, entry: None };
}

fn trace<T: Scalar>(s: &FlatSurface<T>, path: &PiecewisePath<T>) -> Result<(Sleeve<T>, Vec2<T>, T)> {
    let mesh = s.mesh();
    let tol = s.tolerance();
    let legs: Vec<Vec2<T>> = path.legs.iter().copied().filter(|v| v.norm() > T::zero()).collect();
    let d0 = legs.first().map_or(Vec2::new(T::one(), T::zero()), |v| v.normalized());
    let (tri, placement, corner) = start_cell(s, path.start.polygon, path.start.position, d0)?;
    let start = match corner {
        Some(c) => End::Vertex(c),
        None => End::Point(placement.unapply(Vec2::zero())),
    };
    let start_tri = tri;
    let mut crossings = Vec::new();
    let mut cur = Cursor { tri, placement, corner, back: None, entry: None };
    let mut x = Vec2::zero();
    for v in &legs {
        let len = v.norm();
        let dir = v.normalized();
        if cur.corner.is_some() {
            turn(mesh, &mut cur, dir, &mut crossings);
        }
        let mut pos = T::zero();
        let mut guard = 0usize;
        loop {
            guard += 1;
            if guard > 10_000_000 {
                return Err(FlatError::BudgetExhausted { budget: guard });
            }
            let tri = &mesh.tris[cur.tri];
            let pts: [Vec2<T>; 3] = [0, 1, 2].map(|k| cur.placement.apply(tri.pts[k]) - x);
            let ahead = |q: T| q > pos + tol * lit(1e-3);
            let mut vhit: Option<(T, usize)> = None;
            for k in 0..3 {
                if Some(k) == cur.corner {
                    continue;
                }
                let sk = pts[k].dot(dir);
                if ahead(sk) && dir.cross(pts[k]).abs() <= tol && vhit.is_none_or(|(b, _)| sk < b) {
                    vhit = Some((sk, k));
                }
            }
            let mut ehit: Option<(T, usize)> = None;
            for e in 0..3 {
                if Some(e) == cur.entry {
                    continue;
                }
                let a = pts[e];
                let ab = pts[(e + 1) % 3] - a;
                let den = dir.cross(ab);
                if den.abs() <= T::epsilon() {
                    continue;
                }
                let sx = a.cross(ab) / den;
                let u = a.cross(dir) / den;
                let sl = lit::<T>(1e-9);
                if ahead(sx) && u >= -sl && u <= T::one() + sl && ehit.is_none_or(|(b, _)| sx < b) {
                    ehit = Some((sx, e));
                }
            }
            let vfirst = match (vhit, ehit) {
                (Some((sv, _)), Some((se, _))) => sv <= se + tol,
                (Some(_), None) => true,
                _ => false,
            };
            if vfirst {
                let (sv, k) = vhit.unwrap();
                if sv > len + tol {
                    break;
                }
                cur.corner = Some(k);
                cur.entry = None;
                cur.back = Some(-dir);
                if sv >= len - tol {
                    break;
                }
                // straight through the vertex
                turn(mesh, &mut cur, dir, &mut crossings);
                pos = sv;
                continue;
            }
            match ehit {
                Some((se, e)) if se < len - tol * lit(1e-3) => {
                    crossings.push((cur.tri, e));
                    let (t2, e2, p2) = mesh.cross(cur.tri, e, &cur.placement);
                    cur = Cursor { tri: t2, placement: p2, corner: None, back: None, entry: Some(e2) };
                    pos = se;
                }
                _ => {
                    cur.corner = None;
                    cur.entry = None;
                    break;
                }
            }
        }
        x += v.scale(T::one());
    }
    let end = match cur.corner {
        Some(c) => End::Vertex(c),
        None => End::Point(cur.placement.unapply(x)),
    };
    Ok((Sleeve { start_tri, start, crossings, end }, x, cur.placement.sign))
}

#[derive(Clone, Copy, Debug)]
struct Bend {
    portal: usize,
    left: bool,
}

struct Developed<T> {
    tris: Vec<usize>,
    placements: Vec<Placement<T>>,
    start: Vec2<T>,
    end: Vec2<T>,
    /// (left, right) developed endpoints of each crossed edge.
    portals: Vec<(Vec2<T>, Vec2<T>)>,
}

fn develop<T: Scalar>(mesh: &Mesh<T>, sl: &Sleeve<T>) -> Developed<T> {
    let tris = sl.tris(mesh);
    let mut placements = vec![Placement::identity()];
    let mut portals = Vec::with_capacity(sl.crossings.len());
    for &(t, e) in &sl.crossings {
        let p = *placements.last().unwrap();
        let tri = &mesh.tris[t];
        portals.push((p.apply(tri.pts[(e + 1) % 3]), p.apply(tri.pts[e])));
        let (_, _, p2) = mesh.cross(t, e, &p);
        placements.push(p2);
    }
    let pos = |tri: usize, end: &End<T>, p: &Placement<T>| match *end {
        End::Point(x) => p.apply(x),
        End::Vertex(c) => p.apply(mesh.tris[tri].pts[c]),
    };
    let start = pos(tris[0], &sl.start, &placements[0]);
    let end = pos(*tris.last().unwrap(), &sl.end, placements.last().unwrap());
    Developed { tris, placements, start, end, portals }
}

/// Shortest path through the portals; returns the bends.
fn funnel<T: Scalar>(dev: &Developed<T>, scale: T) -> Vec<Bend> {
    let n = dev.portals.len();
    let eps = scale * T::geometric_eps();
    let same = |a: Vec2<T>, b: Vec2<T>| a.dist(b) <= eps;
    let portal = |i: usize| if i < n { dev.portals[i] } else { (dev.end, dev.end) };
    let mut bends = Vec::new();
    let mut apex = dev.start;
    let (mut left, mut right) = (dev.start, dev.start);
    let (mut li, mut ri): (isize, isize) = (-1, -1);
    let mut i: isize = 0;
    let mut guard = 0usize;
    while (i as usize) <= n {
        guard += 1;
        if guard > 4 * (n + 2) * (n + 2) + 100 {
            break;
        }
        let (l, r) = portal(i as usize);
        if (right - apex).cross(r - apex) >= T::zero() {
            if same(apex, right) || (left - apex).cross(r - apex) < T::zero() {
                right = r;
                ri = i;
            } else {
                if li as usize >= n {
                    break;
                }
                bends.push(Bend { portal: li as usize, left: true });
                apex = left;
                right = left;
                ri = li;
                i = li + 1;
                continue;
            }
        }
        if (left - apex).cross(l - apex) <= T::zero() {
            if same(apex, left) || (right - apex).cross(l - apex) > T::zero() {
                left = l;
                li = i;
            } else {
                if ri as usize >= n {
                    break;
                }
                bends.push(Bend { portal: ri as usize, left: false });
                apex = right;
                left = right;
                li = ri;
                i = ri + 1;
                continue;
            }
        }
        i += 1;
    }
    bends
}

/// Everything known about one bend of the funnel path.
struct BendInfo<T> {
    class: usize,
    pos: Vec2<T>,
    /// First and last portal touching the vertex in this visit.
    k1: usize,
    k2: usize,
    ccw: bool,
    /// Signed sweep from back direction to out direction through the sleeve.
    sweep: T,
    back_angle: T,
    out_angle: T,
    corner_in: usize,
}

fn vertex_corner<T: Scalar>(mesh: &Mesh<T>, tri: usize, p: &Placement<T>, pos: Vec2<T>, eps: T) -> Option<usize> {
    (0..3).min_by(|&a, &b| {
        let da = p.apply(mesh.tris[tri].pts[a]).dist(pos);
        let db = p.apply(mesh.tris[tri].pts[b]).dist(pos);
        da.partial_cmp(&db).unwrap()
    })
    .filter(|&c| p.apply(mesh.tris[tri].pts[c]).dist(pos) <= eps)
}

fn analyze<T: Scalar>(
    mesh: &Mesh<T>,
    sl: &Sleeve<T>,
    dev: &Developed<T>,
    bends: &[Bend],
    scale: T,
) -> Vec<BendInfo<T>> {
    let eps = scale * lit(1e-9);
    let mut apexes = vec![dev.start];
    let mut kept = Vec::with_capacity(bends.len());
    for b in bends {
        let (l, r) = dev.portals[b.portal];
        let pos = if b.left { l } else { r };
        // The funnel can restart at the apex it just left; that is the same
        // vertex visit, whose fan is widened below.
        if pos.dist(*apexes.last().unwrap()) > eps {
            apexes.push(pos);
            kept.push(b);
        }
    }
    apexes.push(dev.end);
    let bends = kept;
    let mut out = Vec::new();
    for (bi, b) in bends.iter().enumerate() {
        let pos = apexes[bi + 1];
        let touches = |k: usize| {
            let (l, r) = dev.portals[k];
            l.dist(pos) <= eps || r.dist(pos) <= eps
        };
        let (mut k1, mut k2) = (b.portal, b.portal);
        while k1 > 0 && touches(k1 - 1) {
            k1 -= 1;
        }
        while k2 + 1 < dev.portals.len() && touches(k2 + 1) {
            k2 += 1;
        }
        let f0 = dev.tris[k1];
        let fm = dev.tris[k2 + 1];
        let c0 = vertex_corner(mesh, f0, &dev.placements[k1], pos, eps).expect("bend vertex in first fan triangle");
        let cm = vertex_corner(mesh, fm, &dev.placements[k2 + 1], pos, eps).expect("bend vertex in last fan triangle");
        let class = mesh.class_of(f0, c0);
        let back = dev.placements[k1].unapply_dir(apexes[bi] - pos);
        let outd = dev.placements[k2 + 1].unapply_dir(apexes[bi + 2] - pos);
        let mut x = T::zero();
        let mut ccw = b.left;
        for k in k1..=k2 {
            let (t, e) = sl.crossings[k];
            let c = vertex_corner(mesh, t, &dev.placements[k], pos, eps).expect("fan triangle touches vertex");
            if e == (c + 2) % 3 {
                ccw = true;
                x = x + mesh.tris[t].corner_angle(c);
            } else {
                ccw = false;
                let tn = dev.tris[k + 1];
                let cn = vertex_corner(mesh, tn, &dev.placements[k + 1], pos, eps).expect("fan triangle touches vertex");
                x = x - mesh.tris[tn].corner_angle(cn);
            }
        }
        let sweep = x + angle_in_corner(mesh, fm, cm, outd) - angle_in_corner(mesh, f0, c0, back);
        out.push(BendInfo {
            class,
            pos,
            k1,
            k2,
            ccw,
            sweep,
            back_angle: mesh.angle_coordinate(f0, c0, back),
            out_angle: mesh.angle_coordinate(fm, cm, outd),
            corner_in: c0,
        });
    }
    out
}

fn sleeve_scale<T: Scalar>(dev: &Developed<T>) -> T {
    let mut m = dev.start.norm().max(dev.end.norm());
    for (l, r) in &dev.portals {
        m = m.max(l.norm()).max(r.norm());
    }
    m.max(T::one())
}

struct Solved<T> {
    sleeve: Sleeve<T>,
    dev: Developed<T>,
    bends: Vec<BendInfo<T>>,
    length: T,
}

fn polyline_length<T: Scalar>(dev: &Developed<T>, bends: &[BendInfo<T>]) -> T {
    let mut pts = vec![dev.start];
    pts.extend(bends.iter().map(|b| b.pos));
    pts.push(dev.end);
    pts.windows(2).map(|w| w[0].dist(w[1])).sum()
}

/// Fixed-endpoint tightening of a sleeve; returns the final sleeve and whether
/// every bend satisfies the angle condition.
fn solve<T: Scalar>(s: &FlatSurface<T>, mut sl: Sleeve<T>, max_iter: usize, iters: &mut usize) -> (Solved<T>, bool) {
    let mesh = s.mesh();
    let tol = s.tolerance().max(T::geometric_eps() * lit(1e3));
    loop {
        sl.normalize(mesh);
        let dev = develop(mesh, &sl);
        let scale = sleeve_scale(&dev);
        let raw = funnel(&dev, scale);
        let bends = analyze(mesh, &sl, &dev, &raw, scale);
        let length = polyline_length(&dev, &bends);
        let bad = bends.iter().find(|b| {
            let theta = mesh.stars[b.class].angle;
            b.sweep.abs() > theta - T::PI() + tol
        });
        let Some(b) = bad else {
            return (Solved { sleeve: sl, dev, bends, length }, true);
        };
        if *iters >= max_iter {
            return (Solved { sleeve: sl, dev, bends, length }, false);
        }
        *iters += 1;
        // reroute the fan k1..=k2 around the other side of the vertex
        let n = mesh.stars[b.class].corners.len();
        let m = b.k2 - b.k1 + 1;
        let (steps, ccw) = if m < n { (n - m, !b.ccw) } else { (m - n, b.ccw) };
        let (mut t, mut c) = (dev.tris[b.k1], b.corner_in);
        let mut fan = Vec::with_capacity(steps);
        for _ in 0..steps {
            let (cr, t2, c2) = star_step(mesh, t, c, ccw);
            fan.push(cr);
            t = t2;
            c = c2;
        }
        debug_assert_eq!(t, dev.tris[b.k2 + 1]);
        sl.crossings.splice(b.k1..=b.k2, fan);
    }
}

fn leg_between<T: Scalar>(
    dev: &Developed<T>,
    from: Vec2<T>,
    to: Vec2<T>,
    from_idx: usize,
    start_angle: Option<T>,
    end_angle: Option<T>,
) -> Leg<T> {
    let d = to - from;
    Leg { vector: dev.placements[from_idx].unapply_dir(d), length: d.norm(), start_angle, end_angle }
}

/// Builds the path waypoints and legs of a solved open sleeve.
fn to_path<T: Scalar>(s: &FlatSurface<T>, sol: &Solved<T>) -> GeodesicPath<T> {
    let mesh = s.mesh();
    let dev = &sol.dev;
    let sl = &sol.sleeve;
    let first_tri = dev.tris[0];
    let last_idx = dev.tris.len() - 1;
    let last_tri = dev.tris[last_idx];
    let wp = |tri: usize, e: &End<T>| match *e {
        End::Vertex(c) => Waypoint::Vertex(mesh.class_of(tri, c)),
        End::Point(x) => Waypoint::Point(SurfacePoint::new(mesh.tris[tri].polygon, x)),
    };
    let mut waypoints = vec![wp(first_tri, &sl.start)];
    let mut pts = vec![(dev.start, 0usize)];
    for b in &sol.bends {
        waypoints.push(Waypoint::Vertex(b.class));
        pts.push((b.pos, b.k2 + 1));
    }
    waypoints.push(wp(last_tri, &sl.end));
    pts.push((dev.end, last_idx));
    let mut legs = Vec::new();
    for i in 0..pts.len() - 1 {
        let (a, ai) = pts[i];
        let (b, _) = pts[i + 1];
        if a.dist(b) == T::zero() && pts.len() == 2 {
            break;
        }
        let start_angle = if i == 0 {
            match sl.start {
                End::Vertex(c) => Some(mesh.angle_coordinate(first_tri, c, b - a)),
                End::Point(_) => None,
            }
        } else {
            Some(sol.bends[i - 1].out_angle)
        };
        let end_angle = if i + 1 < pts.len() - 1 {
            Some(sol.bends[i].back_angle)
        } else {
            match sl.end {
                End::Vertex(c) => Some(mesh.angle_coordinate(last_tri, c, dev.placements[last_idx].unapply_dir(a - b))),
                End::Point(_) => None,
            }
        };
        legs.push(leg_between(dev, a, b, ai, start_angle, end_angle));
    }
    if legs.is_empty() {
        waypoints.truncate(1);
    }
    GeodesicPath { waypoints, legs, closed: false }
}

fn check_iter(max_iterations: usize) -> Result<()> {
    if max_iterations == 0 {
        return Err(FlatError::InvalidParameter("max_iterations must be positive".into()));
    }
    Ok(())
}

/// Shortest path homotopic to `path` with fixed endpoints.
pub fn tighten<T: Scalar>(s: &FlatSurface<T>, path: &PiecewisePath<T>, max_iterations: usize) -> Result<Tightened<T>> {
    check_iter(max_iterations)?;
    let (sleeve, _, _) = trace(s, path)?;
    let mut iters = 0;
    let (sol, converged) = solve(s, sleeve, max_iterations, &mut iters);
    let path = to_path(s, &sol);
    Ok(Tightened { length: sol.length, path, converged, iterations: iters })
}

/// Star index of corner `c` of `t`.
fn star_index<T: Scalar>(mesh: &Mesh<T>, t: usize, c: usize) -> usize {
    mesh.corner_info[t][c].1
}

fn star_walk<T: Scalar>(mesh: &Mesh<T>, t: usize, c: usize, steps: usize, ccw: bool) -> (Vec<(usize, usize)>, usize, usize) {
    let (mut t, mut c) = (t, c);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let (cr, t2, c2) = star_step(mesh, t, c, ccw);
        out.push(cr);
        t = t2;
        c = c2;
    }
    (out, t, c)
}

/// Shortest closed geodesic freely homotopic to the closed polyline `path`
/// (whose legs must return to the start point).
pub fn tighten_closed<T: Scalar>(s: &FlatSurface<T>, path: &PiecewisePath<T>, max_iterations: usize) -> Result<Tightened<T>> {
    check_iter(max_iterations)?;
    let mesh = s.mesh();
    let tol = s.tolerance().max(T::geometric_eps() * lit(1e3));
    let (mut sl, _, _) = trace(s, path)?;
    let malformed = || FlatError::MalformedPath("closed path does not return to its start point".into());
    if sl.end_tri(mesh) != sl.start_tri {
        return Err(malformed());
    }
    match (sl.start, sl.end) {
        (End::Point(a), End::Point(b)) if a.dist(b) <= tol * lit(1e3) => sl.end = End::Point(a),
        (End::Vertex(a), End::Vertex(b)) if mesh.class_of(sl.start_tri, a) == mesh.class_of(sl.start_tri, b) => {}
        _ => return Err(malformed()),
    }
    let mut iters = 0;
    let mut best: Option<(GeodesicPath<T>, T)> = None;
    loop {
        let (sol, ok) = solve(s, sl.clone(), max_iterations, &mut iters);
        let dev = &sol.dev;
        if !ok {
            let p = to_path(s, &sol);
            let (path, length) = best.unwrap_or((p, sol.length));
            return Ok(Tightened { path, length, converged: false, iterations: iters });
        }
        if sol.bends.is_empty() {
            let sign = dev.placements.last().unwrap().sign;
            if sign > T::zero() || matches!(sol.sleeve.start, End::Vertex(_)) {
                // straight closed curve (cylinder core) or a loop at a vertex
                if let End::Point(x) = sol.sleeve.start {
                    let leg = Leg {
                        vector: dev.end - dev.start,
                        length: dev.end.dist(dev.start),
                        start_angle: None,
                        end_angle: None,
                    };
                    let path = GeodesicPath {
                        waypoints: vec![Waypoint::Point(SurfacePoint::new(mesh.tris[sl.start_tri].polygon, x))],
                        legs: vec![leg],
                        closed: true,
                    };
                    return Ok(Tightened { length: sol.length, path, converged: true, iterations: iters });
                }
            } else {
                // orientation-reversing holonomy: base the loop at a vertex
                sl = sol.sleeve.clone();
                sl.start = End::Vertex(0);
                let c_end = vertex_corner(
                    mesh,
                    sl.start_tri,
                    &Placement::identity(),
                    mesh.tris[sl.start_tri].pts[0],
                    T::zero(),
                )
                .unwrap_or(0);
                sl.end = End::Vertex(c_end);
                iters += 1;
                if iters > max_iterations {
                    let path = to_path(s, &sol);
                    return Ok(Tightened { length: sol.length, path, converged: false, iterations: iters });
                }
                continue;
            }
        }
        if let (End::Vertex(cs), End::Vertex(ce)) = (sol.sleeve.start, sol.sleeve.end) {
            // loop based at a vertex: check the closing junction
            let mut open = to_path(s, &sol);
            let class = mesh.class_of(sol.sleeve.start_tri, cs);
            let theta = mesh.stars[class].angle;
            let back = open.legs.last().and_then(|l| l.end_angle).unwrap_or(T::zero());
            let out = open.legs.first().and_then(|l| l.start_angle).unwrap_or(T::zero());
            if best.as_ref().is_none_or(|(_, l)| sol.length < *l) {
                let mut p = open.clone();
                p.waypoints.pop();
                p.closed = true;
                best = Some((p, sol.length));
            }
            if !open.legs.is_empty() && junction_ok(theta, back, out, tol) {
                open.waypoints.pop();
                open.closed = true;
                return Ok(Tightened { length: sol.length, path: open, converged: true, iterations: iters });
            }
            iters += 1;
            if iters > max_iterations {
                let (path, length) = best.unwrap();
                return Ok(Tightened { path, length, converged: false, iterations: iters });
            }
            // pull the loop off the vertex into the narrow side
            let (left, right) = side_angles(theta, back, out);
            let narrow_left = left < right;
            let bis = if narrow_left { out + left / lit(2.0) } else { back + right / lit(2.0) };
            let (tb, cb, dir) = mesh.direction_at(class, bis);
            let tri = &mesh.tris[tb];
            let opp = tri.pts[(cb + 2) % 3] - tri.pts[(cb + 1) % 3];
            let alt = tri.area() * lit(2.0) / opp.norm();
            let p = tri.pts[cb] + dir.scale(alt * lit(0.05));
            let n = mesh.stars[class].corners.len();
            let ib = star_index(mesh, tb, cb);
            let is = star_index(mesh, sol.sleeve.start_tri, cs);
            let end_tri = sol.sleeve.end_tri(mesh);
            let ie = star_index(mesh, end_tri, ce);
            let (pre, post) = if narrow_left {
                let (pre, _, _) = star_walk(mesh, tb, cb, (ib + n - is) % n, false);
                let (post, _, _) = star_walk(mesh, end_tri, ce, (ie + n - ib) % n, false);
                (pre, post)
            } else {
                let (pre, _, _) = star_walk(mesh, tb, cb, (is + n - ib) % n, true);
                let (post, _, _) = star_walk(mesh, end_tri, ce, (ib + n - ie) % n, true);
                (pre, post)
            };
            let mut crossings = pre;
            crossings.extend_from_slice(&sol.sleeve.crossings);
            crossings.extend(post);
            sl = Sleeve { start_tri: tb, start: End::Point(p), crossings, end: End::Point(p) };
            continue;
        }
        // loop based at an interior point with bends: rebase at the first bend
        let b = &sol.bends[0];
        let k1 = b.k1;
        let mut crossings = sol.sleeve.crossings[k1..].to_vec();
        crossings.extend_from_slice(&sol.sleeve.crossings[..k1]);
        let f0 = sol.dev.tris[k1];
        let c0 = b.corner_in;
        sl = Sleeve { start_tri: f0, start: End::Vertex(c0), crossings, end: End::Vertex(c0) };
        iters += 1;
        if iters > max_iterations {
            let path = to_path(s, &sol);
            return Ok(Tightened { length: sol.length, path, converged: false, iterations: iters });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::unfolding::is_local_geodesic;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    #[test]
    fn straight_input_is_fixed_point() {
        let s = fixtures::octagon::<f64>();
        let p = PiecewisePath { start: SurfacePoint::new(0, v(-0.1, -0.1)), legs: vec![v(0.3, 0.2)] };
        let t = tighten(&s, &p, 100).unwrap();
        assert!(t.converged);
        assert!((t.length - 0.13f64.sqrt()).abs() < 1e-12);
        assert_eq!(t.path.legs.len(), 1);
    }

    #[test]
    fn zigzag_on_torus_straightens() {
        let s = fixtures::torus::<f64>();
        let p = PiecewisePath {
            start: SurfacePoint::new(0, v(0.1, 0.5)),
            legs: vec![v(0.25, 0.2), v(0.25, -0.4), v(0.25, 0.3), v(0.25, -0.1)],
        };
        let t = tighten_closed(&s, &p, 100).unwrap();
        assert!(t.converged);
        assert!((t.length - 1.0).abs() < 1e-12, "{}", t.length);
        let open = tighten(&s, &p, 100).unwrap();
        assert!((open.length - 1.0).abs() < 1e-12);
    }

    #[test]
    fn detour_around_cone_point_is_pulled_straight() {
        let s = fixtures::octagon::<f64>();
        let a = v(-0.3, -0.3);
        // out to a point near a vertex and back towards the far side
        let p = PiecewisePath { start: SurfacePoint::new(0, a), legs: vec![v(0.5, -0.2), v(0.3, 0.8)] };
        let t = tighten(&s, &p, 100).unwrap();
        assert!(t.converged);
        let check = is_local_geodesic(&s, &t.path).unwrap();
        assert!(check.ok, "{check:?}");
        assert!(t.length <= 0.5f64.hypot(0.2) + 0.3f64.hypot(0.8) + 1e-12);
        let straight = v(0.8, 0.6).norm();
        assert!((t.length - straight).abs() < 1e-12);
    }

    #[test]
    fn octagon_loops() {
        let s = fixtures::octagon::<f64>();
        let apothem = 0.5493420567339049;
        let p = PiecewisePath { start: SurfacePoint::new(0, v(0.05, 0.0)), legs: vec![v(0.0, -2.0 * apothem)] };
        let t = tighten_closed(&s, &p, 100).unwrap();
        assert!(t.converged);
        assert!((t.length - 2.0 * apothem).abs() < 1e-12);

        let v0 = s.polygons()[0].vertices[0];
        let side = s.polygons()[0].vertices[1] - v0;
        let p = PiecewisePath { start: SurfacePoint::new(0, v0), legs: vec![side] };
        let t = tighten_closed(&s, &p, 100).unwrap();
        assert!(t.converged);
        assert!(t.length <= side.norm() + 1e-12);
        assert!(is_local_geodesic(&s, &t.path).unwrap().ok);
    }

    #[test]
    fn open_path_must_close_for_closed_variant() {
        let s = fixtures::octagon::<f64>();
        let p = PiecewisePath { start: SurfacePoint::new(0, v(0.0, 0.0)), legs: vec![v(0.1, 0.0)] };
        assert!(matches!(tighten_closed(&s, &p, 10), Err(FlatError::MalformedPath(_))));
    }
}
