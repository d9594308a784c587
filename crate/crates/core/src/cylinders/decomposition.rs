use crate::error::{FlatError, Result};
use crate::scalar::{lit, Scalar, Vec2};
use crate::surface::{FlatSurface, SurfacePoint};
use crate::unfolding::distances_from;
use crate::unfolding::ray::trace;
use crate::unfolding::RaySegment;

use super::{detect_cylinders, CylinderRecord};

/// `√(3/π)`: on an area-one surface any point farther than `√(4/3)` times this
/// from the cone points lies in a cylinder at least this high.
pub const DEFAULT_C_HEIGHT: f64 = 0.977_205_023_805_839_8;

/// Stride of the coarse interior net used for diameters, in grid steps.
const NET_STRIDE: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct Component<T> {
    /// Singular classes lying in the component.
    pub cone_points: Vec<usize>,
    /// Grid samples in the component.
    pub samples: usize,
    /// Largest distance between two points of the sample net.
    pub diameter: T,
    /// `diameter` plus twice the covering radius of the net.
    pub diameter_upper: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition<T> {
    pub c_height: T,
    /// Maximal cylinders of height at least `c_height`.
    pub cylinders: Vec<CylinderRecord<T>>,
    /// Height of the central subcylinder of each cylinder.
    pub central_heights: Vec<T>,
    /// Height of each of the two collars removed from a cylinder.
    pub collar: T,
    pub components: Vec<Component<T>>,
    /// Pairs of cylinders whose strips overlap.
    pub overlapping: Vec<(usize, usize)>,
    pub warnings: Vec<String>,
}

/// Core of a cylinder as polygon pieces, for band membership tests.
struct Band<T> {
    cyl: CylinderRecord<T>,
    half: T,
    core: Vec<RaySegment<T>>,
}

impl<T: Scalar> Band<T> {
    fn new(s: &FlatSurface<T>, cyl: &CylinderRecord<T>, half: T) -> Result<Self> {
        let (traj, _) = trace(s, &cyl.core_point, cyl.direction, cyl.circumference)?;
        Ok(Band { cyl: cyl.clone(), half, core: traj.segments })
    }

    /// Whether `q` lies within perpendicular distance `half` of the core.
    fn contains(&self, s: &FlatSurface<T>, q: &SurfacePoint<T>) -> Result<bool> {
        if !(self.half > T::zero()) {
            return Ok(false);
        }
        // cone points bound cylinders, they never lie inside one
        if s.vertex_class_at(q).is_some_and(|c| s.is_singular(c)) {
            return Ok(false);
        }
        let eps = s.tolerance();
        for side in [T::one(), -T::one()] {
            let n = self.cyl.direction.perp().scale(side);
            let (traj, _) = trace(s, q, n, self.half)?;
            let mut walked = T::zero();
            for seg in &traj.segments {
                let len = seg.entry.dist(seg.exit);
                for c in self.core.iter().filter(|c| c.polygon == seg.polygon) {
                    if let Some(t) = crossing(seg.entry, seg.exit, c.entry, c.exit, eps) {
                        if walked + t * len < self.half {
                            return Ok(true);
                        }
                    }
                }
                walked = walked + len;
            }
        }
        Ok(false)
    }
}

/// Parameter along `a→b` where it meets segment `c→d`, endpoints included.
fn crossing<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>, eps: T) -> Option<T> {
    let r = b - a;
    let q = d - c;
    let den = r.cross(q);
    if den.abs() <= T::epsilon() * r.norm() * q.norm() {
        return None;
    }
    let t = (c - a).cross(q) / den;
    let u = (c - a).cross(r) / den;
    let te = eps / r.norm().max(eps);
    let ue = eps / q.norm().max(eps);
    (t >= -te && t <= T::one() + te && u >= -ue && u <= T::one() + ue).then(|| t.max(T::zero()))
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Splits `s` into the central subcylinders of its cylinders of height at
/// least `c_height` and the components of the rest, estimated on a sample grid
/// of spacing about `c_height / 10`.
pub fn high_cylinder_decomposition<T: Scalar>(s: &FlatSurface<T>, c_height: T) -> Result<Decomposition<T>> {
    if !(c_height > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("c_height must be positive, got {c_height}")));
    }
    let mut warnings = Vec::new();
    if (s.area() - T::one()).abs() > lit(1e-6) {
        warnings.push(format!("surface area is {}, not 1", s.area()));
    }
    let cylinders = if c_height.is_finite() {
        detect_cylinders(s, c_height, s.area() / c_height)?
    } else {
        Vec::new()
    };
    let collar = if c_height.is_finite() { c_height / lit(3.0) } else { T::zero() };
    let central_heights: Vec<T> = cylinders.iter().map(|c| c.height - collar - collar).collect();
    let bands = cylinders
        .iter()
        .zip(&central_heights)
        .map(|(c, h)| Band::new(s, c, *h / lit(2.0)))
        .collect::<Result<Vec<_>>>()?;

    let mut overlapping = Vec::new();
    for i in 0..bands.len() {
        for j in i + 1..bands.len() {
            let full_i = Band::new(s, &cylinders[i], cylinders[i].height / lit(2.0))?;
            let full_j = Band::new(s, &cylinders[j], cylinders[j].height / lit(2.0))?;
            if full_i.contains(s, &cylinders[j].core_point)? || full_j.contains(s, &cylinders[i].core_point)? {
                overlapping.push((i, j));
            }
        }
    }

    let spacing = if c_height.is_finite() { c_height } else { s.area().sqrt() } / lit(10.0);
    let components = components(s, &bands, spacing)?;
    Ok(Decomposition { c_height, cylinders, central_heights, collar, components, overlapping, warnings })
}

fn components<T: Scalar>(s: &FlatSurface<T>, bands: &[Band<T>], spacing: T) -> Result<Vec<Component<T>>> {
    let mesh = s.mesh();
    let max_edge = mesh
        .tris
        .iter()
        .flat_map(|t| (0..3).map(move |e| t.pts[e].dist(t.pts[(e + 1) % 3])))
        .fold(T::zero(), |a, b| a.max(b));
    let m = (max_edge / spacing).ceil().to_usize().unwrap_or(1).max(NET_STRIDE);
    let per_tri = (m + 1) * (m + 2) / 2;
    let nclass = s.cone_points().len();
    // grid point (i, j) of triangle t has weights (i, j, m - i - j) on its corners
    // rows i = 0..=m hold m + 1 - i entries
    let idx = |t: usize, i: usize, j: usize| nclass + t * per_tri + i * (m + 1) - i * i.saturating_sub(1) / 2 + j;
    let total = nclass + mesh.tris.len() * per_tri;
    let mut same = UnionFind::new(total);
    for (t, tri) in mesh.tris.iter().enumerate() {
        for c in 0..3 {
            let mut w = [0usize; 3];
            w[c] = m;
            same.union(idx(t, w[0], w[1]), mesh.class_of(t, c));
        }
        for e in 0..3 {
            let a = tri.adj[e];
            for k in 1..m {
                let mut w = [0usize; 3];
                w[e] = m - k;
                w[(e + 1) % 3] = k;
                let mut v = [0usize; 3];
                v[a.edge] = k;
                v[(a.edge + 1) % 3] = m - k;
                same.union(idx(t, w[0], w[1]), idx(a.tri, v[0], v[1]));
            }
        }
    }
    // one surface point per representative
    let mut point: Vec<Option<SurfacePoint<T>>> = vec![None; total];
    for c in 0..nclass {
        point[c] = Some(s.vertex_point(c));
    }
    let mf = T::from_usize(m).unwrap();
    for (t, tri) in mesh.tris.iter().enumerate() {
        for i in 0..=m {
            for j in 0..=m - i {
                let r = same.find(idx(t, i, j));
                if point[r].is_none() {
                    let (wi, wj) = (T::from_usize(i).unwrap() / mf, T::from_usize(j).unwrap() / mf);
                    let pos = tri.pts[0].scale(wi) + tri.pts[1].scale(wj) + tri.pts[2].scale(T::one() - wi - wj);
                    point[r] = Some(SurfacePoint::new(tri.polygon, pos));
                }
            }
        }
    }
    let reps: Vec<usize> = (0..total).filter(|&r| same.find(r) == r).collect();
    let mut inside = vec![false; total];
    for &r in &reps {
        let p = point[r].expect("every representative has a point");
        for b in bands {
            if b.contains(s, &p)? {
                inside[r] = true;
                break;
            }
        }
    }
    let mut conn = UnionFind::new(total);
    let mut boundary = vec![false; total];
    for t in 0..mesh.tris.len() {
        for i in 0..=m {
            for j in 0..=m - i {
                let a = same.find(idx(t, i, j));
                let mut nbrs = Vec::with_capacity(3);
                if i + j < m {
                    nbrs.push(idx(t, i + 1, j));
                    nbrs.push(idx(t, i, j + 1));
                }
                if j > 0 {
                    nbrs.push(idx(t, i + 1, j - 1));
                }
                for nb in nbrs {
                    let b = same.find(nb);
                    match (inside[a], inside[b]) {
                        (false, false) => conn.union(a, b),
                        (false, true) => boundary[a] = true,
                        (true, false) => boundary[b] = true,
                        _ => {}
                    }
                }
            }
        }
    }
    // coarse net: grid points on a stride, plus boundary samples and cone points
    let mut in_net = vec![false; total];
    for t in 0..mesh.tris.len() {
        for i in (0..=m).step_by(NET_STRIDE) {
            for j in (0..=m - i).step_by(NET_STRIDE) {
                in_net[same.find(idx(t, i, j))] = true;
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    for &r in &reps {
        if !inside[r] {
            let c = conn.find(r);
            if !roots.contains(&c) {
                roots.push(c);
            }
        }
    }
    roots.sort_unstable();
    let cover = T::from_usize(NET_STRIDE).unwrap() * max_edge / mf;
    let reach: T = s
        .polygons()
        .iter()
        .map(|p| {
            let v = &p.vertices;
            v.iter().flat_map(|a| v.iter().map(move |b| a.dist(*b))).fold(T::zero(), |x, y| x.max(y))
        })
        .sum();
    let mut out = Vec::new();
    for root in roots {
        let members: Vec<usize> = reps.iter().copied().filter(|&r| !inside[r] && conn.find(r) == root).collect();
        let cone_points: Vec<usize> = (0..nclass).filter(|&c| s.is_singular(c) && conn.find(c) == root).collect();
        let net: Vec<SurfacePoint<T>> = members
            .iter()
            .filter(|&&r| in_net[r] || boundary[r] || (r < nclass && s.is_singular(r)))
            .map(|&r| point[r].expect("point"))
            .collect();
        let diameter = net_diameter(s, &net, reach)?;
        out.push(Component {
            cone_points,
            samples: members.len(),
            diameter,
            diameter_upper: diameter + cover + cover,
        });
    }
    Ok(out)
}

fn net_diameter<T: Scalar>(s: &FlatSurface<T>, net: &[SurfacePoint<T>], reach: T) -> Result<T> {
    let mut best = T::zero();
    for (i, p) in net.iter().enumerate() {
        let rest = &net[i + 1..];
        if rest.is_empty() {
            break;
        }
        let mut r = s.area().sqrt().min(reach);
        loop {
            let d = distances_from(s, p, rest, r)?;
            if d.iter().all(|x| x.is_finite()) || r >= reach {
                best = d.iter().copied().filter(|x| x.is_finite()).fold(best, |a, b| a.max(b));
                break;
            }
            r = (r + r).min(reach);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;

    #[test]
    fn octagon_has_no_high_cylinder() {
        let s = fixtures::octagon::<f64>();
        let d = high_cylinder_decomposition(&s, DEFAULT_C_HEIGHT).unwrap();
        assert!(d.cylinders.is_empty());
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].cone_points, vec![0]);
        // the center is 0.5946 from the cone point
        let c = &d.components[0];
        assert!(c.diameter > 0.4 && c.diameter_upper >= 0.5946, "{c:?}");
    }

    #[test]
    fn infinite_height_gives_one_component() {
        let s = fixtures::torus::<f64>();
        let d = high_cylinder_decomposition(&s, f64::INFINITY).unwrap();
        assert!(d.cylinders.is_empty());
        assert_eq!(d.components.len(), 1);
    }

    #[test]
    fn stretched_one_cylinder_extracts_tall_cylinder() {
        let s = fixtures::one_cylinder::<f64>().stretch(4.0).unwrap();
        let d = high_cylinder_decomposition(&s, DEFAULT_C_HEIGHT).unwrap();
        assert_eq!(d.cylinders.len(), 1);
        let side = 1.0 / 3f64.sqrt();
        assert_relative_eq!(d.cylinders[0].height, 4.0 * side, epsilon = 1e-9);
        assert_relative_eq!(d.collar, DEFAULT_C_HEIGHT / 3.0, epsilon = 1e-15);
        assert_relative_eq!(d.central_heights[0], 4.0 * side - 2.0 * DEFAULT_C_HEIGHT / 3.0, epsilon = 1e-9);
        assert!(d.overlapping.is_empty());
        assert!(!d.components.is_empty());
    }
}
