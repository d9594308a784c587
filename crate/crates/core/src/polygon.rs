//! Planar polygon helpers: area, simplicity, containment and ear clipping.

use crate::scalar::{lit, Scalar, Vec2};

/// Shoelace signed area; positive for counterclockwise boundaries.
pub fn signed_area<T: Scalar>(pts: &[Vec2<T>]) -> T {
    let n = pts.len();
    let mut acc = T::zero();
    for i in 0..n {
        acc = acc + pts[i].cross(pts[(i + 1) % n]);
    }
    acc / lit(2.0)
}

fn segments_intersect<T: Scalar>(a: Vec2<T>, b: Vec2<T>, c: Vec2<T>, d: Vec2<T>, eps: T) -> bool {
    let d1 = (b - a).cross(c - a);
    let d2 = (b - a).cross(d - a);
    let d3 = (d - c).cross(a - c);
    let d4 = (d - c).cross(b - c);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps)) && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps)) {
        return true;
    }
    let on = |p: Vec2<T>, q: Vec2<T>, r: Vec2<T>, cr: T| {
        cr.abs() <= eps
            && r.x >= p.x.min(q.x) - eps
            && r.x <= p.x.max(q.x) + eps
            && r.y >= p.y.min(q.y) - eps
            && r.y <= p.y.max(q.y) + eps
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

/// True when no two non-adjacent edges meet and no vertex repeats.
pub fn is_simple<T: Scalar>(pts: &[Vec2<T>], eps: T) -> bool {
    let n = pts.len();
    if n < 3 {
        return false;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if pts[i].dist(pts[j]) <= eps {
                return false;
            }
        }
    }
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            let (c, d) = (pts[j], pts[(j + 1) % n]);
            if segments_intersect(a, b, c, d, eps) {
                return false;
            }
        }
    }
    true
}

pub fn is_convex<T: Scalar>(pts: &[Vec2<T>], eps: T) -> bool {
    let n = pts.len();
    (0..n).all(|i| {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let c = pts[(i + 2) % n];
        (b - a).cross(c - b) >= -eps
    })
}

/// Point-in-closed-polygon test (boundary counts as inside within `eps`).
pub fn contains<T: Scalar>(pts: &[Vec2<T>], p: Vec2<T>, eps: T) -> bool {
    if on_boundary(pts, p, eps) {
        return true;
    }
    let n = pts.len();
    let mut inside = false;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

pub fn on_boundary<T: Scalar>(pts: &[Vec2<T>], p: Vec2<T>, eps: T) -> bool {
    let n = pts.len();
    (0..n).any(|i| point_segment_distance(p, pts[i], pts[(i + 1) % n]) <= eps)
}

pub fn point_segment_distance<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sq();
    if len2 == T::zero() {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).max(T::zero()).min(T::one());
    p.dist(a + ab.scale(t))
}

/// Barycentric coordinates of `p` in triangle `(a, b, c)`.
pub fn barycentric<T: Scalar>(p: Vec2<T>, a: Vec2<T>, b: Vec2<T>, c: Vec2<T>) -> [T; 3] {
    let det = (b - a).cross(c - a);
    let l1 = (b - p).cross(c - p) / det;
    let l2 = (c - p).cross(a - p) / det;
    [l1, l2, T::one() - l1 - l2]
}

/// Ear-clipping triangulation of a simple counterclockwise polygon.
///
/// Corners with interior angle π are never used as ear tips, so collinear
/// boundary vertices do not produce degenerate triangles. Returned triangles
/// are counterclockwise index triples.
pub fn triangulate<T: Scalar>(pts: &[Vec2<T>], eps: T) -> Option<Vec<[usize; 3]>> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    let mut out = Vec::with_capacity(pts.len().saturating_sub(2));
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (pts[ia], pts[ib], pts[ic]);
            let scale = (b - a).norm() * (c - b).norm();
            if (b - a).cross(c - b) <= eps * scale {
                continue;
            }
            let blocked = idx.iter().any(|&j| {
                if j == ia || j == ib || j == ic {
                    return false;
                }
                let p = pts[j];
                let l = barycentric(p, a, b, c);
                l.iter().all(|&x| x >= -eps)
            });
            if blocked {
                continue;
            }
            out.push([ia, ib, ic]);
            idx.remove(k);
            clipped = true;
            break;
        }
        if !clipped {
            return None;
        }
    }
    let (a, b, c) = (pts[idx[0]], pts[idx[1]], pts[idx[2]]);
    if (b - a).cross(c - a) <= T::zero() {
        return None;
    }
    out.push([idx[0], idx[1], idx[2]]);
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: f64, y: f64) -> Vec2<f64> {
        Vec2::new(x, y)
    }

    #[test]
    fn square_area_and_triangulation() {
        let sq = [v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        assert_eq!(signed_area(&sq), 1.0);
        let tris = triangulate(&sq, 1e-12).unwrap();
        assert_eq!(tris.len(), 2);
        let total: f64 = tris.iter().map(|t| signed_area(&[sq[t[0]], sq[t[1]], sq[t[2]]])).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collinear_vertices_avoid_degenerate_ears() {
        let poly = [v(0.0, 0.0), v(1.0, 0.0), v(2.0, 0.0), v(3.0, 0.0), v(3.0, 1.0), v(0.0, 1.0)];
        let tris = triangulate(&poly, 1e-12).unwrap();
        assert_eq!(tris.len(), 4);
        for t in tris {
            assert!(signed_area(&[poly[t[0]], poly[t[1]], poly[t[2]]]) > 1e-6);
        }
    }

    #[test]
    fn nonconvex_l_shape() {
        let l = [v(0.0, 0.0), v(2.0, 0.0), v(2.0, 1.0), v(1.0, 1.0), v(1.0, 2.0), v(0.0, 2.0)];
        assert!(is_simple(&l, 1e-12));
        assert!(!is_convex(&l, 1e-12));
        let tris = triangulate(&l, 1e-12).unwrap();
        let total: f64 = tris.iter().map(|t| signed_area(&[l[t[0]], l[t[1]], l[t[2]]])).sum();
        assert!((total - 3.0).abs() < 1e-12);
    }

    #[test]
    fn bowtie_is_not_simple() {
        let b = [v(0.0, 0.0), v(1.0, 1.0), v(1.0, 0.0), v(0.0, 1.0)];
        assert!(!is_simple(&b, 1e-12));
    }

    #[test]
    fn containment() {
        let sq = [v(0.0, 0.0), v(1.0, 0.0), v(1.0, 1.0), v(0.0, 1.0)];
        assert!(contains(&sq, v(0.5, 0.5), 1e-12));
        assert!(contains(&sq, v(1.0, 0.5), 1e-12));
        assert!(!contains(&sq, v(1.5, 0.5), 1e-12));
    }
}
