//! Branched coverings built by cutting slits and regluing sheets.

mod verify;

pub use verify::{verify_covering_bounds, Check, CoveringEvidence, CoveringReport};

use crate::error::{FlatError, Result};
use crate::polygon::{contains, is_simple, point_segment_distance, signed_area};
use crate::scalar::{Scalar, Vec2};
use crate::surface::{
    EdgeGluing, EdgeRef, FlatSurface, GlueKind, PlanarPolygon, SlitLine, SurfaceDescription, SurfacePoint,
};
use crate::unfolding::distances_from;

/// A straight slit inside one polygon, with the sheet permutation applied
/// when crossing it from its left side to its right side.
#[derive(Clone, Debug, PartialEq)]
pub struct SlitSpec<T> {
    /// Polygon index in the base surface.
    pub polygon: usize,
    pub start: Vec2<T>,
    pub end: Vec2<T>,
    pub sheets: usize,
    /// 0-based images.
    pub perm: Vec<usize>,
}

impl<T: Scalar> SlitSpec<T> {
    /// `n`-sheeted slit with the cyclic monodromy `i ↦ i + 1`.
    pub fn cyclic(polygon: usize, start: Vec2<T>, end: Vec2<T>, sheets: usize) -> Self {
        SlitSpec { polygon, start, end, sheets, perm: (0..sheets).map(|i| (i + 1) % sheets.max(1)).collect() }
    }

    /// From a parsed `slit` line; the polygon is given by id.
    pub fn from_line(s: &FlatSurface<T>, line: &SlitLine<T>) -> Result<Self> {
        let polygon = s
            .description()
            .polygon_index(line.polygon)
            .ok_or(FlatError::UnknownPolygon(line.polygon))?;
        Ok(SlitSpec { polygon, start: line.start, end: line.end, sheets: line.sheets, perm: line.perm.clone() })
    }

    pub fn length(&self) -> T {
        self.start.dist(self.end)
    }
}

/// A cone point of the cover lying over a slit endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchPoint<T> {
    pub class: usize,
    pub slit: usize,
    /// 0 for the start of the slit, 1 for its end.
    pub endpoint: usize,
    /// Length of the local monodromy cycle; the branching index is `order − 1`.
    pub order: usize,
    pub angle: T,
}

#[derive(Clone, Debug)]
pub struct SlitCovering<T> {
    pub surface: FlatSurface<T>,
    pub sheets: usize,
    pub slits: Vec<SlitSpec<T>>,
    pub branch_points: Vec<BranchPoint<T>>,
    /// For each polygon of the cover: its sheet and the base polygon it came from.
    pub origin: Vec<(usize, usize)>,
}

impl<T: Scalar> SlitCovering<T> {
    /// The lift of a base point to sheet `sheet`.
    pub fn lift(&self, sheet: usize, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>> {
        let eps = self.surface.tolerance();
        self.origin
            .iter()
            .enumerate()
            .filter(|(_, &(sh, base))| sh == sheet && base == p.polygon)
            .find(|(i, _)| contains(&self.surface.polygons()[*i].vertices, p.position, eps))
            .map(|(i, _)| SurfacePoint::new(i, p.position))
            .ok_or_else(|| FlatError::PointNotOnSurface(format!("no lift of polygon {} to sheet {sheet}", p.polygon)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoveringMetrics<T> {
    pub sheets: usize,
    pub branch_points: Vec<BranchPoint<T>>,
    /// Minimal distance between distinct branch points; infinite when fewer than two.
    pub l_b: T,
    pub l_b_defined: bool,
    /// Sheets plus branch points.
    pub lambda: usize,
}

impl<T: Scalar> CoveringMetrics<T> {
    pub fn k(&self) -> usize {
        self.branch_points.len()
    }
}

/// The two pieces of a polygon cut along `va → A → B → vb`, or `None` if
/// that path does not split it into two simple polygons.
fn split<T: Scalar>(pts: &[Vec2<T>], a: Vec2<T>, b: Vec2<T>, va: usize, vb: usize, eps: T) -> Option<[Vec<Vec2<T>>; 2]> {
    let m = pts.len();
    let walk = |from: usize, to: usize| {
        let mut out = vec![pts[from]];
        let mut i = from;
        while i != to {
            i = (i + 1) % m;
            out.push(pts[i]);
        }
        out
    };
    // left of A→B: boundary from vb round to va, then back in through A and B
    let mut left = walk(vb, va);
    left.extend([a, b]);
    let mut right = walk(va, vb);
    right.extend([b, a]);
    let ok = |p: &[Vec2<T>]| signed_area(p) > eps && is_simple(p, eps);
    (ok(&left) && ok(&right)).then_some([left, right])
}

/// Cover of `base` cut along `slits` and reglued across them by each slit's
/// permutation. Every slit must lie in the interior of its polygon, with at
/// most one slit per polygon and a common number of sheets.
pub fn build_slit_covering<T: Scalar>(base: &FlatSurface<T>, slits: &[SlitSpec<T>]) -> Result<SlitCovering<T>> {
    let desc = base.description();
    let tol = base.tolerance();
    let eps = T::geometric_eps();
    let n = slits.first().map_or(1, |s| s.sheets);
    if n == 0 {
        return Err(FlatError::InvalidSlit("at least one sheet is required".into()));
    }
    let mut slit_of = vec![None; desc.polygons.len()];
    for (j, sl) in slits.iter().enumerate() {
        if sl.sheets != n {
            return Err(FlatError::InvalidSlit(format!("slit {j} has {} sheets, expected {n}", sl.sheets)));
        }
        let mut seen = vec![false; n];
        if sl.perm.len() != n || sl.perm.iter().any(|&x| x >= n || std::mem::replace(&mut seen[x], true)) {
            return Err(FlatError::InvalidSlit(format!("slit {j}: monodromy is not a permutation of {n} sheets")));
        }
        let poly = desc
            .polygons
            .get(sl.polygon)
            .ok_or_else(|| FlatError::InvalidSlit(format!("slit {j}: no polygon {}", sl.polygon)))?;
        if !(sl.length() > tol) {
            return Err(FlatError::InvalidSlit(format!("slit {j} has zero length")));
        }
        let v = &poly.vertices;
        for p in [sl.start, sl.end] {
            let clearance = (0..v.len())
                .map(|i| point_segment_distance(p, v[i], v[(i + 1) % v.len()]))
                .fold(T::infinity(), |a, b| a.min(b));
            if !contains(v, p, eps) || clearance <= tol {
                return Err(FlatError::InvalidSlit(format!(
                    "slit {j}: endpoint ({}, {}) is not interior to polygon {}",
                    p.x, p.y, poly.id
                )));
            }
        }
        if slit_of[sl.polygon].replace(j).is_some() {
            return Err(FlatError::InvalidSlit(format!("more than one slit in polygon {}", poly.id)));
        }
    }
    check_transitive(n, slits)?;

    // base pieces: (base polygon, vertices); side maps for the original edges
    let mut pieces: Vec<(usize, Vec<Vec2<T>>)> = Vec::new();
    let mut side_map: Vec<Vec<EdgeRef>> = Vec::new();
    // (left piece, right piece) per slit, indices into `pieces`
    let mut cuts = vec![(0, 0); slits.len()];
    for (pi, poly) in desc.polygons.iter().enumerate() {
        let v = &poly.vertices;
        let m = v.len();
        let Some(j) = slit_of[pi] else {
            side_map.push((0..m).map(|e| EdgeRef::new(pieces.len(), e)).collect());
            pieces.push((pi, v.clone()));
            continue;
        };
        let (a, b) = (slits[j].start, slits[j].end);
        let two_pi = T::PI() + T::PI();
        let rank = |from: Vec2<T>, dir: Vec2<T>| {
            let mut idx: Vec<usize> = (0..m).collect();
            idx.sort_by(|&x, &y| {
                let ax = dir.ccw_angle_to(v[x] - from);
                let ay = dir.ccw_angle_to(v[y] - from);
                let fx = ax.min(two_pi - ax);
                let fy = ay.min(two_pi - ay);
                fx.partial_cmp(&fy).unwrap()
            });
            idx
        };
        let (ra, rb) = (rank(a, a - b), rank(b, b - a));
        let found = ra
            .iter()
            .flat_map(|&va| rb.iter().map(move |&vb| (va, vb)))
            .filter(|(va, vb)| va != vb)
            .find_map(|(va, vb)| split(v, a, b, va, vb, eps).map(|p| (va, vb, p)));
        let Some((va, vb, [left, right])) = found else {
            return Err(FlatError::InvalidSlit(format!("slit {j} cannot be cut out of polygon {}", poly.id)));
        };
        let (li, ri) = (pieces.len(), pieces.len() + 1);
        // left holds sides vb..va-1, right holds va..vb-1
        let mut map = vec![EdgeRef::new(0, 0); m];
        let mut k = 0;
        let mut e = vb;
        while e != va {
            map[e] = EdgeRef::new(li, k);
            k += 1;
            e = (e + 1) % m;
        }
        k = 0;
        while e != vb {
            map[e] = EdgeRef::new(ri, k);
            k += 1;
            e = (e + 1) % m;
        }
        side_map.push(map);
        pieces.push((pi, left));
        pieces.push((pi, right));
        cuts[j] = (li, ri);
    }

    let np = pieces.len();
    let at = |sheet: usize, e: EdgeRef| EdgeRef::new(sheet * np + e.polygon, e.edge);
    let mut polygons = Vec::with_capacity(n * np);
    let mut origin = Vec::with_capacity(n * np);
    for sheet in 0..n {
        for (base_poly, pts) in &pieces {
            polygons.push(PlanarPolygon { id: polygons.len() as i64, vertices: pts.clone() });
            origin.push((sheet, *base_poly));
        }
    }
    let mut gluings = Vec::new();
    for g in &desc.gluings {
        let (a, b) = (side_map[g.side_a.polygon][g.side_a.edge], side_map[g.side_b.polygon][g.side_b.edge]);
        for sheet in 0..n {
            gluings.push(EdgeGluing { side_a: at(sheet, a), side_b: at(sheet, b), kind: g.kind });
        }
    }
    for (j, &(li, ri)) in cuts.iter().enumerate() {
        let lm = pieces[li].1.len();
        let rm = pieces[ri].1.len();
        // left: ..., va, A, B (closing to vb); right: ..., vb, B, A (closing to va)
        let (l_in, l_slit, l_out) = (lm - 3, lm - 2, lm - 1);
        let (r_in, r_slit, r_out) = (rm - 3, rm - 2, rm - 1);
        for sheet in 0..n {
            let l = |e| at(sheet, EdgeRef::new(li, e));
            let r = |sh: usize, e| at(sh, EdgeRef::new(ri, e));
            gluings.push(EdgeGluing { side_a: l(l_in), side_b: r(sheet, r_out), kind: GlueKind::Translation });
            gluings.push(EdgeGluing { side_a: l(l_out), side_b: r(sheet, r_in), kind: GlueKind::Translation });
            gluings.push(EdgeGluing {
                side_a: l(l_slit),
                side_b: r(slits[j].perm[sheet], r_slit),
                kind: GlueKind::Translation,
            });
        }
    }
    let surface = FlatSurface::with_tolerance(SurfaceDescription { polygons, gluings }, tol)?;

    let mut branch_points = Vec::new();
    for (j, sl) in slits.iter().enumerate() {
        let (li, ..) = cuts[j];
        for (endpoint, p) in [sl.start, sl.end].into_iter().enumerate() {
            let mut seen = vec![false; n];
            for sheet in 0..n {
                if seen[sheet] {
                    continue;
                }
                let mut order = 0;
                let mut i = sheet;
                while !seen[i] {
                    seen[i] = true;
                    order += 1;
                    i = sl.perm[i];
                }
                if order == 1 {
                    continue;
                }
                let class = surface
                    .vertex_class_at(&SurfacePoint::new(sheet * np + li, p))
                    .expect("slit endpoint is a vertex of the cover");
                let angle = surface.cone_points()[class].angle;
                branch_points.push(BranchPoint { class, slit: j, endpoint, order, angle });
            }
        }
    }
    Ok(SlitCovering { surface, sheets: n, slits: slits.to_vec(), branch_points, origin })
}

fn check_transitive<T>(n: usize, slits: &[SlitSpec<T>]) -> Result<()> {
    let mut reached = vec![false; n];
    let mut stack = vec![0];
    reached[0] = true;
    while let Some(i) = stack.pop() {
        for sl in slits {
            let j = sl.perm[i];
            if !reached[j] {
                reached[j] = true;
                stack.push(j);
            }
        }
    }
    if reached.iter().all(|&r| r) {
        Ok(())
    } else {
        Err(FlatError::InvalidSlit("monodromy is not transitive, so the cover would be disconnected".into()))
    }
}

/// Branch data, `l_b` and `λ = n + k` of a slit covering.
pub fn covering_metrics<T: Scalar>(cover: &SlitCovering<T>) -> Result<CoveringMetrics<T>> {
    let s = &cover.surface;
    let bps = &cover.branch_points;
    let mut l_b = T::infinity();
    if bps.len() >= 2 {
        let pts: Vec<SurfacePoint<T>> = bps.iter().map(|b| s.vertex_point(b.class)).collect();
        let mut cutoff = s.area().sqrt();
        for (i, p) in pts.iter().enumerate() {
            let others = &pts[i + 1..];
            if others.is_empty() {
                break;
            }
            for _ in 0..64 {
                let d = distances_from(s, p, others, cutoff)?;
                let m = d.into_iter().fold(T::infinity(), |a, b| a.min(b));
                if m.is_finite() {
                    l_b = l_b.min(m);
                    break;
                }
                cutoff = cutoff + cutoff;
            }
        }
    }
    Ok(CoveringMetrics {
        sheets: cover.sheets,
        branch_points: bps.clone(),
        l_b,
        l_b_defined: bps.len() >= 2,
        lambda: cover.sheets + bps.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn octagon_cover(n: usize) -> SlitCovering<f64> {
        let s = fixtures::octagon::<f64>();
        let slit = SlitSpec::cyclic(0, Vec2::new(-0.05, 0.0), Vec2::new(0.05, 0.0), n);
        build_slit_covering(&s, &[slit]).unwrap()
    }

    #[test]
    fn octagon_three_sheets() {
        let c = octagon_cover(3);
        let t = &c.surface;
        assert_relative_eq!(t.area(), 3.0, epsilon = 1e-9);
        assert!(t.gauss_bonnet_residual() < 1e-9);
        assert_eq!(t.euler_characteristic(), -10);
        assert_eq!(c.branch_points.len(), 2);
        for b in &c.branch_points {
            assert_eq!(b.order, 3);
            assert_relative_eq!(b.angle, 6.0 * PI, epsilon = 1e-9);
        }
        let m = covering_metrics(&c).unwrap();
        assert_eq!(m.lambda, 5);
        assert!(m.l_b_defined);
        assert_relative_eq!(m.l_b, 0.1, epsilon = 1e-9);
    }

    #[test]
    fn torus_transposition_is_genus_two() {
        let s = fixtures::torus::<f64>();
        let slit = SlitSpec { polygon: 0, start: Vec2::new(0.4, 0.5), end: Vec2::new(0.6, 0.5), sheets: 2, perm: vec![1, 0] };
        let c = build_slit_covering(&s, &[slit]).unwrap();
        assert_eq!(c.surface.euler_characteristic(), -2);
        assert_eq!(c.surface.singularities().len(), 2);
        for b in &c.branch_points {
            assert_relative_eq!(b.angle, 4.0 * PI, epsilon = 1e-9);
        }
    }

    #[test]
    fn single_sheet_is_isometric() {
        let c = octagon_cover(1);
        assert!(c.branch_points.is_empty());
        assert_relative_eq!(c.surface.area(), 1.0, epsilon = 1e-12);
        assert_eq!(c.surface.singularities().len(), 1);
        let m = covering_metrics(&c).unwrap();
        assert!(!m.l_b_defined && m.l_b.is_infinite());
        assert_eq!(m.lambda, 1);
    }

    #[test]
    fn lifts_land_on_the_right_sheet() {
        let c = octagon_cover(3);
        let p = SurfacePoint::new(0, Vec2::new(0.3, 0.1));
        for sheet in 0..3 {
            let q = c.lift(sheet, &p).unwrap();
            assert_eq!(c.origin[q.polygon].0, sheet);
        }
    }

    #[test]
    fn bad_slits_are_rejected() {
        let s = fixtures::torus::<f64>();
        let edge = SlitSpec::cyclic(0, Vec2::new(0.0, 0.5), Vec2::new(0.5, 0.5), 2);
        assert!(matches!(build_slit_covering(&s, &[edge]), Err(FlatError::InvalidSlit(_))));
        let fixed = SlitSpec { polygon: 0, start: Vec2::new(0.4, 0.5), end: Vec2::new(0.6, 0.5), sheets: 2, perm: vec![0, 1] };
        assert!(matches!(build_slit_covering(&s, &[fixed]), Err(FlatError::InvalidSlit(_))));
        let a = SlitSpec::cyclic(0, Vec2::new(0.2, 0.2), Vec2::new(0.3, 0.2), 2);
        let b = SlitSpec::cyclic(0, Vec2::new(0.6, 0.6), Vec2::new(0.7, 0.6), 2);
        assert!(build_slit_covering(&s, &[a, b]).is_err());
    }
}
