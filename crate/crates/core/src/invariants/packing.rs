use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FlatError, Result};
use crate::scalar::{lit, Scalar, Vec2};
use crate::surface::{FlatSurface, SurfacePoint};
use crate::unfolding::distance_to_singularities;

/// `rho` is attained at `point`; the supremum lies in `[rho, rho + tolerance]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PackingEstimate<T> {
    pub rho: T,
    pub point: SurfacePoint<T>,
    pub tolerance: T,
    /// Distance evaluations spent.
    pub evaluations: usize,
}

struct Cell<T> {
    polygon: usize,
    pts: [Vec2<T>; 3],
    upper: T,
}

impl<T: PartialOrd> PartialEq for Cell<T> {
    fn eq(&self, o: &Self) -> bool {
        self.upper == o.upper
    }
}

impl<T: PartialOrd> Eq for Cell<T> {}

impl<T: PartialOrd> PartialOrd for Cell<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<T: PartialOrd> Ord for Cell<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        self.upper.partial_cmp(&o.upper).unwrap_or(Ordering::Equal)
    }
}

/// Distance from `p` to Σ, growing the search radius until a cone point is found.
pub fn distance_to_sigma<T: Scalar>(s: &FlatSurface<T>, p: &SurfacePoint<T>) -> Result<T> {
    if s.singularities().is_empty() {
        return Err(FlatError::NoConePoints);
    }
    let mut r = s.area().sqrt();
    for _ in 0..64 {
        if let Some((d, _)) = distance_to_singularities(s, p, r)? {
            return Ok(d);
        }
        r = r + r;
    }
    Err(FlatError::CutoffExceeded { cutoff: crate::scalar::to_f64(r) })
}

/// Packing density `sup_x d(x, Σ)` by branch and bound over the triangles:
/// the distance is 1-Lipschitz, so a cell's values are at most the centre
/// value plus the centre's distance to the farthest corner.
pub fn packing_density<T: Scalar>(s: &FlatSurface<T>, tol: T) -> Result<PackingEstimate<T>> {
    if !(tol > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    if s.singularities().is_empty() {
        return Err(FlatError::NoConePoints);
    }
    let third = lit::<T>(1.0 / 3.0);
    let mut evaluations = 0usize;
    let mut best: Option<(T, SurfacePoint<T>)> = None;
    let mut eval = |polygon: usize, pts: [Vec2<T>; 3], best: &mut Option<(T, SurfacePoint<T>)>| -> Result<Cell<T>> {
        let center = (pts[0] + pts[1] + pts[2]).scale(third);
        let p = SurfacePoint::new(polygon, center);
        let d = distance_to_sigma(s, &p)?;
        evaluations += 1;
        if best.as_ref().is_none_or(|(b, _)| d > *b) {
            *best = Some((d, p));
        }
        let radius = pts.iter().map(|v| v.dist(center)).fold(T::zero(), |a, b| a.max(b));
        Ok(Cell { polygon, pts, upper: d + radius })
    };
    let mut heap = BinaryHeap::new();
    for tri in &s.mesh().tris {
        heap.push(eval(tri.polygon, tri.pts, &mut best)?);
    }
    while let Some(cell) = heap.pop() {
        let lower = best.as_ref().map_or(T::zero(), |b| b.0);
        if cell.upper <= lower + tol {
            break;
        }
        let [a, b, c] = cell.pts;
        let (ab, bc, ca) = (a.lerp(b, lit(0.5)), b.lerp(c, lit(0.5)), c.lerp(a, lit(0.5)));
        for pts in [[a, ab, ca], [ab, b, bc], [ca, bc, c], [bc, ca, ab]] {
            heap.push(eval(cell.polygon, pts, &mut best)?);
        }
    }
    let (rho, point) = best.expect("the mesh has triangles");
    Ok(PackingEstimate { rho, point, tolerance: tol, evaluations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn octagon_packing_near_circumradius() {
        let s = fixtures::octagon::<f64>();
        let p = packing_density(&s, 1e-3).unwrap();
        assert!(p.rho >= 0.55 && p.rho <= 0.65, "{}", p.rho);
        let r = 0.5946035575013605;
        assert!(p.rho <= r + 1e-9 && p.rho + 1e-3 >= r, "{}", p.rho);
    }

    #[test]
    fn torus_has_no_packing_density() {
        let s = fixtures::torus::<f64>();
        assert!(matches!(packing_density(&s, 1e-2), Err(FlatError::NoConePoints)));
    }
}
