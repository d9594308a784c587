use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FlatError, Result};
use crate::scalar::Scalar;
use crate::surface::FlatSurface;
use crate::unfolding::{angle_tolerance, junction_ok, SaddleCatalog, SaddleConnection};

use super::bounds::{two_curve_lower_bound, TwoCurveBound};

/// Expanded-node cap for the loop search at one basepoint.
pub const DEFAULT_LOOP_BUDGET: usize = 1_000_000;

/// Two closed geodesics through a common cone point, as saddle-connection chains.
#[derive(Clone, Debug)]
pub struct CurvePair<T> {
    pub basepoint: usize,
    pub alpha: Vec<SaddleConnection<T>>,
    pub beta: Vec<SaddleConnection<T>>,
    pub bound: TwoCurveBound<T>,
    /// Genus at least 2 and the loops are not powers of a common loop.
    pub hypothesis: bool,
}

#[derive(PartialEq)]
struct Entry<T>(T, usize);

impl<T: PartialOrd> Eq for Entry<T> {}

impl<T: PartialOrd> PartialOrd for Entry<T> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl<T: PartialOrd> Ord for Entry<T> {
    fn cmp(&self, o: &Self) -> Ordering {
        o.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(o.1.cmp(&self.1))
    }
}

type Key<T> = (usize, T);

fn keys<T: Scalar>(chain: &[SaddleConnection<T>]) -> Vec<Key<T>> {
    chain.iter().map(|sc| (sc.start, sc.start_angle)).collect()
}

fn reversed_keys<T: Scalar>(chain: &[SaddleConnection<T>]) -> Vec<Key<T>> {
    chain.iter().rev().map(|sc| (sc.end, sc.end_angle)).collect()
}

fn same_key<T: Scalar>(a: &Key<T>, b: &Key<T>, tol: T) -> bool {
    a.0 == b.0 && (a.1 - b.1).abs() <= tol
}

fn primitive_root<T: Scalar>(seq: &[Key<T>], tol: T) -> &[Key<T>] {
    let n = seq.len();
    (1..=n)
        .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| same_key(&seq[i], &seq[i - d], tol)))
        .map_or(seq, |d| &seq[..d])
}

/// Whether two loops at the same basepoint are powers of a common loop.
/// Both must be closed geodesics through the basepoint: a common power then
/// forces both to run along the same line through the base lift.
pub fn cyclically_related<T: Scalar>(s: &FlatSurface<T>, alpha: &[SaddleConnection<T>], beta: &[SaddleConnection<T>]) -> bool {
    let tol = angle_tolerance(s);
    let eq = |x: &[Key<T>], y: &[Key<T>]| x.len() == y.len() && x.iter().zip(y).all(|(a, b)| same_key(a, b, tol));
    let ra = keys(alpha);
    let ra = primitive_root(&ra, tol);
    let fb = keys(beta);
    let rb = reversed_keys(beta);
    eq(ra, primitive_root(&fb, tol)) || eq(ra, primitive_root(&rb, tol))
}

/// Shortest closed geodesic loop at `p` and the shortest one not cyclically
/// related to it, both of length at most `cutoff`.
fn loops_at<T: Scalar>(
    s: &FlatSurface<T>,
    catalog: &SaddleCatalog<T>,
    p: usize,
    cutoff: T,
    budget: usize,
) -> Result<Option<(Vec<SaddleConnection<T>>, Vec<SaddleConnection<T>>)>> {
    let tol = angle_tolerance(s);
    let theta = |c: usize| s.cone_points()[c].angle;
    // (class, back angle, parent, connection index in the class list)
    let mut nodes: Vec<(usize, T, usize, usize)> = Vec::new();
    let mut heap = BinaryHeap::new();
    let chain = |nodes: &[(usize, T, usize, usize)], mut id: usize| {
        let mut out = Vec::new();
        loop {
            let (_, _, parent, k) = nodes[id];
            let from = if parent == usize::MAX { p } else { nodes[parent].0 };
            out.push(catalog.by_class[from][k].clone());
            if parent == usize::MAX {
                break;
            }
            id = parent;
        }
        out.reverse();
        out
    };
    for (k, sc) in catalog.by_class[p].iter().enumerate() {
        if sc.length > cutoff {
            break;
        }
        heap.push(Entry(sc.length, nodes.len()));
        nodes.push((sc.end, sc.end_angle, usize::MAX, k));
    }
    let mut alpha: Option<Vec<SaddleConnection<T>>> = None;
    while let Some(Entry(len, id)) = heap.pop() {
        let (class, back, _, _) = nodes[id];
        if class == p {
            let c = chain(&nodes, id);
            if junction_ok(theta(p), back, c[0].start_angle, tol) {
                match &alpha {
                    None => alpha = Some(c),
                    Some(a) if !cyclically_related(s, a, &c) => return Ok(Some((a.clone(), c))),
                    _ => {}
                }
            }
        }
        for (k, sc) in catalog.by_class[class].iter().enumerate() {
            if len + sc.length > cutoff {
                break;
            }
            if !junction_ok(theta(class), back, sc.start_angle, tol) {
                continue;
            }
            if nodes.len() >= budget {
                return Err(FlatError::BudgetExhausted { budget });
            }
            heap.push(Entry(len + sc.length, nodes.len()));
            nodes.push((sc.end, sc.end_angle, id, k));
        }
    }
    Ok(None)
}

/// Over all cone points, the pair of short closed geodesics through a common
/// cone point that gives the largest two-curve entropy bound. `None` when no
/// cone point carries two unrelated loops within `cutoff`.
pub fn two_curve_pair<T: Scalar>(s: &FlatSurface<T>, cutoff: T) -> Result<Option<CurvePair<T>>> {
    two_curve_pair_with_budget(s, cutoff, DEFAULT_LOOP_BUDGET)
}

pub fn two_curve_pair_with_budget<T: Scalar>(s: &FlatSurface<T>, cutoff: T, budget: usize) -> Result<Option<CurvePair<T>>> {
    if !(cutoff > T::zero()) || !cutoff.is_finite() {
        return Err(FlatError::InvalidParameter(format!("cutoff must be positive and finite, got {cutoff}")));
    }
    let sing = s.singularities();
    if sing.is_empty() {
        return Ok(None);
    }
    let catalog = SaddleCatalog::build(s, cutoff)?;
    let mut best: Option<CurvePair<T>> = None;
    for p in sing {
        let Some((alpha, beta)) = loops_at(s, &catalog, p, cutoff, budget)? else {
            continue;
        };
        let len = |c: &[SaddleConnection<T>]| c.iter().fold(T::zero(), |a, sc| a + sc.length);
        let bound = two_curve_lower_bound(len(&alpha), len(&beta))?;
        if best.as_ref().is_none_or(|b| bound.bound > b.bound.bound) {
            best = Some(CurvePair { basepoint: p, alpha, beta, bound, hypothesis: s.genus() >= 2 });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::unfolding::{closed_chain_path, is_local_geodesic};
    use approx::assert_relative_eq;

    #[test]
    fn stretched_cylinder_pairs_horizontal_loops() {
        let side = 1.0 / 3f64.sqrt();
        for lam in [1.0, 2.0, 4.0] {
            let s = fixtures::one_cylinder::<f64>().stretch(lam).unwrap();
            let pair = two_curve_pair(&s, 2.0).unwrap().unwrap();
            assert!(pair.hypothesis);
            assert_relative_eq!(pair.bound.a, side / lam, epsilon = 1e-9);
            assert_relative_eq!(pair.bound.b, side / lam, epsilon = 1e-9);
            for c in [&pair.alpha, &pair.beta] {
                assert!(is_local_geodesic(&s, &closed_chain_path(c)).unwrap().ok);
            }
        }
    }

    #[test]
    fn powers_are_related() {
        let s = fixtures::one_cylinder::<f64>();
        let pair = two_curve_pair(&s, 2.0).unwrap().unwrap();
        let squared: Vec<_> = pair.alpha.iter().chain(&pair.alpha).cloned().collect();
        assert!(cyclically_related(&s, &pair.alpha, &squared));
        let inverse: Vec<_> = pair.alpha.iter().rev().map(|sc| sc.reversed(&s)).collect();
        assert!(cyclically_related(&s, &pair.alpha, &inverse));
        assert!(!cyclically_related(&s, &pair.alpha, &pair.beta));
    }

    #[test]
    fn torus_has_no_pair() {
        assert!(two_curve_pair(&fixtures::torus::<f64>(), 2.0).unwrap().is_none());
    }
}
