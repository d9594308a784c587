use crate::error::{FlatError, Result};
use crate::scalar::{to_f64, Scalar};
use crate::surface::FlatSurface;
use crate::unfolding::{
    closed_chain_path, connector_in_catalog, GeodesicPath, Leg, SaddleCatalog, SaddleConnection, Waypoint,
    DEFAULT_NODE_BUDGET,
};

use super::{detect_cylinders, CylinderRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystoleKind {
    CylinderCore,
    SaddleLoop,
}

#[derive(Clone, Debug)]
pub struct SystoleRecord<T> {
    pub length: T,
    pub kind: SystoleKind,
    /// The realizing closed geodesic.
    pub curve: GeodesicPath<T>,
    pub cylinder: Option<CylinderRecord<T>>,
    /// Saddle connections of a loop through cone points; empty for a core.
    pub chain: Vec<SaddleConnection<T>>,
}

/// Shortest closed geodesic of length at most `cutoff`: either a cylinder core
/// or a closed chain of saddle connections meeting the angle condition at
/// every junction, the closing one included.
pub fn systole<T: Scalar>(s: &FlatSurface<T>, cutoff: T) -> Result<SystoleRecord<T>> {
    if !(cutoff > T::zero()) || !cutoff.is_finite() {
        return Err(FlatError::InvalidParameter(format!("cutoff must be positive and finite, got {cutoff}")));
    }
    let cyls = detect_cylinders(s, s.tolerance(), cutoff)?;
    let core = cyls
        .into_iter()
        .min_by(|a, b| a.circumference.partial_cmp(&b.circumference).unwrap());
    let (loop_len, chain) = shortest_closed_chain(s, cutoff, core.as_ref().map(|c| c.circumference))?;
    let eps = s.tolerance() * T::from_f64(10.0).unwrap();
    match (core, chain) {
        (Some(c), ch) if ch.is_empty() || c.circumference <= loop_len + eps => {
            let curve = GeodesicPath {
                waypoints: vec![Waypoint::Point(c.core_point)],
                legs: vec![Leg {
                    vector: c.direction.scale(c.circumference),
                    length: c.circumference,
                    start_angle: None,
                    end_angle: None,
                }],
                closed: true,
            };
            Ok(SystoleRecord { length: c.circumference, kind: SystoleKind::CylinderCore, curve, cylinder: Some(c), chain: Vec::new() })
        }
        (_, ch) if !ch.is_empty() => Ok(SystoleRecord {
            length: loop_len,
            kind: SystoleKind::SaddleLoop,
            curve: closed_chain_path(&ch),
            cylinder: None,
            chain: ch,
        }),
        _ => Err(FlatError::CutoffExceeded { cutoff: to_f64(cutoff) }),
    }
}

/// Shortest closed geodesic chain of length at most `cutoff` (and strictly
/// shorter than `bound` when given). Empty chain when none exists.
pub(crate) fn shortest_closed_chain<T: Scalar>(
    s: &FlatSurface<T>,
    cutoff: T,
    bound: Option<T>,
) -> Result<(T, Vec<SaddleConnection<T>>)> {
    let catalog = SaddleCatalog::build(s, cutoff)?;
    closed_chains_from(s, &catalog, cutoff, bound, |_| true)
}

/// Shortest closed geodesic chain whose first connection passes `accept`.
pub(crate) fn closed_chains_from<T: Scalar>(
    s: &FlatSurface<T>,
    catalog: &SaddleCatalog<T>,
    cutoff: T,
    bound: Option<T>,
    accept: impl Fn(&SaddleConnection<T>) -> bool,
) -> Result<(T, Vec<SaddleConnection<T>>)> {
    let mut best = bound.map_or(cutoff, |b| b.min(cutoff));
    let mut best_chain = Vec::new();
    for list in &catalog.by_class {
        for sc in list {
            if sc.length > best {
                break;
            }
            if !accept(sc) {
                continue;
            }
            let budget = best - sc.length;
            if budget < T::zero() {
                continue;
            }
            // a zero budget still admits the direct loop
            let budget = budget.max(T::epsilon());
            match connector_in_catalog(s, catalog, sc, sc, budget, DEFAULT_NODE_BUDGET) {
                Ok(r) => {
                    let len = sc.length + r.excess;
                    if len < best || best_chain.is_empty() && len <= best {
                        best = len;
                        best_chain = std::iter::once(sc.clone()).chain(r.connector).collect();
                    }
                }
                Err(FlatError::CutoffExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok((best, best_chain))
}
