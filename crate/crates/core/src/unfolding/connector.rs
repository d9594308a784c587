//! Shortest saddle-connection chains joining two saddle connections into a
//! local geodesic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{FlatError, Result};
use crate::scalar::Scalar;
use crate::surface::FlatSurface;

use super::geodesic::{angle_tolerance, junction_ok, GeodesicPath, Leg, Waypoint};
use super::saddle::{SaddleCatalog, SaddleConnection, DEFAULT_WINDOW_BUDGET};

/// Default cap on expanded search nodes.
pub const DEFAULT_NODE_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug)]
pub struct ConnectorReport<T> {
    pub sc1: SaddleConnection<T>,
    pub sc2: SaddleConnection<T>,
    /// Chain of saddle connections between `sc1` and `sc2`; empty when they
    /// already concatenate geodesically.
    pub connector: Vec<SaddleConnection<T>>,
    /// Length of `sc1 * g * sc2`.
    pub length: T,
    /// Length of the connector `g` alone.
    pub excess: T,
}

impl<T: Scalar> ConnectorReport<T> {
    /// The full concatenation `sc1 * g * sc2` as a path.
    pub fn path(&self) -> GeodesicPath<T> {
        let mut chain = vec![self.sc1.clone()];
        chain.extend(self.connector.iter().cloned());
        chain.push(self.sc2.clone());
        chain_path(&chain)
    }
}

/// A chain of saddle connections as an open path through vertex classes.
pub fn chain_path<T: Scalar>(chain: &[SaddleConnection<T>]) -> GeodesicPath<T> {
    let Some(first) = chain.first() else {
        return GeodesicPath { waypoints: Vec::new(), legs: Vec::new(), closed: false };
    };
    let mut waypoints = vec![Waypoint::Vertex(first.start)];
    let mut legs = Vec::with_capacity(chain.len());
    for sc in chain {
        waypoints.push(Waypoint::Vertex(sc.end));
        legs.push(Leg {
            vector: sc.holonomy,
            length: sc.length,
            start_angle: Some(sc.start_angle),
            end_angle: Some(sc.end_angle),
        });
    }
    GeodesicPath { waypoints, legs, closed: false }
}

/// A closed chain as a closed path based at the first start vertex.
pub fn closed_chain_path<T: Scalar>(chain: &[SaddleConnection<T>]) -> GeodesicPath<T> {
    let mut p = chain_path(chain);
    if !p.waypoints.is_empty() {
        p.waypoints.pop();
        p.closed = true;
    }
    p
}

struct Node<T> {
    class: usize,
    /// Back direction of the last leg at `class`.
    back: T,
    parent: Option<usize>,
    sc: Option<(usize, usize)>,
}

#[derive(PartialEq)]
struct Entry<T>(T, usize);

impl<T: PartialOrd> Eq for Entry<T> {}

impl<T: PartialOrd> PartialOrd for Entry<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: PartialOrd> Ord for Entry<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.partial_cmp(&self.0).unwrap_or(Ordering::Equal).then(other.1.cmp(&self.1))
    }
}

/// Shortest connector `g` with `sc1 * g * sc2` locally geodesic at every
/// junction, searched exhaustively over chains of length at most `cutoff`.
pub fn connector_search<T: Scalar>(
    s: &FlatSurface<T>,
    sc1: &SaddleConnection<T>,
    sc2: &SaddleConnection<T>,
    cutoff: T,
) -> Result<ConnectorReport<T>> {
    if !(cutoff > T::zero()) {
        return Err(FlatError::InvalidParameter(format!("cutoff must be positive, got {cutoff}")));
    }
    let catalog = SaddleCatalog::build_with_budget(s, cutoff, DEFAULT_WINDOW_BUDGET)?;
    connector_in_catalog(s, &catalog, sc1, sc2, cutoff, DEFAULT_NODE_BUDGET)
}

/// Same as [`connector_search`] against a prebuilt catalog; `cutoff` must not
/// exceed the catalog's length bound.
pub fn connector_in_catalog<T: Scalar>(
    s: &FlatSurface<T>,
    catalog: &SaddleCatalog<T>,
    sc1: &SaddleConnection<T>,
    sc2: &SaddleConnection<T>,
    cutoff: T,
    node_budget: usize,
) -> Result<ConnectorReport<T>> {
    if cutoff > catalog.max_len {
        return Err(FlatError::InvalidParameter(format!(
            "cutoff {cutoff} exceeds catalog bound {}",
            catalog.max_len
        )));
    }
    let tol = angle_tolerance(s);
    let theta = |c: usize| s.cone_points()[c].angle;
    let closes = |class: usize, back: T| class == sc2.start && junction_ok(theta(class), back, sc2.start_angle, tol);

    let mut nodes = vec![Node { class: sc1.end, back: sc1.end_angle, parent: None, sc: None }];
    let mut heap = BinaryHeap::new();
    heap.push(Entry(T::zero(), 0));
    // settled (class, back angle) states
    let mut seen: Vec<Vec<T>> = vec![Vec::new(); s.cone_points().len()];
    while let Some(Entry(len, id)) = heap.pop() {
        let (class, back) = (nodes[id].class, nodes[id].back);
        if seen[class].iter().any(|&a| (a - back).abs() <= tol) {
            continue;
        }
        seen[class].push(back);
        if closes(class, back) {
            let mut connector = Vec::new();
            let mut cur = Some(id);
            while let Some(n) = cur {
                if let Some((c, k)) = nodes[n].sc {
                    connector.push(catalog.by_class[c][k].clone());
                }
                cur = nodes[n].parent;
            }
            connector.reverse();
            return Ok(ConnectorReport {
                sc1: sc1.clone(),
                sc2: sc2.clone(),
                connector,
                length: sc1.length + len + sc2.length,
                excess: len,
            });
        }
        for (k, sc) in catalog.by_class[class].iter().enumerate() {
            let next = len + sc.length;
            if next > cutoff {
                // lists are sorted by length
                break;
            }
            if !junction_ok(theta(class), back, sc.start_angle, tol) {
                continue;
            }
            if nodes.len() >= node_budget {
                return Err(FlatError::BudgetExhausted { budget: node_budget });
            }
            heap.push(Entry(next, nodes.len()));
            nodes.push(Node { class: sc.end, back: sc.end_angle, parent: Some(id), sc: Some((class, k)) });
        }
    }
    Err(FlatError::CutoffExceeded { cutoff: cutoff.to_f64().unwrap_or(f64::NAN) })
}

/// Largest connector excess over all ordered pairs drawn from `scs`, each
/// pair searched up to `cutoff`.
pub fn max_connector_excess<T: Scalar>(s: &FlatSurface<T>, scs: &[SaddleConnection<T>], cutoff: T) -> Result<T> {
    let catalog = SaddleCatalog::build(s, cutoff)?;
    let mut worst = T::zero();
    for a in scs {
        for b in scs {
            let r = connector_in_catalog(s, &catalog, a, b, cutoff, DEFAULT_NODE_BUDGET)?;
            worst = worst.max(r.excess);
        }
    }
    Ok(worst)
}
