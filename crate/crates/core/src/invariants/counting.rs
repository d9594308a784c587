use crate::error::{FlatError, Result};
use crate::format_float;
use crate::scalar::{lit, to_f64, Scalar};
use crate::surface::FlatSurface;
use crate::unfolding::{junction_ok, SaddleCatalog, DEFAULT_NODE_BUDGET};

/// Samples of `N(R)`: the number of lifts of the basepoint within distance `R`
/// of a fixed lift in the universal cover.
#[derive(Clone, Debug, PartialEq)]
pub struct CountingTable<T> {
    /// Vertex class of the basepoint; `None` for synthetic tables.
    pub basepoint: Option<usize>,
    pub radii: Vec<T>,
    pub counts: Vec<u64>,
    /// True when every requested radius was counted in full.
    pub exhaustive: bool,
    /// Largest radius that was counted in full, if any.
    pub exhaustive_radius: Option<T>,
}

impl<T: Scalar> CountingTable<T> {
    /// A table from given samples, e.g. a closed-form growth function.
    pub fn from_counts(radii: Vec<T>, counts: Vec<u64>) -> Result<Self> {
        if radii.len() != counts.len() {
            return Err(FlatError::InvalidParameter(format!("{} radii for {} counts", radii.len(), counts.len())));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || counts.windows(2).any(|w| w[0] > w[1]) {
            return Err(FlatError::InvalidParameter("radii must increase and counts must not decrease".into()));
        }
        let last = radii.last().copied();
        Ok(CountingTable { basepoint: None, radii, counts, exhaustive: true, exhaustive_radius: last })
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    /// Count at the sample with radius `r` (within the surface tolerance of the grid).
    pub fn count_at(&self, r: T) -> Option<u64> {
        let eps = lit::<T>(1e-9) * r.abs().max(T::one());
        self.radii.iter().position(|&x| (x - r).abs() <= eps).map(|i| self.counts[i])
    }

    /// `R,N,logN` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R,N,logN\n");
        for (r, n) in self.radii.iter().zip(&self.counts) {
            out.push_str(&format!("{},{},{}\n", format_float(to_f64(*r)), n, format_float((*n as f64).ln())));
        }
        out
    }
}

/// Radii `0, g, 2g, …` up to `r_max`, with `r_max` itself appended when off-grid.
pub fn radius_grid<T: Scalar>(r_max: T, grid: T) -> Result<Vec<T>> {
    if !(r_max > T::zero()) || !r_max.is_finite() {
        return Err(FlatError::InvalidParameter(format!("r_max must be positive and finite, got {r_max}")));
    }
    if !(grid > T::zero()) || !grid.is_finite() {
        return Err(FlatError::InvalidParameter(format!("grid step must be positive, got {grid}")));
    }
    let steps = to_f64(r_max / grid);
    if steps > 1e7 {
        return Err(FlatError::InvalidParameter(format!("grid step {grid} is too fine for r_max {r_max}")));
    }
    let eps = lit::<T>(1e-9) * r_max.max(T::one());
    let mut radii = Vec::new();
    let mut i = 0usize;
    loop {
        let r = grid * T::from_usize(i).unwrap();
        if r > r_max + eps {
            break;
        }
        radii.push(r.min(r_max));
        i += 1;
    }
    if *radii.last().unwrap() < r_max - eps {
        radii.push(r_max);
    }
    Ok(radii)
}

/// Default basepoint: the first singular class, else class 0.
pub fn default_basepoint<T: Scalar>(s: &FlatSurface<T>) -> usize {
    s.singularities().first().copied().unwrap_or(0)
}

pub fn counting_function<T: Scalar>(s: &FlatSurface<T>, basepoint: usize, r_max: T, grid: T) -> Result<CountingTable<T>> {
    counting_function_with_budget(s, basepoint, r_max, grid, DEFAULT_NODE_BUDGET)
}

/// Counts lifts of the basepoint class by enumerating geodesic chains of
/// saddle connections from it: in the universal cover every lift is joined
/// to the base lift by exactly one such chain. When the chain count exceeds
/// `node_budget` the table is cut at the largest radius that fits and marked
/// non-exhaustive.
pub fn counting_function_with_budget<T: Scalar>(
    s: &FlatSurface<T>,
    basepoint: usize,
    r_max: T,
    grid: T,
    node_budget: usize,
) -> Result<CountingTable<T>> {
    if basepoint >= s.cone_points().len() {
        return Err(FlatError::InvalidParameter(format!(
            "basepoint {basepoint} is not a vertex class (surface has {})",
            s.cone_points().len()
        )));
    }
    let radii = radius_grid(r_max, grid)?;
    let catalog = SaddleCatalog::build(s, r_max + slack(r_max))?;
    let table = |radii: &[T], counts: Vec<u64>, exhaustive: bool| CountingTable {
        basepoint: Some(basepoint),
        exhaustive_radius: radii.last().copied(),
        radii: radii.to_vec(),
        counts,
        exhaustive,
    };
    match count_chains(s, &catalog, basepoint, &radii, node_budget) {
        Ok(counts) => return Ok(table(&radii, counts, true)),
        Err(FlatError::BudgetExhausted { .. }) => {}
        Err(e) => return Err(e),
    }
    // largest prefix of the grid that fits in the budget
    let (mut lo, mut hi) = (0usize, radii.len() - 1);
    let mut best = count_chains(s, &catalog, basepoint, &radii[..1], node_budget)?;
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        match count_chains(s, &catalog, basepoint, &radii[..=mid], node_budget) {
            Ok(c) => {
                lo = mid;
                best = c;
            }
            Err(FlatError::BudgetExhausted { .. }) => hi = mid,
            Err(e) => return Err(e),
        }
    }
    Ok(table(&radii[..=lo], best, false))
}

fn slack<T: Scalar>(r: T) -> T {
    lit::<T>(1e-9) * r.max(T::one())
}

/// Cumulative counts at `radii` (ascending, `radii[0] ≥ 0`).
fn count_chains<T: Scalar>(
    s: &FlatSurface<T>,
    catalog: &SaddleCatalog<T>,
    basepoint: usize,
    radii: &[T],
    node_budget: usize,
) -> Result<Vec<u64>> {
    let r_max = *radii.last().unwrap();
    let cutoff = r_max + slack(r_max);
    let tol = crate::unfolding::angle_tolerance(s);
    let mut buckets = vec![0u64; radii.len()];
    let mut record = |len: T| {
        let i = radii.partition_point(|&r| r + slack(r) < len);
        if i < buckets.len() {
            buckets[i] += 1;
        }
    };
    record(T::zero());
    let mut nodes = 0usize;
    // (class, back angle at class, length so far)
    let mut stack: Vec<(usize, T, T)> = Vec::new();
    let push_from = |class: usize, back: Option<T>, len: T, stack: &mut Vec<(usize, T, T)>, nodes: &mut usize| -> Result<()> {
        let theta = s.cone_points()[class].angle;
        for sc in &catalog.by_class[class] {
            let next = len + sc.length;
            if next > cutoff {
                break;
            }
            if let Some(b) = back {
                if !junction_ok(theta, b, sc.start_angle, tol) {
                    continue;
                }
            }
            *nodes += 1;
            if *nodes > node_budget {
                return Err(FlatError::BudgetExhausted { budget: node_budget });
            }
            stack.push((sc.end, sc.end_angle, next));
        }
        Ok(())
    };
    push_from(basepoint, None, T::zero(), &mut stack, &mut nodes)?;
    while let Some((class, back, len)) = stack.pop() {
        if class == basepoint {
            record(len);
        }
        push_from(class, Some(back), len, &mut stack, &mut nodes)?;
    }
    let mut acc = 0u64;
    Ok(buckets
        .into_iter()
        .map(|b| {
            acc += b;
            acc
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn torus_lattice_counts() {
        let s = fixtures::torus::<f64>();
        let t = counting_function(&s, 0, 2.0, 0.5).unwrap();
        assert!(t.exhaustive);
        assert_eq!(t.count_at(0.0), Some(1));
        assert_eq!(t.count_at(1.0), Some(5));
        assert_eq!(t.count_at(2.0), Some(13));
    }

    #[test]
    fn budget_truncates_table() {
        let s = fixtures::torus::<f64>();
        let t = counting_function_with_budget(&s, 0, 5.0, 0.5, 40).unwrap();
        assert!(!t.exhaustive);
        assert!(t.radii.len() < 11);
        assert_eq!(t.counts[..3], [1, 1, 5]);
    }

    #[test]
    fn grid_includes_endpoint() {
        let g = radius_grid(1.0, 0.3).unwrap();
        assert_eq!(g.len(), 5);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(radius_grid(0.0, 0.1).is_err());
    }

    #[test]
    fn synthetic_table_validates() {
        assert!(CountingTable::from_counts(vec![0.0, 1.0], vec![1, 3]).is_ok());
        assert!(CountingTable::from_counts(vec![0.0, 1.0], vec![3, 1]).is_err());
        let csv = CountingTable::from_counts(vec![0.0, 1.0], vec![1, 5]).unwrap().to_csv();
        assert_eq!(csv, "R,N,logN\n0,1,0\n1,5,1.60943791\n");
    }
}
