use crate::error::{FlatError, Result};
use crate::format_float;
use crate::invariants::{CountingTable, PackingEstimate};
use crate::scalar::{lit, to_f64, Scalar};

use super::CoveringMetrics;

/// Measured inputs for [`verify_covering_bounds`]. Packing estimates of both
/// surfaces are required; the rest enables further checks.
#[derive(Clone, Debug)]
pub struct CoveringEvidence<T> {
    pub rho_base: Option<PackingEstimate<T>>,
    pub rho_cover: Option<PackingEstimate<T>>,
    pub e_hat_base: Option<T>,
    pub e_hat_cover: Option<T>,
    /// Counting table of the cover, for the tree bound.
    pub cover_table: Option<CountingTable<T>>,
    /// Length of the slit of a single-slit cyclic cover.
    pub slit_length: Option<T>,
}

impl<T> Default for CoveringEvidence<T> {
    fn default() -> Self {
        CoveringEvidence {
            rho_base: None,
            rho_cover: None,
            e_hat_base: None,
            e_hat_cover: None,
            cover_table: None,
            slit_length: None,
        }
    }
}

/// One inequality `measured ≤ bound` or `measured ≥ bound`.
#[derive(Clone, Debug, PartialEq)]
pub struct Check<T> {
    pub name: String,
    pub measured: T,
    pub bound: T,
    pub holds: bool,
}

impl<T: Scalar> Check<T> {
    fn at_most(name: impl Into<String>, measured: T, bound: T) -> Self {
        Check { name: name.into(), measured, bound, holds: measured <= bound }
    }

    fn at_least(name: impl Into<String>, measured: T, bound: T) -> Self {
        Check { name: name.into(), measured, bound, holds: measured >= bound }
    }
}

#[derive(Clone, Debug)]
pub struct CoveringReport<T> {
    pub rho_base: T,
    pub rho_cover: T,
    pub delta_base: (T, T),
    pub delta_cover: (T, T),
    pub e_hat_base: Option<T>,
    pub e_hat_cover: Option<T>,
    /// `log n / l + log(1/2)` for a single-slit cover with slit length `l`.
    pub entropy_target: Option<T>,
    pub checks: Vec<Check<T>>,
}

impl<T: Scalar> CoveringReport<T> {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

/// Checks the packing and hyperbolicity comparisons between a base surface
/// and a cover with `k` branch points, and for single-slit covers the tree
/// count `N_T(R) ≥ n^(R/l − 1)` at every counted radius.
pub fn verify_covering_bounds<T: Scalar>(
    metrics: &CoveringMetrics<T>,
    evidence: &CoveringEvidence<T>,
) -> Result<CoveringReport<T>> {
    let rs = evidence.rho_base.as_ref().ok_or_else(|| FlatError::MissingInput("packing density of the base".into()))?;
    let rt = evidence.rho_cover.as_ref().ok_or_else(|| FlatError::MissingInput("packing density of the cover".into()))?;
    let two = lit::<T>(2.0);
    let tol = rs.tolerance.max(rt.tolerance);
    let k1 = T::from_usize(metrics.k() + 1).unwrap();
    let delta = |p: &PackingEstimate<T>| (p.rho / two, two * (p.rho + p.tolerance));
    let (ds, dt) = (delta(rs), delta(rt));
    let mut checks = vec![
        Check::at_most("rho_cover <= rho_base", rt.rho, rs.rho + two * tol),
        Check::at_least("rho_cover >= rho_base/(6(k+1))", rt.rho, rs.rho / (lit::<T>(6.0) * k1) - two * tol),
        Check::at_least("delta_cover >= delta_base/(24(k+1))", dt.1, ds.0 / (lit::<T>(24.0) * k1)),
        Check::at_most("delta_cover <= 4 delta_base", dt.0, lit::<T>(4.0) * ds.1),
    ];
    let n = T::from_usize(metrics.sheets).unwrap();
    let mut entropy_target = None;
    if let Some(l) = evidence.slit_length {
        if !(l > T::zero()) {
            return Err(FlatError::InvalidParameter(format!("slit length must be positive, got {l}")));
        }
        let target = n.ln() / l + lit::<T>(0.5).ln();
        entropy_target = Some(target);
        if let Some(e) = evidence.e_hat_cover {
            checks.push(Check::at_least("e_hat_cover >= log(n)/l + log(1/2)", e, target));
        }
        if let Some(table) = &evidence.cover_table {
            for (&r, &count) in table.radii.iter().zip(&table.counts) {
                if r > T::zero() {
                    let bound = n.powf(r / l - T::one());
                    let name = format!("N_cover({}) >= n^(R/l-1)", format_float(to_f64(r)));
                    checks.push(Check::at_least(name, lit::<T>(count as f64), bound));
                }
            }
        }
    }
    Ok(CoveringReport {
        rho_base: rs.rho,
        rho_cover: rt.rho,
        delta_base: ds,
        delta_cover: dt,
        e_hat_base: evidence.e_hat_base,
        e_hat_cover: evidence.e_hat_cover,
        entropy_target,
        checks,
    })
}
