//! Invariants along the stretch family `diag(1/λ, λ)·S`.

use rayon::prelude::*;

use crate::cylinders::systole;
use crate::error::{FlatError, Result};
use crate::format_float;
use crate::invariants::{
    counting_function_with_budget, default_basepoint, delta_xi_hdim, entropy_estimate, packing_density,
    two_curve_pair_with_budget, DEFAULT_LOOP_BUDGET, DEFAULT_WINDOW_FRACTION,
};
use crate::scalar::{lit, to_f64, Scalar};
use crate::surface::FlatSurface;
use crate::unfolding::DEFAULT_NODE_BUDGET;

pub const SWEEP_CSV_HEADER: &str = "lambda,l0,rho,delta_lo,delta_hi,e_hat,two_curve_bound,hdim_lo,hdim_hi,exhaustive";

#[derive(Clone, Debug)]
pub struct SweepConfig<T> {
    pub r_max: T,
    /// Counting grid step; `r_max/40` when `None`.
    pub grid: Option<T>,
    pub packing_tol: T,
    pub window_fraction: T,
    /// Length bound for the systole and the two-curve loop search.
    pub curve_cutoff: T,
    pub node_budget: usize,
    pub loop_budget: usize,
}

impl<T: Scalar> SweepConfig<T> {
    pub fn new(r_max: T) -> Self {
        SweepConfig {
            r_max,
            grid: None,
            packing_tol: lit(1e-3),
            window_fraction: lit(DEFAULT_WINDOW_FRACTION),
            curve_cutoff: lit(2.0),
            node_budget: DEFAULT_NODE_BUDGET,
            loop_budget: DEFAULT_LOOP_BUDGET,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow<T> {
    pub lambda: T,
    /// Systole length.
    pub l0: T,
    pub rho: T,
    pub delta_lo: T,
    pub delta_hi: T,
    pub e_hat: T,
    /// Standard error of the entropy fit.
    pub residual: T,
    /// `None` when no pair of unrelated loops was found within the cutoff.
    pub two_curve_bound: Option<T>,
    /// The pair exists and satisfies the two-curve hypothesis.
    pub hypothesis: bool,
    pub hdim_lo: T,
    pub hdim_hi: T,
    pub exhaustive: bool,
}

impl<T: Scalar> SweepRow<T> {
    pub fn csv_line(&self) -> String {
        let f = |x: T| format_float(to_f64(x));
        format!(
            "{},{},{},{},{},{},{},{},{},{}",
            f(self.lambda),
            f(self.l0),
            f(self.rho),
            f(self.delta_lo),
            f(self.delta_hi),
            f(self.e_hat),
            self.two_curve_bound.map_or_else(|| "nan".to_string(), f),
            f(self.hdim_lo),
            f(self.hdim_hi),
            self.exhaustive
        )
    }
}

pub fn sweep_csv<T: Scalar>(rows: &[SweepRow<T>]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        out.push_str(&r.csv_line());
        out.push('\n');
    }
    out
}

/// One row per `λ`, in the given order.
pub fn sweep_stretch<T: Scalar>(base: &FlatSurface<T>, lambdas: &[T], config: &SweepConfig<T>) -> Result<Vec<SweepRow<T>>> {
    if let Some(l) = lambdas.iter().find(|&&l| !(l >= T::one()) || !l.is_finite()) {
        return Err(FlatError::InvalidParameter(format!("stretch factors must be at least 1, got {l}")));
    }
    lambdas.par_iter().map(|&l| sweep_row(base, l, config)).collect()
}

pub fn sweep_row<T: Scalar>(base: &FlatSurface<T>, lambda: T, config: &SweepConfig<T>) -> Result<SweepRow<T>> {
    let s = base.stretch(lambda)?;
    let l0 = systole(&s, config.curve_cutoff)?.length;
    let packing = packing_density(&s, config.packing_tol)?;
    let grid = config.grid.unwrap_or(config.r_max / lit(40.0));
    let table = counting_function_with_budget(&s, default_basepoint(&s), config.r_max, grid, config.node_budget)?;
    let entropy = entropy_estimate(&table, config.window_fraction)?;
    let bounds = delta_xi_hdim((packing.rho, packing.rho + packing.tolerance), entropy.e_hat)?;
    let pair = two_curve_pair_with_budget(&s, config.curve_cutoff, config.loop_budget)?;
    Ok(SweepRow {
        lambda,
        l0,
        rho: packing.rho,
        delta_lo: bounds.delta.0,
        delta_hi: bounds.delta.1,
        e_hat: entropy.e_hat,
        residual: entropy.residual,
        two_curve_bound: pair.as_ref().map(|p| p.bound.bound),
        hypothesis: pair.as_ref().is_some_and(|p| p.hypothesis),
        hdim_lo: bounds.hdim.0,
        hdim_hi: bounds.hdim.1,
        exhaustive: table.exhaustive,
    })
}
