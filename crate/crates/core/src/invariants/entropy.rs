use crate::error::{FlatError, Result};
use crate::scalar::{lit, Scalar};

use super::counting::CountingTable;

pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyEstimate<T> {
    /// Least-squares slope of `log N` against `R` over the window, clamped at 0.
    pub e_hat: T,
    /// Unclamped fitted slope.
    pub slope: T,
    pub window_start: T,
    pub window_end: T,
    pub window_samples: usize,
    /// Standard error of the fitted slope.
    pub residual: T,
    /// Largest increment slope between consecutive samples in the window.
    pub tail_slope_max: T,
    pub exhaustive: bool,
}

/// Fits the growth rate of a counting table over its top `fraction` of samples.
pub fn entropy_estimate<T: Scalar>(table: &CountingTable<T>, fraction: T) -> Result<EntropyEstimate<T>> {
    if !(fraction > T::zero() && fraction <= T::one()) {
        return Err(FlatError::InvalidParameter(format!("window fraction must lie in (0, 1], got {fraction}")));
    }
    let n = table.len();
    let k = (fraction * T::from_usize(n).unwrap()).ceil().to_usize().unwrap_or(0).min(n);
    if k < 4 {
        return Err(FlatError::DegenerateWindow(format!("{k} samples in the window, need at least 4")));
    }
    let xs = &table.radii[n - k..];
    let ys: Vec<T> = table.counts[n - k..].iter().map(|&c| lit::<T>(c.max(1) as f64).ln()).collect();
    let kt = T::from_usize(k).unwrap();
    let mx = xs.iter().fold(T::zero(), |a, &x| a + x) / kt;
    let my = ys.iter().fold(T::zero(), |a, &y| a + y) / kt;
    let (mut sxx, mut sxy) = (T::zero(), T::zero());
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx = sxx + (x - mx) * (x - mx);
        sxy = sxy + (x - mx) * (y - my);
    }
    if !(sxx > T::zero()) {
        return Err(FlatError::DegenerateWindow("window radii do not vary".into()));
    }
    let slope = sxy / sxx;
    let sse = xs.iter().zip(&ys).fold(T::zero(), |a, (&x, &y)| {
        let r = y - my - slope * (x - mx);
        a + r * r
    });
    let residual = (sse / (kt - lit(2.0)) / sxx).sqrt();
    let tail_slope_max = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
        .fold(T::neg_infinity(), |a, b| a.max(b));
    Ok(EntropyEstimate {
        e_hat: slope.max(T::zero()),
        slope,
        window_start: xs[0],
        window_end: xs[k - 1],
        window_samples: k,
        residual,
        tail_slope_max,
        exhaustive: table.exhaustive,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn synthetic(rate: f64) -> CountingTable<f64> {
        let radii: Vec<f64> = (0..=40).map(|i| i as f64 * 0.25).collect();
        let counts = radii.iter().map(|r| (rate * r).exp().ceil() as u64).collect();
        CountingTable::from_counts(radii, counts).unwrap()
    }

    #[test]
    fn exponential_table_recovers_rate() {
        let e = entropy_estimate(&synthetic(2.0), 0.5).unwrap();
        assert!((e.e_hat - 2.0).abs() < 0.01, "{}", e.e_hat);
        assert_eq!(e.window_samples, 21);
        assert_relative_eq!(e.window_end, 10.0);
    }

    #[test]
    fn constant_table_has_zero_entropy() {
        let t = CountingTable::from_counts(vec![0.0, 1.0, 2.0, 3.0], vec![1, 1, 1, 1]).unwrap();
        let e = entropy_estimate(&t, 1.0).unwrap();
        assert_eq!(e.e_hat, 0.0);
        assert_eq!(e.residual, 0.0);
    }

    #[test]
    fn short_window_is_degenerate() {
        let t = CountingTable::from_counts(vec![0.0, 1.0, 2.0, 3.0], vec![1, 2, 3, 4]).unwrap();
        assert!(matches!(entropy_estimate(&t, 0.5), Err(FlatError::DegenerateWindow(_))));
        assert!(entropy_estimate(&t, 0.0).is_err());
    }
}
