use crate::error::{FlatError, Result};
use crate::scalar::{lit, Scalar};

/// `√(1/Σθ_i)` for cone angles `θ_i = n_i π`, `n_i ≥ 3`: a lower bound for the
/// packing density of an area-one surface with those cone points.
pub fn rho_lower_bound<T: Scalar>(angles: &[T]) -> Result<T> {
    if angles.is_empty() {
        return Err(FlatError::InvalidParameter("no cone angles given".into()));
    }
    let min = lit::<T>(3.0) * T::PI() - lit(1e-9);
    if let Some(a) = angles.iter().find(|&&a| !(a >= min) || !a.is_finite()) {
        return Err(FlatError::InvalidParameter(format!("cone angle {a} is below 3π")));
    }
    let total = angles.iter().fold(T::zero(), |acc, &a| acc + a);
    Ok((T::one() / total).sqrt())
}

/// Intervals for the hyperbolicity constant, the visual parameter and the
/// Hausdorff dimension of the boundary, each as `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryInvariants<T> {
    pub delta: (T, T),
    /// `ξ = 2^(1/(2δ))`, so `xi.0` comes from `delta.1`.
    pub xi: (T, T),
    pub hdim: (T, T),
    /// Raw lower end fell below 1 and was raised to 1.
    pub hdim_clamped: bool,
}

pub fn xi_of_delta<T: Scalar>(delta: T) -> T {
    lit::<T>(2.0).powf(T::one() / (delta + delta))
}

/// From `ρ ∈ [rho.0, rho.1]`: `δ ∈ [ρ/2, 2ρ]`, `ξ` over that interval and
/// `hdim = e/log ξ`, with both ends raised to at least 1.
pub fn delta_xi_hdim<T: Scalar>(rho: (T, T), e_hat: T) -> Result<BoundaryInvariants<T>> {
    if !(rho.0 > T::zero() && rho.0 <= rho.1 && rho.1.is_finite()) {
        return Err(FlatError::InvalidParameter(format!("invalid packing interval [{}, {}]", rho.0, rho.1)));
    }
    if !(e_hat >= T::zero()) || !e_hat.is_finite() {
        return Err(FlatError::InvalidParameter(format!("entropy must be non-negative, got {e_hat}")));
    }
    let two = lit::<T>(2.0);
    let delta = (rho.0 / two, rho.1 * two);
    let xi = (xi_of_delta(delta.1), xi_of_delta(delta.0));
    let raw = (e_hat / xi.1.ln(), e_hat / xi.0.ln());
    Ok(BoundaryInvariants {
        delta,
        xi,
        hdim: (raw.0.max(T::one()), raw.1.max(T::one())),
        hdim_clamped: raw.0 < T::one(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoCurveBound<T> {
    pub a: T,
    pub b: T,
    pub bound: T,
}

/// `max{(log b − log a)/(2b), log 2/b}` for loop lengths `0 < a ≤ b`.
pub fn two_curve_lower_bound<T: Scalar>(a: T, b: T) -> Result<TwoCurveBound<T>> {
    if !(a > T::zero()) || !b.is_finite() {
        return Err(FlatError::InvalidParameter(format!("loop lengths must be positive and finite, got a={a}, b={b}")));
    }
    if a > b {
        return Err(FlatError::InvalidParameter(format!("need a ≤ b, got a={a}, b={b}")));
    }
    let first = (b.ln() - a.ln()) / (b + b);
    let second = lit::<T>(2.0).ln() / b;
    Ok(TwoCurveBound { a, b, bound: first.max(second) })
}

/// `(b/a − b/R)^(R/b − 1)`: the number of positive words in two loops of
/// lengths `a ≤ b` whose lifts stay in the ball of radius `2R`. Zero when the
/// base is not positive.
pub fn word_count_lower_bound<T: Scalar>(a: T, b: T, r: T) -> T {
    let base = b / a - b / r;
    if !(base > T::zero()) {
        return T::zero();
    }
    base.powf(r / b - T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn rho_bound_hand_values() {
        assert_relative_eq!(rho_lower_bound(&[6.0 * PI]).unwrap(), 0.230329, epsilon = 1e-6);
        assert_relative_eq!(rho_lower_bound(&[3.0 * PI, 3.0 * PI]).unwrap(), 0.230329, epsilon = 1e-6);
        assert_relative_eq!(rho_lower_bound(&[4.0 * PI; 3]).unwrap(), 0.162868, epsilon = 1e-6);
        assert!(rho_lower_bound::<f64>(&[]).is_err());
        assert!(rho_lower_bound(&[2.0 * PI]).is_err());
    }

    #[test]
    fn xi_and_hdim_hand_values() {
        assert_relative_eq!(xi_of_delta(0.5), 2.0);
        let b = delta_xi_hdim((0.25, 0.25), 2.0 * LN_2).unwrap();
        assert_relative_eq!(b.delta.1, 0.5);
        assert_relative_eq!(b.xi.0, 2.0);
        assert_relative_eq!(b.hdim.1, 2.0, epsilon = 1e-12);
        assert!(b.xi.0 <= b.xi.1 && b.hdim.0 <= b.hdim.1);
        let flat = delta_xi_hdim((0.3, 0.31), 0.0).unwrap();
        assert_eq!(flat.hdim, (1.0, 1.0));
        assert!(flat.hdim_clamped);
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn two_curve_hand_values() {
        assert_relative_eq!(two_curve_lower_bound(1.0, 1.0).unwrap().bound, 0.693147, epsilon = 1e-6);
        assert_relative_eq!(two_curve_lower_bound(0.1, 1.0).unwrap().bound, 1.151293, epsilon = 1e-6);
        assert_relative_eq!(two_curve_lower_bound(2.0, 2.0).unwrap().bound, 0.346574, epsilon = 1e-6);
        assert!(two_curve_lower_bound(2.0, 1.0).is_err());
        assert!(two_curve_lower_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn word_count_values() {
        assert_relative_eq!(word_count_lower_bound(0.5, 1.0, 3.0), (2.0f64 - 1.0 / 3.0).powi(2));
        assert_eq!(word_count_lower_bound(1.0, 1.0, 0.5), 0.0);
    }
}
