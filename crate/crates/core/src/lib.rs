//! Flat half-translation surfaces built from glued polygons: cone points,
//! straight-line flow, saddle connections, cylinders, packing density,
//! counting functions and volume entropy, and branched slit coverings.
//!
//! Geometry is generic over [`scalar::Scalar`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`.

// `!(x > 0)` style comparisons deliberately reject NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fixtures;
pub mod polygon;
pub mod scalar;
pub mod surface;
pub mod unfolding;
pub mod cylinders;
pub mod invariants;
pub mod coverings;
pub mod sweep;

pub use error::{FlatError, Result};
pub use scalar::{Placement, Scalar, Vec2};

pub type Surface = surface::FlatSurface<f64>;
pub type Point = surface::SurfacePoint<f64>;
pub type Vector = Vec2<f64>;

/// Formats with 9 significant digits, trimming trailing zeros.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..9).contains(&exp) {
        let s = format!("{:.8e}", x);
        let (mant, e) = s.split_once('e').unwrap();
        let mant = trim_zeros(mant);
        return format!("{mant}e{e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, x)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::format_float;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(format_float(1.0), "1");
        assert_eq!(format_float(0.5), "0.5");
        assert_eq!(format_float(std::f64::consts::PI), "3.14159265");
        assert_eq!(format_float(1257.0), "1257");
        assert_eq!(format_float(0.000123456789123), "0.000123456789");
        assert_eq!(format_float(1.5e-7), "1.5e-7");
        assert_eq!(format_float(f64::INFINITY), "inf");
        assert_eq!(format_float(-2.25), "-2.25");
    }
}
