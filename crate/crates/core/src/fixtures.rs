//! Bundled example surfaces.

use crate::scalar::Scalar;
use crate::surface::{parse_surface, FlatSurface};

pub const TORUS: &str = include_str!("../fixtures/torus.fsf");
pub const RECT_TORUS: &str = include_str!("../fixtures/rect_torus.fsf");
pub const TWO_SQUARE_TORUS: &str = include_str!("../fixtures/two_square_torus.fsf");
pub const OCTAGON: &str = include_str!("../fixtures/octagon.fsf");
pub const ONE_CYLINDER: &str = include_str!("../fixtures/one_cylinder.fsf");

fn load<T: Scalar>(text: &str) -> FlatSurface<T> {
    parse_surface(text).expect("bundled fixture parses")
}

/// Unit square with opposite sides identified.
pub fn torus<T: Scalar>() -> FlatSurface<T> {
    load(TORUS)
}

/// 0.5 × 2 rectangle torus.
pub fn rect_torus<T: Scalar>() -> FlatSurface<T> {
    load(RECT_TORUS)
}

/// Two unit squares side by side forming a 2 × 1 torus.
pub fn two_square_torus<T: Scalar>() -> FlatSurface<T> {
    load(TWO_SQUARE_TORUS)
}

/// Unit-area regular octagon, opposite sides glued: genus 2, one 6π point.
pub fn octagon<T: Scalar>() -> FlatSurface<T> {
    load(OCTAGON)
}

/// Three squares of area 1/3 in one horizontal cylinder: genus 2, one 6π point.
pub fn one_cylinder<T: Scalar>() -> FlatSurface<T> {
    load(ONE_CYLINDER)
}
