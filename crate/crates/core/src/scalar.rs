//! Scalar abstraction and planar vectors.
//!
//! Every geometric routine in the crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. Tolerances are carried per scalar type so
//! that single-precision surfaces get sensible defaults.

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point type usable as a coordinate.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Default + FromStr + Sum + Send + Sync + 'static
{
    /// Default tolerance for validation equalities (edge vectors, Gauss–Bonnet).
    fn default_tolerance() -> Self;
    /// Relative tolerance used for angular and incidence tests.
    fn geometric_eps() -> Self;
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }
    fn geometric_eps() -> Self {
        1e-11
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }
    fn geometric_eps() -> Self {
        1e-5
    }
}

/// Converts an `f64` literal into the scalar type.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("literal representable in scalar type")
}

#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Reduces an angle into `[0, period)`.
pub fn wrap_angle<T: Scalar>(a: T, period: T) -> T {
    let mut r = a % period;
    if r < T::zero() {
        r = r + period;
    }
    if r >= period {
        r = r - period;
    }
    r
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Vec2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    pub fn from_angle(theta: T) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3d cross product.
    #[inline]
    pub fn cross(self, o: Self) -> T {
        self.x * o.y - self.y * o.x
    }

    #[inline]
    pub fn norm_sq(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    #[inline]
    pub fn scale(self, s: T) -> Self {
        Vec2::new(self.x * s, self.y * s)
    }

    /// Counterclockwise perpendicular.
    #[inline]
    pub fn perp(self) -> Self {
        Vec2::new(-self.y, self.x)
    }

    pub fn angle(self) -> T {
        self.y.atan2(self.x)
    }

    pub fn rotate(self, theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn dist(self, o: Self) -> T {
        (self - o).norm()
    }

    pub fn lerp(self, o: Self, t: T) -> Self {
        self + (o - self).scale(t)
    }

    /// Counterclockwise angle from `self` to `o`, in `[0, 2π)`.
    pub fn ccw_angle_to(self, o: Self) -> T {
        let a = self.cross(o).atan2(self.dot(o));
        wrap_angle(a, T::PI() + T::PI())
    }
}

impl<T: Scalar> Add for Vec2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl<T: Scalar> Sub for Vec2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl<T: Scalar> Neg for Vec2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Vec2::new(-self.x, -self.y)
    }
}

impl<T: Scalar> Mul<T> for Vec2<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        self.scale(s)
    }
}

impl<T: Scalar> AddAssign for Vec2<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Vec2<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

/// Orientation-preserving isometry of the form `x ↦ sign·x + offset` with
/// `sign = ±1`. Half-translation charts only ever differ by such maps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Placement<T> {
    pub sign: T,
    pub offset: Vec2<T>,
}

impl<T: Scalar> Placement<T> {
    pub fn identity() -> Self {
        Placement { sign: T::one(), offset: Vec2::zero() }
    }

    pub fn translation(offset: Vec2<T>) -> Self {
        Placement { sign: T::one(), offset }
    }

    #[inline]
    pub fn apply(&self, p: Vec2<T>) -> Vec2<T> {
        p.scale(self.sign) + self.offset
    }

    #[inline]
    pub fn apply_dir(&self, d: Vec2<T>) -> Vec2<T> {
        d.scale(self.sign)
    }

    /// Inverse map on directions (the linear part is an involution).
    #[inline]
    pub fn unapply_dir(&self, d: Vec2<T>) -> Vec2<T> {
        d.scale(self.sign)
    }

    pub fn unapply(&self, p: Vec2<T>) -> Vec2<T> {
        (p - self.offset).scale(self.sign)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Placement<T>) -> Placement<T> {
        Placement { sign: self.sign * inner.sign, offset: self.apply(inner.offset) }
    }
}
