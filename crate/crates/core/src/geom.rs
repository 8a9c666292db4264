//! Planar value types shared by every module.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::Vector2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A position in the world frame (m).
pub type Point = Vector2<f64>;
/// A free vector in the world frame (m or m/s depending on use).
pub type Vector = Vector2<f64>;

const TWO_PI: f64 = 2.0 * PI;

/// Normalizes `theta` into `(-PI, PI]`.
///
/// `-PI` maps to `PI`; the interval is open at the lower end.
pub fn normalize_angle(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("angle"));
    }
    Ok(wrap_angle(theta))
}

/// Infallible variant of [`normalize_angle`] for values already known finite.
pub(crate) fn wrap_angle(theta: f64) -> f64 {
    debug_assert!(theta.is_finite());
    if theta > -PI && theta <= PI {
        return theta;
    }
    let a = theta.rem_euclid(TWO_PI);
    if a > PI {
        a - TWO_PI
    } else {
        a
    }
}

/// Rotates `v` counter-clockwise by `angle`.
pub fn rotate(v: Vector, angle: f64) -> Vector {
    let (s, c) = angle.sin_cos();
    Vector::new(c * v.x - s * v.y, s * v.x + c * v.y)
}

/// Unit vector pointing along `heading`.
pub fn heading_vector(heading: f64) -> Vector {
    Vector::new(heading.cos(), heading.sin())
}

/// Robot position plus body heading. Position and heading are independent on
/// an omni-directional base.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    /// Heading (rad) in `(-PI, PI]`.
    pub heading: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, heading: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::NonFinite("pose position"));
        }
        Ok(Pose2 {
            x,
            y,
            heading: normalize_angle(heading)?,
        })
    }

    pub fn from_point(p: Point, heading: f64) -> Result<Self> {
        Self::new(p.x, p.y, heading)
    }

    pub fn position(&self) -> Point {
        Point::new(self.x, self.y)
    }
}

impl Default for Pose2 {
    fn default() -> Self {
        Pose2 {
            x: 0.0,
            y: 0.0,
            heading: 0.0,
        }
    }
}

impl fmt::Display for Pose2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.3}, {:.3}, {:.3} rad)", self.x, self.y, self.heading)
    }
}

/// Planar velocity `(vx, vy, omega)`. Whether the linear part is expressed in
/// the world or the body frame is stated by whoever produces the value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist2 {
    pub vx: f64,
    pub vy: f64,
    pub omega: f64,
}

impl Twist2 {
    pub const ZERO: Twist2 = Twist2 {
        vx: 0.0,
        vy: 0.0,
        omega: 0.0,
    };

    pub const fn new(vx: f64, vy: f64, omega: f64) -> Self {
        Twist2 { vx, vy, omega }
    }

    pub fn from_parts(linear: Vector, omega: f64) -> Self {
        Twist2::new(linear.x, linear.y, omega)
    }

    pub fn linear(&self) -> Vector {
        Vector::new(self.vx, self.vy)
    }

    pub fn speed(&self) -> f64 {
        self.vx.hypot(self.vy)
    }

    pub fn is_finite(&self) -> bool {
        self.vx.is_finite() && self.vy.is_finite() && self.omega.is_finite()
    }

    /// Re-expresses the linear part in a frame rotated by `angle`.
    pub fn rotated(&self, angle: f64) -> Self {
        Twist2::from_parts(rotate(self.linear(), angle), self.omega)
    }
}

impl fmt::Display for Twist2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(vx: {:.3} m/s, vy: {:.3} m/s, omega: {:.3} rad/s)",
            self.vx, self.vy, self.omega
        )
    }
}

/// Lateral side of a corridor, relative to the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

impl Side {
    /// `+1` for left, `-1` for right (left is counter-clockwise of travel).
    pub fn sign(self) -> f64 {
        match self {
            Side::Left => 1.0,
            Side::Right => -1.0,
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize_angle(0.0).unwrap(), 0.0);
        assert!((normalize_angle(3.0 * PI).unwrap() - PI).abs() < 1e-12);
        assert_eq!(normalize_angle(-PI).unwrap(), PI);
        assert_eq!(normalize_angle(PI).unwrap(), PI);
    }

    #[test]
    fn normalize_rejects_non_finite() {
        assert!(normalize_angle(f64::NAN).is_err());
        assert!(normalize_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn pose_normalizes_heading() {
        let p = Pose2::new(1.0, 2.0, -PI).unwrap();
        assert_eq!(p.heading, PI);
        assert!(Pose2::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn side_signs() {
        assert_eq!(Side::Left.sign(), 1.0);
        assert_eq!(Side::Right.opposite(), Side::Left);
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent_and_in_range(theta in -1.0e4f64..1.0e4) {
            let a = normalize_angle(theta).unwrap();
            prop_assert!(a > -PI && a <= PI);
            prop_assert_eq!(normalize_angle(a).unwrap(), a);
            // congruent modulo 2*pi
            let k = ((theta - a) / TWO_PI).round();
            prop_assert!((theta - a - k * TWO_PI).abs() < 1e-9);
        }
    }
}
