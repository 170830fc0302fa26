//! Planar poses, vectors and axis-aligned rectangles in centimetres.

use crate::error::{invalid_input, Result};
use crate::math::{self, PI};

/// Wraps an angle into `(-π, π]`.
pub fn normalize_yaw(yaw: f64) -> Result<f64> {
    if !yaw.is_finite() {
        return Err(invalid_input("yaw must be finite"));
    }
    Ok(wrap_angle(yaw))
}

// Total version for internal use on values already known to be finite.
pub(crate) fn wrap_angle(yaw: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = math::fmod(yaw, two_pi);
    if r <= -PI {
        r += two_pi;
    } else if r > PI {
        r -= two_pi;
    }
    // fmod can land a hair outside after the shift for inputs near ±π.
    if r <= -PI {
        r = PI;
    }
    r
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_angle(angle: f64) -> Self {
        Self::new(math::cos(angle), math::sin(angle))
    }

    pub fn norm(self) -> f64 {
        math::hypot(self.x, self.y)
    }

    pub fn dist(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 2-D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl core::ops::Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl core::ops::Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl core::ops::Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, rhs: f64) -> Vec2 {
        Vec2::new(self.x * rhs, self.y * rhs)
    }
}

impl core::ops::Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Position plus heading. `yaw` is kept in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Pose2 {
    pub x: f64,
    pub y: f64,
    pub yaw: f64,
}

impl Pose2 {
    /// Builds a pose, normalizing `yaw`. Fails on non-finite input.
    pub fn new(x: f64, y: f64, yaw: f64) -> Result<Self> {
        if !x.is_finite() || !y.is_finite() {
            return Err(invalid_input("pose position must be finite"));
        }
        Ok(Self { x, y, yaw: normalize_yaw(yaw)? })
    }

    pub(crate) fn raw(x: f64, y: f64, yaw: f64) -> Self {
        Self { x, y, yaw: wrap_angle(yaw) }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    /// Unit vector along the pose heading.
    pub fn axis(&self) -> Vec2 {
        Vec2::from_angle(self.yaw)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.yaw.is_finite()
    }
}

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Rect {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect {
    pub const fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self { x_min, y_min, x_max, y_max }
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn center(&self) -> Vec2 {
        Vec2::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    pub fn is_valid(&self) -> bool {
        self.x_min.is_finite()
            && self.y_min.is_finite()
            && self.x_max.is_finite()
            && self.y_max.is_finite()
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
    }

    pub fn contains(&self, p: Vec2) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn contains_rect(&self, other: &Rect) -> bool {
        other.x_min >= self.x_min
            && other.x_max <= self.x_max
            && other.y_min >= self.y_min
            && other.y_max <= self.y_max
    }

    pub fn overlaps(&self, other: &Rect) -> bool {
        self.x_min < other.x_max
            && other.x_min < self.x_max
            && self.y_min < other.y_max
            && other.y_min < self.y_max
    }

    /// Shrinks every side by `margin`; `None` if nothing is left.
    pub fn shrink(&self, margin: f64) -> Option<Rect> {
        let r = Rect::new(
            self.x_min + margin,
            self.y_min + margin,
            self.x_max - margin,
            self.y_max - margin,
        );
        (r.x_min <= r.x_max && r.y_min <= r.y_max).then_some(r)
    }

    /// Euclidean distance from `p` to the rectangle, zero inside.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let dx = (self.x_min - p.x).max(0.0).max(p.x - self.x_max);
        let dy = (self.y_min - p.y).max(0.0).max(p.y - self.y_max);
        math::hypot(dx, dy)
    }

    pub fn translated(&self, d: Vec2) -> Rect {
        Rect::new(self.x_min + d.x, self.y_min + d.y, self.x_max + d.x, self.y_max + d.y)
    }
}

/// Bounding box of a `length × width` bar centred at `pose` along its heading.
pub fn bar_aabb(pose: &Pose2, length: f64, width: f64) -> Rect {
    let axis = pose.axis();
    let hx = 0.5 * length * math::abs(axis.x) + 0.5 * width * math::abs(axis.y);
    let hy = 0.5 * length * math::abs(axis.y) + 0.5 * width * math::abs(axis.x);
    Rect::new(pose.x - hx, pose.y - hy, pose.x + hx, pose.y + hy)
}

/// Distance between segments `[a0, a1]` and `[b0, b1]`.
pub fn segment_distance(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> f64 {
    if segments_intersect(a0, a1, b0, b1) {
        return 0.0;
    }
    point_segment_distance(a0, b0, b1)
        .min(point_segment_distance(a1, b0, b1))
        .min(point_segment_distance(b0, a0, a1))
        .min(point_segment_distance(b1, a0, a1))
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + ab * t)
}

fn segments_intersect(a0: Vec2, a1: Vec2, b0: Vec2, b1: Vec2) -> bool {
    let d1 = (a1 - a0).cross(b0 - a0);
    let d2 = (a1 - a0).cross(b1 - a0);
    let d3 = (b1 - b0).cross(a0 - b0);
    let d4 = (b1 - b0).cross(a1 - b0);
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_yaw_examples() {
        assert_eq!(normalize_yaw(0.0).unwrap(), 0.0);
        assert!((normalize_yaw(3.0 * PI).unwrap() - PI).abs() < 1e-12);
        assert_eq!(normalize_yaw(-PI).unwrap(), PI);
        assert_eq!(normalize_yaw(PI).unwrap(), PI);
    }

    #[test]
    fn normalize_yaw_rejects_non_finite() {
        assert!(normalize_yaw(f64::NAN).is_err());
        assert!(normalize_yaw(f64::INFINITY).is_err());
    }

    #[test]
    fn rect_distance() {
        let r = Rect::new(0.0, 0.0, 10.0, 10.0);
        assert_eq!(r.distance_to(Vec2::new(5.0, 5.0)), 0.0);
        assert_eq!(r.distance_to(Vec2::new(13.0, 14.0)), 5.0);
        assert_eq!(r.distance_to(Vec2::new(-2.0, 5.0)), 2.0);
    }

    #[test]
    fn bar_box_axis_aligned() {
        let p = Pose2::new(10.0, 5.0, 0.0).unwrap();
        let b = bar_aabb(&p, 18.5, 2.3);
        assert!((b.width() - 18.5).abs() < 1e-12);
        assert!((b.height() - 2.3).abs() < 1e-12);
    }

    #[test]
    fn segment_distance_cases() {
        let d = segment_distance(
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 0.0),
            Vec2::new(0.0, 3.0),
            Vec2::new(10.0, 3.0),
        );
        assert!((d - 3.0).abs() < 1e-12);
        let crossing = segment_distance(
            Vec2::new(0.0, 0.0),
            Vec2::new(10.0, 10.0),
            Vec2::new(0.0, 10.0),
            Vec2::new(10.0, 0.0),
        );
        assert_eq!(crossing, 0.0);
    }

    proptest! {
        #[test]
        fn normalized_yaw_in_range_and_congruent(yaw in -1.0e3f64..1.0e3) {
            let r = normalize_yaw(yaw).unwrap();
            prop_assert!(r > -PI && r <= PI);
            let k = (yaw - r) / (2.0 * PI);
            prop_assert!((k - k.round()).abs() < 1e-9);
        }
    }
}
