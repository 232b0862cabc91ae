//! Space-time points and the parabolic metric.
//!
//! A point carries up to three spatial coordinates plus time; the active
//! dimension `n` always comes from the surrounding grid or domain. The
//! metric is `max(|x - y|, sqrt(|t - s|))`, so a backward cylinder of
//! radius `r` spans `r` in space and `r^2` in time.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: [f64; 3],
    pub t: f64,
}

impl Point {
    pub fn new(x: [f64; 3], t: f64) -> Self {
        Point { x, t }
    }

    pub fn d1(x: f64, t: f64) -> Self {
        Point { x: [x, 0.0, 0.0], t }
    }

    pub fn d2(x0: f64, x1: f64, t: f64) -> Self {
        Point { x: [x0, x1, 0.0], t }
    }

    /// Euclidean distance between the spatial parts, first `n` coordinates.
    pub fn space_dist(&self, other: &Point, n: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            let d = self.x[i] - other.x[i];
            s += d * d;
        }
        s.sqrt()
    }

    pub fn space_norm(&self, n: usize) -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            s += self.x[i] * self.x[i];
        }
        s.sqrt()
    }
}

/// `max(|x - y|, sqrt(|t - s|))`.
pub fn parabolic_distance(a: &Point, b: &Point, n: usize) -> f64 {
    a.space_dist(b, n).max((a.t - b.t).abs().sqrt())
}

/// Volume of the unit ball in `R^n` for n = 1..3.
pub fn unit_ball_volume(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Volume of the backward cylinder `B_r x (s - r^2, s)`: `|B_1| r^(n+2)`.
pub fn cylinder_volume(n: usize, r: f64) -> f64 {
    unit_ball_volume(n) * r.powi(n as i32 + 2)
}

/// Backward cylinder `B_r(y) x (s - r^2, s)` about its top-center `(y, s)`.
#[derive(Debug, Clone, Copy)]
pub struct Cylinder {
    pub center: Point,
    pub r: f64,
}

impl Cylinder {
    pub fn contains(&self, p: &Point, n: usize) -> bool {
        let dt = self.center.t - p.t;
        dt > 0.0 && dt < self.r * self.r && p.space_dist(&self.center, n) < self.r
    }

    pub fn volume(&self, n: usize) -> f64 {
        cylinder_volume(n, self.r)
    }
}

/// Two-sided ("hat") cylinder `B_r(y) x (s - r^2, s + r^2)`.
#[derive(Debug, Clone, Copy)]
pub struct HatCylinder {
    pub center: Point,
    pub r: f64,
}

impl HatCylinder {
    pub fn contains(&self, p: &Point, n: usize) -> bool {
        (p.t - self.center.t).abs() < self.r * self.r
            && p.space_dist(&self.center, n) < self.r
    }
}

/// The anisotropic dilation `(x, t) -> (x / rho, t / rho^2)`.
pub fn rescale_point(p: &Point, rho: f64) -> Point {
    Point {
        x: [p.x[0] / rho, p.x[1] / rho, p.x[2] / rho],
        t: p.t / (rho * rho),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_is_max_form() {
        let a = Point::d1(0.0, 0.0);
        let b = Point::d1(3.0, 4.0);
        // |dx| = 3, sqrt(|dt|) = 2
        assert_eq!(parabolic_distance(&a, &b, 1), 3.0);
        let c = Point::d1(0.5, 9.0);
        assert_eq!(parabolic_distance(&a, &c, 1), 3.0);
    }

    #[test]
    fn cylinder_is_backward_in_time() {
        let cyl = Cylinder { center: Point::d1(0.0, 1.0), r: 0.5 };
        assert!(cyl.contains(&Point::d1(0.1, 0.9), 1));
        // at or after the top face: outside
        assert!(!cyl.contains(&Point::d1(0.0, 1.0), 1));
        assert!(!cyl.contains(&Point::d1(0.0, 1.1), 1));
        // deeper than r^2: outside
        assert!(!cyl.contains(&Point::d1(0.0, 0.7), 1));
    }

    #[test]
    fn cylinder_volumes() {
        assert!((cylinder_volume(1, 1.0) - 2.0).abs() < 1e-15);
        assert!((cylinder_volume(2, 1.0) - std::f64::consts::PI).abs() < 1e-15);
        // scaling r -> 2r multiplies by 2^(n+2)
        assert!((cylinder_volume(1, 2.0) / cylinder_volume(1, 1.0) - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rescale_examples() {
        let p = Point::d1(2.0, 4.0);
        let q = rescale_point(&p, 2.0);
        assert_eq!(q.x[0], 1.0);
        assert_eq!(q.t, 1.0);
        let r = rescale_point(&p, 1.0);
        assert_eq!(r, p);
    }

    proptest! {
        #[test]
        fn distance_symmetric_and_zero_on_diagonal(
            ax in -10.0f64..10.0, at in -10.0f64..10.0,
            bx in -10.0f64..10.0, bt in -10.0f64..10.0,
        ) {
            let a = Point::d1(ax, at);
            let b = Point::d1(bx, bt);
            let dab = parabolic_distance(&a, &b, 1);
            let dba = parabolic_distance(&b, &a, 1);
            prop_assert!((dab - dba).abs() < 1e-15);
            prop_assert!(parabolic_distance(&a, &a, 1) == 0.0);
        }

        #[test]
        fn triangle_inequality(
            ax in -5.0f64..5.0, at in -5.0f64..5.0,
            bx in -5.0f64..5.0, bt in -5.0f64..5.0,
            cx in -5.0f64..5.0, ct in -5.0f64..5.0,
        ) {
            let a = Point::d1(ax, at);
            let b = Point::d1(bx, bt);
            let c = Point::d1(cx, ct);
            let lhs = parabolic_distance(&a, &c, 1);
            let rhs = parabolic_distance(&a, &b, 1) + parabolic_distance(&b, &c, 1);
            prop_assert!(lhs <= rhs + 1e-12);
        }

        #[test]
        fn rescale_round_trip(x in -5.0f64..5.0, t in -5.0f64..5.0, rho in 0.1f64..10.0) {
            let p = Point::d1(x, t);
            let q = rescale_point(&rescale_point(&p, rho), 1.0 / rho);
            prop_assert!((q.x[0] - p.x[0]).abs() < 1e-10);
            prop_assert!((q.t - p.t).abs() < 1e-10);
        }
    }
}
