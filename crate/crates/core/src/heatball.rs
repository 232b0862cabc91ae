//! Fundamental solution of the heat equation and its sublevel "heat balls".
//!
//! `E(r)` is the set of points `(x, t)` with `t < 0` where the backward
//! kernel `(-4 pi t)^(-n/2) exp(|x|^2 / (4t))` is at least `r`. Its volume
//! scales like `r^(-1 - 2/n)`, which the capacity code leans on, so the
//! unit volume is measured once per dimension and cached.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::sampling::qmc_volume;

/// Kernel values are capped here; the flag reports that the cap was hit.
pub const KERNEL_CAP: f64 = 1e300;

/// Forward fundamental solution `(4 pi dt)^(-n/2) exp(-|dx|^2/(4 dt))`,
/// zero for `dt <= 0`. Returns the (possibly capped) value and whether the
/// cap was applied.
pub fn heat_kernel(dx: &[f64], dt: f64, n: usize) -> (f64, bool) {
    debug_assert!(dx.len() >= n);
    if dt <= 0.0 {
        return (0.0, false);
    }
    let r2: f64 = dx[..n].iter().map(|d| d * d).sum();
    let log_val = -(n as f64) / 2.0 * (4.0 * std::f64::consts::PI * dt).ln() - r2 / (4.0 * dt);
    if log_val >= KERNEL_CAP.ln() {
        (KERNEL_CAP, true)
    } else {
        (log_val.exp(), false)
    }
}

/// Membership test for `E(r)` centered at the origin, done in log form so
/// large `r` and tiny `|t|` cannot overflow.
pub fn heat_ball_contains(x: &[f64], t: f64, r: f64, n: usize) -> bool {
    if t >= 0.0 || r <= 0.0 {
        return false;
    }
    let r2: f64 = x[..n].iter().map(|d| d * d).sum();
    let s = -t;
    -(n as f64) / 2.0 * (4.0 * std::f64::consts::PI * s).ln() - r2 / (4.0 * s) >= r.ln()
}

#[derive(Debug, Clone, Copy)]
pub struct HeatBallBBox {
    /// Largest |x_i| attained on the ball.
    pub x_max: f64,
    /// Times run over (t_min, 0).
    pub t_min: f64,
}

/// Tight axis-aligned bounding box of `E(r)`.
pub fn heat_ball_bbox(n: usize, r: f64) -> HeatBallBBox {
    let nf = n as f64;
    let x_max = (nf / (2.0 * std::f64::consts::PI * std::f64::consts::E)).sqrt()
        * r.powf(-1.0 / nf);
    let t_min = -r.powf(-2.0 / nf) / (4.0 * std::f64::consts::PI);
    HeatBallBBox { x_max, t_min }
}

fn unit_volume_measured(n: usize) -> f64 {
    let bb = heat_ball_bbox(n, 1.0);
    let box_vol = (2.0 * bb.x_max).powi(n as i32) * (-bb.t_min);
    let dim = n + 1;
    let (v, _ci) = qmc_volume(dim, 600_000, 0xE01 + n as u64, box_vol, |u| {
        let mut x = [0.0; 3];
        for (i, xi) in x.iter_mut().enumerate().take(n) {
            *xi = (2.0 * u[i] - 1.0) * bb.x_max;
        }
        let t = bb.t_min * u[n];
        heat_ball_contains(&x[..n], t, 1.0, n)
    });
    v
}

/// Volume of `E(1)`, measured once per dimension and cached.
pub fn heat_ball_unit_volume(n: usize) -> Result<f64> {
    static CACHE: [OnceLock<f64>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    if !(1..=3).contains(&n) {
        return Err(Error::BadParams(format!("heat ball volume needs 1 <= n <= 3, got {n}")));
    }
    Ok(*CACHE[n - 1].get_or_init(|| unit_volume_measured(n)))
}

/// Volume of `E(r)`: the unit volume times `r^(-1 - 2/n)`.
pub fn heat_ball_volume(n: usize, r: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::BadParams(format!("heat ball level must be positive, got {r}")));
    }
    Ok(heat_ball_unit_volume(n)? * r.powf(-1.0 - 2.0 / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::unit_ball_volume;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    // Slice quadrature oracle: at s = -t the section is a ball of radius
    // sqrt(2 n s ln(1/(4 pi s))), integrated over s in (0, 1/(4 pi)).
    fn unit_volume_quadrature(n: usize) -> f64 {
        let m = 400_000;
        let smax = 1.0 / (4.0 * PI);
        let ball = unit_ball_volume(n);
        let mut acc = 0.0;
        for i in 0..m {
            let s = (i as f64 + 0.5) * smax / m as f64;
            let r2 = 2.0 * n as f64 * s * (1.0 / (4.0 * PI * s)).ln();
            acc += ball * r2.powf(n as f64 / 2.0);
        }
        acc * smax / m as f64
    }

    // Frozen unit volumes; n = 1 and n = 2 also have closed forms
    // 1/(6 sqrt(3) pi) and 1/(16 pi).
    const UNIT_VOL: [f64; 3] = [0.030629383078988447, 0.019894367886486918, 0.014793706657475994];

    #[test]
    fn quadrature_matches_frozen_volumes() {
        for n in 1..=3 {
            assert_relative_eq!(unit_volume_quadrature(n), UNIT_VOL[n - 1], max_relative = 1e-5);
        }
        assert_relative_eq!(UNIT_VOL[0], 1.0 / (6.0 * 3.0f64.sqrt() * PI), epsilon = 1e-15);
        assert_relative_eq!(UNIT_VOL[1], 1.0 / (16.0 * PI), epsilon = 1e-15);
    }

    #[test]
    fn sampled_volume_matches_quadrature() {
        for n in 1..=3 {
            let v = heat_ball_unit_volume(n).unwrap();
            assert_relative_eq!(v, UNIT_VOL[n - 1], max_relative = 5e-3);
        }
    }

    #[test]
    fn volume_scaling_in_level() {
        // doubling the level shrinks the volume by 2^(-1 - 2/n)
        for n in 1..=3 {
            let v1 = heat_ball_volume(n, 1.0).unwrap();
            let v2 = heat_ball_volume(n, 2.0).unwrap();
            let expect = 2.0f64.powf(-1.0 - 2.0 / n as f64);
            assert_relative_eq!(v2 / v1, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_value_and_cap() {
        let (v, capped) = heat_kernel(&[1.0], 0.25, 1);
        assert_relative_eq!(v, (1.0 / PI.sqrt()) * (-1.0f64).exp(), epsilon = 1e-12);
        assert!(!capped);
        let (v0, _) = heat_kernel(&[1.0], 0.0, 1);
        assert_eq!(v0, 0.0);
        let (v0, _) = heat_kernel(&[0.0], -1.0, 1);
        assert_eq!(v0, 0.0);
        let (vc, capped) = heat_kernel(&[0.0, 0.0], 1e-302, 2);
        assert_eq!(vc, KERNEL_CAP);
        assert!(capped);
    }

    #[test]
    fn kernel_parabolic_homogeneity() {
        // F(s x, s^2 t) = s^(-n) F(x, t)
        for n in 1..=3usize {
            let x = [0.3, -0.2, 0.5];
            let t = 0.07;
            let s = 2.5;
            let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
            let (f1, _) = heat_kernel(&x, t, n);
            let (f2, _) = heat_kernel(&xs, s * s * t, n);
            assert_relative_eq!(f2, s.powi(-(n as i32)) * f1, epsilon = 1e-12);
        }
    }

    #[test]
    fn membership_against_bbox_extremes() {
        let bb = heat_ball_bbox(1, 1.0);
        // on the time axis the ball reaches exactly t_min
        assert!(heat_ball_contains(&[0.0], 0.999 * bb.t_min, 1.0, 1));
        assert!(!heat_ball_contains(&[0.0], 1.001 * bb.t_min, 1.0, 1));
        // the widest section sits at s = 1/(4 pi e)
        let s_star = 1.0 / (4.0 * PI * std::f64::consts::E);
        assert!(heat_ball_contains(&[0.999 * bb.x_max], -s_star, 1.0, 1));
        assert!(!heat_ball_contains(&[1.001 * bb.x_max], -s_star, 1.0, 1));
        assert!(!heat_ball_contains(&[0.0], 0.0, 1.0, 1));
    }

    #[test]
    fn bbox_scales_parabolically() {
        for n in 1..=3usize {
            let b1 = heat_ball_bbox(n, 1.0);
            let b2 = heat_ball_bbox(n, 2.0);
            let s = 2.0f64.powf(-1.0 / n as f64);
            assert_relative_eq!(b2.x_max, s * b1.x_max, epsilon = 1e-12);
            assert_relative_eq!(b2.t_min, s * s * b1.t_min, epsilon = 1e-12);
        }
    }
}
