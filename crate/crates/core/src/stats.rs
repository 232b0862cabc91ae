//! Small statistics helpers: ordinary least squares on (x, y) pairs.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Standard error of the slope; 1.96 times this is the 95% half-width.
    pub slope_se: f64,
    pub r2: f64,
    pub n: usize,
}

impl LineFit {
    pub fn slope_ci(&self) -> (f64, f64) {
        let hw = 1.96 * self.slope_se;
        (self.slope - hw, self.slope + hw)
    }
}

/// Least-squares line through the given points. Needs at least three points
/// for a finite slope error.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "line fit needs >= 2 matched points, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("line fit with constant abscissa".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    let r2 = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    let slope_se = if xs.len() > 2 {
        (ss_res / (n - 2.0) / sxx).sqrt()
    } else {
        f64::INFINITY
    };
    Ok(LineFit { slope, intercept, slope_se, r2, n: xs.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_line() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 2.0).collect();
        let f = fit_line(&xs, &ys).unwrap();
        assert_abs_diff_eq!(f.slope, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.intercept, -2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.r2, 1.0, epsilon = 1e-12);
        assert!(f.slope_se < 1e-12);
    }

    #[test]
    fn noisy_line_has_positive_se() {
        let xs = [0.0, 1.0, 2.0, 3.0, 4.0];
        let ys = [0.1, 0.9, 2.2, 2.8, 4.1];
        let f = fit_line(&xs, &ys).unwrap();
        assert!((f.slope - 1.0).abs() < 0.1);
        assert!(f.slope_se > 0.0 && f.slope_se < 0.2);
        assert!(f.r2 > 0.98);
    }

    #[test]
    fn degenerate_inputs_rejected() {
        assert!(fit_line(&[1.0], &[2.0]).is_err());
        assert!(fit_line(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }
}
