//! Ordinary least squares for straight lines and for two-function bases.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    /// Half-width of the 95% confidence interval on the slope.
    pub slope_ci95: f64,
    pub rms_residual: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::invalid("linear_fit: x and y differ in length"));
    }
    if n < 2 {
        return Err(Error::invalid("linear_fit: need at least two points"));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("linear_fit: abscissae are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    let (slope_stderr, slope_ci95) = if n > 2 {
        let se = (ss_res / (nf - 2.0) / sxx).sqrt();
        let t = StudentsT::new(0.0, 1.0, nf - 2.0)
            .map(|d| d.inverse_cdf(0.975))
            .unwrap_or(1.96);
        (se, t * se)
    } else {
        (0.0, 0.0)
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        slope_ci95,
        rms_residual: (ss_res / nf).sqrt(),
        points: n,
    })
}

/// Fit `ln|y| = intercept + slope ln x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("loglog_fit: abscissae must be positive"));
    }
    if y.iter().any(|v| *v == 0.0 || !v.is_finite()) {
        return Err(Error::invalid("loglog_fit: ordinates must be finite and nonzero"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.abs().ln()).collect();
    linear_fit(&lx, &ly)
}

/// Least-squares coefficients `(a, b)` of `y ~ a u + b v`.
///
/// The columns are scaled to unit norm before the 2x2 solve so that bases of
/// very different magnitude (for instance `J_3` and `Y_3` near the origin)
/// do not lose precision.
pub fn two_function_fit(u: &[f64], v: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let n = y.len();
    if u.len() != n || v.len() != n || n < 2 {
        return Err(Error::invalid("two_function_fit: inconsistent or too few samples"));
    }
    let nu = u.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::Breakdown("two_function_fit: a basis column vanishes".into()));
    }
    let mut suu = 0.0;
    let mut suv = 0.0;
    let mut svv = 0.0;
    let mut suy = 0.0;
    let mut svy = 0.0;
    for i in 0..n {
        let a = u[i] / nu;
        let b = v[i] / nv;
        suu += a * a;
        suv += a * b;
        svv += b * b;
        suy += a * y[i];
        svy += b * y[i];
    }
    let det = suu * svv - suv * suv;
    if det.abs() < 1e-14 {
        return Err(Error::Breakdown("two_function_fit: basis is numerically dependent".into()));
    }
    let a = (suy * svv - svy * suv) / det;
    let b = (svy * suu - suy * suv) / det;
    Ok((a / nu, b / nv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-14);
        assert!((f.intercept + 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-14);
    }

    #[test]
    fn power_law_exponent() {
        let x: Vec<f64> = (1..=10).map(|i| i as f64 * 1e-3).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v.powi(6)).collect();
        let f = loglog_fit(&x, &y).unwrap();
        assert!((f.slope - 6.0).abs() < 1e-12);
    }

    #[test]
    fn two_functions_recovered() {
        let t: Vec<f64> = (0..40).map(|i| 0.1 * i as f64).collect();
        let u: Vec<f64> = t.iter().map(|x| x.sin()).collect();
        let v: Vec<f64> = t.iter().map(|x| 1e-9 * x.cos()).collect();
        let y: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 3e5 * b).collect();
        let (a, b) = two_function_fit(&u, &v, &y).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        assert!((b + 3e5).abs() < 1e-6);
    }

    #[test]
    fn degenerate_inputs() {
        assert!(linear_fit(&[1.0], &[1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[1.0, 2.0]).is_err());
        assert!(loglog_fit(&[1.0, 2.0], &[0.0, 1.0]).is_err());
        assert!(two_function_fit(&[1.0, 2.0], &[2.0, 4.0], &[1.0, 1.0]).is_err());
    }
}
