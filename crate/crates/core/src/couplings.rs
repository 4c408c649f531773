//! Non-adiabatic coupling matrices and the size of the terms the adiabatic
//! approximation drops.
//!
//! With `phi = lambda (pi/6 - alpha) - pi n / 2` on the sector
//! `0 <= alpha <= pi/3` the hyperradial derivatives of the eigenfunction are
//! taken analytically through `lambda'(R)` and `lambda''(R)`:
//!
//! ```text
//! d chi / dR     = -sin(phi) (pi/6 - alpha) lambda'
//! d^2 chi / dR^2 = -cos(phi) (pi/6 - alpha)^2 lambda'^2 - sin(phi) (pi/6 - alpha) lambda''
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_6, SQRT_2};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::channels::{lambda_root, normalization_b};
use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LinearFit};
use crate::par::{map_ordered, Execution};
use crate::potential::ThreeBodyPotential;
use crate::quad::{self, QuadOptions};

/// Largest channel count accepted by [`coupling_matrices`].
pub const MAX_CHANNELS: usize = 8;

/// `lambda_n` and its first two derivatives with respect to `R`.
///
/// Differentiates `g(lambda, s) = lambda sin(theta) - s cos(theta) = 0`
/// implicitly, `s = c R / sqrt(2)`.
pub fn lambda_derivatives(n: usize, c: f64, r: f64) -> Result<(f64, f64, f64)> {
    check_cr("lambda_derivatives", c, r)?;
    let lambda = lambda_root(n, c * r)?;
    if c == 0.0 {
        return Ok((lambda, 0.0, 0.0));
    }
    let a = FRAC_PI_6;
    let s = c * r / SQRT_2;
    let (sin, cos) = (a * (lambda - 3.0 * n as f64)).sin_cos();
    let g_l = sin + a * (lambda * cos + s * sin);
    if g_l == 0.0 {
        return Err(Error::Breakdown(format!(
            "implicit derivative singular at n = {n}, cR = {:e}",
            c * r
        )));
    }
    let g_ll = 2.0 * a * cos - a * a * lambda * sin + a * a * s * cos;
    let g_ls = a * sin;
    let l_s = cos / g_l;
    let l_ss = -(g_ll * l_s * l_s + 2.0 * g_ls * l_s) / g_l;
    let kappa = c / SQRT_2;
    Ok((lambda, kappa * l_s, kappa * kappa * l_ss))
}

/// `d lambda_n / dR` by implicit differentiation of the eigenvalue equation.
pub fn dlambda_dr(n: usize, c: f64, r: f64) -> Result<f64> {
    lambda_derivatives(n, c, r).map(|d| d.1)
}

/// `d^2 lambda_n / dR^2`.
pub fn d2lambda_dr2(n: usize, c: f64, r: f64) -> Result<f64> {
    lambda_derivatives(n, c, r).map(|d| d.2)
}

fn check_cr(func: &'static str, c: f64, r: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::domain(func, format!("c = {c} must be finite and >= 0")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain(func, format!("R = {r} must be finite and > 0")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrices {
    pub c: f64,
    pub r: f64,
    pub dim: usize,
    /// `W_{nn'}`, inverse length.
    pub w: DMatrix<f64>,
    /// `Y_{nn'}`, inverse length squared.
    pub y: DMatrix<f64>,
    /// `U_{nn'}`, inverse length squared.
    pub u: DMatrix<f64>,
    /// Normalizations `B_n`.
    pub b: Vec<f64>,
    pub lambdas: Vec<f64>,
}

#[derive(Clone, Copy)]
struct ChannelAt {
    n: usize,
    lambda: f64,
    d1: f64,
    d2: f64,
}

impl ChannelAt {
    fn phase(&self, alpha: f64) -> f64 {
        self.lambda * (FRAC_PI_6 - alpha) - FRAC_PI_2 * self.n as f64
    }

    fn chi(&self, alpha: f64) -> f64 {
        self.phase(alpha).cos()
    }

    fn d_r(&self, alpha: f64) -> f64 {
        -self.phase(alpha).sin() * (FRAC_PI_6 - alpha) * self.d1
    }

    fn d_rr(&self, alpha: f64) -> f64 {
        let h = FRAC_PI_6 - alpha;
        let (sin, cos) = self.phase(alpha).sin_cos();
        -cos * h * h * self.d1 * self.d1 - sin * h * self.d2
    }
}

/// Integrate a smooth sector integrand over `[0, pi/3]`. The absolute
/// tolerance is tied to the size of `|f|` so that entries which are small
/// because of cancellation still converge.
fn sector_integral<F: Fn(f64) -> f64>(f: F) -> Result<f64> {
    let coarse = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-3,
        max_intervals: 64,
    };
    let mag = quad::integrate(|a| f(a).abs(), 0.0, FRAC_PI_3, coarse)
        .map(|r| r.value)
        .unwrap_or(0.0);
    if mag == 0.0 {
        return Ok(0.0);
    }
    let opts = QuadOptions {
        abs_tol: 1e-13 * mag,
        rel_tol: 1e-12,
        max_intervals: 2000,
    };
    Ok(quad::integrate(f, 0.0, FRAC_PI_3, opts)?.value)
}

/// `W`, `Y`, `U` for the first `dim` channels at hyperradius `R`.
pub fn coupling_matrices(
    c: f64,
    r: f64,
    dim: usize,
    potential: Option<&dyn ThreeBodyPotential>,
) -> Result<CouplingMatrices> {
    check_cr("coupling_matrices", c, r)?;
    if dim == 0 || dim > MAX_CHANNELS {
        return Err(Error::invalid(format!(
            "channel count {dim} must lie in 1..={MAX_CHANNELS}"
        )));
    }
    let chans = (0..dim)
        .map(|n| {
            let (lambda, d1, d2) = lambda_derivatives(n, c, r)?;
            Ok(ChannelAt { n, lambda, d1, d2 })
        })
        .collect::<Result<Vec<_>>>()?;
    let b: Vec<f64> = chans.iter().map(|ch| normalization_b(ch.n, ch.lambda)).collect();
    let active = potential.filter(|p| r < p.range());

    let mut w = DMatrix::zeros(dim, dim);
    let mut y = DMatrix::zeros(dim, dim);
    let mut u = DMatrix::zeros(dim, dim);
    for (i, ci) in chans.iter().enumerate() {
        for (j, cj) in chans.iter().enumerate() {
            if c > 0.0 {
                w[(i, j)] = 2.0 * sector_integral(|a| ci.chi(a) * cj.d_r(a))? / b[i];
                y[(i, j)] = sector_integral(|a| ci.chi(a) * (cj.d_rr(a) + cj.d_r(a) / r))? / b[i];
            }
            if let Some(p) = active {
                u[(i, j)] = sector_integral(|a| ci.chi(a) * p.value(r, a) * cj.chi(a))? / b[i];
            }
        }
    }
    Ok(CouplingMatrices {
        c,
        r,
        dim,
        w,
        y,
        u,
        b,
        lambdas: chans.iter().map(|ch| ch.lambda).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityRow {
    pub r: f64,
    pub cr: f64,
    pub lambda0: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// `|Y_00| R^2 / lambda_0^2`.
    pub y00_ratio: f64,
    /// `|W_00| R / lambda_0`.
    pub w00_ratio: f64,
}

/// Large-`R` decay exponents `p` in `|term| ~ R^{-p}`, fitted over
/// `cR in [1e2, 1e4]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayExponents {
    pub y00: f64,
    pub w00: f64,
    pub y01: f64,
    pub w01: f64,
    pub adiabatic_potential: f64,
}

impl DecayExponents {
    /// How much faster `Y_00` falls off than `lambda_0^2 / R^2`.
    pub fn y00_excess(&self) -> f64 {
        self.y00 - self.adiabatic_potential
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticityReport {
    pub c: f64,
    pub rows: Vec<AdiabaticityRow>,
    /// `None` when `c = 0`: nothing decays, everything vanishes.
    pub decay: Option<DecayExponents>,
}

impl AdiabaticityReport {
    pub fn max_y00_ratio(&self) -> f64 {
        self.rows.iter().map(|r| r.y00_ratio).fold(0.0, f64::max)
    }
}

fn row_at(c: f64, r: f64) -> Result<AdiabaticityRow> {
    let m = coupling_matrices(c, r, 3, None)?;
    let l0 = m.lambdas[0];
    let (y00_ratio, w00_ratio) = if c == 0.0 || l0 == 0.0 {
        (0.0, 0.0)
    } else {
        (m.y[(0, 0)].abs() * r * r / (l0 * l0), m.w[(0, 0)].abs() * r / l0)
    };
    Ok(AdiabaticityRow {
        r,
        cr: c * r,
        lambda0: l0,
        lambda1: m.lambdas[1],
        lambda2: m.lambdas[2],
        y00_ratio,
        w00_ratio,
    })
}

fn decay_exponents(c: f64, exec: Execution) -> Result<DecayExponents> {
    let crs: Vec<f64> = (0..=16).map(|i| 10f64.powf(2.0 + i as f64 / 8.0)).collect();
    let mats = map_ordered(exec, &crs, |&cr| coupling_matrices(c, cr / c, 2, None))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let rs: Vec<f64> = mats.iter().map(|m| m.r).collect();
    let exponent = |vals: Vec<f64>| -> Result<f64> {
        let f: LinearFit = loglog_fit(&rs, &vals)?;
        Ok(-f.slope)
    };
    Ok(DecayExponents {
        y00: exponent(mats.iter().map(|m| m.y[(0, 0)]).collect())?,
        w00: exponent(mats.iter().map(|m| m.w[(0, 0)]).collect())?,
        y01: exponent(mats.iter().map(|m| m.y[(0, 1)]).collect())?,
        w01: exponent(mats.iter().map(|m| m.w[(0, 1)]).collect())?,
        adiabatic_potential: exponent(
            mats.iter()
                .map(|m| m.lambdas[0] * m.lambdas[0] / (m.r * m.r))
                .collect(),
        )?,
    })
}

/// Per-`R` size of the dropped diagonal terms relative to the adiabatic
/// potential, plus their large-`R` decay exponents.
pub fn adiabaticity_report(c: f64, r_grid: &[f64]) -> Result<AdiabaticityReport> {
    adiabaticity_report_with(c, r_grid, Execution::default())
}

pub fn adiabaticity_report_with(c: f64, r_grid: &[f64], exec: Execution) -> Result<AdiabaticityReport> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("coupling c = {c} must be finite and >= 0")));
    }
    if r_grid.iter().any(|&r| !(r > 0.0)) || r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("R grid must be positive and strictly increasing"));
    }
    let rows = map_ordered(exec, r_grid, |&r| row_at(c, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let decay = if c > 0.0 { Some(decay_exponents(c, exec)?) } else { None };
    Ok(AdiabaticityReport { c, rows, decay })
}

/// Maximum of `|Y_00| R^2 / lambda_0^2` over `cR in [1e-6, 1]`.
pub fn max_y00_ratio(c: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Ok(0.0);
    }
    let grid: Vec<f64> = (0..=120).map(|i| 10f64.powf(-6.0 + i as f64 / 20.0) / c).collect();
    let rows = map_ordered(Execution::default(), &grid, |&r| row_at(c, r))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    Ok(rows.iter().map(|r| r.y00_ratio).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::BETA_OVER_C;
    use crate::potential::ModelPotential;
    use std::f64::consts::PI;

    #[test]
    fn derivative_matches_finite_difference() {
        for &(n, cr) in &[(0usize, 0.01), (0, 1.0), (0, 50.0), (1, 2.0), (2, 0.3)] {
            let c = 1.3;
            let r = cr / c;
            let h = 1e-5 * r;
            let fd = (lambda_root(n, c * (r + h)).unwrap() - lambda_root(n, c * (r - h)).unwrap()) / (2.0 * h);
            let an = dlambda_dr(n, c, r).unwrap();
            assert!(((an - fd) / an).abs() < 1e-8, "n={n} cR={cr}: {an} vs {fd}");
            let fd2 = (dlambda_dr(n, c, r + h).unwrap() - dlambda_dr(n, c, r - h).unwrap()) / (2.0 * h);
            let an2 = d2lambda_dr2(n, c, r).unwrap();
            assert!(((an2 - fd2) / an2).abs() < 1e-6, "n={n} cR={cr}: {an2} vs {fd2}");
        }
    }

    #[test]
    fn derivative_asymptotes() {
        assert_eq!(dlambda_dr(0, 0.0, 3.0).unwrap(), 0.0);
        let c = 1.0;
        let r = 1e-4;
        let small = 0.5 * (BETA_OVER_C * c / r).sqrt();
        assert!((dlambda_dr(0, c, r).unwrap() / small - 1.0).abs() < 0.01);
        let r = 1e4;
        let large = 18.0 * SQRT_2 / (PI * c * r * r);
        assert!((dlambda_dr(0, c, r).unwrap() / large - 1.0).abs() < 0.01);
    }

    #[test]
    fn w00_is_log_derivative_of_b() {
        let c = 1.0;
        for &r in &[0.1, 1.0, 5.0] {
            let m = coupling_matrices(c, r, 1, None).unwrap();
            let h = 1e-5 * r;
            let b = |x: f64| normalization_b(0, lambda_root(0, c * x).unwrap());
            let fd = (b(r + h) - b(r - h)) / (2.0 * h) / b(r);
            assert!((m.w[(0, 0)] - fd).abs() < 1e-8, "R={r}");
        }
    }

    #[test]
    fn zero_coupling_is_degenerate() {
        let p = ModelPotential::new(10.0, 0.1, 0.0).unwrap();
        let m = coupling_matrices(0.0, 0.05, 4, Some(&p)).unwrap();
        assert!(m.w.iter().all(|&v| v == 0.0));
        assert!(m.y.iter().all(|&v| v == 0.0));
        assert!((m.u[(0, 0)] + 100.0).abs() < 1e-10);
    }

    #[test]
    fn potential_matrix() {
        let p = ModelPotential::new(100.0, 0.01, 1.0).unwrap();
        let outside = coupling_matrices(1.0, 0.02, 3, Some(&p)).unwrap();
        assert!(outside.u.iter().all(|&v| v == 0.0));
        let inside = coupling_matrices(1.0, 0.005, 3, Some(&p)).unwrap();
        assert!((inside.u[(0, 0)] - p.averaged(0.005)).abs() < 1e-9 * p.averaged(0.005).abs());
        for i in 0..3 {
            for j in 0..3 {
                let lhs = inside.u[(i, j)] * inside.b[i];
                let rhs = inside.u[(j, i)] * inside.b[j];
                assert!((lhs - rhs).abs() < 1e-9 * inside.u[(0, 0)].abs());
            }
        }
    }

    #[test]
    fn y00_small_and_decays_faster() {
        let c = 1.0;
        let rep = adiabaticity_report(c, &[0.01, 0.1, 1.0]).unwrap();
        assert!(rep.max_y00_ratio() < 0.05);
        let d = rep.decay.unwrap();
        assert!((d.y00_excess() - 1.0).abs() < 0.1, "{d:?}");
        assert!(max_y00_ratio(c).unwrap() < 0.05);
        let zero = adiabaticity_report(0.0, &[0.5, 1.0]).unwrap();
        assert!(zero.rows.iter().all(|r| r.y00_ratio == 0.0 && r.w00_ratio == 0.0));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(coupling_matrices(1.0, 1.0, 9, None).is_err());
        assert!(coupling_matrices(1.0, 0.0, 2, None).is_err());
        assert!(dlambda_dr(0, -1.0, 1.0).is_err());
    }
}
