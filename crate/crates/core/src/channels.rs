//! Hyperspherical coordinates and the hyperangular eigenproblem.
//!
//! Three particles on a line with positions `x1, x2, x3` are described by the
//! centre of mass `X` and polar coordinates `(R, alpha)` on the plane of
//! relative motion:
//!
//! ```text
//! R sin(alpha) = (x1 - x2) / sqrt(2)
//! R cos(alpha) = sqrt(2/3) (x3 - (x1 + x2) / 2)
//! ```
//!
//! The contact interactions sit on the six rays `alpha = nu pi / 3`. Bosonic
//! channel `n` has eigenvalue `lambda_n(R)`, the root in `(3n, 3n + 3)` of
//!
//! ```text
//! lambda tan(pi lambda / 6 - pi n / 2) = c R / sqrt(2)
//! ```
//!
//! and `lambda_n^2 / R^2` is the adiabatic potential of that channel.

use std::f64::consts::{FRAC_PI_3, FRAC_PI_6, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{map_ordered, Execution};
use crate::quad::{self, QuadOptions};

/// Upper end of the guaranteed-convergence range of [`solve_lambda`].
pub const MAX_CR: f64 = 1e8;

/// `beta / c = 3 sqrt(2) / pi`: the small-`R` adiabatic potential of channel
/// zero is `beta / R`.
pub const BETA_OVER_C: f64 = 3.0 * SQRT_2 / PI;

const BISECT_WIDTH: f64 = 1e-8;
const NEWTON_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperCoords {
    /// Centre of mass.
    pub x: f64,
    /// Hyperradius, `>= 0`.
    pub r: f64,
    /// Hyperangle in `(-pi, pi]`; `0` when `r == 0`.
    pub alpha: f64,
}

pub fn to_hyperspherical(x1: f64, x2: f64, x3: f64) -> HyperCoords {
    let xi1 = (x1 - x2) / SQRT_2;
    let xi2 = (2.0f64 / 3.0).sqrt() * (x3 - 0.5 * (x1 + x2));
    let r = xi1.hypot(xi2);
    let alpha = if r == 0.0 { 0.0 } else { reduce_angle(xi1.atan2(xi2)) };
    HyperCoords {
        x: (x1 + x2 + x3) / 3.0,
        r,
        alpha,
    }
}

pub fn from_hyperspherical(h: &HyperCoords) -> [f64; 3] {
    let xi1 = h.r * h.alpha.sin();
    let xi2 = h.r * h.alpha.cos();
    let s6 = 6f64.sqrt();
    [
        h.x - xi2 / s6 + xi1 / SQRT_2,
        h.x - xi2 / s6 - xi1 / SQRT_2,
        h.x + 2.0 * xi2 / s6,
    ]
}

/// Relative wavenumber `k` with `k^2 = [(k1-k2)^2 + (k2-k3)^2 + (k3-k1)^2] / 3`.
pub fn relative_momentum(k1: f64, k2: f64, k3: f64) -> f64 {
    let a = k1 - k2;
    let b = k2 - k3;
    let c = k3 - k1;
    ((a * a + b * b + c * c) / 3.0).sqrt()
}

/// Map an angle onto `(-pi, pi]`.
pub fn reduce_angle(alpha: f64) -> f64 {
    let mut a = alpha % (2.0 * PI);
    if a <= -PI {
        a += 2.0 * PI;
    } else if a > PI {
        a -= 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelEigenvalue {
    pub n: usize,
    /// Dimensionless product `c R`.
    pub cr: f64,
    pub lambda: f64,
    /// `lambda - 3n` and `3(n + 1) - lambda`. Whichever is smaller is kept to
    /// full relative precision, which `lambda` itself cannot carry near the
    /// ends of its bracket; the residual is evaluated from it.
    pub offset: f64,
    pub gap: f64,
}

impl ChannelEigenvalue {
    /// Relative residual `|lambda tan(theta) - s| / (lambda tan(theta) + s)`,
    /// evaluated in the pole-free form `lambda sin(theta) - s cos(theta)`.
    pub fn residual(&self) -> f64 {
        relative_residual(self.cr / SQRT_2, self.lambda, self.offset, self.gap)
    }
}

#[inline]
fn theta(n: usize, lambda: f64) -> f64 {
    // pi lambda / 6 - pi n / 2, written so that the bracket maps onto (0, pi/2).
    FRAC_PI_6 * (lambda - 3.0 * n as f64)
}

#[inline]
fn smooth_residual(n: usize, s: f64, lambda: f64) -> (f64, f64) {
    let (sin, cos) = theta(n, lambda).sin_cos();
    let g = lambda * sin - s * cos;
    let dg = sin + FRAC_PI_6 * (lambda * cos + s * sin);
    (g, dg)
}

fn relative_residual(s: f64, lambda: f64, offset: f64, gap: f64) -> f64 {
    let (sin, cos) = if offset <= gap {
        (FRAC_PI_6 * offset).sin_cos()
    } else {
        // theta = pi/2 - pi gap / 6
        let (s, c) = (FRAC_PI_6 * gap).sin_cos();
        (c, s)
    };
    let scale = (lambda * sin).abs() + (s * cos).abs();
    if scale == 0.0 {
        0.0
    } else {
        (lambda * sin - s * cos).abs() / scale
    }
}

/// Solve for `lambda_n` at the dimensionless coupling `c R >= 0`.
///
/// Bisection on the bracket `(3n, 3n + 3)` down to width `1e-8`, then Newton
/// steps kept inside the bracket until the update drops below `1e-14`.
pub fn solve_lambda(n: usize, cr: f64) -> Result<ChannelEigenvalue> {
    if cr.is_nan() || cr < 0.0 {
        return Err(Error::domain("solve_lambda", format!("cR = {cr:e} must be >= 0")));
    }
    if cr.is_infinite() {
        return Err(Error::domain("solve_lambda", "cR must be finite"));
    }
    let (lambda, offset, gap) = root_with_ends(n, cr)?;
    Ok(ChannelEigenvalue {
        n,
        cr,
        lambda,
        offset,
        gap,
    })
}

pub(crate) fn lambda_root(n: usize, cr: f64) -> Result<f64> {
    let base = 3.0 * n as f64;
    if cr == 0.0 {
        return Ok(base);
    }
    let s = cr / SQRT_2;
    let mut lo = base;
    let mut hi = base + 3.0;
    while hi - lo > BISECT_WIDTH {
        let mid = 0.5 * (lo + hi);
        let (g, _) = smooth_residual(n, s, mid);
        if g > 0.0 {
            hi = mid;
        } else if g < 0.0 {
            lo = mid;
        } else {
            return Ok(mid);
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..50 {
        let (g, dg) = smooth_residual(n, s, x);
        if g == 0.0 {
            return Ok(x);
        }
        if g > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let mut next = x - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= NEWTON_TOL * x.abs().max(1e-300) || hi - lo <= NEWTON_TOL * x.abs() {
            return Ok(x);
        }
    }
    if cr > MAX_CR || relative_residual(s, x, x - base, base + 3.0 - x) > 1e-6 {
        return Err(Error::NonConvergence {
            what: "solve_lambda",
            iterations: 50,
            detail: format!("n = {n}, cR = {cr:e}, bracket [{lo}, {hi}]"),
        });
    }
    Ok(x)
}

/// Root together with its distances to both ends of the bracket. The nearer
/// distance `d` is polished directly: with `theta = pi d / 6` at the bottom,
/// `(3n + d) sin(theta) = s cos(theta)`; with `theta = pi/2 - pi d / 6` at the
/// top, `(3n + 3 - d) cos(pi d / 6) = s sin(pi d / 6)`.
fn root_with_ends(n: usize, cr: f64) -> Result<(f64, f64, f64)> {
    let base = 3.0 * n as f64;
    let lambda = lambda_root(n, cr)?;
    if cr == 0.0 {
        return Ok((lambda, 0.0, 3.0));
    }
    let s = cr / SQRT_2;
    let a = FRAC_PI_6;
    let bottom = lambda - base <= 1.5;
    let mut d = if bottom { lambda - base } else { base + 3.0 - lambda };
    for _ in 0..8 {
        let (sin, cos) = (a * d).sin_cos();
        let (h, dh) = if bottom {
            let l = base + d;
            (l * sin - s * cos, sin + a * (l * cos + s * sin))
        } else {
            let l = base + 3.0 - d;
            (l * cos - s * sin, -cos - a * (l * sin + s * cos))
        };
        if dh == 0.0 {
            break;
        }
        let step = h / dh;
        if !(d - step > 0.0 && d - step < 3.0) {
            break;
        }
        d -= step;
        if step.abs() <= 1e-16 * d {
            break;
        }
    }
    Ok(if bottom {
        (base + d, d, 3.0 - d)
    } else {
        (base + 3.0 - d, 3.0 - d, d)
    })
}

/// `lambda_0(cR)` leading small-coupling form `sqrt(3 sqrt(2) cR / pi)`.
pub fn lambda0_small(cr: f64) -> f64 {
    (BETA_OVER_C * cr).sqrt()
}

/// `lambda_0(cR)` leading strong-coupling form `3 - 18 sqrt(2) / (pi cR)`.
pub fn lambda0_large(cr: f64) -> f64 {
    3.0 - 18.0 * SQRT_2 / (PI * cr)
}

/// Eigenvalue sampled on a grid of hyperradii.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticChannel {
    pub n: usize,
    pub c: f64,
    pub grid: Vec<f64>,
    pub lambdas: Vec<f64>,
}

impl AdiabaticChannel {
    pub fn build(n: usize, c: f64, grid: &[f64], exec: Execution) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("coupling c = {c} must be finite and >= 0")));
        }
        if grid.iter().any(|&r| !(r > 0.0)) {
            return Err(Error::invalid("channel grid must be positive"));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("channel grid must be strictly increasing"));
        }
        let lambdas = map_ordered(exec, grid, |&r| lambda_root(n, c * r))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(AdiabaticChannel {
            n,
            c,
            grid: grid.to_vec(),
            lambdas,
        })
    }

    /// `lambda_n^2 / R^2` at every grid point.
    pub fn potential(&self) -> Vec<f64> {
        self.grid
            .iter()
            .zip(&self.lambdas)
            .map(|(r, l)| l * l / (r * r))
            .collect()
    }
}

/// One sector of the hyperangular eigenfunction:
/// `cos(lambda (pi/6 - |alpha|) - pi n / 2)` for `|alpha| <= pi/3`, else 0.
pub fn chi_tilde(n: usize, lambda: f64, alpha: f64) -> f64 {
    let a = reduce_angle(alpha).abs();
    if a <= FRAC_PI_3 {
        (lambda * (FRAC_PI_6 - a) - 0.5 * PI * n as f64).cos()
    } else {
        0.0
    }
}

/// One-sided derivative `d chi_tilde / d alpha`; at `alpha = 0` the sign of
/// `alpha` (including signed zero) selects the side.
pub fn chi_tilde_dalpha(n: usize, lambda: f64, alpha: f64) -> f64 {
    let a = reduce_angle(alpha);
    if a.abs() > FRAC_PI_3 {
        return 0.0;
    }
    let phase = lambda * (FRAC_PI_6 - a.abs()) - 0.5 * PI * n as f64;
    lambda * phase.sin() * if a.is_sign_negative() { -1.0 } else { 1.0 }
}

/// Full bosonic eigenfunction: the sum of `chi_tilde` over the three sector
/// rotations by `0, +-2 pi / 3`.
///
/// The sectors tile the circle, so the sum is evaluated by folding `alpha`
/// into `[-pi/3, pi/3]`; on the sector boundaries this takes the continuous
/// value instead of counting both adjacent sectors.
pub fn chi_full(n: usize, lambda: f64, alpha: f64) -> f64 {
    let period = 2.0 * FRAC_PI_3;
    let folded = alpha - period * (alpha / period).round();
    chi_tilde(n, lambda, folded.clamp(-FRAC_PI_3, FRAC_PI_3))
}

/// `B_n = int_0^{pi/3} chi_tilde_n^2 d alpha = pi/6 + (-1)^n sin(pi lambda / 3) / (2 lambda)`.
pub fn normalization_b(n: usize, lambda: f64) -> f64 {
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let x = FRAC_PI_3 * lambda;
    // sin(x) / (2 lambda) = (pi / 6) sinc(x)
    let sinc = if x.abs() < 1e-4 {
        1.0 - x * x / 6.0 * (1.0 - x * x / 20.0)
    } else {
        x.sin() / x
    };
    FRAC_PI_6 * (1.0 + sign * sinc)
}

/// `B_n` by adaptive quadrature of the defining integral.
pub fn normalization_b_quadrature(n: usize, lambda: f64) -> Result<f64> {
    let r = quad::integrate(
        |a| {
            let v = chi_tilde(n, lambda, a);
            v * v
        },
        0.0,
        FRAC_PI_3,
        QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            ..QuadOptions::default()
        },
    )?;
    Ok(r.value)
}
