//! Quasiclassical solutions of the lowest channel in the forbidden region
//!
//! ```text
//! phi_pm(R) = C_pm / sqrt(lambda_0) exp(+- I(R)),   I(R) = int_0^R lambda_0(R') / R' dR'
//! ```
//!
//! and the constant `Xi = exp(lim [I(R) - 3 ln(cR)])` that carries the
//! tailoring between the inner (`I0`, `K0`) and outer (`J3`, `Y3`) regimes.

use std::f64::consts::{PI, SQRT_2};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::channels::{lambda_root, BETA_OVER_C};
use crate::couplings::dlambda_dr;
use crate::error::{Error, Result};
use crate::par::{map_ordered, Execution};
use crate::quad::{self, QuadOptions};
use crate::specfun;

/// `C+ = 1 / (2 sqrt(pi))`, from matching `I0(z) ~ e^z / sqrt(2 pi z)`.
pub const C_PLUS: f64 = 0.282_094_791_773_878_14;
/// `C- = sqrt(pi) / 2`, from matching `K0(z) ~ sqrt(pi / (2z)) e^{-z}`.
pub const C_MINUS: f64 = 0.886_226_925_452_758;

/// Coupling values at which the exponent limit is sampled.
pub const XI_SAMPLES: [f64; 3] = [1e3, 1e4, 1e5];

const TAIL: f64 = 18.0 * SQRT_2 / PI;

fn opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-13,
        max_intervals: 4000,
    }
}

/// `int_0^{min(rho,1)} lambda_0(x) / x dx` with `x = u^2`, which turns the
/// `x^{-1/2}` endpoint behaviour into the finite integrand `2 lambda_0(u^2) / u`.
fn inner_part(rho: f64) -> Result<f64> {
    let top = rho.min(1.0).sqrt();
    let limit = 2.0 * BETA_OVER_C.sqrt();
    let f = |u: f64| {
        if u == 0.0 {
            limit
        } else {
            2.0 * lambda_root(0, u * u).unwrap_or(f64::NAN) / u
        }
    };
    Ok(quad::integrate(f, 0.0, top, opts())?.value)
}

/// `int_1^rho (lambda_0(x) - 3) / x dx = int_0^{ln rho} (lambda_0(e^v) - 3) dv`.
fn outer_part_minus_log(rho: f64) -> Result<f64> {
    if rho <= 1.0 {
        return Ok(0.0);
    }
    let top = rho.ln();
    let mut breaks: Vec<f64> = (0..top.ceil() as usize).map(|i| i as f64).collect();
    breaks.push(top);
    let f = |v: f64| lambda_root(0, v.exp()).unwrap_or(f64::NAN) - 3.0;
    Ok(quad::integrate_with_breaks(f, &breaks, opts())?.value)
}

fn exponent_minus_log(rho: f64) -> Result<f64> {
    // I - 3 ln(rho) for rho >= 1
    Ok(inner_part(rho)? + outer_part_minus_log(rho)?)
}

/// `I(R) = int_0^R lambda_0(cR') / R' dR'`. Depends on `c` and `R` only
/// through `cR`.
pub fn wkb_exponent(c: f64, r: f64) -> Result<f64> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::domain("wkb_exponent", format!("c = {c} must be finite and >= 0")));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::domain("wkb_exponent", format!("R = {r} must be finite and > 0")));
    }
    let rho = c * r;
    if rho == 0.0 {
        return Ok(0.0);
    }
    if rho <= 1.0 {
        inner_part(rho)
    } else {
        Ok(exponent_minus_log(rho)? + 3.0 * rho.ln())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XiRow {
    pub cr: f64,
    /// `I - 3 ln(cR)`.
    pub exponent_minus_log: f64,
    /// The same with the leading `-18 sqrt(2) / (pi cR)` tail removed.
    pub corrected: f64,
    pub xi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiEstimate {
    pub xi: f64,
    /// `384 (Xi / pi)^2`.
    pub omega: f64,
    pub table: Vec<XiRow>,
    /// Difference of the two Richardson estimates in the log.
    pub extrapolation_spread: f64,
}

/// `Xi` at unit coupling.
pub fn xi_constant() -> Result<XiEstimate> {
    xi_constant_with_coupling(1.0)
}

/// `Xi` evaluated through `wkb_exponent(c, R)` with `R = cR / c`.
pub fn xi_constant_with_coupling(c: f64) -> Result<XiEstimate> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::invalid(format!("coupling c = {c} must be finite and > 0")));
    }
    let table = XI_SAMPLES
        .iter()
        .map(|&cr| {
            let r = cr / c;
            let d = wkb_exponent(c, r)? - 3.0 * (c * r).ln();
            let corrected = d - TAIL / (c * r);
            Ok(XiRow {
                cr,
                exponent_minus_log: d,
                corrected,
                xi: corrected.exp(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    // Remaining error is O(1/(cR)^2).
    let rich = |a: &XiRow, b: &XiRow| {
        let ratio = (b.cr / a.cr).powi(2);
        b.corrected + (b.corrected - a.corrected) / (ratio - 1.0)
    };
    let e1 = rich(&table[0], &table[1]);
    let e2 = rich(&table[1], &table[2]);
    let spread = (e2 - e1).abs();
    if !(spread < 1e-6) {
        return Err(Error::NonConvergence {
            what: "Xi extrapolation",
            iterations: XI_SAMPLES.len(),
            detail: format!("successive estimates {e1} and {e2} disagree"),
        });
    }
    let xi = e2.exp();
    Ok(XiEstimate {
        xi,
        omega: omega_from_xi(xi),
        table,
        extrapolation_spread: spread,
    })
}

pub fn omega_from_xi(xi: f64) -> f64 {
    384.0 * (xi / PI).powi(2)
}

static XI: OnceLock<Result<f64>> = OnceLock::new();

/// Cached [`xi_constant`] value.
pub fn xi() -> Result<f64> {
    XI.get_or_init(|| xi_constant().map(|e| e.xi)).clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    Growing,
    Decaying,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QcValue {
    pub value: f64,
    /// `|d(R / lambda_0) / dR|`; quasiclassics needs this well below 1.
    pub validity: f64,
}

impl QcValue {
    pub fn is_valid(&self) -> bool {
        self.validity < 1.0
    }
}

/// `|d(R/lambda_0)/dR| = |1/lambda_0 - R lambda_0' / lambda_0^2|`.
pub fn validity_indicator(c: f64, r: f64) -> Result<f64> {
    let l = lambda_root(0, c * r)?;
    if l == 0.0 {
        return Ok(f64::INFINITY);
    }
    let d = dlambda_dr(0, c, r)?;
    Ok((1.0 / l - r * d / (l * l)).abs())
}

/// `phi_+` or `phi_-` at `R`, with the validity indicator alongside.
pub fn qc_solution(branch: Branch, c: f64, r: f64) -> Result<QcValue> {
    if !(c > 0.0) {
        return Err(Error::domain("qc_solution", format!("c = {c} must be > 0")));
    }
    let i = wkb_exponent(c, r)?;
    let l = lambda_root(0, c * r)?;
    let value = match branch {
        Branch::Growing => C_PLUS / l.sqrt() * i.exp(),
        Branch::Decaying => C_MINUS / l.sqrt() * (-i).exp(),
    };
    Ok(QcValue {
        value,
        validity: validity_indicator(c, r)?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbProfile {
    pub c: f64,
    pub grid: Vec<f64>,
    pub exponent: Vec<f64>,
    pub phi_plus: Vec<f64>,
    pub phi_minus: Vec<f64>,
    pub validity: Vec<f64>,
    pub c_plus: f64,
    pub c_minus: f64,
}

pub fn wkb_profile(c: f64, grid: &[f64]) -> Result<WkbProfile> {
    if !(c > 0.0) {
        return Err(Error::invalid("WKB profile needs c > 0"));
    }
    if grid.iter().any(|&r| !(r > 0.0)) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("R grid must be positive and strictly increasing"));
    }
    let rows = map_ordered(Execution::default(), grid, |&r| -> Result<(f64, f64, f64, f64)> {
        let i = wkb_exponent(c, r)?;
        let l = lambda_root(0, c * r)?;
        Ok((i, C_PLUS / l.sqrt() * i.exp(), C_MINUS / l.sqrt() * (-i).exp(), validity_indicator(c, r)?))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    Ok(WkbProfile {
        c,
        grid: grid.to_vec(),
        exponent: rows.iter().map(|r| r.0).collect(),
        phi_plus: rows.iter().map(|r| r.1).collect(),
        phi_minus: rows.iter().map(|r| r.2).collect(),
        validity: rows.iter().map(|r| r.3).collect(),
        c_plus: C_PLUS,
        c_minus: C_MINUS,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tailoring {
    pub cr: f64,
    /// `Xi` obtained when `C+` is fixed by equating `phi_+` to the
    /// large-argument form of `I0(2 sqrt(beta R))` at this `cR` instead of
    /// at `R -> 0`.
    pub xi: f64,
    pub validity: f64,
}

/// Matching radius used for the analytic cross-checks.
pub const MATCH_CR: f64 = 1.0;

/// Tailoring at one matching radius; refused where quasiclassics fails.
pub fn tailor_at(cr: f64) -> Result<Tailoring> {
    let validity = validity_indicator(1.0, cr)?;
    if !(validity <= 1.0) {
        return Err(Error::invalid(format!(
            "quasiclassical validity indicator {validity:.3} exceeds 1 at cR = {cr}"
        )));
    }
    let z = 2.0 * (BETA_OVER_C * cr).sqrt();
    let i0_asym = (z.exp()) / (2.0 * PI * z).sqrt();
    let l = lambda_root(0, cr)?;
    let c_plus = l.sqrt() * i0_asym * (-wkb_exponent(1.0, cr)?).exp();
    Ok(Tailoring {
        cr,
        xi: xi()? * c_plus / C_PLUS,
        validity,
    })
}

/// Tailoring sensitivity across `cR in [0.5, 2]`.
pub fn tailoring_sensitivity() -> Result<Vec<Tailoring>> {
    [0.5, MATCH_CR, 2.0].iter().map(|&cr| tailor_at(cr)).collect()
}

/// Small-argument check used by tests and the CLI: `I0(z)` against its
/// quoted large-`z` form including the `1/(8z)` correction.
pub fn i0_asymptotic_ratio(z: f64) -> Result<f64> {
    let asym = z.exp() / (2.0 * PI * z).sqrt() * (1.0 + 1.0 / (8.0 * z));
    Ok(specfun::bessel_i0(z)? / asym)
}
