//! Partial amplitude `f0` of the lowest channel and its scaling with `k/c`.
//!
//! At large `R` a real solution behaves as `a J3(kR) + b Y3(kR)`, which is
//! `const [J3 - i f0 H3]` with `f0 = 1 / (a/b + i)`; hence `Im(1/f0) = 1`
//! for every amplitude produced here.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{loglog_fit, LinearFit};
use crate::par::{map_ordered, Execution};
use crate::radial::{
    fit_jy, integrate_nodes, log_nodes, scaled_range, ModelPotential, RadialOptions, RadialSolution, Scaled,
};
use crate::specfun;
use crate::wkb;

/// Fit windows as fractions of `R_max`; the first is the reference.
pub const FIT_WINDOWS: [(f64, f64); 2] = [(0.625, 1.0), (0.5, 0.8)];
/// Largest tolerated relative spread of `f0` across fit windows.
pub const MAX_INSTABILITY: f64 = 0.05;
/// Smallest admissible `k R_max` for extraction.
pub const MIN_K_RMAX_FIT: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtractionMethod {
    /// Least squares against `J_n`, `Y_n` on the outer grid.
    BesselFit,
    /// Wronskians at `r0` against the bare-channel solutions.
    DistortedWave,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub f0: Complex64,
    /// `a / b` of the `J3`, `Y3` coefficients (infinite without scattering).
    pub coeff_ratio: f64,
    pub fit_window: (f64, f64),
    /// Largest relative change of `f0` across the alternative windows.
    pub stability: f64,
    /// Set when no `Y` admixture is detectable; `f0` is then exactly 0.
    pub no_scattering: bool,
    pub method: ExtractionMethod,
}

impl Amplitude {
    /// `Im(1/f0) - 1`; zero up to rounding for every amplitude.
    pub fn unitarity_defect(&self) -> f64 {
        if self.no_scattering {
            0.0
        } else {
            (self.f0.inv().im - 1.0).abs()
        }
    }

    pub fn rate(&self) -> f64 {
        self.f0.norm_sqr()
    }
}

/// `1 / (ratio + i)`, evaluated so that `Im(1/f0) = 1` holds to rounding.
pub fn amplitude_from_ratio(ratio: f64) -> Complex64 {
    Complex64::new(ratio, 1.0).inv()
}

fn relative_spread(reference: Complex64, others: &[Complex64]) -> f64 {
    others
        .iter()
        .map(|f| (f - reference).norm() / reference.norm())
        .fold(0.0, f64::max)
}

/// Median of the coefficient ratios from 2x2 solves at node pairs a quarter
/// period apart inside the window.
fn pairwise_ratio(sol: &RadialSolution, order: usize, lo: f64, hi: f64) -> Option<f64> {
    let (lo, hi) = (lo * (1.0 - 1e-12), hi * (1.0 + 1e-12));
    let idx: Vec<usize> = (0..sol.len()).filter(|&i| sol.grid[i] >= lo && sol.grid[i] <= hi).collect();
    let quarter = 0.5 * PI / sol.k;
    let mut ratios = Vec::new();
    for &i in &idx {
        let target = sol.grid[i] + quarter;
        if target > hi {
            break;
        }
        let j = sol.index_at(target);
        let (xi, xj) = (sol.k * sol.grid[i], sol.k * sol.grid[j]);
        let (ji, yi) = (specfun::j_all(xi)[order], specfun::y_all(xi)[order]);
        let (jj, yj) = (specfun::j_all(xj)[order], specfun::y_all(xj)[order]);
        let det = ji * yj - jj * yi;
        if det.abs() < 1e-3 * (ji.abs() + yi.abs()) * (jj.abs() + yj.abs()) {
            continue;
        }
        let a = (sol.f[i] * yj - sol.f[j] * yi) / det;
        let b = (ji * sol.f[j] - jj * sol.f[i]) / det;
        if b != 0.0 {
            ratios.push(a / b);
        }
    }
    if ratios.is_empty() {
        return None;
    }
    ratios.sort_by(f64::total_cmp);
    Some(ratios[ratios.len() / 2])
}

/// Least-squares extraction from a sampled solution: `F ~ a J_n + b Y_n` with
/// `n = 3` for `c > 0` and `n = 0` for the free problem.
pub fn extract_amplitude(sol: &RadialSolution) -> Result<Amplitude> {
    if !(sol.k > 0.0) || sol.is_empty() {
        return Err(Error::invalid("extraction needs k > 0 and a non-empty solution"));
    }
    let r_max = *sol.grid.last().expect("non-empty grid");
    if sol.k * r_max < MIN_K_RMAX_FIT {
        return Err(Error::invalid(format!(
            "k R_max = {:.3} below {MIN_K_RMAX_FIT}",
            sol.k * r_max
        )));
    }
    let windows: Vec<(f64, f64)> = FIT_WINDOWS.iter().map(|(a, b)| (a * r_max, b * r_max)).collect();
    if let Some(p) = &sol.potential {
        if p.r0() >= windows.iter().map(|w| w.0).fold(f64::INFINITY, f64::min) {
            return Err(Error::invalid("potential support overlaps the fit window"));
        }
    }
    let order = if sol.c > 0.0 { 3 } else { 0 };
    let fits = windows
        .iter()
        .map(|&(lo, hi)| fit_jy(sol, order, lo, hi).map(|(a, b, _)| (a, b)))
        .collect::<Result<Vec<_>>>()?;
    let (a0, b0) = fits[0];
    let window = windows[0];
    if b0.abs() <= 1e-9 * a0.abs() {
        return Ok(Amplitude {
            f0: Complex64::new(0.0, 0.0),
            coeff_ratio: f64::INFINITY,
            fit_window: window,
            stability: 0.0,
            no_scattering: true,
            method: ExtractionMethod::BesselFit,
        });
    }
    let ratio = a0 / b0;
    let f0 = amplitude_from_ratio(ratio);
    let mut alternatives: Vec<Complex64> = fits[1..].iter().map(|(a, b)| amplitude_from_ratio(a / b)).collect();
    if let Some(r) = pairwise_ratio(sol, order, window.0, window.1) {
        alternatives.push(amplitude_from_ratio(r));
    }
    let stability = relative_spread(f0, &alternatives);
    if !(stability <= MAX_INSTABILITY) {
        return Err(Error::ExtractionUnstable(format!(
            "f0 changes by {:.2}% across fit windows",
            100.0 * stability
        )));
    }
    Ok(Amplitude {
        f0,
        coeff_ratio: ratio,
        fit_window: window,
        stability,
        no_scattering: false,
        method: ExtractionMethod::BesselFit,
    })
}

/// Diagnostics of [`numeric_amplitude`] beyond the amplitude itself.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistortedWaveDetails {
    /// Bare-channel regular solution at large `R`: `a J3 + b Y3`.
    pub background_j3: f64,
    pub background_y3: f64,
    /// Background phase `-atan(b/a)`.
    pub background_phase: f64,
    /// `W[S, Y] / ((2/pi) a) - 1`: consistency of the outer fit with the
    /// inward solution.
    pub wronskian_check: f64,
}

/// Amplitude of the full pipeline (inner well, bare channel outside).
///
/// The solution outside `r0` is written as `mu S + nu Y`, with `S` the regular
/// bare-channel solution and `Y` the inward solution that equals `Y3(kR)` at
/// `R_max`; `mu` and `nu` follow from Wronskians at `r0`. The amplitude is
/// measured against the distorted waves `S` and its partner, which removes the
/// slowly converging phase that the `1/R^3` tail of `lambda_0^2/R^2` adds to
/// the bare channel. That background is of order `k/c` and would swamp an
/// amplitude of order `(k/c)^6` in a direct Bessel fit.
pub fn numeric_amplitude(p: &ModelPotential, k: f64, opts: &RadialOptions) -> Result<Amplitude> {
    numeric_amplitude_detailed(p, k, opts).map(|(a, _)| a)
}

pub fn numeric_amplitude_detailed(
    p: &ModelPotential,
    k: f64,
    opts: &RadialOptions,
) -> Result<(Amplitude, DistortedWaveDetails)> {
    let c = p.c();
    if !(c > 0.0) || !(k > 0.0) || !k.is_finite() {
        return Err(Error::invalid(format!("numeric amplitude needs c > 0 and k > 0 (c = {c}, k = {k})")));
    }
    let sc = Scaled::new(c, k, Some(p));
    let bare = sc.without_potential();
    let (rho_min, rho_max) = scaled_range(&sc, k, opts)?;
    if sc.kappa * rho_max < MIN_K_RMAX_FIT {
        return Err(Error::invalid("k R_max below 25"));
    }
    let t0 = sc.rho0.ln();
    let ts = log_nodes(rho_min, rho_max, opts.nodes_per_efold, &[t0]);
    let i0 = ts.iter().position(|&t| t == t0).expect("r0 is a node");

    let s_traj = integrate_nodes(&bare, &ts, bare.regular_start(rho_min)?, opts.rtol)?;
    let s_at_r0 = s_traj.ys[i0];
    let s_sol = RadialSolution::from_trajectory(&bare, &ts, s_traj, k, c, None)?;

    let outer_rev: Vec<f64> = ts[i0..].iter().rev().copied().collect();
    let x_max = sc.kappa * rho_max;
    let (_, _, y3, y3p) = specfun::jy_with_derivs(3, x_max);
    let y_traj = integrate_nodes(&bare, &outer_rev, [y3, x_max * y3p], opts.rtol)?;
    let y_at_r0 = *y_traj.ys.last().expect("non-empty trajectory");

    let f_traj = integrate_nodes(&sc, &ts[..=i0], sc.regular_start(rho_min)?, opts.rtol)?;
    let f_at_r0 = *f_traj.ys.last().expect("non-empty trajectory");

    let w = |u: [f64; 2], v: [f64; 2]| u[0] * v[1] - u[1] * v[0];
    let w_sy = w(s_at_r0, y_at_r0);
    let w_sf = w(s_at_r0, f_at_r0);
    let w_fy = w(f_at_r0, y_at_r0);
    if w_sy == 0.0 {
        return Err(Error::Breakdown("bare solutions are linearly dependent".into()));
    }

    let r_max = rho_max / sc.s;
    let mut ratios = Vec::with_capacity(FIT_WINDOWS.len());
    let mut background = (0.0, 0.0);
    for (n, &(lo, hi)) in FIT_WINDOWS.iter().enumerate() {
        let (a, b, _) = fit_jy(&s_sol, 3, lo * r_max, hi * r_max)?;
        if n == 0 {
            background = (a, b);
        }
        let amp2 = a * a + b * b;
        // With S ~ A (cos d J3 - sin d Y3): ratio = (mu A^2 + nu b) / (nu a).
        let ratio = if w_sf == 0.0 {
            f64::INFINITY
        } else {
            (amp2 * w_fy / w_sf + b) / a
        };
        ratios.push(ratio);
    }
    let (a_s, b_s) = background;
    let details = DistortedWaveDetails {
        background_j3: a_s,
        background_y3: b_s,
        background_phase: -(b_s / a_s).atan(),
        wronskian_check: w_sy / (FRAC_2_PI * a_s) - 1.0,
    };
    let window = (FIT_WINDOWS[0].0 * r_max, FIT_WINDOWS[0].1 * r_max);
    if !ratios[0].is_finite() {
        return Ok((
            Amplitude {
                f0: Complex64::new(0.0, 0.0),
                coeff_ratio: f64::INFINITY,
                fit_window: window,
                stability: 0.0,
                no_scattering: true,
                method: ExtractionMethod::DistortedWave,
            },
            details,
        ));
    }
    let f0 = amplitude_from_ratio(ratios[0]);
    let alternatives: Vec<Complex64> = ratios[1..].iter().map(|&r| amplitude_from_ratio(r)).collect();
    let stability = relative_spread(f0, &alternatives);
    if !(stability <= MAX_INSTABILITY) {
        return Err(Error::ExtractionUnstable(format!(
            "f0 changes by {:.2}% across fit windows",
            100.0 * stability
        )));
    }
    Ok((
        Amplitude {
            f0,
            coeff_ratio: ratios[0],
            fit_window: window,
            stability,
            no_scattering: false,
            method: ExtractionMethod::DistortedWave,
        },
        details,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticAmplitudeParams {
    pub c: f64,
    pub k: f64,
    pub q: f64,
    pub r0: f64,
    /// `J3` admixture of `F-`; `|b| <= 1`.
    pub b: f64,
    /// Use this `Omega` instead of the one derived from the computed `Xi`.
    pub omega_pin: Option<f64>,
}

/// `Omega` quoted alongside the closed-form amplitude.
pub const OMEGA_QUOTED: f64 = 1.26;

impl AnalyticAmplitudeParams {
    pub fn new(p: &ModelPotential, k: f64) -> Self {
        AnalyticAmplitudeParams {
            c: p.c(),
            k,
            q: p.q(),
            r0: p.r0(),
            b: 0.0,
            omega_pin: None,
        }
    }

    pub fn beta(&self) -> f64 {
        crate::channels::BETA_OVER_C * self.c
    }

    pub fn omega(&self) -> Result<f64> {
        match self.omega_pin {
            Some(o) => Ok(o),
            None => Ok(wkb::omega_from_xi(wkb::xi()?)),
        }
    }

    /// `J0(q r0) / [q r0 J1(q r0)]`.
    pub fn j_ratio(&self) -> Result<f64> {
        ModelPotential::new(self.q, self.r0, self.c)?.j_ratio()
    }

    /// `ln(4 beta r0) + J`; the amplitude is resonant where it vanishes.
    pub fn bracket(&self) -> Result<f64> {
        Ok((4.0 * self.beta() * self.r0).ln() + self.j_ratio()?)
    }
}

/// `f0 = 1 / (-Omega (c/k)^6 [ln(4 beta r0) + J] + b + i)`.
pub fn analytic_amplitude(p: &AnalyticAmplitudeParams) -> Result<Complex64> {
    if !(p.c > 0.0) || !(p.k > 0.0) || p.k >= p.c / 10.0 {
        return Err(Error::invalid(format!("analytic amplitude needs 0 < k < c/10 (k = {}, c = {})", p.k, p.c)));
    }
    if !(p.b.abs() <= 1.0) {
        return Err(Error::invalid(format!("|b| = {} must not exceed 1", p.b.abs())));
    }
    let bracket = p.bracket()?;
    if bracket.abs() < 1e-3 {
        log::warn!("near resonance: ln(4 beta r0) + J = {bracket:e}");
    }
    let omega = p.omega()?;
    let ratio = -omega * (p.c / p.k).powi(6) * bracket + p.b;
    Ok(amplitude_from_ratio(ratio))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepMode {
    Numeric,
    Analytic,
    Both,
}

impl SweepMode {
    fn numeric(self) -> bool {
        matches!(self, SweepMode::Numeric | SweepMode::Both)
    }

    fn analytic(self) -> bool {
        matches!(self, SweepMode::Analytic | SweepMode::Both)
    }
}

/// Log-spaced wavenumbers `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KRange {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl KRange {
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.lo];
        }
        let (a, b) = (self.lo.ln(), self.hi.ln());
        let n = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == 0 {
                    self.lo
                } else if i == self.points - 1 {
                    self.hi
                } else {
                    (a + (b - a) * i as f64 / n).exp()
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    pub radial: RadialOptions,
    pub b: f64,
    pub omega_pin: Option<f64>,
    pub exec: Execution,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            radial: RadialOptions::default(),
            b: 0.0,
            omega_pin: None,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub k: f64,
    pub c: f64,
    pub k_over_c: f64,
    /// `c/k`: the interaction parameter when `k` stands for the density.
    pub gamma: f64,
    pub f0_numeric: Option<Complex64>,
    /// Absent in `Both` mode where `k >= c/10`.
    pub f0_analytic: Option<Complex64>,
}

impl SweepRow {
    /// Numeric amplitude when present, analytic otherwise.
    pub fn f0(&self) -> Complex64 {
        self.f0_numeric.or(self.f0_analytic).unwrap_or_default()
    }

    /// Relative rate `|f0|^2`.
    pub fn rate(&self) -> f64 {
        self.f0().norm_sqr()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub mode: SweepMode,
    pub rows: Vec<SweepRow>,
    pub numeric_slope: Option<LinearFit>,
    pub analytic_slope: Option<LinearFit>,
    /// Slope of `|f0|^2` for the primary amplitude.
    pub rate_slope: LinearFit,
    /// Set when an amplitude fit leaves log residuals above 1e-2 (2e-2 for
    /// the rate) or `|f0|` is not monotone in `k`; the exponents are still
    /// reported.
    pub flagged: bool,
}

const FIT_RESIDUAL_LIMIT: f64 = 1e-2;

/// Amplitudes over a log-spaced range of `k` at fixed `c`, with power-law fits.
pub fn scaling_sweep(
    c: f64,
    range: &KRange,
    p: &ModelPotential,
    mode: SweepMode,
    opts: &SweepOptions,
) -> Result<SweepResult> {
    if (p.c() - c).abs() > 1e-14 * c.max(1.0) {
        return Err(Error::invalid("potential was built for a different coupling c"));
    }
    if range.points < 8 {
        return Err(Error::invalid(format!("sweep needs at least 8 points, got {}", range.points)));
    }
    let slack = 1.0 + 1e-12;
    if !(range.lo > 0.0 && range.hi > range.lo) || range.lo * slack < 1e-3 * c || range.hi > 1e-1 * c * slack {
        return Err(Error::invalid(format!(
            "k range [{}, {}] must be increasing within [1e-3 c, 1e-1 c]",
            range.lo, range.hi
        )));
    }
    let ks = range.values();
    let rows = map_ordered(opts.exec, &ks, |&k| -> Result<SweepRow> {
        let f0_numeric = if mode.numeric() {
            Some(numeric_amplitude(p, k, &opts.radial)?.f0)
        } else {
            None
        };
        // In `Both` mode the closed form is left out where its k < c/10
        // precondition fails instead of aborting the sweep.
        let f0_analytic = if mode.analytic() && (mode == SweepMode::Analytic || k < c / 10.0) {
            let params = AnalyticAmplitudeParams {
                b: opts.b,
                omega_pin: opts.omega_pin,
                ..AnalyticAmplitudeParams::new(p, k)
            };
            Some(analytic_amplitude(&params)?)
        } else {
            None
        };
        Ok(SweepRow {
            k,
            c,
            k_over_c: k / c,
            gamma: c / k,
            f0_numeric,
            f0_analytic,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let fit_of = |get: &dyn Fn(&SweepRow) -> Option<f64>| -> Result<Option<LinearFit>> {
        let (x, y): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|r| get(r).map(|v| (r.k, v))).unzip();
        if x.len() < 3 {
            return Ok(None);
        }
        loglog_fit(&x, &y).map(Some)
    };
    let numeric_slope = fit_of(&|r| r.f0_numeric.map(|f| f.norm()))?;
    let analytic_slope = fit_of(&|r| r.f0_analytic.map(|f| f.norm()))?;
    let rates: Vec<f64> = rows.iter().map(|r| r.rate()).collect();
    let rate_slope = loglog_fit(&ks, &rates)?;
    let monotone = rows.windows(2).all(|w| w[1].f0().norm() > w[0].f0().norm());
    // |f0|^2 doubles the log residuals along with the slope
    let flagged = !monotone
        || [numeric_slope, analytic_slope]
            .iter()
            .flatten()
            .any(|f| f.rms_residual > FIT_RESIDUAL_LIMIT)
        || rate_slope.rms_residual > 2.0 * FIT_RESIDUAL_LIMIT;
    if flagged {
        log::warn!("sweep fit flagged: monotone = {monotone}");
    }
    Ok(SweepResult {
        mode,
        rows,
        numeric_slope,
        analytic_slope,
        rate_slope,
        flagged,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub gamma: f64,
    pub c: f64,
    pub k: f64,
    /// `(k/c)^12` at `k = n1D`.
    pub suppression: f64,
    /// `g3(0)^2` scaling, `(gamma^{-6})^2`.
    pub g3_squared: f64,
    pub ratio: f64,
}

/// Smallest interaction parameter accepted by [`gamma_report`].
pub const MIN_GAMMA: f64 = 10.0;

/// Rate suppression against the squared three-body correlation. The
/// collision momentum is pinned to `k = n1D`, so only power laws are
/// meaningful, not prefactors.
pub fn gamma_report(n1d: f64, c_values: &[f64]) -> Result<Vec<GammaRow>> {
    if !(n1d > 0.0) || !n1d.is_finite() {
        return Err(Error::invalid(format!("density n1D = {n1d} must be > 0")));
    }
    c_values
        .iter()
        .map(|&c| {
            let gamma = c / n1d;
            if !(gamma >= MIN_GAMMA) {
                return Err(Error::invalid(format!("gamma = c/n1D = {gamma} must be >= {MIN_GAMMA}")));
            }
            let k = n1d;
            let suppression = (k / c).powi(12);
            let g3_squared = gamma.powi(-6).powi(2);
            Ok(GammaRow {
                gamma,
                c,
                k,
                suppression,
                g3_squared,
                ratio: suppression / g3_squared,
            })
        })
        .collect()
}

/// `c = 2 a_s / l_perp^2` for a tight transverse trap. Warns when
/// `l_perp < 10 a_s`, outside the quasi-1D regime.
pub fn coupling_from_3d(a_s: f64, l_perp: f64) -> Result<f64> {
    if !(a_s >= 0.0) || !a_s.is_finite() {
        return Err(Error::invalid(format!("scattering length a_s = {a_s} must be >= 0")));
    }
    if !(l_perp > 0.0) || !l_perp.is_finite() {
        return Err(Error::invalid(format!("transverse length l_perp = {l_perp} must be > 0")));
    }
    if l_perp < 10.0 * a_s {
        log::warn!("l_perp = {l_perp} is not much larger than a_s = {a_s}");
    }
    Ok(2.0 * a_s / (l_perp * l_perp))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::integrate_radial;

    #[test]
    fn free_solution_does_not_scatter() {
        let sol = integrate_radial(0.0, 0.3, None, &RadialOptions::default()).unwrap();
        let a = extract_amplitude(&sol).unwrap();
        assert!(a.no_scattering);
        assert_eq!(a.f0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn ratio_form_is_unitary() {
        for &r in &[-1e12, -3.0, 0.0, 0.5, 1e15] {
            let f = amplitude_from_ratio(r);
            assert!((f.inv().im - 1.0).abs() < 1e-12);
            assert!(f.norm() <= 1.0);
        }
    }

    #[test]
    fn analytic_example() {
        let p = ModelPotential::from_qr0(1.0, 0.01, 1.0).unwrap();
        let params = AnalyticAmplitudeParams {
            omega_pin: Some(OMEGA_QUOTED),
            ..AnalyticAmplitudeParams::new(&p, 0.01)
        };
        assert!((params.bracket().unwrap() + 1.180).abs() < 2e-3);
        let f = analytic_amplitude(&params).unwrap();
        assert!((f.re - 6.7e-13).abs() < 0.05e-13, "{f}");
        let f1 = analytic_amplitude(&AnalyticAmplitudeParams { k: 1e-3, ..params }).unwrap();
        let f2 = analytic_amplitude(&AnalyticAmplitudeParams { k: 2e-3, ..params }).unwrap();
        assert!((f2.norm() / f1.norm() / 64.0 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn gamma_power_law() {
        let rows = gamma_report(1.0, &[10.0, 20.0]).unwrap();
        assert!((rows[1].suppression / rows[0].suppression - 1.0 / 4096.0).abs() < 1e-15);
        assert!((rows[0].suppression - 1e-12).abs() < 1e-24);
        assert!((rows[0].ratio - rows[1].ratio).abs() < 1e-12);
        assert!(gamma_report(1.0, &[5.0]).is_err());
    }

    #[test]
    fn three_d_coupling() {
        assert_eq!(coupling_from_3d(0.0, 1.0).unwrap(), 0.0);
        assert!((coupling_from_3d(0.005, 1.0).unwrap() - 0.01).abs() < 1e-16);
        let c1 = coupling_from_3d(0.005, 1.0).unwrap();
        let c2 = coupling_from_3d(0.005, 2.0).unwrap();
        assert!((c1 / c2 - 4.0).abs() < 1e-14);
        assert!(coupling_from_3d(0.1, 0.0).is_err());
    }

    #[test]
    fn k_range_is_log_spaced() {
        let v = KRange { lo: 1e-3, hi: 1e-1, points: 16 }.values();
        assert_eq!(v.len(), 16);
        assert_eq!(v[0], 1e-3);
        assert_eq!(v[15], 1e-1);
        let r0 = v[1] / v[0];
        assert!(v.windows(2).all(|w| (w[1] / w[0] / r0 - 1.0).abs() < 1e-12));
    }
}
