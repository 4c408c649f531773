//! One function per subcommand, each turning a validated configuration into
//! a [`Report`].

use hyperscatter::channels::{lambda0_large, lambda0_small, solve_lambda};
use hyperscatter::couplings::{adiabaticity_report, max_y00_ratio};
use hyperscatter::radial::{integrate_radial, match_ratio, ModelPotential};
use hyperscatter::scattering::{
    analytic_amplitude, gamma_report, numeric_amplitude_detailed, scaling_sweep, AnalyticAmplitudeParams,
    SweepOptions, OMEGA_QUOTED,
};
use hyperscatter::wkb::{tailoring_sensitivity, xi_constant};
use hyperscatter::Execution;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{Cell, Report};

fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let n = (decades * per_decade as f64).round() as usize;
    (0..=n)
        .map(|i| lo * 10f64.powf(decades * i as f64 / n as f64))
        .collect()
}

fn potential(cfg: &RunConfig) -> Result<ModelPotential, CliError> {
    Ok(ModelPotential::new(cfg.q, cfg.r0, cfg.c)?)
}

fn analytic_params(cfg: &RunConfig, p: &ModelPotential, k: f64) -> AnalyticAmplitudeParams {
    AnalyticAmplitudeParams {
        b: cfg.b,
        omega_pin: cfg.pin_omega.then_some(OMEGA_QUOTED),
        ..AnalyticAmplitudeParams::new(p, k)
    }
}

/// `lambda_n(cR)` for the configured number of channels.
pub fn channels(cfg: &RunConfig) -> Result<Report, CliError> {
    const COLS: [&str; 10] = [
        "r", "cr", "lambda_0", "lambda_1", "lambda_2", "lambda_3", "lambda_4", "lambda_5", "lambda_6", "lambda_7",
    ];
    let mut cols: Vec<&'static str> = COLS[..2 + cfg.channels].to_vec();
    cols.extend(["lambda0_small", "lambda0_large", "max_residual"]);
    let mut rep = Report::new("channels", &cols);
    let mut worst: f64 = 0.0;
    for cr in log_grid(1e-4, 1e4, 10) {
        let mut row: Vec<Cell> = vec![(cr / cfg.c).into(), cr.into()];
        let mut res: f64 = 0.0;
        for n in 0..cfg.channels {
            let ev = solve_lambda(n, cr)?;
            res = res.max(ev.residual());
            row.push(ev.lambda.into());
        }
        worst = worst.max(res);
        row.extend([lambda0_small(cr).into(), lambda0_large(cr).into(), res.into()]);
        rep.push(row);
    }
    rep.note("c", cfg.c);
    rep.note("max_residual", worst);
    Ok(rep)
}

/// Dropped non-adiabatic terms relative to the adiabatic potential.
pub fn couplings(cfg: &RunConfig) -> Result<Report, CliError> {
    let grid: Vec<f64> = log_grid(1e-4, 1e4, 8).into_iter().map(|cr| cr / cfg.c).collect();
    let report = adiabaticity_report(cfg.c, &grid)?;
    let mut rep = Report::new(
        "couplings",
        &["r", "cr", "lambda_0", "lambda_1", "lambda_2", "y00_ratio", "w00_ratio"],
    );
    for r in &report.rows {
        rep.push(vec![
            r.r.into(),
            r.cr.into(),
            r.lambda0.into(),
            r.lambda1.into(),
            r.lambda2.into(),
            r.y00_ratio.into(),
            r.w00_ratio.into(),
        ]);
    }
    rep.note("c", cfg.c);
    rep.note("max_y00_ratio_cr_le_1", max_y00_ratio(cfg.c)?);
    if let Some(d) = report.decay {
        rep.note("decay_exponents", d);
        rep.note("y00_excess_exponent", d.y00_excess());
    }
    Ok(rep)
}

/// Regular solution with the well at the configured `k`.
pub fn solve(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = potential(cfg)?;
    let sol = integrate_radial(cfg.c, cfg.k, Some(&p), &cfg.radial_options())?;
    let mut rep = Report::new("solve", &["r", "f", "df", "local_error"]);
    for i in 0..sol.len() {
        rep.push(vec![
            sol.grid[i].into(),
            sol.f[i].into(),
            sol.df[i].into(),
            sol.local_residual[i].into(),
        ]);
    }
    rep.note("nodes", sol.len());
    rep.note("steps_accepted", sol.stats.accepted);
    rep.note("steps_rejected", sol.stats.rejected);
    if cfg.k <= p.q() / 100.0 {
        rep.note("matching", match_ratio(&p, cfg.k)?);
    }
    Ok(rep)
}

/// Numeric and closed-form amplitude at the configured `k`.
pub fn amplitude(cfg: &RunConfig) -> Result<Report, CliError> {
    let p = potential(cfg)?;
    // the closed form needs a finite J ratio; check it first so a pole
    // surfaces as a resonance rather than as a numerical failure
    p.j_ratio()?;
    let (amp, details) = numeric_amplitude_detailed(&p, cfg.k, &cfg.radial_options())?;
    let analytic = if cfg.k < cfg.c / 10.0 {
        Some(analytic_amplitude(&analytic_params(cfg, &p, cfg.k))?)
    } else {
        None
    };
    let mut rep = Report::new(
        "amplitude",
        &[
            "k",
            "c",
            "k_over_c",
            "re_f0",
            "im_f0",
            "abs_f0",
            "f0_analytic_re",
            "f0_analytic_im",
            "stability",
        ],
    );
    rep.push(vec![
        cfg.k.into(),
        cfg.c.into(),
        (cfg.k / cfg.c).into(),
        amp.f0.re.into(),
        amp.f0.im.into(),
        amp.f0.norm().into(),
        analytic.map(|f| f.re).into(),
        analytic.map(|f| f.im).into(),
        amp.stability.into(),
    ]);
    rep.note("qr0", cfg.qr0());
    rep.note("unitarity_defect", amp.unitarity_defect());
    rep.note("distorted_wave", details);
    if let Some(f) = analytic {
        rep.note("numeric_over_analytic", amp.f0.norm() / f.norm());
        rep.note("bracket", analytic_params(cfg, &p, cfg.k).bracket()?);
    }
    Ok(rep)
}

/// The quasiclassical constant, its convergence table and tailoring spread.
pub fn xi(_cfg: &RunConfig) -> Result<Report, CliError> {
    let est = xi_constant()?;
    let mut rep = Report::new("xi", &["cr", "exponent_minus_log", "corrected", "xi"]);
    for r in &est.table {
        rep.push(vec![r.cr.into(), r.exponent_minus_log.into(), r.corrected.into(), r.xi.into()]);
    }
    rep.note("xi", est.xi);
    rep.note("omega", est.omega);
    rep.note("extrapolation_spread", est.extrapolation_spread);
    rep.note("tailoring", tailoring_sensitivity()?);
    Ok(rep)
}

/// Amplitude scaling with `k` at fixed `c`.
pub fn sweep(cfg: &RunConfig, exec: Execution) -> Result<Report, CliError> {
    let p = potential(cfg)?;
    let opts = SweepOptions {
        radial: cfg.radial_options(),
        b: cfg.b,
        omega_pin: cfg.pin_omega.then_some(OMEGA_QUOTED),
        exec,
    };
    let res = scaling_sweep(cfg.c, &cfg.k_range, &p, cfg.mode, &opts)?;
    let mut rep = Report::new(
        "sweep",
        &[
            "k",
            "c",
            "k_over_c",
            "re_f0",
            "im_f0",
            "abs_f0",
            "rate",
            "f0_analytic_re",
            "f0_analytic_im",
        ],
    );
    for r in &res.rows {
        let f = r.f0();
        rep.push(vec![
            r.k.into(),
            r.c.into(),
            r.k_over_c.into(),
            f.re.into(),
            f.im.into(),
            f.norm().into(),
            r.rate().into(),
            r.f0_analytic.map(|f| f.re).into(),
            r.f0_analytic.map(|f| f.im).into(),
        ]);
    }
    rep.note("mode", res.mode);
    rep.note("numeric_slope", res.numeric_slope);
    rep.note("analytic_slope", res.analytic_slope);
    rep.note("rate_slope", res.rate_slope);
    rep.note("flagged", res.flagged);
    Ok(rep)
}

/// Rate suppression against `g3(0)^2` over the configured `gamma` values.
pub fn gamma(cfg: &RunConfig) -> Result<Report, CliError> {
    let cs: Vec<f64> = cfg.gammas.iter().map(|g| g * cfg.n1d).collect();
    let rows = gamma_report(cfg.n1d, &cs)?;
    let mut rep = Report::new("gamma", &["gamma", "c", "k", "suppression", "g3_squared", "ratio"]);
    for r in &rows {
        rep.push(vec![
            r.gamma.into(),
            r.c.into(),
            r.k.into(),
            r.suppression.into(),
            r.g3_squared.into(),
            r.ratio.into(),
        ]);
    }
    rep.note("n1d", cfg.n1d);
    rep.note("momentum_convention", "k = n1d");
    Ok(rep)
}
