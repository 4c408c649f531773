//! `hyperscatter` command-line driver.
//!
//! Exit codes: 0 ok, 1 i/o, 2 configuration, 3 non-convergence or
//! breakdown, 4 resonance (pole of the matching formula), 5 unstable
//! amplitude extraction, 6 manifest verification mismatch.

mod commands;
mod config;
mod error;
mod output;

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hyperscatter::par::with_thread_cap;
use hyperscatter::Execution;

use crate::config::{parse_kv, resolve, RunConfig};
use crate::error::CliError;
use crate::output::{render, verify_manifest, write_artifacts, Report};

#[derive(Parser, Debug)]
#[command(name = "hyperscatter", version, about = "Three-body scattering of 1D bosons in hyperspherical coordinates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Hyperangular eigenvalues lambda_n(cR).
    Channels(RunArgs),
    /// Size of the dropped non-adiabatic couplings.
    Couplings(RunArgs),
    /// Regular radial solution with the three-body well.
    Solve(RunArgs),
    /// Partial amplitude f0 at one wavenumber, numeric and closed form.
    Amplitude(RunArgs),
    /// The quasiclassical constant Xi and Omega.
    Xi(RunArgs),
    /// Amplitude scaling over a range of wavenumbers.
    Sweep(RunArgs),
    /// Rate suppression against g3(0)^2.
    Gamma(RunArgs),
    /// Check a run manifest against its CSV.
    Verify {
        /// Manifest written next to the CSV (`<name>.json`).
        manifest: PathBuf,
    },
}

/// Configuration sources. Flags override the file, which overrides defaults.
#[derive(Args, Debug, Default)]
struct RunArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Contact coupling c.
    #[arg(long)]
    c: Option<String>,
    /// Wavenumber for `solve` and `amplitude`.
    #[arg(long)]
    k: Option<String>,
    #[arg(long)]
    k_min: Option<String>,
    #[arg(long)]
    k_max: Option<String>,
    #[arg(long)]
    k_points: Option<String>,
    /// Well depth parameter q (alternative to --qr0).
    #[arg(long)]
    q: Option<String>,
    #[arg(long)]
    qr0: Option<String>,
    /// Well range r0.
    #[arg(long)]
    r0: Option<String>,
    /// Number of hyperangular channels to tabulate (at most 8).
    #[arg(long)]
    channels: Option<String>,
    #[arg(long)]
    r_min: Option<String>,
    #[arg(long)]
    r_max: Option<String>,
    /// Relative step tolerance of the radial integrator.
    #[arg(long)]
    rtol: Option<String>,
    #[arg(long)]
    nodes_per_efold: Option<String>,
    /// Directory for `<subcommand>.csv` and its `<subcommand>.json` manifest.
    #[arg(long)]
    output: Option<String>,
    /// Stdout format when no output directory is given: csv or json.
    #[arg(long)]
    format: Option<String>,
    /// J3 admixture b of the irregular solution, |b| <= 1.
    #[arg(long)]
    b: Option<String>,
    /// Use the quoted Omega = 1.26 instead of the computed one.
    #[arg(long)]
    pin_omega: bool,
    /// Sweep mode: numeric, analytic or both.
    #[arg(long)]
    mode: Option<String>,
    /// Linear density for `gamma`.
    #[arg(long)]
    n1d: Option<String>,
    /// Comma-separated gamma values for `gamma`.
    #[arg(long)]
    gammas: Option<String>,
}

impl RunArgs {
    fn flag_layer(&self) -> BTreeMap<String, String> {
        let pairs = [
            ("c", &self.c),
            ("k", &self.k),
            ("k_min", &self.k_min),
            ("k_max", &self.k_max),
            ("k_points", &self.k_points),
            ("q", &self.q),
            ("qr0", &self.qr0),
            ("r0", &self.r0),
            ("channels", &self.channels),
            ("r_min", &self.r_min),
            ("r_max", &self.r_max),
            ("rtol", &self.rtol),
            ("nodes_per_efold", &self.nodes_per_efold),
            ("output", &self.output),
            ("format", &self.format),
            ("b", &self.b),
            ("mode", &self.mode),
            ("n1d", &self.n1d),
            ("gammas", &self.gammas),
        ];
        let mut layer: BTreeMap<String, String> = pairs
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        if self.pin_omega {
            layer.insert("pin_omega".into(), "true".into());
        }
        layer
    }

    fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut layers = Vec::new();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            layers.push(parse_kv(&text)?);
        }
        layers.push(self.flag_layer());
        resolve(&layers)
    }
}

/// `HYPERSCATTER_THREADS` caps the sweep's worker count; `1` runs it
/// sequentially.
fn thread_cap() -> Result<Option<usize>, CliError> {
    match std::env::var("HYPERSCATTER_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config(format!(
                "HYPERSCATTER_THREADS must be a positive integer, got `{v}`"
            ))),
        },
        Err(_) => Ok(None),
    }
}

fn emit(report: &Report, cfg: &RunConfig) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    match &cfg.output {
        Some(dir) => {
            let (csv, json) = write_artifacts(report, cfg, dir)?;
            write!(out, "{}", report.summary_text())?;
            writeln!(out, "wrote {} and {}", csv.display(), json.display())?;
        }
        None => write!(out, "{}", render(report, cfg))?,
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (args, which) = match &cli.command {
        Command::Verify { manifest } => {
            let m = verify_manifest(manifest)?;
            println!("ok: {} matches {} (config_hash={})", m.csv_file, manifest.display(), m.config_hash);
            return Ok(());
        }
        Command::Channels(a) => (a, "channels"),
        Command::Couplings(a) => (a, "couplings"),
        Command::Solve(a) => (a, "solve"),
        Command::Amplitude(a) => (a, "amplitude"),
        Command::Xi(a) => (a, "xi"),
        Command::Sweep(a) => (a, "sweep"),
        Command::Gamma(a) => (a, "gamma"),
    };
    let cfg = args.resolve()?;
    log::debug!("config hash {}", cfg.hash());
    let report = match which {
        "channels" => commands::channels(&cfg)?,
        "couplings" => commands::couplings(&cfg)?,
        "solve" => commands::solve(&cfg)?,
        "amplitude" => commands::amplitude(&cfg)?,
        "xi" => commands::xi(&cfg)?,
        "sweep" => {
            let cap = thread_cap()?;
            let exec = if cap == Some(1) {
                Execution::Sequential
            } else {
                Execution::Parallel
            };
            with_thread_cap(cap, || commands::sweep(&cfg, exec))?
        }
        "gamma" => commands::gamma(&cfg)?,
        _ => unreachable!(),
    };
    emit(&report, &cfg)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
