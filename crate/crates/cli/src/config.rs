//! `key = value` run configuration.
//!
//! Precedence: built-in defaults < config file < command-line flags. Unknown
//! keys are rejected so a typo never silently falls back to a default.

use std::collections::BTreeMap;
use std::path::PathBuf;

use hyperscatter::radial::{RadialOptions, DEFAULT_NODES_PER_EFOLD, DEFAULT_RTOL, MAX_C_R0};
use hyperscatter::scattering::{KRange, SweepMode};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const KEYS: &[&str] = &[
    "c",
    "k",
    "k_min",
    "k_max",
    "k_points",
    "q",
    "qr0",
    "r0",
    "channels",
    "r_min",
    "r_max",
    "rtol",
    "nodes_per_efold",
    "output",
    "format",
    "b",
    "pin_omega",
    "mode",
    "n1d",
    "gammas",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub c: f64,
    pub k: f64,
    pub k_range: KRange,
    pub q: f64,
    pub r0: f64,
    pub channels: usize,
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub rtol: f64,
    pub nodes_per_efold: usize,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub b: f64,
    pub pin_omega: bool,
    pub mode: SweepMode,
    pub n1d: f64,
    pub gammas: Vec<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            c: 1.0,
            k: 0.01,
            k_range: KRange { lo: 1e-3, hi: 1e-1, points: 16 },
            q: 100.0,
            r0: 0.01,
            channels: 3,
            r_min: None,
            r_max: None,
            rtol: DEFAULT_RTOL,
            nodes_per_efold: DEFAULT_NODES_PER_EFOLD,
            output: None,
            format: Format::Csv,
            b: 0.0,
            pin_omega: false,
            mode: SweepMode::Both,
            n1d: 0.01,
            gammas: vec![10.0, 20.0, 40.0, 80.0, 160.0, 320.0],
        }
    }
}

impl RunConfig {
    pub fn radial_options(&self) -> RadialOptions {
        RadialOptions {
            r_min: self.r_min,
            r_max: self.r_max,
            nodes_per_efold: self.nodes_per_efold,
            rtol: self.rtol,
        }
    }

    pub fn qr0(&self) -> f64 {
        self.q * self.r0
    }

    /// Every physical and numerical setting (output location and format
    /// excluded) as `(key, value)` in a fixed order. Floats use the shortest
    /// round-trip form, so equal configurations render identically.
    pub fn canonical_pairs(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "auto".to_string(), |x| format!("{x:e}"));
        let mode = match self.mode {
            SweepMode::Numeric => "numeric",
            SweepMode::Analytic => "analytic",
            SweepMode::Both => "both",
        };
        vec![
            ("c", format!("{:e}", self.c)),
            ("k", format!("{:e}", self.k)),
            ("k_min", format!("{:e}", self.k_range.lo)),
            ("k_max", format!("{:e}", self.k_range.hi)),
            ("k_points", self.k_range.points.to_string()),
            ("q", format!("{:e}", self.q)),
            ("r0", format!("{:e}", self.r0)),
            ("channels", self.channels.to_string()),
            ("r_min", opt(self.r_min)),
            ("r_max", opt(self.r_max)),
            ("rtol", format!("{:e}", self.rtol)),
            ("nodes_per_efold", self.nodes_per_efold.to_string()),
            ("b", format!("{:e}", self.b)),
            ("pin_omega", self.pin_omega.to_string()),
            ("mode", mode.to_string()),
            ("n1d", format!("{:e}", self.n1d)),
            (
                "gammas",
                self.gammas.iter().map(|g| format!("{g:e}")).collect::<Vec<_>>().join(","),
            ),
        ]
    }

    /// SHA-256 of the canonical listing, hex encoded.
    pub fn hash(&self) -> String {
        hash_pairs(self.canonical_pairs().iter().map(|(k, v)| (*k, v.as_str())))
    }
}

/// Keys of [`RunConfig::canonical_pairs`], in order.
pub const CANONICAL_ORDER: &[&str] = &[
    "c",
    "k",
    "k_min",
    "k_max",
    "k_points",
    "q",
    "r0",
    "channels",
    "r_min",
    "r_max",
    "rtol",
    "nodes_per_efold",
    "b",
    "pin_omega",
    "mode",
    "n1d",
    "gammas",
];

/// Hash of `key = value\n` lines in the given order.
pub fn hash_pairs<'a>(pairs: impl Iterator<Item = (&'a str, &'a str)>) -> String {
    let mut h = Sha256::new();
    for (k, v) in pairs {
        h.update(format!("{k} = {v}\n").as_bytes());
    }
    hex::encode(h.finalize())
}

/// Parse `key = value` lines; `#` starts a comment. Later lines win.
pub fn parse_kv(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected `key = value`, got `{line}`", n + 1)))?;
        let (k, v) = (k.trim(), v.trim());
        if !KEYS.contains(&k) {
            return Err(CliError::Config(format!("line {}: unknown key `{k}`", n + 1)));
        }
        if v.is_empty() {
            return Err(CliError::Config(format!("line {}: empty value for `{k}`", n + 1)));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

fn num(key: &str, v: &str) -> Result<f64, CliError> {
    let x: f64 = v
        .parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}` as a number")))?;
    if !x.is_finite() {
        return Err(CliError::Config(format!("`{key}` must be finite")));
    }
    Ok(x)
}

fn count(key: &str, v: &str) -> Result<usize, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("`{key}`: cannot parse `{v}` as a count")))
}

fn positive(key: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(CliError::Config(format!("`{key}` must satisfy {key} > 0 (got {x})")))
    }
}

/// Merge `layers` (lowest precedence first) over the defaults and validate.
pub fn resolve(layers: &[BTreeMap<String, String>]) -> Result<RunConfig, CliError> {
    let mut merged: BTreeMap<String, String> = BTreeMap::new();
    for layer in layers {
        if layer.contains_key("q") && layer.contains_key("qr0") {
            return Err(CliError::Config("set either `q` or `qr0`, not both".into()));
        }
        for (k, v) in layer {
            if !KEYS.contains(&k.as_str()) {
                return Err(CliError::Config(format!("unknown key `{k}`")));
            }
            // an explicit q or qr0 replaces the other one from lower layers
            match k.as_str() {
                "q" => {
                    merged.remove("qr0");
                }
                "qr0" => {
                    merged.remove("q");
                }
                _ => {}
            }
            merged.insert(k.clone(), v.clone());
        }
    }

    let mut cfg = RunConfig::default();
    let mut qr0 = 1.0;
    let mut q = None;
    for (k, v) in &merged {
        match k.as_str() {
            "c" => cfg.c = positive(k, num(k, v)?)?,
            "k" => cfg.k = positive(k, num(k, v)?)?,
            "k_min" => cfg.k_range.lo = positive(k, num(k, v)?)?,
            "k_max" => cfg.k_range.hi = positive(k, num(k, v)?)?,
            "k_points" => cfg.k_range.points = count(k, v)?,
            "q" => q = Some(positive(k, num(k, v)?)?),
            "qr0" => qr0 = positive(k, num(k, v)?)?,
            "r0" => cfg.r0 = positive(k, num(k, v)?)?,
            "channels" => cfg.channels = count(k, v)?,
            "r_min" => cfg.r_min = Some(positive(k, num(k, v)?)?),
            "r_max" => cfg.r_max = Some(positive(k, num(k, v)?)?),
            "rtol" => cfg.rtol = positive(k, num(k, v)?)?,
            "nodes_per_efold" => cfg.nodes_per_efold = count(k, v)?,
            "output" => cfg.output = Some(PathBuf::from(v)),
            "format" => {
                cfg.format = match v.as_str() {
                    "csv" => Format::Csv,
                    "json" => Format::Json,
                    _ => return Err(CliError::Config(format!("`format` must be csv or json, got `{v}`"))),
                }
            }
            "b" => cfg.b = num(k, v)?,
            "pin_omega" => {
                cfg.pin_omega = v
                    .parse()
                    .map_err(|_| CliError::Config(format!("`pin_omega` must be true or false, got `{v}`")))?
            }
            "mode" => {
                cfg.mode = match v.as_str() {
                    "numeric" => SweepMode::Numeric,
                    "analytic" => SweepMode::Analytic,
                    "both" => SweepMode::Both,
                    _ => {
                        return Err(CliError::Config(format!(
                            "`mode` must be numeric, analytic or both, got `{v}`"
                        )))
                    }
                }
            }
            "n1d" => cfg.n1d = positive(k, num(k, v)?)?,
            "gammas" => {
                cfg.gammas = v
                    .split(',')
                    .map(|g| num(k, g.trim()).and_then(|x| positive(k, x)))
                    .collect::<Result<_, _>>()?
            }
            _ => unreachable!("keys are checked above"),
        }
    }
    cfg.q = q.unwrap_or(qr0 / cfg.r0);
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    if cfg.r0 * cfg.c > MAX_C_R0 * (1.0 + 1e-12) {
        return Err(CliError::Config(format!(
            "potential range violates r0*c <= {MAX_C_R0} (r0 = {}, c = {})",
            cfg.r0, cfg.c
        )));
    }
    let r = &cfg.k_range;
    if !(r.hi > r.lo) {
        return Err(CliError::Config(format!("k range must satisfy k_min < k_max (got {} .. {})", r.lo, r.hi)));
    }
    if r.points < 2 {
        return Err(CliError::Config("k range must satisfy k_points >= 2".into()));
    }
    if cfg.channels == 0 || cfg.channels > hyperscatter::couplings::MAX_CHANNELS {
        return Err(CliError::Config(format!(
            "channel count must satisfy 1 <= channels <= {}",
            hyperscatter::couplings::MAX_CHANNELS
        )));
    }
    if cfg.b.abs() > 1.0 {
        return Err(CliError::Config(format!("admixture must satisfy |b| <= 1 (got {})", cfg.b)));
    }
    if cfg.nodes_per_efold < 4 {
        return Err(CliError::Config("grid must satisfy nodes_per_efold >= 4".into()));
    }
    if let (Some(lo), Some(hi)) = (cfg.r_min, cfg.r_max) {
        if lo >= hi {
            return Err(CliError::Config("grid must satisfy r_min < r_max".into()));
        }
    }
    if cfg.gammas.is_empty() {
        return Err(CliError::Config("`gammas` needs at least one value".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = resolve(&[parse_kv("# nothing\n\n").unwrap()]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.qr0(), 1.0);
        assert_eq!(cfg.k_range.values().len(), 16);
    }

    #[test]
    fn range_constraint_is_named() {
        let err = resolve(&[parse_kv("r0 = 0.2\nc = 1").unwrap()]).unwrap_err();
        assert!(err.to_string().contains("r0*c <= 0.05"), "{err}");
    }

    #[test]
    fn flags_override_file() {
        let file = parse_kv("k = 0.05").unwrap();
        let flags = BTreeMap::from([("k".to_string(), "0.01".to_string())]);
        assert_eq!(resolve(&[file, flags]).unwrap().k, 0.01);
    }

    #[test]
    fn q_and_qr0_together_conflict() {
        assert!(resolve(&[parse_kv("q = 50\nqr0 = 1").unwrap()]).is_err());
    }

    #[test]
    fn unknown_key_is_an_error() {
        assert!(parse_kv("kk = 1").is_err());
        assert!(parse_kv("just text").is_err());
    }

    #[test]
    fn q_and_qr0_replace_each_other() {
        let file = parse_kv("q = 50").unwrap();
        let flags = BTreeMap::from([("qr0".to_string(), "2".to_string())]);
        let cfg = resolve(&[file, flags]).unwrap();
        assert!((cfg.qr0() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn canonical_order_is_exported() {
        let keys: Vec<&str> = RunConfig::default().canonical_pairs().iter().map(|p| p.0).collect();
        assert_eq!(keys, CANONICAL_ORDER);
    }

    #[test]
    fn hash_tracks_physics_only() {
        let a = RunConfig::default();
        let b = RunConfig {
            output: Some("elsewhere".into()),
            ..RunConfig::default()
        };
        let c = RunConfig { k: 0.02, ..RunConfig::default() };
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
    }
}
