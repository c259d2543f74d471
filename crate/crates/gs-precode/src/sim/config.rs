//! Flat `key = value` experiment configuration: parsing, layering, defaults,
//! and validation.

use std::collections::BTreeMap;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::precode::{BetaMode, InitKind, SchemeKind, SchemeSpec};

/// Which quantity an experiment sweeps and records.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Experiment {
    /// Mean sum rate per SNR point for each scheme.
    CapacityVsSnr,
    /// Monte-Carlo uncoded bit error rate per SNR point for each scheme.
    BerVsSnr,
    /// Transmit-power trace against the antenna count grid.
    PowerVsN,
    /// Mean Gauss-Seidel contraction energy against the load factor,
    /// next to its closed-form estimate.
    FrobeniusVsAlpha,
    /// Mean exact power scaling against the load factor, next to the
    /// large-array shortcut.
    BetaVsAlpha,
    /// Instrumented complex-mult counts against the user count grid.
    MultCountVsK,
}

impl Experiment {
    pub fn as_str(&self) -> &'static str {
        match self {
            Experiment::CapacityVsSnr => "capacity_vs_snr",
            Experiment::BerVsSnr => "ber_vs_snr",
            Experiment::PowerVsN => "power_vs_n",
            Experiment::FrobeniusVsAlpha => "frobenius_vs_alpha",
            Experiment::BetaVsAlpha => "beta_vs_alpha",
            Experiment::MultCountVsK => "mult_count_vs_k",
        }
    }

    fn from_str(text: &str) -> Option<Self> {
        Some(match text {
            "capacity_vs_snr" => Experiment::CapacityVsSnr,
            "ber_vs_snr" => Experiment::BerVsSnr,
            "power_vs_n" => Experiment::PowerVsN,
            "frobenius_vs_alpha" => Experiment::FrobeniusVsAlpha,
            "beta_vs_alpha" => Experiment::BetaVsAlpha,
            "mult_count_vs_k" => Experiment::MultCountVsK,
            _ => return None,
        })
    }
}

/// Fully resolved experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub experiment: Experiment,
    pub n_bs: usize,
    pub n_users: usize,
    /// Base-station-side correlation magnitude `ξ ∈ [0, 1)`.
    pub correlation: f64,
    pub qam_order: u32,
    /// SNR grid in dB (capacity and BER experiments).
    pub snr_grid_db: Vec<f64>,
    /// Schemes to run (experiments that take schemes).
    pub schemes: Vec<SchemeSpec>,
    pub trials: usize,
    pub seed: u64,
    /// CSV destination; the CLI requires it, [`super::run`] ignores it.
    pub output_path: Option<PathBuf>,
    /// Load factors `α = N/K` (frobenius / beta experiments).
    pub alpha_grid: Vec<f64>,
    /// Antenna counts (power experiment).
    pub n_bs_grid: Vec<usize>,
    /// User counts (mult-count experiment).
    pub n_users_grid: Vec<usize>,
    /// Stop a BER point once this many bit errors accumulated.
    pub ber_target_errors: u64,
    /// Hard cap on trials per BER point.
    pub ber_max_trials: u64,
    pub division_free: bool,
    pub beta_mode: BetaMode,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            experiment: Experiment::CapacityVsSnr,
            n_bs: 256,
            n_users: 16,
            correlation: 0.0,
            qam_order: 64,
            snr_grid_db: Vec::new(),
            schemes: Vec::new(),
            trials: 200,
            seed: 1,
            output_path: None,
            alpha_grid: vec![2.0, 4.0, 8.0, 16.0],
            n_bs_grid: vec![32, 64, 128, 256],
            n_users_grid: vec![4, 8, 16, 32, 64],
            ber_target_errors: 100,
            ber_max_trials: 20_000,
            division_free: false,
            beta_mode: BetaMode::Exact,
        }
    }
}

/// Splits one config text into `(key, value, line_number)` triples.
/// Full-line and trailing `#` comments are stripped; a key duplicated
/// within the same text is an error (across layers it is an override).
fn parse_key_values(text: &str) -> Result<Vec<(String, String, usize)>> {
    let mut pairs: Vec<(String, String, usize)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::config_at(line_no, format!("expected `key = value`, got `{line}`"))
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() {
            return Err(Error::config_at(line_no, "empty key"));
        }
        if let Some((_, _, prev)) = pairs.iter().find(|(k, _, _)| *k == key) {
            return Err(Error::config_at(
                line_no,
                format!("duplicate key `{key}` (first set on line {prev})"),
            ));
        }
        pairs.push((key, value, line_no));
    }
    Ok(pairs)
}

fn parse_usize(key: &str, value: &str, line: usize) -> Result<usize> {
    value
        .parse()
        .map_err(|_| Error::config_at(line, format!("`{key}` must be a non-negative integer, got `{value}`")))
}

fn parse_u64(key: &str, value: &str, line: usize) -> Result<u64> {
    value
        .parse()
        .map_err(|_| Error::config_at(line, format!("`{key}` must be a non-negative integer, got `{value}`")))
}

fn parse_f64(key: &str, value: &str, line: usize) -> Result<f64> {
    value
        .parse()
        .map_err(|_| Error::config_at(line, format!("`{key}` must be a number, got `{value}`")))
}

fn parse_bool(key: &str, value: &str, line: usize) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::config_at(line, format!("`{key}` must be true or false, got `{value}`"))),
    }
}

fn parse_list<T, F>(value: &str, mut item: F) -> Result<Vec<T>>
where
    F: FnMut(&str) -> Result<T>,
{
    value.split(',').map(|tok| item(tok.trim())).collect()
}

/// Parses one scheme token of the grammar `kind[:iters[:init[:zones]]]`,
/// e.g. `zf`, `neumann:3`, `gs:2`, `gs:3:zone:4`. The zone count defaults
/// to 4 for 64-QAM and 2 otherwise when `zone` is named without a count.
pub fn parse_scheme(token: &str, qam_order: u32) -> Result<SchemeSpec> {
    let mut parts = token.split(':');
    let kind = match parts.next().unwrap_or("") {
        "zf" => SchemeKind::Zf,
        "mf" => SchemeKind::Mf,
        "neumann" => SchemeKind::Neumann,
        "gs" => SchemeKind::Gs,
        other => {
            return Err(Error::config(format!(
                "unknown scheme `{other}`; expected zf, mf, neumann, or gs"
            )))
        }
    };
    let iters = parts.next();
    let init = parts.next();
    let zones = parts.next();
    if let Some(extra) = parts.next() {
        return Err(Error::config(format!("trailing scheme component `{extra}` in `{token}`")));
    }
    match kind {
        SchemeKind::Zf | SchemeKind::Mf => {
            if iters.is_some() {
                return Err(Error::config(format!(
                    "`{}` takes no iteration count (got `{token}`)",
                    kind.as_str()
                )));
            }
            Ok(SchemeSpec::exact(kind))
        }
        SchemeKind::Neumann | SchemeKind::Gs => {
            let iters_text = iters.ok_or_else(|| {
                Error::config(format!("`{}` needs an iteration count, e.g. `{}:2`", kind.as_str(), kind.as_str()))
            })?;
            let iters: usize = iters_text.parse().map_err(|_| {
                Error::config(format!("bad iteration count `{iters_text}` in `{token}`"))
            })?;
            if iters == 0 {
                return Err(Error::config(format!("`{token}`: iteration count must be >= 1")));
            }
            let mut spec = SchemeSpec::iterative(kind, iters);
            match init {
                None => {}
                Some("zero") => {
                    if zones.is_some() {
                        return Err(Error::config(format!(
                            "`{token}`: zero initialization takes no zone count"
                        )));
                    }
                }
                Some("zone") => {
                    if kind != SchemeKind::Gs {
                        return Err(Error::config(format!(
                            "`{token}`: zone initialization requires the gs scheme"
                        )));
                    }
                    spec.init = InitKind::Zone;
                    spec.zones = match zones {
                        Some(zt) => zt.parse().map_err(|_| {
                            Error::config(format!("bad zone count `{zt}` in `{token}`"))
                        })?,
                        None => {
                            if qam_order == 64 {
                                4
                            } else {
                                2
                            }
                        }
                    };
                    if spec.zones < 2 || spec.zones % 2 != 0 {
                        return Err(Error::config(format!(
                            "`{token}`: zone count must be even and >= 2"
                        )));
                    }
                }
                Some(other) => {
                    return Err(Error::config(format!(
                        "`{token}`: unknown initialization `{other}` (zero or zone)"
                    )))
                }
            }
            Ok(spec)
        }
    }
}

/// Parses a single config text into a validated [`SimConfig`].
pub fn parse_config(text: &str) -> Result<SimConfig> {
    parse_config_layers(&[text])
}

/// Parses several config texts, later layers overriding earlier ones key by
/// key, then applies defaults and validates the result.
pub fn parse_config_layers(layers: &[&str]) -> Result<SimConfig> {
    let mut merged: BTreeMap<String, (String, usize)> = BTreeMap::new();
    for layer in layers {
        for (key, value, line) in parse_key_values(layer)? {
            merged.insert(key, (value, line));
        }
    }
    build_config(&merged)
}

fn build_config(pairs: &BTreeMap<String, (String, usize)>) -> Result<SimConfig> {
    let mut cfg = SimConfig::default();

    let (experiment_text, experiment_line) = pairs
        .get("experiment")
        .ok_or_else(|| Error::config("missing required key `experiment`"))?;
    cfg.experiment = Experiment::from_str(experiment_text).ok_or_else(|| {
        Error::config_at(
            *experiment_line,
            format!(
                "unknown experiment `{experiment_text}`; expected one of capacity_vs_snr, \
                 ber_vs_snr, power_vs_n, frobenius_vs_alpha, beta_vs_alpha, mult_count_vs_k"
            ),
        )
    })?;

    // `qam` first: scheme parsing needs it for the default zone count.
    if let Some((value, line)) = pairs.get("qam") {
        cfg.qam_order = parse_usize("qam", value, *line)? as u32;
    }

    let mut snr_seen = false;
    let mut schemes_seen = false;
    for (key, (value, line)) in pairs {
        let line = *line;
        match key.as_str() {
            "experiment" | "qam" => {}
            "n_bs" => cfg.n_bs = parse_usize(key, value, line)?,
            "n_users" => cfg.n_users = parse_usize(key, value, line)?,
            "xi" => cfg.correlation = parse_f64(key, value, line)?,
            "snr_db" => {
                cfg.snr_grid_db = parse_list(value, |t| parse_f64("snr_db", t, line))?;
                snr_seen = true;
            }
            "schemes" => {
                cfg.schemes = parse_list(value, |t| {
                    parse_scheme(t, cfg.qam_order).map_err(|e| match e {
                        Error::Config { message, .. } => Error::config_at(line, message),
                        other => other,
                    })
                })?;
                schemes_seen = true;
            }
            "trials" => cfg.trials = parse_usize(key, value, line)?,
            "seed" => cfg.seed = parse_u64(key, value, line)?,
            "output" => cfg.output_path = Some(PathBuf::from(value)),
            "alpha_grid" => {
                cfg.alpha_grid = parse_list(value, |t| parse_f64("alpha_grid", t, line))?
            }
            "n_bs_grid" => {
                cfg.n_bs_grid = parse_list(value, |t| parse_usize("n_bs_grid", t, line))?
            }
            "n_users_grid" => {
                cfg.n_users_grid = parse_list(value, |t| parse_usize("n_users_grid", t, line))?
            }
            "ber_target_errors" => cfg.ber_target_errors = parse_u64(key, value, line)?,
            "ber_max_trials" => cfg.ber_max_trials = parse_u64(key, value, line)?,
            "division_free" => cfg.division_free = parse_bool(key, value, line)?,
            "beta_mode" => {
                cfg.beta_mode = match value.as_str() {
                    "exact" => BetaMode::Exact,
                    "asymptotic" => BetaMode::Asymptotic,
                    other => {
                        return Err(Error::config_at(
                            line,
                            format!("`beta_mode` must be exact or asymptotic, got `{other}`"),
                        ))
                    }
                }
            }
            other => {
                return Err(Error::config_at(line, format!("unknown key `{other}`")));
            }
        }
    }

    validate(&cfg, snr_seen, schemes_seen)?;
    Ok(cfg)
}

fn validate(cfg: &SimConfig, snr_seen: bool, schemes_seen: bool) -> Result<()> {
    if cfg.n_users == 0 {
        return Err(Error::config("`n_users` must be >= 1"));
    }
    if !(0.0..1.0).contains(&cfg.correlation) {
        return Err(Error::config("`xi` must lie in [0, 1)"));
    }
    if ![4, 16, 64].contains(&cfg.qam_order) {
        return Err(Error::config("`qam` must be 4, 16, or 64"));
    }
    if cfg.trials == 0 {
        return Err(Error::config("`trials` must be >= 1"));
    }

    let needs_snr = matches!(cfg.experiment, Experiment::CapacityVsSnr | Experiment::BerVsSnr);
    let needs_schemes = matches!(
        cfg.experiment,
        Experiment::CapacityVsSnr
            | Experiment::BerVsSnr
            | Experiment::PowerVsN
            | Experiment::MultCountVsK
    );
    if needs_snr && (!snr_seen || cfg.snr_grid_db.is_empty()) {
        return Err(Error::config(format!(
            "experiment `{}` needs a non-empty `snr_db` grid",
            cfg.experiment.as_str()
        )));
    }
    if needs_schemes && (!schemes_seen || cfg.schemes.is_empty()) {
        return Err(Error::config(format!(
            "experiment `{}` needs a non-empty `schemes` list",
            cfg.experiment.as_str()
        )));
    }

    // Zone initialization reads the symbol vector, so the precoder is not
    // linear in `s`: experiments that drive basis vectors through the
    // precoder (capacity, power) cannot use it.
    let zone_forbidden =
        matches!(cfg.experiment, Experiment::CapacityVsSnr | Experiment::PowerVsN);
    if zone_forbidden && cfg.schemes.iter().any(|s| s.init == InitKind::Zone) {
        return Err(Error::config(format!(
            "experiment `{}` drives canonical basis vectors through the precoder, \
             which zone initialization (a symbol-dependent start) does not permit",
            cfg.experiment.as_str()
        )));
    }

    match cfg.experiment {
        Experiment::PowerVsN => {
            if cfg.n_bs_grid.is_empty() {
                return Err(Error::config("`n_bs_grid` must be non-empty"));
            }
            for &n in &cfg.n_bs_grid {
                if n < cfg.n_users {
                    return Err(Error::config(format!(
                        "`n_bs_grid` entry {n} is below n_users = {}",
                        cfg.n_users
                    )));
                }
            }
        }
        Experiment::FrobeniusVsAlpha | Experiment::BetaVsAlpha => {
            if cfg.alpha_grid.is_empty() {
                return Err(Error::config("`alpha_grid` must be non-empty"));
            }
            for &a in &cfg.alpha_grid {
                if !(a >= 1.0) {
                    return Err(Error::config(format!("`alpha_grid` entry {a} must be >= 1")));
                }
                // The large-array scaling degenerates at α = 1 (N = K).
                if cfg.experiment == Experiment::BetaVsAlpha
                    && (a * cfg.n_users as f64).round() as usize <= cfg.n_users
                {
                    return Err(Error::config(format!(
                        "`alpha_grid` entry {a} leaves no excess antennas for the \
                         large-array scaling"
                    )));
                }
            }
        }
        Experiment::MultCountVsK => {
            if cfg.n_users_grid.is_empty() {
                return Err(Error::config("`n_users_grid` must be non-empty"));
            }
            for &k in &cfg.n_users_grid {
                if k == 0 || k > cfg.n_bs {
                    return Err(Error::config(format!(
                        "`n_users_grid` entry {k} must lie in 1..=n_bs ({})",
                        cfg.n_bs
                    )));
                }
            }
        }
        Experiment::CapacityVsSnr | Experiment::BerVsSnr => {
            if cfg.n_bs < cfg.n_users {
                return Err(Error::config(format!(
                    "n_bs = {} must be >= n_users = {}",
                    cfg.n_bs, cfg.n_users
                )));
            }
        }
    }

    if cfg.ber_target_errors == 0 || cfg.ber_max_trials == 0 {
        return Err(Error::config("`ber_target_errors` and `ber_max_trials` must be >= 1"));
    }
    Ok(())
}
