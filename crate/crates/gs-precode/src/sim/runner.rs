//! Experiment execution and CSV output.
//!
//! [`run`] dispatches a validated [`SimConfig`] to one of six experiment
//! drivers and returns a flat list of [`MetricRecord`]s. Every driver follows
//! the same determinism discipline: trials are generated with
//! counter-addressed RNG streams, parallel work is collected in trial order
//! (`into_par_iter().map(..).collect()` preserves indices), and reductions are
//! performed sequentially afterwards. The produced records — and therefore the
//! CSV bytes — are identical across runs and across thread-pool sizes.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use crate::bounds::frobenius_sweep;
use crate::channel::{
    correlated_channel_with_root, correlation_root, rayleigh_channel, ChannelSpec,
};
use crate::error::Result;
use crate::linalg::{gram, vector_norm, ComplexMatrix};
use crate::modem::{
    ber_trial_with_root, qam_modulate, sinr, sum_rate, ConstellationSpec, LinkConfig, LinkMetrics,
};
use crate::precode::{
    beta_asymptotic, beta_zf, mult_count_formula, run_scheme, InitKind, PrecodeOptions,
    SchemeKind, SchemeSpec,
};
use crate::rng::{stream_rng, PURPOSE_BITS};

use super::config::{Experiment, SimConfig};

/// Column header shared by every experiment's CSV output.
pub const CSV_HEADER: &str =
    "experiment,scheme,iters,init,n_bs,n_users,xi,snr_db,metric_name,value,trials,seed";

/// Number of link trials dispatched per parallel batch in the error-rate
/// experiment. Batching keeps the stop-at-target-errors check cheap while
/// preserving trial-order determinism within each batch.
const BER_BATCH: u64 = 512;

/// One measured value, tagged with enough context to stand alone in a CSV row.
///
/// Fields that do not apply to a given experiment hold sentinel values:
/// `scheme`/`init` are `"-"`, `iters` is `0`, and `snr_db` is `0` for
/// experiments without an SNR axis.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub experiment: Experiment,
    pub scheme: String,
    pub iters: usize,
    pub init: String,
    pub n_bs: usize,
    pub n_users: usize,
    pub xi: f64,
    pub snr_db: f64,
    pub metric_name: String,
    pub value: f64,
    pub trials: usize,
    pub seed: u64,
}

impl MetricRecord {
    fn csv_line(&self) -> String {
        let mut line = String::with_capacity(96);
        write!(
            line,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment.as_str(),
            self.scheme,
            self.iters,
            self.init,
            self.n_bs,
            self.n_users,
            self.xi,
            self.snr_db,
            self.metric_name,
            self.value,
            self.trials,
            self.seed
        )
        .expect("writing to a String cannot fail");
        line
    }
}

/// Renders records as a CSV document (header plus one line per record,
/// `\n` separators, trailing newline).
pub fn csv_string(records: &[MetricRecord]) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for record in records {
        out.push_str(&record.csv_line());
        out.push('\n');
    }
    out
}

/// Writes records to `path` in the format produced by [`csv_string`].
pub fn write_csv(records: &[MetricRecord], path: &Path) -> Result<()> {
    std::fs::write(path, csv_string(records))?;
    Ok(())
}

/// Runs the experiment described by a validated configuration.
///
/// Records are emitted in a fixed order (outer loop over schemes where the
/// experiment has them, then over the experiment's sweep axis), so equal
/// configurations always produce byte-identical CSV output.
pub fn run(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    match cfg.experiment {
        Experiment::CapacityVsSnr => run_capacity(cfg),
        Experiment::BerVsSnr => run_ber(cfg),
        Experiment::PowerVsN => run_power(cfg),
        Experiment::FrobeniusVsAlpha => run_frobenius(cfg),
        Experiment::BetaVsAlpha => run_beta(cfg),
        Experiment::MultCountVsK => run_mult(cfg),
    }
}

/// Scheme-dependent record fields: (scheme name, iteration count, start label).
fn scheme_fields(scheme: &SchemeSpec) -> (String, usize, String) {
    let init = match scheme.kind {
        SchemeKind::Zf | SchemeKind::Mf => "-".to_string(),
        SchemeKind::Neumann => InitKind::Zero.as_str().to_string(),
        SchemeKind::Gs => scheme.init.as_str().to_string(),
    };
    (scheme.kind.as_str().to_string(), scheme.iters, init)
}

fn base_record(cfg: &SimConfig, metric_name: &str, value: f64) -> MetricRecord {
    MetricRecord {
        experiment: cfg.experiment,
        scheme: "-".to_string(),
        iters: 0,
        init: "-".to_string(),
        n_bs: cfg.n_bs,
        n_users: cfg.n_users,
        xi: cfg.correlation,
        snr_db: 0.0,
        metric_name: metric_name.to_string(),
        value,
        trials: cfg.trials,
        seed: cfg.seed,
    }
}

fn precode_options(cfg: &SimConfig) -> PrecodeOptions {
    PrecodeOptions {
        division_free: cfg.division_free,
        beta_mode: cfg.beta_mode,
        qam_order: cfg.qam_order,
    }
}

/// Shared-root channel draw: the correlation square root is computed once per
/// antenna count and reused across trials.
fn draw_channel(
    cfg: &SimConfig,
    n_bs: usize,
    n_users: usize,
    root: Option<&ComplexMatrix>,
    trial: u64,
) -> Result<ComplexMatrix> {
    let spec = ChannelSpec::new(n_bs, n_users, cfg.correlation, cfg.seed, trial);
    match root {
        Some(r) => correlated_channel_with_root(&spec, r),
        None => rayleigh_channel(&spec),
    }
}

fn correlation_root_for(cfg: &SimConfig, n_bs: usize) -> Result<Option<ComplexMatrix>> {
    if cfg.correlation > 0.0 {
        Ok(Some(correlation_root(n_bs, cfg.correlation)?))
    } else {
        Ok(None)
    }
}

/// Ergodic sum rate versus SNR.
///
/// For each trial the effective user-to-user channel of every scheme is
/// measured by driving the precoder with unit basis vectors: with payload
/// estimate `x_j` for basis input `e_j`, the effective channel column is
/// `beta * W * x_j`. Per-user SINRs and the sum rate then follow for each SNR
/// point, and the mean over trials is reported per (scheme, SNR) pair.
fn run_capacity(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let k = cfg.n_users;
    let root = correlation_root_for(cfg, cfg.n_bs)?;
    let opts = precode_options(cfg);
    let rhos: Vec<f64> = cfg
        .snr_grid_db
        .iter()
        .map(|&db| 10f64.powf(db / 10.0))
        .collect();

    // per_trial[t][scheme_idx][snr_idx] = sum rate
    let per_trial: Vec<Vec<Vec<f64>>> = (0..cfg.trials as u64)
        .into_par_iter()
        .map(|trial| -> Result<Vec<Vec<f64>>> {
            let h = draw_channel(cfg, cfg.n_bs, k, root.as_ref(), trial)?;
            let g = gram(&h)?;
            let mut by_scheme = Vec::with_capacity(cfg.schemes.len());
            for scheme in &cfg.schemes {
                let mut g_eff = ComplexMatrix::zeros(k, k);
                for j in 0..k {
                    let mut basis = vec![Complex64::new(0.0, 0.0); k];
                    basis[j] = Complex64::new(1.0, 0.0);
                    let out = run_scheme(&h, &g, scheme, &basis, &opts)?;
                    let column = g.w.matvec(&out.s_hat)?;
                    for i in 0..k {
                        g_eff.set(i, j, column[i] * out.beta);
                    }
                }
                by_scheme.push(
                    rhos.iter()
                        .map(|&rho| sum_rate(&sinr(&g_eff, rho)))
                        .collect::<Vec<f64>>(),
                );
            }
            Ok(by_scheme)
        })
        .collect::<Result<_>>()?;

    let mut records = Vec::with_capacity(cfg.schemes.len() * cfg.snr_grid_db.len());
    for (si, scheme) in cfg.schemes.iter().enumerate() {
        let (name, iters, init) = scheme_fields(scheme);
        for (pi, &snr_db) in cfg.snr_grid_db.iter().enumerate() {
            let mean = per_trial.iter().map(|t| t[si][pi]).sum::<f64>() / cfg.trials as f64;
            let mut rec = base_record(cfg, "sum_rate_bps_hz", mean);
            rec.scheme = name.clone();
            rec.iters = iters;
            rec.init = init.clone();
            rec.snr_db = snr_db;
            records.push(rec);
        }
    }
    Ok(records)
}

/// Uncoded bit error rate versus SNR.
///
/// Trials for one (scheme, SNR) point run in batches until either the error
/// target or the trial cap is reached; all SNR points of a scheme share trial
/// indices, hence channel/payload/noise realizations.
fn run_ber(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let root = correlation_root_for(cfg, cfg.n_bs)?;
    let mut records = Vec::new();
    for scheme in &cfg.schemes {
        let (name, iters, init) = scheme_fields(scheme);
        for &snr_db in &cfg.snr_grid_db {
            let link = LinkConfig {
                n_bs: cfg.n_bs,
                n_users: cfg.n_users,
                correlation: cfg.correlation,
                qam_order: cfg.qam_order,
                snr_db,
                scheme: *scheme,
                seed: cfg.seed,
                division_free: cfg.division_free,
                beta_mode: cfg.beta_mode,
            };
            let mut errors = 0u64;
            let mut bits = 0u64;
            let mut executed = 0u64;
            while executed < cfg.ber_max_trials as u64 && errors < cfg.ber_target_errors as u64 {
                let batch = BER_BATCH.min(cfg.ber_max_trials as u64 - executed);
                let results: Vec<LinkMetrics> = (executed..executed + batch)
                    .into_par_iter()
                    .map(|trial| ber_trial_with_root(&link, root.as_ref(), trial))
                    .collect::<Result<_>>()?;
                for metrics in &results {
                    errors += metrics.error_count;
                    bits += metrics.bit_count;
                }
                executed += batch;
            }
            let ber = if bits == 0 { 0.0 } else { errors as f64 / bits as f64 };
            for (metric, value) in [
                ("ber", ber),
                ("bit_errors", errors as f64),
                ("bits", bits as f64),
            ] {
                let mut rec = base_record(cfg, metric, value);
                rec.scheme = name.clone();
                rec.iters = iters;
                rec.init = init.clone();
                rec.snr_db = snr_db;
                rec.trials = executed as usize;
                records.push(rec);
            }
        }
    }
    Ok(records)
}

/// Mean transmitted power versus antenna count.
///
/// Power is measured as the trace of the transmit covariance under unit basis
/// inputs: `sum_j ||p(e_j)||^2`. An exactly normalized precoder yields the
/// user count; approximate payload solutions fall short of it.
fn run_power(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let k = cfg.n_users;
    let opts = precode_options(cfg);
    let mut records = Vec::new();
    for scheme in &cfg.schemes {
        let (name, iters, init) = scheme_fields(scheme);
        for &n_bs in &cfg.n_bs_grid {
            let root = correlation_root_for(cfg, n_bs)?;
            let traces: Vec<f64> = (0..cfg.trials as u64)
                .into_par_iter()
                .map(|trial| -> Result<f64> {
                    let h = draw_channel(cfg, n_bs, k, root.as_ref(), trial)?;
                    let g = gram(&h)?;
                    let mut trace = 0.0;
                    for j in 0..k {
                        let mut basis = vec![Complex64::new(0.0, 0.0); k];
                        basis[j] = Complex64::new(1.0, 0.0);
                        let out = run_scheme(&h, &g, scheme, &basis, &opts)?;
                        let norm = vector_norm(&out.t);
                        trace += norm * norm;
                    }
                    Ok(trace)
                })
                .collect::<Result<_>>()?;
            let mean = traces.iter().sum::<f64>() / cfg.trials as f64;
            let mut rec = base_record(cfg, "tx_power_trace", mean);
            rec.scheme = name.clone();
            rec.iters = iters;
            rec.init = init.clone();
            rec.n_bs = n_bs;
            records.push(rec);
        }
    }
    Ok(records)
}

/// Mean iteration-matrix Frobenius norm versus the antenna/user ratio,
/// alongside the closed-form ceiling for that ratio.
fn run_frobenius(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let points = frobenius_sweep(cfg.n_users, &cfg.alpha_grid, cfg.trials, cfg.seed)?;
    let mut records = Vec::with_capacity(points.len() * 2);
    for point in &points {
        for (metric, value) in [
            ("bgs_frobenius_mean", point.mean_frobenius),
            ("frobenius_bound", point.bound),
        ] {
            let mut rec = base_record(cfg, metric, value);
            rec.n_bs = point.n_bs;
            records.push(rec);
        }
    }
    Ok(records)
}

/// Mean exact normalization gain versus the antenna/user ratio, alongside the
/// large-system approximation `sqrt(n_bs - n_users)`.
fn run_beta(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let k = cfg.n_users;
    let mut records = Vec::with_capacity(cfg.alpha_grid.len() * 2);
    for &alpha in &cfg.alpha_grid {
        let n_bs = (alpha * k as f64).round() as usize;
        let root = correlation_root_for(cfg, n_bs)?;
        let betas: Vec<f64> = (0..cfg.trials as u64)
            .into_par_iter()
            .map(|trial| -> Result<f64> {
                let h = draw_channel(cfg, n_bs, k, root.as_ref(), trial)?;
                let g = gram(&h)?;
                beta_zf(&g)
            })
            .collect::<Result<_>>()?;
        let mean = betas.iter().sum::<f64>() / cfg.trials as f64;
        for (metric, value) in [
            ("beta_zf_mean", mean),
            ("beta_asymptotic", beta_asymptotic(n_bs, k)?),
        ] {
            let mut rec = base_record(cfg, metric, value);
            rec.n_bs = n_bs;
            records.push(rec);
        }
    }
    Ok(records)
}

/// Instrumented complex-multiplication counts versus user count, with the
/// closed-form prediction emitted alongside for the sweep schemes.
fn run_mult(cfg: &SimConfig) -> Result<Vec<MetricRecord>> {
    let spec = ConstellationSpec::new(cfg.qam_order)?;
    let opts = precode_options(cfg);
    let mut records = Vec::new();
    for scheme in &cfg.schemes {
        let (name, iters, init) = scheme_fields(scheme);
        for &k in &cfg.n_users_grid {
            let root = correlation_root_for(cfg, cfg.n_bs)?;
            let h = draw_channel(cfg, cfg.n_bs, k, root.as_ref(), 0)?;
            let g = gram(&h)?;
            let mut bits_rng = stream_rng(cfg.seed, 0, PURPOSE_BITS);
            let bits: Vec<u8> = (0..k * spec.bits_per_symbol())
                .map(|_| bits_rng.gen::<bool>() as u8)
                .collect();
            let mut s = qam_modulate(&bits, &spec)?;
            let unit_scale = 1.0 / (k as f64).sqrt();
            for value in &mut s {
                *value *= unit_scale;
            }
            let out = run_scheme(&h, &g, scheme, &s, &opts)?;
            let mut rec = base_record(cfg, "complex_mults", out.mults as f64);
            rec.scheme = name.clone();
            rec.iters = iters;
            rec.init = init.clone();
            rec.n_users = k;
            rec.trials = 1;
            records.push(rec);
            if scheme.kind == SchemeKind::Gs {
                let zones = match scheme.init {
                    InitKind::Zone => scheme.zones,
                    InitKind::Zero => 2,
                };
                let formula = mult_count_formula(cfg.n_bs, k, scheme.iters, zones)?;
                let mut rec = base_record(cfg, "complex_mults_formula", formula as f64);
                rec.scheme = name.clone();
                rec.iters = iters;
                rec.init = init.clone();
                rec.n_users = k;
                rec.trials = 1;
                records.push(rec);
            }
        }
    }
    Ok(records)
}
