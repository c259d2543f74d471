//! Gray-mapped QAM, the downlink link equation, and link-quality metrics.
//!
//! Conventions: symbol vectors carry unit average energy per user divided by
//! `√K` (so `E‖s‖² = 1`); the received sample of user `k` is
//! `y_k = √ρ_f (H t)_k + n_k` with `n_k ~ CN(0,1)`; the receiver divides by
//! the known average gain `√(ρ_f/K)·β` before hard-deciding bits. SINR uses
//! the row convention: the effective channel `G = H·P` couples symbol `j`
//! into user `k` through `G[k][j]`.

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{correlated_channel_with_root, rayleigh_channel, ChannelSpec};
use crate::error::{Error, Result};
use crate::linalg::{gram, ComplexMatrix, ComplexVector};
use crate::precode::{run_scheme, BetaMode, PrecodeOptions, SchemeSpec};
use crate::rng::{standard_complex, stream_rng, PURPOSE_BITS, PURPOSE_NOISE};

/// Square QAM constellation with per-axis Gray labeling and unit average
/// energy.
#[derive(Debug, Clone)]
pub struct ConstellationSpec {
    order: u32,
    /// Per-axis amplitude step is `2·scale`; `scale = 1/√norm` with
    /// `norm = 2(|Q|²−1)/3`.
    pub scale: f64,
    /// Constellation points indexed by the packed bit label (I bits high,
    /// Q bits low, MSB first).
    gray_map: Vec<Complex64>,
    levels: u32,
    axis_bits: usize,
}

/// Decodes a Gray label into a level index (prefix-XOR).
fn gray_decode(mut g: u32) -> u32 {
    g ^= g >> 1;
    g ^= g >> 2;
    g ^= g >> 4;
    g
}

/// Encodes a level index as its Gray label.
fn gray_encode(l: u32) -> u32 {
    l ^ (l >> 1)
}

impl ConstellationSpec {
    /// Builds the order-4, -16, or -64 constellation.
    pub fn new(order: u32) -> Result<Self> {
        let levels: u32 = match order {
            4 => 2,
            16 => 4,
            64 => 8,
            other => {
                return Err(Error::invalid(format!(
                    "unsupported QAM order {other}; expected 4, 16, or 64"
                )))
            }
        };
        let axis_bits = levels.trailing_zeros() as usize;
        let norm = (2 * (levels * levels - 1)) as f64 / 3.0;
        let scale = 1.0 / norm.sqrt();
        let mut gray_map = Vec::with_capacity(order as usize);
        for label in 0..order {
            let gi = label >> axis_bits;
            let gq = label & (levels - 1);
            let ai = 2.0 * gray_decode(gi) as f64 - (levels - 1) as f64;
            let aq = 2.0 * gray_decode(gq) as f64 - (levels - 1) as f64;
            gray_map.push(Complex64::new(ai * scale, aq * scale));
        }
        Ok(ConstellationSpec { order, scale, gray_map, levels, axis_bits })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// Bits per symbol (`log2(order)`).
    pub fn bits_per_symbol(&self) -> usize {
        2 * self.axis_bits
    }

    /// Per-axis level count `|Q|`.
    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Points indexed by packed bit label.
    pub fn points(&self) -> &[Complex64] {
        &self.gray_map
    }
}

/// Maps a 0/1 bit slice to Gray-labeled unit-energy QAM symbols. The bit
/// count must be a multiple of `bits_per_symbol`; per symbol, the first half
/// of the bits selects the in-phase level, the second half the quadrature
/// level, MSB first.
pub fn qam_modulate(bits: &[u8], spec: &ConstellationSpec) -> Result<ComplexVector> {
    let bps = spec.bits_per_symbol();
    if bits.len() % bps != 0 {
        return Err(Error::invalid(format!(
            "bit count {} is not a multiple of {} bits per symbol",
            bits.len(),
            bps
        )));
    }
    if let Some(bad) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::invalid(format!("bits must be 0 or 1, got {bad}")));
    }
    Ok(bits
        .chunks_exact(bps)
        .map(|chunk| {
            let mut label = 0u32;
            for &b in chunk {
                label = (label << 1) | b as u32;
            }
            spec.gray_map[label as usize]
        })
        .collect())
}

/// Hard-decides symbols back to bits by nearest constellation point
/// (independent per axis; a tie between two levels resolves toward the
/// lower-amplitude level).
pub fn qam_demodulate(symbols: &[Complex64], spec: &ConstellationSpec) -> Vec<u8> {
    let levels = spec.levels;
    let axis_bits = spec.axis_bits;
    let decide_axis = |x: f64| -> u32 {
        let t = (x / spec.scale + (levels - 1) as f64) / 2.0;
        let idx = (t - 0.5).ceil();
        let idx = idx.clamp(0.0, (levels - 1) as f64) as u32;
        gray_encode(idx)
    };
    let mut bits = Vec::with_capacity(symbols.len() * spec.bits_per_symbol());
    for z in symbols {
        let gi = decide_axis(z.re);
        let gq = decide_axis(z.im);
        for shift in (0..axis_bits).rev() {
            bits.push(((gi >> shift) & 1) as u8);
        }
        for shift in (0..axis_bits).rev() {
            bits.push(((gq >> shift) & 1) as u8);
        }
    }
    bits
}

/// Link-quality metrics bag shared by the capacity and BER experiments;
/// constructors fill the relevant half and zero the rest.
#[derive(Debug, Clone, Default)]
pub struct LinkMetrics {
    pub sinr_per_user: Vec<f64>,
    pub sum_rate: f64,
    pub ber: f64,
    pub bit_count: u64,
    pub error_count: u64,
}

impl LinkMetrics {
    pub fn from_sinr(sinr_per_user: Vec<f64>) -> Self {
        let sum_rate = sum_rate(&sinr_per_user);
        LinkMetrics { sinr_per_user, sum_rate, ..Default::default() }
    }

    pub fn from_counts(error_count: u64, bit_count: u64) -> Self {
        let ber = if bit_count == 0 { 0.0 } else { error_count as f64 / bit_count as f64 };
        LinkMetrics { ber, bit_count, error_count, ..Default::default() }
    }
}

/// Materializes the effective channel `G = H · P` of a (linear) precoder by
/// driving it with the `K` canonical basis vectors.
pub fn equivalent_channel<F>(h: &ComplexMatrix, mut precoder: F) -> Result<ComplexMatrix>
where
    F: FnMut(&[Complex64]) -> Result<ComplexVector>,
{
    let k = h.rows();
    let mut g_eff = ComplexMatrix::zeros(k, k);
    let mut e = vec![Complex64::new(0.0, 0.0); k];
    for j in 0..k {
        e[j] = Complex64::new(1.0, 0.0);
        let t = precoder(&e)?;
        e[j] = Complex64::new(0.0, 0.0);
        let col = h.matvec(&t)?;
        for (i, &v) in col.iter().enumerate() {
            g_eff.set(i, j, v);
        }
    }
    Ok(g_eff)
}

/// Per-user SINR of an effective channel `G` at total transmit SNR `ρ_f`:
/// `γ_k = (ρ_f/K)|G[k][k]|² / ((ρ_f/K)·Σ_{j≠k}|G[k][j]|² + 1)`.
pub fn sinr(g_eff: &ComplexMatrix, rho_f: f64) -> Vec<f64> {
    let k = g_eff.rows();
    let per_symbol = rho_f / k as f64;
    (0..k)
        .map(|i| {
            let row = g_eff.row(i);
            let signal = row[i].norm_sqr();
            let interference: f64 =
                row.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, z)| z.norm_sqr()).sum();
            per_symbol * signal / (per_symbol * interference + 1.0)
        })
        .collect()
}

/// Sum rate `Σ log2(1 + γ_k)` in bits/s/Hz.
pub fn sum_rate(sinr_per_user: &[f64]) -> f64 {
    sinr_per_user.iter().map(|&g| (1.0 + g).log2()).sum()
}

/// Large-array zero-forcing sum-rate approximation
/// `K·log2(1 + ρ_f(α−1))`, `α = N/K`. Needs `n_bs > n_users`.
pub fn zf_rate_approx(n_bs: usize, n_users: usize, rho_f: f64) -> Result<f64> {
    if n_bs <= n_users || n_users == 0 {
        return Err(Error::invalid("rate approximation needs n_bs > n_users >= 1"));
    }
    let alpha = n_bs as f64 / n_users as f64;
    Ok(n_users as f64 * (1.0 + rho_f * (alpha - 1.0)).log2())
}

/// One downlink channel use: `y = √ρ_f · H t + n` with fresh CN(0,1) noise
/// drawn from `rng`.
pub fn transmit<R: Rng + ?Sized>(
    h: &ComplexMatrix,
    t: &[Complex64],
    rho_f: f64,
    rng: &mut R,
) -> Result<ComplexVector> {
    if rho_f < 0.0 {
        return Err(Error::invalid("transmit power must be non-negative"));
    }
    let mut y = h.matvec(t)?;
    let root = rho_f.sqrt();
    for e in &mut y {
        *e = *e * root + standard_complex(rng);
    }
    Ok(y)
}

/// Full configuration of one BER link.
#[derive(Debug, Clone, Copy)]
pub struct LinkConfig {
    pub n_bs: usize,
    pub n_users: usize,
    /// Base-station-side correlation magnitude in `[0, 1)`.
    pub correlation: f64,
    pub qam_order: u32,
    pub snr_db: f64,
    pub scheme: SchemeSpec,
    pub seed: u64,
    pub division_free: bool,
    pub beta_mode: BetaMode,
}

impl LinkConfig {
    pub fn new(n_bs: usize, n_users: usize, qam_order: u32, snr_db: f64, scheme: SchemeSpec, seed: u64) -> Self {
        LinkConfig {
            n_bs,
            n_users,
            correlation: 0.0,
            qam_order,
            snr_db,
            scheme,
            seed,
            division_free: false,
            beta_mode: BetaMode::Exact,
        }
    }
}

/// Runs one Monte-Carlo link trial end to end and returns the bit counts:
/// draw channel and payload, precode, transmit, normalize by the average
/// gain `√(ρ_f/K)·β`, hard-decide, and count bit errors. The channel,
/// payload, and noise streams are keyed by `(seed, trial_index, purpose)`,
/// so the noise of a trial is shared across SNR points.
pub fn ber_trial(cfg: &LinkConfig, trial_index: u64) -> Result<LinkMetrics> {
    let root = if cfg.correlation > 0.0 {
        Some(crate::channel::correlation_root(cfg.n_bs, cfg.correlation)?)
    } else {
        None
    };
    ber_trial_with_root(cfg, root.as_ref(), trial_index)
}

/// [`ber_trial`] with an optional precomputed correlation root (hot loops
/// reuse one root across trials).
pub fn ber_trial_with_root(
    cfg: &LinkConfig,
    root: Option<&ComplexMatrix>,
    trial_index: u64,
) -> Result<LinkMetrics> {
    if cfg.n_bs < cfg.n_users || cfg.n_users == 0 {
        return Err(Error::invalid("link needs n_bs >= n_users >= 1"));
    }
    let constellation = ConstellationSpec::new(cfg.qam_order)?;
    let spec = ChannelSpec::new(cfg.n_bs, cfg.n_users, cfg.correlation, cfg.seed, trial_index);
    let h = match (cfg.correlation > 0.0, root) {
        (true, Some(r)) => correlated_channel_with_root(&spec, r)?,
        (true, None) => crate::channel::correlated_channel(&spec)?,
        (false, _) => rayleigh_channel(&spec)?,
    };
    let g = gram(&h)?;

    let k = cfg.n_users;
    let bps = constellation.bits_per_symbol();
    let mut bits_rng = stream_rng(cfg.seed, trial_index, PURPOSE_BITS);
    let bits: Vec<u8> = (0..k * bps).map(|_| bits_rng.gen::<bool>() as u8).collect();
    let symbols = qam_modulate(&bits, &constellation)?;
    let unit_scale = 1.0 / (k as f64).sqrt();
    let s: ComplexVector = symbols.iter().map(|&q| q * unit_scale).collect();

    let opts = PrecodeOptions {
        division_free: cfg.division_free,
        beta_mode: cfg.beta_mode,
        qam_order: cfg.qam_order,
    };
    let out = run_scheme(&h, &g, &cfg.scheme, &s, &opts)?;

    let rho_f = 10f64.powf(cfg.snr_db / 10.0);
    let mut noise_rng = stream_rng(cfg.seed, trial_index, PURPOSE_NOISE);
    let y = transmit(&h, &out.t, rho_f, &mut noise_rng)?;

    let gain = (rho_f / k as f64).sqrt() * out.beta;
    let estimates: ComplexVector = y.iter().map(|&v| v / gain).collect();
    let decided = qam_demodulate(&estimates, &constellation);

    let errors = bits.iter().zip(&decided).filter(|&(&a, &b)| a != b).count() as u64;
    Ok(LinkMetrics::from_counts(errors, bits.len() as u64))
}
