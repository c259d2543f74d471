//! Deterministic, counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream keyed by
//! `(seed, trial_index, purpose)`. Streams are independent of evaluation
//! order and thread schedule: trial 17's channel is the same whether trials
//! run serially, in parallel, or in a different order. The `purpose` lane
//! separates channel entries, payload bits, and receiver noise so that, for
//! example, the noise sequence of a trial is shared across SNR points
//! (common random numbers).

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Purpose lane for channel matrix entries.
pub const PURPOSE_CHANNEL: u64 = 0;
/// Purpose lane for payload bits.
pub const PURPOSE_BITS: u64 = 1;
/// Purpose lane for receiver noise.
pub const PURPOSE_NOISE: u64 = 2;
/// Purpose lane for auxiliary draws (probe vectors, diagnostics).
pub const PURPOSE_AUX: u64 = 3;

/// Number of purpose lanes reserved per trial.
const PURPOSE_SPACE: u64 = 8;

/// Returns the ChaCha stream for `(seed, trial_index, purpose)`.
///
/// The generator seed depends only on `seed`; the trial and purpose select
/// one of ChaCha's 2^64 independent streams, so construction order is
/// irrelevant.
pub fn stream_rng(seed: u64, trial_index: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index.wrapping_mul(PURPOSE_SPACE).wrapping_add(purpose));
    rng
}

/// Draws one standard circularly-symmetric complex Gaussian CN(0, 1):
/// real and imaginary parts are independent N(0, 1/2).
///
/// Uses an explicit Box-Muller transform on two uniforms so the byte stream
/// consumed per draw is fixed and platform-stable (no rejection sampling).
pub fn standard_complex<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    // u1 is mapped into (0, 1] so the logarithm is finite.
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    // |z|^2 ~ Exp(1) gives E|z|^2 = 1, i.e. variance 1/2 per component.
    let radius = (-u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    Complex64::new(radius * theta.cos(), radius * theta.sin())
}

/// Draws one standard real Gaussian N(0, 1) via Box-Muller.
pub fn standard_real<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}
