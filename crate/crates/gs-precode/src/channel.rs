//! Rayleigh channel generation, optionally correlated across the base-station
//! array.
//!
//! A channel realization is `n_users x n_bs` with CN(0, 1) entries; antenna
//! correlation follows the exponential model `R[m][n] = xi^|m-n|` applied on
//! the base-station side only (users are spatially separated). Realizations
//! are keyed by `(seed, trial_index)` and are schedule-independent.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{cholesky_factor, ComplexMatrix};
use crate::rng::{standard_complex, stream_rng, PURPOSE_CHANNEL};

/// Parameters of one channel realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    /// Base-station antenna count `N`.
    pub n_bs: usize,
    /// Single-antenna user count `K`.
    pub n_users: usize,
    /// Adjacent-antenna correlation magnitude `xi` in `[0, 1)`.
    pub correlation: f64,
    /// Master seed shared by a whole experiment.
    pub seed: u64,
    /// Monte-Carlo trial index; selects an independent stream.
    pub trial_index: u64,
}

impl ChannelSpec {
    pub fn new(n_bs: usize, n_users: usize, correlation: f64, seed: u64, trial_index: u64) -> Self {
        ChannelSpec { n_bs, n_users, correlation, seed, trial_index }
    }

    fn validate(&self) -> Result<()> {
        if self.n_bs == 0 || self.n_users == 0 {
            return Err(Error::invalid("channel needs n_bs >= 1 and n_users >= 1"));
        }
        if !(0.0..1.0).contains(&self.correlation) {
            return Err(Error::invalid(format!(
                "correlation must lie in [0, 1), got {}",
                self.correlation
            )));
        }
        Ok(())
    }
}

/// Draws an i.i.d. Rayleigh channel (`n_users x n_bs`, CN(0,1) entries) for
/// `(seed, trial_index)`. The `correlation` field is ignored here; use
/// [`correlated_channel`] to apply it.
///
/// # Examples
/// ```
/// use gs_precode::channel::{rayleigh_channel, ChannelSpec};
/// let spec = ChannelSpec::new(32, 4, 0.0, 7, 0);
/// let h = rayleigh_channel(&spec).unwrap();
/// assert_eq!((h.rows(), h.cols()), (4, 32));
/// assert_eq!(h, rayleigh_channel(&spec).unwrap());
/// ```
pub fn rayleigh_channel(spec: &ChannelSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    let mut rng = stream_rng(spec.seed, spec.trial_index, PURPOSE_CHANNEL);
    let mut h = ComplexMatrix::zeros(spec.n_users, spec.n_bs);
    for r in 0..spec.n_users {
        for e in h.row_mut(r) {
            *e = standard_complex(&mut rng);
        }
    }
    Ok(h)
}

/// Lower Cholesky factor of the exponential correlation matrix
/// `R[m][n] = xi^|m-n|` of order `n`. Requires `xi` in `[0, 1)`; the entries
/// are real (stored as complex with zero imaginary part).
pub fn correlation_root(n: usize, xi: f64) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::invalid("correlation root needs n >= 1"));
    }
    if !(0.0..1.0).contains(&xi) {
        return Err(Error::invalid(format!("correlation must lie in [0, 1), got {xi}")));
    }
    let mut r = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            r.set(i, j, Complex64::new(xi.powi((i as i32 - j as i32).abs()), 0.0));
        }
    }
    Ok(cholesky_factor(&r)?.l)
}

/// Draws a base-station-correlated channel `H = H_iid * L` where `L` is the
/// lower Cholesky root of the exponential correlation matrix. With
/// `correlation == 0` this returns exactly the i.i.d. realization, bit for
/// bit.
pub fn correlated_channel(spec: &ChannelSpec) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.correlation == 0.0 {
        return rayleigh_channel(spec);
    }
    let root = correlation_root(spec.n_bs, spec.correlation)?;
    correlated_channel_with_root(spec, &root)
}

/// Same as [`correlated_channel`] with a precomputed correlation root, for
/// hot loops that reuse one root across many trials.
pub fn correlated_channel_with_root(
    spec: &ChannelSpec,
    root: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    spec.validate()?;
    if root.rows() != spec.n_bs || root.cols() != spec.n_bs {
        return Err(Error::invalid("correlation root order must equal n_bs"));
    }
    let iid = rayleigh_channel(spec)?;
    if spec.correlation == 0.0 {
        return Ok(iid);
    }
    let n = spec.n_bs;
    let mut h = ComplexMatrix::zeros(spec.n_users, n);
    for r in 0..spec.n_users {
        let src = iid.row(r);
        let dst = h.row_mut(r);
        // L is lower triangular: column j of the output only sees rows a >= j.
        for (a, &s) in src.iter().enumerate() {
            let lrow = root.row(a);
            for (d, &l) in dst.iter_mut().zip(&lrow[..=a]) {
                *d += s * l;
            }
        }
    }
    Ok(h)
}
