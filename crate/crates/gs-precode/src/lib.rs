//! Low-complexity linear precoding for the massive-MIMO downlink.
//!
//! The crate models a base station with `n_bs` antennas serving `n_users`
//! single-antenna users over a flat Rayleigh channel `H` (`n_users x n_bs`).
//! Zero-forcing precoding needs the inverse of the Gram matrix `W = H Hᴴ`;
//! at large array sizes that inversion dominates the per-symbol cost, so this
//! crate implements and cross-validates the cheap alternatives:
//!
//! * exact zero-forcing and matched-filter baselines ([`precode`]),
//! * Gauss-Seidel sweeps on `W ŝ = s` with zero or zone-based initialization
//!   ([`precode`], [`zone`]),
//! * truncated Neumann-series approximation ([`precode`]),
//! * convergence and transmit-power diagnostics for the iteration matrices
//!   ([`bounds`]),
//! * a deterministic Monte-Carlo link simulator with QAM modulation, SINR /
//!   sum-rate and uncoded-BER measurement ([`modem`], [`sim`]) driven by a
//!   flat key=value config or named presets (`simulate` binary).
//!
//! Everything is deterministic given a seed: random streams are counter-based
//! per (seed, trial, purpose), Monte-Carlo reductions run in a fixed order,
//! and CSV output is byte-stable across thread counts.

pub mod bounds;
pub mod channel;
pub mod error;
pub mod linalg;
pub mod modem;
pub mod precode;
pub mod rng;
pub mod sim;
pub mod zone;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ComplexVector, GramDecomposition};
