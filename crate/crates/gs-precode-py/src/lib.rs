//! Python bindings for the precoding library.
//!
//! The module mirrors the Rust surface at the granularity a notebook wants:
//! channel/Gram construction, exact and iterative solves, full precoding with
//! its multiplication count, link metrics, QAM mapping, and the config-driven
//! experiment runner. Complex vectors cross the boundary as lists of Python
//! complex numbers; matrices as lists of row lists.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use gs_precode::channel::{correlated_channel, rayleigh_channel, ChannelSpec};
use gs_precode::linalg::{cholesky_solve, frobenius, gram, ComplexMatrix, GramDecomposition};
use gs_precode::modem::{ber_trial, ConstellationSpec, LinkConfig};
use gs_precode::precode::{
    iteration_matrix, run_scheme, BetaMode, IterationKind, PrecodeOptions,
};
use gs_precode::sim::{csv_string, experiment_catalog, parse_config, parse_scheme, run};
use gs_precode::zone::sign_agreement_fraction;
use gs_precode::Error;

fn to_py(err: Error) -> PyErr {
    match err {
        Error::Io(inner) => PyIOError::new_err(inner.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.rows()).map(|r| m.row(r).to_vec()).collect()
}

fn beta_mode_from(label: &str) -> PyResult<BetaMode> {
    match label {
        "exact" => Ok(BetaMode::Exact),
        "asymptotic" => Ok(BetaMode::Asymptotic),
        other => Err(PyValueError::new_err(format!(
            "beta_mode must be 'exact' or 'asymptotic', got '{other}'"
        ))),
    }
}

/// A flat Rayleigh downlink channel (`n_users x n_bs` complex matrix).
#[pyclass]
struct Channel {
    h: ComplexMatrix,
}

#[pymethods]
impl Channel {
    /// Draws an uncorrelated channel from the seeded (seed, trial) stream.
    #[staticmethod]
    #[pyo3(signature = (n_bs, n_users, seed, trial=0))]
    fn rayleigh(n_bs: usize, n_users: usize, seed: u64, trial: u64) -> PyResult<Self> {
        let spec = ChannelSpec::new(n_bs, n_users, 0.0, seed, trial);
        Ok(Channel { h: rayleigh_channel(&spec).map_err(to_py)? })
    }

    /// Draws a transmit-correlated channel (exponential correlation `xi`).
    #[staticmethod]
    #[pyo3(signature = (n_bs, n_users, xi, seed, trial=0))]
    fn correlated(n_bs: usize, n_users: usize, xi: f64, seed: u64, trial: u64) -> PyResult<Self> {
        let spec = ChannelSpec::new(n_bs, n_users, xi, seed, trial);
        Ok(Channel { h: correlated_channel(&spec).map_err(to_py)? })
    }

    /// Wraps an explicit matrix given as a list of row lists.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        Ok(Channel { h: ComplexMatrix::from_rows(&rows).map_err(to_py)? })
    }

    #[getter]
    fn n_bs(&self) -> usize {
        self.h.cols()
    }

    #[getter]
    fn n_users(&self) -> usize {
        self.h.rows()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        matrix_rows(&self.h)
    }

    /// Forms and splits the Gram matrix `W = H H^H`.
    fn gram(&self) -> PyResult<Gram> {
        Ok(Gram { g: gram(&self.h).map_err(to_py)? })
    }

    fn __repr__(&self) -> String {
        format!("Channel(n_bs={}, n_users={})", self.h.cols(), self.h.rows())
    }
}

/// Hermitian positive-definite Gram matrix with its diagonal/lower split.
#[pyclass]
struct Gram {
    g: GramDecomposition,
}

#[pymethods]
impl Gram {
    /// Validates and wraps an explicit Hermitian matrix.
    #[staticmethod]
    fn from_rows(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let m = ComplexMatrix::from_rows(&rows).map_err(to_py)?;
        Ok(Gram { g: GramDecomposition::from_matrix(&m).map_err(to_py)? })
    }

    #[getter]
    fn n_users(&self) -> usize {
        self.g.n_users()
    }

    #[getter]
    fn diagonal(&self) -> Vec<f64> {
        self.g.d.clone()
    }

    fn rows(&self) -> Vec<Vec<Complex64>> {
        matrix_rows(&self.g.w)
    }

    /// Exact solve of `W x = s` via Cholesky factorization.
    fn solve(&self, s: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        cholesky_solve(&self.g.w, &s).map_err(to_py)
    }

    /// Gauss-Seidel sweeps from `init` (zero vector when omitted).
    #[pyo3(signature = (s, iters, init=None))]
    fn gs_solve(
        &self,
        s: Vec<Complex64>,
        iters: usize,
        init: Option<Vec<Complex64>>,
    ) -> PyResult<Vec<Complex64>> {
        let zero = vec![Complex64::new(0.0, 0.0); self.g.n_users()];
        let start = init.unwrap_or(zero);
        gs_precode::precode::gs_solve(&self.g, &s, &start, iters).map_err(to_py)
    }

    /// Truncated Neumann-series solve with `iters` terms.
    fn neumann_solve(&self, s: Vec<Complex64>, iters: usize) -> PyResult<Vec<Complex64>> {
        gs_precode::precode::neumann_solve(&self.g, &s, iters).map_err(to_py)
    }

    /// Iteration matrix rows for `kind` in {"gs", "neumann"}.
    fn iteration_matrix(&self, kind: &str) -> PyResult<Vec<Vec<Complex64>>> {
        let kind = match kind {
            "gs" => IterationKind::GaussSeidel,
            "neumann" => IterationKind::Neumann,
            other => {
                return Err(PyValueError::new_err(format!(
                    "iteration kind must be 'gs' or 'neumann', got '{other}'"
                )))
            }
        };
        Ok(matrix_rows(&iteration_matrix(&self.g, kind).map_err(to_py)?))
    }

    /// Frobenius norm of the requested iteration matrix.
    fn iteration_frobenius(&self, kind: &str) -> PyResult<f64> {
        Ok(frobenius(&ComplexMatrix::from_rows(&self.iteration_matrix(kind)?).map_err(to_py)?))
    }

    /// Exact normalization gain `sqrt(K / tr(W^-1))`.
    fn beta_zf(&self) -> PyResult<f64> {
        gs_precode::precode::beta_zf(&self.g).map_err(to_py)
    }

    /// Matched-filter normalization gain `sqrt(K / tr(W))`.
    fn beta_mf(&self) -> f64 {
        gs_precode::precode::beta_mf(&self.g)
    }

    /// Fraction of real solution components whose sign matches the payload's.
    fn sign_agreement(&self, s: Vec<Complex64>) -> PyResult<f64> {
        sign_agreement_fraction(&self.g, &s).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("Gram(n_users={})", self.g.n_users())
    }
}

/// Precoder output: antenna vector, payload estimate, gain, and the
/// instrumented complex-multiplication count.
#[pyclass]
struct PrecodeResult {
    #[pyo3(get)]
    t: Vec<Complex64>,
    #[pyo3(get)]
    s_hat: Vec<Complex64>,
    #[pyo3(get)]
    beta: f64,
    #[pyo3(get)]
    mults: u64,
}

#[pymethods]
impl PrecodeResult {
    fn __repr__(&self) -> String {
        format!(
            "PrecodeResult(n_bs={}, beta={:.6}, mults={})",
            self.t.len(),
            self.beta,
            self.mults
        )
    }
}

/// Runs one precoding scheme on a payload vector.
///
/// `scheme` uses the config grammar: `zf`, `mf`, `neumann:i`, `gs:i`,
/// `gs:i:zone[:z]`, `gs:i:zero`.
#[pyfunction]
#[pyo3(signature = (channel, scheme, s, division_free=false, beta_mode="exact", qam_order=64))]
fn precode(
    channel: &Channel,
    scheme: &str,
    s: Vec<Complex64>,
    division_free: bool,
    beta_mode: &str,
    qam_order: u32,
) -> PyResult<PrecodeResult> {
    let spec = parse_scheme(scheme, qam_order).map_err(to_py)?;
    let g = gram(&channel.h).map_err(to_py)?;
    let opts = PrecodeOptions {
        division_free,
        beta_mode: beta_mode_from(beta_mode)?,
        qam_order,
    };
    let out = run_scheme(&channel.h, &g, &spec, &s, &opts).map_err(to_py)?;
    Ok(PrecodeResult { t: out.t, s_hat: out.s_hat, beta: out.beta, mults: out.mults })
}

/// Closed-form ceiling for the Gauss-Seidel iteration-matrix Frobenius norm.
#[pyfunction]
fn gs_frobenius_bound(n_bs: usize, n_users: usize) -> f64 {
    gs_precode::bounds::gs_frobenius_bound(n_bs, n_users)
}

/// Large-system normalization gain `sqrt(n_bs - n_users)`.
#[pyfunction]
fn beta_asymptotic(n_bs: usize, n_users: usize) -> PyResult<f64> {
    gs_precode::precode::beta_asymptotic(n_bs, n_users).map_err(to_py)
}

/// Closed-form complex-multiplication count for a zone-started sweep.
#[pyfunction]
fn mult_count_formula(n_bs: usize, n_users: usize, iters: usize, zones: usize) -> PyResult<u64> {
    gs_precode::precode::mult_count_formula(n_bs, n_users, iters, zones).map_err(to_py)
}

/// Per-user SINRs of an effective channel (rows) at forward SNR `rho_f`.
#[pyfunction]
fn sinr(g_eff: Vec<Vec<Complex64>>, rho_f: f64) -> PyResult<Vec<f64>> {
    let m = ComplexMatrix::from_rows(&g_eff).map_err(to_py)?;
    Ok(gs_precode::modem::sinr(&m, rho_f))
}

/// Sum rate `sum log2(1 + sinr_k)` in bps/Hz.
#[pyfunction]
fn sum_rate(sinr_per_user: Vec<f64>) -> f64 {
    gs_precode::modem::sum_rate(&sinr_per_user)
}

/// Large-system sum-rate approximation for the exact solve.
#[pyfunction]
fn zf_rate_approx(n_bs: usize, n_users: usize, rho_f: f64) -> PyResult<f64> {
    gs_precode::modem::zf_rate_approx(n_bs, n_users, rho_f).map_err(to_py)
}

/// Gray-mapped square-QAM modulation of a 0/1 bit list.
#[pyfunction]
fn qam_modulate(bits: Vec<u8>, order: u32) -> PyResult<Vec<Complex64>> {
    let spec = ConstellationSpec::new(order).map_err(to_py)?;
    gs_precode::modem::qam_modulate(&bits, &spec).map_err(to_py)
}

/// Hard-decision demodulation back to the bit list.
#[pyfunction]
fn qam_demodulate(symbols: Vec<Complex64>, order: u32) -> PyResult<Vec<u8>> {
    let spec = ConstellationSpec::new(order).map_err(to_py)?;
    Ok(gs_precode::modem::qam_demodulate(&symbols, &spec))
}

/// One seeded link trial; returns `(bit_errors, bits)`.
#[pyfunction]
#[pyo3(signature = (n_bs, n_users, qam_order, snr_db, scheme, seed, trial=0, xi=0.0, division_free=false, beta_mode="exact"))]
#[allow(clippy::too_many_arguments)]
fn link_trial(
    n_bs: usize,
    n_users: usize,
    qam_order: u32,
    snr_db: f64,
    scheme: &str,
    seed: u64,
    trial: u64,
    xi: f64,
    division_free: bool,
    beta_mode: &str,
) -> PyResult<(u64, u64)> {
    let cfg = LinkConfig {
        n_bs,
        n_users,
        correlation: xi,
        qam_order,
        snr_db,
        scheme: parse_scheme(scheme, qam_order).map_err(to_py)?,
        seed,
        division_free,
        beta_mode: beta_mode_from(beta_mode)?,
    };
    let metrics = ber_trial(&cfg, trial).map_err(to_py)?;
    Ok((metrics.error_count, metrics.bit_count))
}

/// Parses a flat key=value config, runs the experiment, returns the CSV text.
#[pyfunction]
fn run_config(text: &str) -> PyResult<String> {
    let cfg = parse_config(text).map_err(to_py)?;
    let records = run(&cfg).map_err(to_py)?;
    Ok(csv_string(&records))
}

/// Names of the bundled experiment presets.
#[pyfunction]
fn preset_names() -> Vec<&'static str> {
    experiment_catalog().iter().map(|(name, _)| *name).collect()
}

/// Config text of one bundled preset.
#[pyfunction]
fn preset_text(name: &str) -> PyResult<&'static str> {
    gs_precode::sim::preset_text(name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown preset '{name}'")))
}

#[pymodule(name = "gs_precode")]
fn bindings(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Channel>()?;
    m.add_class::<Gram>()?;
    m.add_class::<PrecodeResult>()?;
    m.add_function(wrap_pyfunction!(precode, m)?)?;
    m.add_function(wrap_pyfunction!(gs_frobenius_bound, m)?)?;
    m.add_function(wrap_pyfunction!(beta_asymptotic, m)?)?;
    m.add_function(wrap_pyfunction!(mult_count_formula, m)?)?;
    m.add_function(wrap_pyfunction!(sinr, m)?)?;
    m.add_function(wrap_pyfunction!(sum_rate, m)?)?;
    m.add_function(wrap_pyfunction!(zf_rate_approx, m)?)?;
    m.add_function(wrap_pyfunction!(qam_modulate, m)?)?;
    m.add_function(wrap_pyfunction!(qam_demodulate, m)?)?;
    m.add_function(wrap_pyfunction!(link_trial, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(preset_names, m)?)?;
    m.add_function(wrap_pyfunction!(preset_text, m)?)?;
    Ok(())
}
