//! Downlink precoders: exact zero-forcing, matched filter, Gauss-Seidel
//! sweeps, and the truncated Neumann series.
//!
//! All schemes share one shape: solve (or approximate) `W ŝ = s` in the
//! user-dimension, then lift to the antenna array with `t = β Hᴴ ŝ`. The
//! scaling `β` enforces the average transmit-power constraint
//! `E‖t‖² = K`; exact zero-forcing uses `β = √(K / tr(W⁻¹))`.
//!
//! `mults` on every [`PrecoderOutput`] counts the complex multiplications the
//! call performed on the per-symbol path: additions are free, one-time work
//! shared across symbol vectors (forming `W`, diagonal reciprocals, the power
//! scaling `β`) is excluded, and each division-by-diagonal is counted as one
//! multiply by a precomputed reciprocal. For Gauss-Seidel the count is
//! exactly [`mult_count_formula`].

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{
    cholesky_factor, forward_substitute, ComplexMatrix, ComplexVector, GramDecomposition,
};
use crate::zone::{zone_initial, RealExpansion, ZoneSpec};

/// Result of one precoding operation.
#[derive(Debug, Clone)]
pub struct PrecoderOutput {
    /// Antenna-domain transmit vector (`n_bs` entries).
    pub t: ComplexVector,
    /// User-domain solve output `ŝ` with `t = β Hᴴ ŝ`.
    pub s_hat: ComplexVector,
    /// Power-constraint scaling applied to `t`.
    pub beta: f64,
    /// Complex multiplications on the per-symbol path (see module docs).
    pub mults: u64,
}

/// Which stationary iteration a diagnostic refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IterationKind {
    /// Gauss-Seidel sweeps: iteration matrix `B = -(D+L)⁻¹ Lᴴ`.
    GaussSeidel,
    /// Neumann/Jacobi splitting: iteration matrix `B = D⁻¹ (L+Lᴴ)`.
    Neumann,
}

/// Precoding scheme family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Zf,
    Mf,
    Neumann,
    Gs,
}

impl SchemeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            SchemeKind::Zf => "zf",
            SchemeKind::Mf => "mf",
            SchemeKind::Neumann => "neumann",
            SchemeKind::Gs => "gs",
        }
    }
}

/// Initialization of the Gauss-Seidel sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitKind {
    Zero,
    Zone,
}

impl InitKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            InitKind::Zero => "zero",
            InitKind::Zone => "zone",
        }
    }
}

/// One configured scheme instance (kind + iteration count + initialization).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SchemeSpec {
    pub kind: SchemeKind,
    /// Sweep / series length for iterative schemes; 0 for `zf`/`mf`.
    pub iters: usize,
    /// Initialization (Gauss-Seidel only).
    pub init: InitKind,
    /// Zone count for zone initialization (even, >= 2; 2 means sign-only).
    pub zones: usize,
}

impl SchemeSpec {
    pub fn exact(kind: SchemeKind) -> Self {
        SchemeSpec { kind, iters: 0, init: InitKind::Zero, zones: 2 }
    }

    pub fn iterative(kind: SchemeKind, iters: usize) -> Self {
        SchemeSpec { kind, iters, init: InitKind::Zero, zones: 2 }
    }

    /// Short display label, e.g. `gs:3:zone:4`.
    pub fn label(&self) -> String {
        match self.kind {
            SchemeKind::Zf | SchemeKind::Mf => self.kind.as_str().to_string(),
            SchemeKind::Neumann => format!("neumann:{}", self.iters),
            SchemeKind::Gs => match self.init {
                InitKind::Zero => format!("gs:{}", self.iters),
                InitKind::Zone => format!("gs:{}:zone:{}", self.iters, self.zones),
            },
        }
    }
}

/// How the power scaling of approximate schemes is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BetaMode {
    /// `β = √(K / tr(W⁻¹))` per realization (default).
    #[default]
    Exact,
    /// Large-array shortcut `β = √(K(α−1)) = √(N−K)`.
    Asymptotic,
}

/// Options shared by the scheme dispatcher [`run_scheme`].
#[derive(Debug, Clone, Copy)]
pub struct PrecodeOptions {
    pub division_free: bool,
    pub beta_mode: BetaMode,
    /// QAM order, used to scale zone initialization.
    pub qam_order: u32,
}

impl Default for PrecodeOptions {
    fn default() -> Self {
        PrecodeOptions { division_free: false, beta_mode: BetaMode::Exact, qam_order: 64 }
    }
}

/// Exact zero-forcing power scaling `β = √(K / tr(W⁻¹))`.
pub fn beta_zf(g: &GramDecomposition) -> Result<f64> {
    let factor = cholesky_factor(&g.w)?;
    Ok((g.n_users() as f64 / factor.inverse_trace()).sqrt())
}

/// Matched-filter power scaling `β = √(K / tr(W))`.
pub fn beta_mf(g: &GramDecomposition) -> f64 {
    (g.n_users() as f64 / g.d.iter().sum::<f64>()).sqrt()
}

/// Large-array zero-forcing scaling `β ≈ √(K(α−1))` with `α = N/K`.
/// Requires more antennas than users.
pub fn beta_asymptotic(n_bs: usize, n_users: usize) -> Result<f64> {
    if n_bs <= n_users || n_users == 0 {
        return Err(Error::invalid(format!(
            "asymptotic scaling needs n_bs > n_users >= 1, got {n_bs} x {n_users}"
        )));
    }
    Ok(((n_bs - n_users) as f64).sqrt())
}

fn validate_shapes(h: &ComplexMatrix, g: &GramDecomposition, s: &[Complex64]) -> Result<()> {
    if h.rows() != g.n_users() {
        return Err(Error::invalid("channel and gram user counts differ"));
    }
    if s.len() != g.n_users() {
        return Err(Error::invalid("symbol vector length must equal the user count"));
    }
    Ok(())
}

/// Lifts a user-domain estimate to the array: `t = β Hᴴ ŝ` (N·K + N mults).
fn lift(h: &ComplexMatrix, s_hat: &[Complex64], beta: f64) -> Result<(ComplexVector, u64)> {
    let mut t = h.adjoint_matvec(s_hat)?;
    for e in &mut t {
        *e *= beta;
    }
    let n = h.cols() as u64;
    let k = h.rows() as u64;
    Ok((t, n * k + n))
}

/// Complex-mult cost of the Cholesky factorization of an order-`k` matrix
/// (norm-squares counted as one multiply each).
fn cholesky_mults(k: usize) -> u64 {
    let mut total = 0u64;
    for i in 0..k as u64 {
        total += i * (i + 1) / 2 + i;
    }
    total
}

/// Exact zero-forcing: `ŝ = W⁻¹ s`, `t = β_zf Hᴴ ŝ`.
///
/// # Examples
/// ```
/// use gs_precode::channel::{rayleigh_channel, ChannelSpec};
/// use gs_precode::linalg::gram;
/// use gs_precode::precode::zf_precode;
/// use num_complex::Complex64;
/// let h = rayleigh_channel(&ChannelSpec::new(64, 8, 0.0, 3, 0)).unwrap();
/// let g = gram(&h).unwrap();
/// let s = vec![Complex64::new(1.0, 0.0); 8];
/// let out = zf_precode(&h, &g, &s).unwrap();
/// // The effective channel is β·s for every user.
/// let y = h.matvec(&out.t).unwrap();
/// for (yk, sk) in y.iter().zip(&s) {
///     assert!((yk - sk * out.beta).norm() < 1e-6);
/// }
/// ```
pub fn zf_precode(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
) -> Result<PrecoderOutput> {
    validate_shapes(h, g, s)?;
    let k = g.n_users();
    let factor = cholesky_factor(&g.w)?;
    let s_hat = factor.solve(s)?;
    let beta = (k as f64 / factor.inverse_trace()).sqrt();
    let (t, lift_mults) = lift(h, &s_hat, beta)?;
    // Factorization + two triangular solves + lift.
    let mults = cholesky_mults(k) + (k * (k + 1)) as u64 + lift_mults;
    Ok(PrecoderOutput { t, s_hat, beta, mults })
}

/// Matched filter: `t = β_mf Hᴴ s`.
pub fn mf_precode(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
) -> Result<PrecoderOutput> {
    validate_shapes(h, g, s)?;
    let beta = beta_mf(g);
    let (t, lift_mults) = lift(h, s, beta)?;
    Ok(PrecoderOutput { t, s_hat: s.to_vec(), beta, mults: lift_mults })
}

/// In-place Gauss-Seidel sweeps on `W x = s` with per-row reciprocals
/// `recip` (either `1/w_mm` or the division-free constant `1/N`).
fn gs_sweeps(
    g: &GramDecomposition,
    s: &[Complex64],
    x: &mut [Complex64],
    iters: usize,
    recip: &[f64],
) {
    let n = g.n_users();
    for _ in 0..iters {
        for m in 0..n {
            let row = g.w.row(m);
            let mut acc = s[m];
            for j in 0..m {
                acc -= row[j] * x[j];
            }
            for j in m + 1..n {
                acc -= row[j] * x[j];
            }
            x[m] = acc * recip[m];
        }
    }
}

/// Gauss-Seidel solve of `W x = s`: element-wise sweeps updating in place
/// (exactly one working vector of length `K`).
///
/// # Examples
/// ```
/// use gs_precode::linalg::{ComplexMatrix, GramDecomposition};
/// use gs_precode::precode::gs_solve;
/// use num_complex::Complex64;
/// let c = |re: f64| Complex64::new(re, 0.0);
/// let w = ComplexMatrix::from_rows(&[vec![c(2.0), c(1.0)], vec![c(1.0), c(2.0)]]).unwrap();
/// let g = GramDecomposition::from_matrix(&w).unwrap();
/// let s = vec![c(1.0), c(1.0)];
/// let x = gs_solve(&g, &s, &[c(0.0), c(0.0)], 1).unwrap();
/// assert!((x[0] - c(0.5)).norm() < 1e-15);
/// assert!((x[1] - c(0.25)).norm() < 1e-15);
/// ```
pub fn gs_solve(
    g: &GramDecomposition,
    s: &[Complex64],
    init: &[Complex64],
    iters: usize,
) -> Result<ComplexVector> {
    if s.len() != g.n_users() || init.len() != g.n_users() {
        return Err(Error::invalid("vector lengths must equal the user count"));
    }
    let recip: Vec<f64> = g.d.iter().map(|&d| 1.0 / d).collect();
    let mut x = init.to_vec();
    gs_sweeps(g, s, &mut x, iters, &recip);
    Ok(x)
}

fn gs_precode_impl(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    init: &[Complex64],
    iters: usize,
    division_free: bool,
    beta: f64,
    extra_mults: u64,
) -> Result<PrecoderOutput> {
    validate_shapes(h, g, s)?;
    if init.len() != g.n_users() {
        return Err(Error::invalid("initial vector length must equal the user count"));
    }
    if iters == 0 {
        return Err(Error::invalid("gauss-seidel precoding needs iters >= 1"));
    }
    let k = g.n_users();
    let recip: Vec<f64> = if division_free {
        vec![1.0 / h.cols() as f64; k]
    } else {
        g.d.iter().map(|&d| 1.0 / d).collect()
    };
    let mut x = init.to_vec();
    gs_sweeps(g, s, &mut x, iters, &recip);
    let (t, lift_mults) = lift(h, &x, beta)?;
    let mults = (iters * k * k) as u64 + lift_mults + extra_mults;
    Ok(PrecoderOutput { t, s_hat: x, beta, mults })
}

/// Gauss-Seidel precoding from an explicit initial vector, scaled with the
/// exact zero-forcing `β`. `division_free` replaces every `1/w_mm` by the
/// deterministic `1/N`, trading a small bias for a division-free sweep.
pub fn gs_precode(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    init: &[Complex64],
    iters: usize,
    division_free: bool,
) -> Result<PrecoderOutput> {
    let beta = beta_zf(g)?;
    gs_precode_impl(h, g, s, init, iters, division_free, beta, 0)
}

/// Gauss-Seidel precoding with zone initialization: the start vector is read
/// off per-user amplitude zones of the real-lifted system, then the complex
/// sweeps run as usual. The zone test's multiplications are included in the
/// count (four real multiplies are booked as one complex multiply).
pub fn gs_precode_zone(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    zspec: &ZoneSpec,
    iters: usize,
    division_free: bool,
) -> Result<PrecoderOutput> {
    let beta = beta_zf(g)?;
    gs_precode_zone_with_beta(h, g, s, zspec, iters, division_free, beta)
}

fn gs_precode_zone_with_beta(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    zspec: &ZoneSpec,
    iters: usize,
    division_free: bool,
    beta: f64,
) -> Result<PrecoderOutput> {
    let exp = RealExpansion::realify(g, s)?;
    let zi = zone_initial(&exp, zspec)?;
    let zone_complex_mults = zi.real_mults.div_ceil(4);
    gs_precode_impl(h, g, s, &zi.init, iters, division_free, beta, zone_complex_mults)
}

/// Truncated Neumann-series solve of `W x = s`.
///
/// Evaluated by the equivalent recurrence `x⁽ⁱ⁺¹⁾ = D⁻¹s − D⁻¹(L+Lᴴ)x⁽ⁱ⁾`
/// starting at `x⁽¹⁾ = D⁻¹s`; `iters = i` returns the order-`i` truncation
/// `Σ_{n<i} (−B)ⁿ D⁻¹ s` with `B = D⁻¹(L+Lᴴ)`, without materializing `B`.
pub fn neumann_solve(
    g: &GramDecomposition,
    s: &[Complex64],
    iters: usize,
) -> Result<ComplexVector> {
    if s.len() != g.n_users() {
        return Err(Error::invalid("vector length must equal the user count"));
    }
    if iters == 0 {
        return Err(Error::invalid("neumann series needs iters >= 1"));
    }
    let n = g.n_users();
    let recip: Vec<f64> = g.d.iter().map(|&d| 1.0 / d).collect();
    let mut x: ComplexVector = s.iter().zip(&recip).map(|(&v, &r)| v * r).collect();
    let mut next = vec![Complex64::new(0.0, 0.0); n];
    for _ in 1..iters {
        for m in 0..n {
            let row = g.w.row(m);
            let mut acc = s[m];
            for j in 0..m {
                acc -= row[j] * x[j];
            }
            for j in m + 1..n {
                acc -= row[j] * x[j];
            }
            next[m] = acc * recip[m];
        }
        std::mem::swap(&mut x, &mut next);
    }
    Ok(x)
}

/// Neumann-series precoding scaled with the exact zero-forcing `β`.
pub fn neumann_precode(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    iters: usize,
) -> Result<PrecoderOutput> {
    let beta = beta_zf(g)?;
    neumann_precode_with_beta(h, g, s, iters, beta)
}

fn neumann_precode_with_beta(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    s: &[Complex64],
    iters: usize,
    beta: f64,
) -> Result<PrecoderOutput> {
    validate_shapes(h, g, s)?;
    let k = g.n_users() as u64;
    let x = neumann_solve(g, s, iters)?;
    let (t, lift_mults) = lift(h, &x, beta)?;
    // First series term costs K (diagonal scale); each further term K².
    let mults = k + (iters as u64 - 1) * k * k + lift_mults;
    Ok(PrecoderOutput { t, s_hat: x, beta, mults })
}

/// Materializes the iteration matrix of a splitting:
/// Gauss-Seidel `B = −(D+L)⁻¹Lᴴ` (via one triangular solve per column) or
/// Neumann `B = D⁻¹(L+Lᴴ)`.
pub fn iteration_matrix(g: &GramDecomposition, kind: IterationKind) -> Result<ComplexMatrix> {
    let n = g.n_users();
    let mut b = ComplexMatrix::zeros(n, n);
    match kind {
        IterationKind::GaussSeidel => {
            let lower = g.lower_with_diag();
            let mut rhs = vec![Complex64::new(0.0, 0.0); n];
            for j in 0..n {
                for (i, r) in rhs.iter_mut().enumerate() {
                    // Column j of −Lᴴ: −conj(L[j][i]) for rows i < j.
                    *r = if i < j { -g.l.at(j, i).conj() } else { Complex64::new(0.0, 0.0) };
                }
                let col = forward_substitute(&lower, &rhs)?;
                for (i, &v) in col.iter().enumerate() {
                    b.set(i, j, v);
                }
            }
        }
        IterationKind::Neumann => {
            for m in 0..n {
                let recip = 1.0 / g.d[m];
                for j in 0..n {
                    if j != m {
                        b.set(m, j, g.w.at(m, j) * recip);
                    }
                }
            }
        }
    }
    Ok(b)
}

/// Gauss-Seidel estimate of the full inverse: iterates
/// `M⁽ʲ⁺¹⁾ = (D+L)⁻¹ (I − Lᴴ M⁽ʲ⁾)` from the zero matrix, so
/// `iters = 1` gives `(D+L)⁻¹` and the error after `i` steps is exactly
/// `−B^i W⁻¹` with `B` the Gauss-Seidel iteration matrix.
pub fn gs_inverse_estimate(g: &GramDecomposition, iters: usize) -> Result<ComplexMatrix> {
    if iters == 0 {
        return Err(Error::invalid("inverse estimate needs iters >= 1"));
    }
    let n = g.n_users();
    let lower = g.lower_with_diag();
    let lh = g.l.adjoint();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut rhs_col = vec![Complex64::new(0.0, 0.0); n];
    for _ in 0..iters {
        let y = ComplexMatrix::identity(n).sub(&lh.mul(&m)?)?;
        let mut next = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            for (i, r) in rhs_col.iter_mut().enumerate() {
                *r = y.at(i, j);
            }
            let col = forward_substitute(&lower, &rhs_col)?;
            for (i, &v) in col.iter().enumerate() {
                next.set(i, j, v);
            }
        }
        m = next;
    }
    Ok(m)
}

/// Closed-form complex-mult count of zone-initialized Gauss-Seidel precoding:
/// `N + N·K + ⌈(Z−2)·K/4⌉ + i·K²` (lift scale, lift matvec, zone test,
/// sweeps). `zones = 2` covers zero/sign-only initialization (zone term 0).
pub fn mult_count_formula(
    n_bs: usize,
    n_users: usize,
    iters: usize,
    zones: usize,
) -> Result<u64> {
    if n_bs == 0 || n_users == 0 || iters == 0 {
        return Err(Error::invalid("mult count needs n_bs, n_users, iters >= 1"));
    }
    if zones < 2 || zones % 2 != 0 {
        return Err(Error::invalid("zones must be even and >= 2"));
    }
    let n = n_bs as u64;
    let k = n_users as u64;
    let zone_term = ((zones as u64 - 2) * k).div_ceil(4);
    Ok(n + n * k + zone_term + iters as u64 * k * k)
}

/// Runs one configured scheme on a symbol vector. This is the single dispatch
/// point used by the link simulator.
pub fn run_scheme(
    h: &ComplexMatrix,
    g: &GramDecomposition,
    scheme: &SchemeSpec,
    s: &[Complex64],
    opts: &PrecodeOptions,
) -> Result<PrecoderOutput> {
    let beta_approx = || -> Result<f64> {
        match opts.beta_mode {
            BetaMode::Exact => beta_zf(g),
            BetaMode::Asymptotic => beta_asymptotic(h.cols(), g.n_users()),
        }
    };
    match scheme.kind {
        SchemeKind::Zf => zf_precode(h, g, s),
        SchemeKind::Mf => mf_precode(h, g, s),
        SchemeKind::Neumann => neumann_precode_with_beta(h, g, s, scheme.iters, beta_approx()?),
        SchemeKind::Gs => {
            let beta = beta_approx()?;
            match scheme.init {
                InitKind::Zero => {
                    let zeros = vec![Complex64::new(0.0, 0.0); g.n_users()];
                    gs_precode_impl(h, g, s, &zeros, scheme.iters, opts.division_free, beta, 0)
                }
                InitKind::Zone => {
                    let zspec = ZoneSpec::for_link(
                        opts.qam_order,
                        h.cols(),
                        g.n_users(),
                        scheme.zones,
                    )?;
                    gs_precode_zone_with_beta(
                        h,
                        g,
                        s,
                        &zspec,
                        scheme.iters,
                        opts.division_free,
                        beta,
                    )
                }
            }
        }
    }
}
