//! Dense complex linear algebra sized for per-cell MIMO problems.
//!
//! Matrices are dense, row-major `Complex64`. The dimensions this crate
//! targets (tens of users, a few hundred antennas) make simple loops the
//! right tool; no BLAS dependency is pulled in.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance for Hermitian symmetry validation.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Relative residual tolerance guaranteed by the positive-definite solver.
pub const SOLVE_RESIDUAL_TOL: f64 = 1e-9;

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// Dense complex column vector.
pub type ComplexVector = Vec<Complex64>;

impl ComplexMatrix {
    /// All-zero matrix of the given shape.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { rows, cols, entries: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    /// Identity matrix of order `n`.
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from row slices. All rows must share one length.
    ///
    /// # Examples
    /// ```
    /// use gs_precode::linalg::ComplexMatrix;
    /// use num_complex::Complex64;
    /// let m = ComplexMatrix::from_rows(&[
    ///     vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, -1.0)],
    ///     vec![Complex64::new(0.0, 1.0), Complex64::new(2.0, 0.0)],
    /// ]).unwrap();
    /// assert_eq!(m.at(1, 0), Complex64::new(0.0, 1.0));
    /// ```
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("matrix needs at least one row"));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::invalid("matrix needs at least one column"));
        }
        let mut entries = Vec::with_capacity(rows.len() * cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        Ok(ComplexMatrix { rows: rows.len(), cols, entries })
    }

    /// Builds a matrix from real entries (imaginary parts zero).
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::invalid(format!(
                "expected {} entries for a {rows}x{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(ComplexMatrix {
            rows,
            cols,
            entries: entries.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Entry at `(r, c)` by value.
    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.entries[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries[r * self.cols + c] = v;
    }

    /// Row `r` as a contiguous slice.
    #[inline]
    pub fn row(&self, r: usize) -> &[Complex64] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [Complex64] {
        &mut self.entries[r * self.cols..(r + 1) * self.cols]
    }

    /// Flat row-major entry slice.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.at(r, c).conj());
            }
        }
        out
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::invalid(format!(
                "product shape mismatch: {}x{} * {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = ComplexMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let a_row = self.row(r);
            let out_row = out.row_mut(r);
            for (k, &a) in a_row.iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let b_row = other.row(k);
                for (c, &b) in b_row.iter().enumerate() {
                    out_row[c] += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product `self * x`.
    pub fn matvec(&self, x: &[Complex64]) -> Result<ComplexVector> {
        if x.len() != self.cols {
            return Err(Error::invalid(format!(
                "matvec length mismatch: matrix has {} columns, vector has {}",
                self.cols,
                x.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| self.row(r).iter().zip(x).map(|(&a, &b)| a * b).sum())
            .collect())
    }

    /// Adjoint matrix-vector product `selfᴴ * x` without materializing the
    /// adjoint (row-major friendly).
    pub fn adjoint_matvec(&self, x: &[Complex64]) -> Result<ComplexVector> {
        if x.len() != self.rows {
            return Err(Error::invalid(format!(
                "adjoint matvec length mismatch: matrix has {} rows, vector has {}",
                self.rows,
                x.len()
            )));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.cols];
        for (r, &xr) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(r)) {
                *o += a.conj() * xr;
            }
        }
        Ok(out)
    }

    /// Entrywise difference `self - other`.
    pub fn sub(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid("difference shape mismatch"));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a - b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Entrywise sum `self + other`.
    pub fn add(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::invalid("sum shape mismatch"));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Scalar multiple.
    pub fn scale(&self, c: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&e| e * c).collect(),
        }
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// Naive matrix power for small exponents (diagnostics only).
    pub fn pow(&self, k: u32) -> Result<ComplexMatrix> {
        if !self.is_square() {
            return Err(Error::invalid("matrix power needs a square matrix"));
        }
        let mut acc = ComplexMatrix::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// Hermitian positive-definite Gram matrix split into `W = D + L + Lᴴ`.
///
/// `w` is the canonical Hermitian form (diagonal exactly real, upper triangle
/// the exact conjugate of the lower), `d` its real diagonal, and `l` its
/// strictly lower triangle. The three parts reassemble `w` bit for bit.
#[derive(Debug, Clone)]
pub struct GramDecomposition {
    /// Canonical Hermitian matrix.
    pub w: ComplexMatrix,
    /// Real diagonal (strictly positive).
    pub d: Vec<f64>,
    /// Strictly lower triangle (zero elsewhere).
    pub l: ComplexMatrix,
}

impl GramDecomposition {
    /// Validates and splits a Hermitian positive-diagonal matrix.
    ///
    /// Symmetry is checked pairwise to [`HERMITIAN_TOL`] relative to entry
    /// magnitude; the stored matrix is canonicalized (lower triangle wins,
    /// diagonal imaginary dust dropped) so `d + l + lᴴ` reassembles `w`
    /// exactly.
    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::invalid("gram decomposition needs a square matrix"));
        }
        let n = m.rows();
        for i in 0..n {
            let diag = m.at(i, i);
            let scale = 1.0 + diag.re.abs();
            if diag.im.abs() > HERMITIAN_TOL * scale {
                return Err(Error::NotHermitian { row: i, col: i, deviation: diag.im.abs() });
            }
            if diag.re <= 0.0 {
                return Err(Error::invalid(format!(
                    "diagonal entry {i} is not strictly positive: {}",
                    diag.re
                )));
            }
            for j in 0..i {
                let lower = m.at(i, j);
                let upper = m.at(j, i);
                let dev = (lower - upper.conj()).norm();
                let scale = 1.0 + lower.norm().max(upper.norm());
                if dev > HERMITIAN_TOL * scale {
                    return Err(Error::NotHermitian { row: i, col: j, deviation: dev });
                }
            }
        }
        let mut w = ComplexMatrix::zeros(n, n);
        let mut l = ComplexMatrix::zeros(n, n);
        let mut d = vec![0.0; n];
        for i in 0..n {
            d[i] = m.at(i, i).re;
            w.set(i, i, Complex64::new(d[i], 0.0));
            for j in 0..i {
                let v = m.at(i, j);
                l.set(i, j, v);
                w.set(i, j, v);
                w.set(j, i, v.conj());
            }
        }
        Ok(GramDecomposition { w, d, l })
    }

    /// Number of users (matrix order).
    pub fn n_users(&self) -> usize {
        self.w.rows()
    }

    /// Lower-triangular matrix `D + L` (the Gauss-Seidel sweep operator).
    pub fn lower_with_diag(&self) -> ComplexMatrix {
        let n = self.n_users();
        let mut m = self.l.clone();
        for i in 0..n {
            m.set(i, i, Complex64::new(self.d[i], 0.0));
        }
        m
    }
}

/// Forms the Gram matrix `W = H Hᴴ` of a channel `H` (`n_users x n_bs`) and
/// splits it. The diagonal is accumulated as a real sum of squares, so the
/// canonical form is exact by construction.
///
/// # Examples
/// ```
/// use gs_precode::channel::{rayleigh_channel, ChannelSpec};
/// use gs_precode::linalg::gram;
/// let h = rayleigh_channel(&ChannelSpec::new(64, 8, 0.0, 1, 0)).unwrap();
/// let g = gram(&h).unwrap();
/// assert_eq!(g.n_users(), 8);
/// assert!(g.d.iter().all(|&d| d > 0.0));
/// ```
pub fn gram(h: &ComplexMatrix) -> Result<GramDecomposition> {
    let k = h.rows();
    let n = h.cols();
    if k == 0 || n == 0 {
        return Err(Error::invalid("channel matrix must be non-empty"));
    }
    let mut w = ComplexMatrix::zeros(k, k);
    let mut l = ComplexMatrix::zeros(k, k);
    let mut d = vec![0.0; k];
    for i in 0..k {
        let hi = h.row(i);
        let diag: f64 = hi.iter().map(|z| z.norm_sqr()).sum();
        if diag <= 0.0 {
            return Err(Error::invalid(format!("channel row {i} has zero energy")));
        }
        d[i] = diag;
        w.set(i, i, Complex64::new(diag, 0.0));
        for j in 0..i {
            let hj = h.row(j);
            let v: Complex64 = hi.iter().zip(hj).map(|(&a, &b)| a * b.conj()).sum();
            l.set(i, j, v);
            w.set(i, j, v);
            w.set(j, i, v.conj());
        }
    }
    Ok(GramDecomposition { w, d, l })
}

/// Cholesky factor `W = L Lᴴ` of a Hermitian positive-definite matrix.
#[derive(Debug, Clone)]
pub struct CholeskyFactor {
    /// Lower-triangular factor with strictly positive real diagonal.
    pub l: ComplexMatrix,
    recip_diag: Vec<f64>,
}

/// Computes the Cholesky factorization of a Hermitian positive-definite
/// matrix, failing with the pivot index on the first non-positive pivot.
pub fn cholesky_factor(w: &ComplexMatrix) -> Result<CholeskyFactor> {
    if !w.is_square() {
        return Err(Error::invalid("cholesky needs a square matrix"));
    }
    let n = w.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    let mut recip = vec![0.0; n];
    for i in 0..n {
        for j in 0..i {
            let mut sum = w.at(i, j);
            for k in 0..j {
                sum -= l.at(i, k) * l.at(j, k).conj();
            }
            l.set(i, j, sum * recip[j]);
        }
        let mut pivot = w.at(i, i).re;
        for k in 0..i {
            pivot -= l.at(i, k).norm_sqr();
        }
        if pivot <= 0.0 || !pivot.is_finite() {
            return Err(Error::NotPositiveDefinite { index: i });
        }
        let root = pivot.sqrt();
        l.set(i, i, Complex64::new(root, 0.0));
        recip[i] = 1.0 / root;
    }
    Ok(CholeskyFactor { l, recip_diag: recip })
}

impl CholeskyFactor {
    /// Order of the factored matrix.
    pub fn n(&self) -> usize {
        self.l.rows()
    }

    /// Solves `W x = b` by a forward then a backward triangular solve.
    pub fn solve(&self, b: &[Complex64]) -> Result<ComplexVector> {
        let n = self.n();
        if b.len() != n {
            return Err(Error::invalid("solve length mismatch"));
        }
        // Forward: L y = b.
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut sum = b[i];
            let row = self.l.row(i);
            for j in 0..i {
                sum -= row[j] * y[j];
            }
            y[i] = sum * self.recip_diag[i];
        }
        // Backward: Lᴴ x = y.
        let mut x = y;
        for i in (0..n).rev() {
            let mut sum = x[i];
            for j in i + 1..n {
                sum -= self.l.at(j, i).conj() * x[j];
            }
            x[i] = sum * self.recip_diag[i];
        }
        Ok(x)
    }

    /// Trace of the inverse, `tr(W⁻¹) = ‖L⁻¹‖_F²`, via one forward solve per
    /// basis vector (no full inverse is materialized).
    pub fn inverse_trace(&self) -> f64 {
        let n = self.n();
        let mut total = 0.0;
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            // Solve L y = e_j; only rows j.. are nonzero, and they are all
            // rewritten below, so stale entries from the previous column are
            // never read.
            for i in j..n {
                let mut sum =
                    if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
                let row = self.l.row(i);
                for k in j..i {
                    sum -= row[k] * y[k];
                }
                y[i] = sum * self.recip_diag[i];
                total += y[i].norm_sqr();
            }
        }
        total
    }
}

/// One-shot positive-definite solve `W x = b` (factor + two triangular
/// solves). The relative residual is within [`SOLVE_RESIDUAL_TOL`] for
/// well-conditioned Gram matrices up to order 64.
pub fn cholesky_solve(w: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector> {
    cholesky_factor(w)?.solve(b)
}

/// Full inverse of a Hermitian positive-definite matrix via one solve per
/// basis vector.
pub fn cholesky_inverse(w: &ComplexMatrix) -> Result<ComplexMatrix> {
    let factor = cholesky_factor(w)?;
    let n = factor.n();
    let mut inv = ComplexMatrix::zeros(n, n);
    let mut e = vec![Complex64::new(0.0, 0.0); n];
    for j in 0..n {
        e[j] = Complex64::new(1.0, 0.0);
        let col = factor.solve(&e)?;
        e[j] = Complex64::new(0.0, 0.0);
        for i in 0..n {
            inv.set(i, j, col[i]);
        }
    }
    Ok(inv)
}

/// Solves `L x = b` for a general lower-triangular `L` (entries above the
/// diagonal are ignored), failing with the row index on a zero diagonal.
/// Costs n(n+1)/2 multiply-accumulates.
pub fn forward_substitute(l: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector> {
    if !l.is_square() {
        return Err(Error::invalid("forward substitution needs a square matrix"));
    }
    let n = l.rows();
    if b.len() != n {
        return Err(Error::invalid("forward substitution length mismatch"));
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for i in 0..n {
        let row = l.row(i);
        let diag = row[i];
        if diag == Complex64::new(0.0, 0.0) {
            return Err(Error::SingularTriangular { index: i });
        }
        let mut sum = b[i];
        for j in 0..i {
            sum -= row[j] * x[j];
        }
        x[i] = sum / diag;
    }
    Ok(x)
}

/// Frobenius norm.
pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.entries().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Euclidean norm of a complex vector.
pub fn vector_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Power-iteration estimate of the spectral radius of a square matrix.
///
/// Starts from a fixed internal random vector (deterministic output), runs up
/// to `max_iters` applications of `A`, and returns the step growth ratio once
/// it stabilizes to relative `tol` over three consecutive steps. If the
/// ratios keep oscillating (complex dominant pair, defective blocks), the
/// geometric mean of all observed ratios is returned instead. The result is
/// an estimate, not a certified bound.
pub fn spectral_radius_est(a: &ComplexMatrix, max_iters: usize, tol: f64) -> Result<f64> {
    if !a.is_square() {
        return Err(Error::invalid("spectral radius needs a square matrix"));
    }
    if max_iters == 0 || !(tol > 0.0) {
        return Err(Error::invalid("spectral radius needs max_iters >= 1 and tol > 0"));
    }
    if frobenius(a) == 0.0 {
        return Ok(0.0);
    }
    let n = a.rows();
    // Fixed probe seed: estimates must not depend on caller RNG state.
    let mut rng = crate::rng::stream_rng(0x51DE_CA57, 0, crate::rng::PURPOSE_AUX);
    let mut x: ComplexVector = (0..n).map(|_| crate::rng::standard_complex(&mut rng)).collect();
    let norm = vector_norm(&x);
    for xi in &mut x {
        *xi /= norm;
    }
    let mut log_sum = 0.0;
    let mut steps = 0usize;
    let mut prev = f64::NAN;
    let mut stable = 0usize;
    for _ in 0..max_iters {
        let y = a.matvec(&x)?;
        let r = vector_norm(&y);
        if r < 1e-150 {
            // The Krylov sequence collapsed: nilpotent action on the probe.
            return Ok(0.0);
        }
        log_sum += r.ln();
        steps += 1;
        x = y;
        for xi in &mut x {
            *xi /= r;
        }
        if prev.is_finite() && (r - prev).abs() <= tol * r.max(1e-300) {
            stable += 1;
            if stable >= 3 {
                return Ok(r);
            }
        } else {
            stable = 0;
        }
        prev = r;
    }
    Ok((log_sum / steps as f64).exp())
}


#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use crate::channel::{rayleigh_channel, ChannelSpec};
    use proptest::prelude::*;

    const ORACLE_TOL: f64 = 1e-12;
    const INVERSE_TOL: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn seeded_gram(n_bs: usize, n_users: usize, seed: u64) -> GramDecomposition {
        let h = rayleigh_channel(&ChannelSpec::new(n_bs, n_users, 0.0, seed, 0)).unwrap();
        gram(&h).unwrap()
    }

    #[test]
    fn gram_diagonal_concentrates_near_antenna_count() {
        let g = seeded_gram(256, 16, 11);
        let n = 256.0;
        for (i, &d) in g.d.iter().enumerate() {
            assert!(
                (0.7 * n..=1.3 * n).contains(&d),
                "diagonal {i} = {d} outside [0.7N, 1.3N]"
            );
        }
    }

    #[test]
    fn gram_partition_reassembles_bitwise() {
        let g = seeded_gram(64, 12, 3);
        let n = g.n_users();
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j {
                    c(g.d[i], 0.0)
                } else if i > j {
                    g.l.at(i, j)
                } else {
                    g.l.at(j, i).conj()
                };
                assert_eq!(g.w.at(i, j), expect, "mismatch at ({i}, {j})");
            }
        }
    }

    #[test]
    fn gram_is_positive_definite_on_random_probes() {
        let g = seeded_gram(128, 16, 5);
        let mut rng = crate::rng::stream_rng(99, 0, crate::rng::PURPOSE_AUX);
        for _ in 0..100 {
            let x: ComplexVector =
                (0..16).map(|_| crate::rng::standard_complex(&mut rng)).collect();
            let wx = g.w.matvec(&x).unwrap();
            let quad: Complex64 = x.iter().zip(&wx).map(|(&a, &b)| a.conj() * b).sum();
            assert!(quad.re > 0.0, "xᴴWx = {quad}");
            assert!(quad.im.abs() < 1e-9 * quad.re);
        }
    }

    #[test]
    fn decomposition_rejects_non_hermitian_input() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(2.0, 0.0), c(1.0, 0.5)],
            vec![c(1.0, 0.5), c(2.0, 0.0)], // should be the conjugate
        ])
        .unwrap();
        match GramDecomposition::from_matrix(&m) {
            Err(Error::NotHermitian { row: 1, col: 0, .. }) => {}
            other => panic!("expected NotHermitian, got {other:?}"),
        }
    }

    #[test]
    fn decomposition_rejects_non_positive_diagonal() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(GramDecomposition::from_matrix(&m), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn cholesky_solve_matches_dense_oracle() {
        let g = seeded_gram(96, 24, 7);
        let mut rng = crate::rng::stream_rng(42, 1, crate::rng::PURPOSE_AUX);
        let b: ComplexVector = (0..24).map(|_| crate::rng::standard_complex(&mut rng)).collect();
        let x = cholesky_solve(&g.w, &b).unwrap();
        let oracle = dense_solve(&g.w, &b);
        let err: f64 = x
            .iter()
            .zip(&oracle)
            .map(|(&a, &b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        let scale = vector_norm(&oracle);
        assert!(err / scale < ORACLE_TOL, "relative deviation {}", err / scale);
    }

    #[test]
    fn cholesky_solve_residual_is_tiny_up_to_order_64() {
        for &(n_bs, k, seed) in &[(64usize, 8usize, 1u64), (128, 32, 2), (256, 64, 3)] {
            let g = seeded_gram(n_bs, k, seed);
            let mut rng = crate::rng::stream_rng(seed, 9, crate::rng::PURPOSE_AUX);
            let b: ComplexVector =
                (0..k).map(|_| crate::rng::standard_complex(&mut rng)).collect();
            let x = cholesky_solve(&g.w, &b).unwrap();
            let wx = g.w.matvec(&x).unwrap();
            let res: f64 = wx
                .iter()
                .zip(&b)
                .map(|(&a, &bb)| (a - bb).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let rel = res / vector_norm(&b);
            assert!(rel < SOLVE_RESIDUAL_TOL, "({n_bs},{k}): relative residual {rel}");
        }
    }

    #[test]
    fn cholesky_reports_failing_pivot_index() {
        // Indefinite: first pivot fine, second pivot 1 - |2|^2 < 0.
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(2.0, 0.0)],
            vec![c(2.0, 0.0), c(1.0, 0.0)],
        ])
        .unwrap();
        match cholesky_factor(&m) {
            Err(Error::NotPositiveDefinite { index: 1 }) => {}
            other => panic!("expected pivot failure at index 1, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_inverse_multiplies_back_to_identity() {
        let g = seeded_gram(128, 24, 13);
        let inv = cholesky_inverse(&g.w).unwrap();
        let prod = g.w.mul(&inv).unwrap();
        let dev = max_abs_diff(&prod, &ComplexMatrix::identity(24));
        assert!(dev < INVERSE_TOL, "‖W·W⁻¹ − I‖_max = {dev}");
    }

    #[test]
    fn inverse_trace_matches_materialized_inverse() {
        let g = seeded_gram(96, 16, 21);
        let factor = cholesky_factor(&g.w).unwrap();
        let fast = factor.inverse_trace();
        let inv = cholesky_inverse(&g.w).unwrap();
        let slow = inv.trace().re;
        assert!((fast - slow).abs() / slow < 1e-12, "fast {fast} vs materialized {slow}");
    }

    #[test]
    fn forward_substitute_matches_dense_oracle() {
        let mut l = random_matrix(12, 12, 31);
        for i in 0..12 {
            for j in i + 1..12 {
                l.set(i, j, c(0.0, 0.0));
            }
            // Stabilize the diagonal away from zero.
            let d = l.at(i, i);
            l.set(i, i, d + c(2.0, 0.0));
        }
        let mut rng = crate::rng::stream_rng(17, 0, crate::rng::PURPOSE_AUX);
        let b: ComplexVector = (0..12).map(|_| crate::rng::standard_complex(&mut rng)).collect();
        let x = forward_substitute(&l, &b).unwrap();
        let oracle = dense_solve(&l, &b);
        let err = x
            .iter()
            .zip(&oracle)
            .map(|(&a, &b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
            / vector_norm(&oracle);
        assert!(err < ORACLE_TOL, "relative deviation {err}");
    }

    #[test]
    fn forward_substitute_names_singular_row() {
        let l = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(3.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        match forward_substitute(&l, &[c(1.0, 0.0), c(1.0, 0.0)]) {
            Err(Error::SingularTriangular { index: 1 }) => {}
            other => panic!("expected singular at index 1, got {other:?}"),
        }
    }

    #[test]
    fn spectral_radius_hand_cases() {
        let diag =
            ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]])
                .unwrap();
        let est = spectral_radius_est(&diag, 5000, 1e-9).unwrap();
        assert!((est - 2.0).abs() < 1e-2, "diag(2,1) estimate {est}");

        let zero = ComplexMatrix::zeros(3, 3);
        assert_eq!(spectral_radius_est(&zero, 100, 1e-6).unwrap(), 0.0);

        let nilpotent =
            ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        let est = spectral_radius_est(&nilpotent, 100, 1e-6).unwrap();
        assert!(est < 1e-6, "nilpotent estimate {est}");

        // Rotation: complex eigenvalue pair of modulus exactly 1.
        let rot =
            ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]])
                .unwrap();
        let est = spectral_radius_est(&rot, 200, 1e-9).unwrap();
        assert!((est - 1.0).abs() < 1e-9, "rotation estimate {est}");
    }

    #[test]
    fn spectral_radius_tracks_log_squaring_oracle() {
        // Oracle: ‖A^(2^m)‖_F^(1/2^m) approaches the spectral radius from
        // above for diagonalizable matrices.
        let a = random_matrix(8, 8, 77).scale(c(0.11, 0.0));
        let est = spectral_radius_est(&a, 4000, 1e-10).unwrap();
        let mut p = a.clone();
        for _ in 0..6 {
            p = p.mul(&p).unwrap();
        }
        let oracle = frobenius(&p).powf(1.0 / 64.0);
        assert!(
            (est - oracle).abs() / oracle < 0.05,
            "power-iteration {est} vs log-squaring {oracle}"
        );
        assert!(est <= oracle * 1.0001, "estimate must not exceed the norm envelope");
    }

    proptest! {
        #[test]
        fn frobenius_is_adjoint_invariant(rows in 1usize..6, cols in 1usize..6, seed in 0u64..500) {
            let a = random_matrix(rows, cols, seed);
            let fa = frobenius(&a);
            let fah = frobenius(&a.adjoint());
            prop_assert!((fa - fah).abs() <= 1e-12 * fa.max(1.0));
        }

        #[test]
        fn gram_partition_is_exact_for_random_channels(
            k in 1usize..8, extra in 0usize..12, seed in 0u64..200
        ) {
            let n_bs = k + extra + 1;
            let h = rayleigh_channel(&ChannelSpec::new(n_bs, k, 0.0, seed, 0)).unwrap();
            let g = gram(&h).unwrap();
            // Rebuild W from parts and compare bitwise.
            for i in 0..k {
                for j in 0..k {
                    let expect = if i == j {
                        c(g.d[i], 0.0)
                    } else if i > j {
                        g.l.at(i, j)
                    } else {
                        g.l.at(j, i).conj()
                    };
                    prop_assert_eq!(g.w.at(i, j), expect);
                }
            }
        }

        #[test]
        fn cholesky_solve_residual_property(k in 2usize..12, seed in 0u64..100) {
            let g = {
                let h = rayleigh_channel(&ChannelSpec::new(4 * k, k, 0.0, seed, 1)).unwrap();
                gram(&h).unwrap()
            };
            let mut rng = crate::rng::stream_rng(seed, 5, crate::rng::PURPOSE_AUX);
            let b: ComplexVector = (0..k).map(|_| crate::rng::standard_complex(&mut rng)).collect();
            let x = cholesky_solve(&g.w, &b).unwrap();
            let wx = g.w.matvec(&x).unwrap();
            let res: f64 = wx.iter().zip(&b).map(|(&a, &bb)| (a - bb).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(res / vector_norm(&b) < SOLVE_RESIDUAL_TOL);
        }
    }
}
