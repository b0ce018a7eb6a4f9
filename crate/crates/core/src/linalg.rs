//! Complex dense linear algebra kernels.
//!
//! Everything in this crate works on small dense complex matrices (the
//! triangularizations operate on blocks of size n <= 8 and block-diagonal
//! extensions up to a few hundred rows), so the kernels favour robustness
//! and explicit phase conventions over speed:
//!
//! - QR via complex Householder reflections, phase-normalized so that R
//!   carries a real, strictly positive diagonal.
//! - SVD of square matrices via one-sided Jacobi rotations (cap of 60
//!   sweeps), singular values sorted in descending order.
//! - Hermitian square root via a PSD-tolerant Cholesky factorization.
//! - Hermitian eigendecomposition via two-sided Jacobi (used by the
//!   capacity optimizers).

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative/absolute tolerance pair used by predicates and factorizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn new(rel: f64, abs: f64) -> Result<Self> {
        if !(rel > 0.0) || !(abs > 0.0) {
            return Err(Error::InvalidInput(format!(
                "tolerances must be positive, got rel={rel}, abs={abs}"
            )));
        }
        Ok(Self { rel, abs })
    }

    /// Threshold for comparing an entry against a reference magnitude.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs + self.rel * scale
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        // Double precision leaves ample headroom for the matrix sizes used
        // here; these defaults are exposed as CLI flags as well.
        Self { rel: 1e-9, abs: 1e-12 }
    }
}

/// Dense complex matrix, row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(format!(
                "matrix dimensions must be at least 1x1, got {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "matrix data length {} does not match {rows}x{cols}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidInput("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, &d) in diag.iter().enumerate() {
            m.set(i, i, Complex64::new(d, 0.0));
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    /// Convenience constructor from rows of (re, im) pairs.
    pub fn from_rows(rows: &[Vec<(f64, f64)>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|row| row.len()).unwrap_or(0);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::InvalidInput("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|row| row.iter().map(|&(re, im)| Complex64::new(re, im)))
            .collect();
        Self::new(r, c, data)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "mul_vec dimension mismatch");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for i in 0..self.rows {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..self.cols {
                acc += self.get(i, k) * v[k];
            }
            out[i] = acc;
        }
        out
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) + other.get(r, c))
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) - other.get(r, c))
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| self.get(r, c) * s)
    }

    pub fn scale_re(&self, s: f64) -> CMatrix {
        self.scale(Complex64::new(s, 0.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            let ra = self.get(a, c);
            let rb = self.get(b, c);
            self.set(a, c, rb);
            self.set(b, c, ra);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for r in 0..self.rows {
            let ca = self.get(r, a);
            let cb = self.get(r, b);
            self.set(r, a, cb);
            self.set(r, b, ca);
        }
    }

    /// Rows `i`, `j` <- u2^dagger * [row_i; row_j].
    pub fn left_apply_2x2_dagger(&mut self, u2: &[[Complex64; 2]; 2], i: usize, j: usize) {
        for c in 0..self.cols {
            let a = self.get(i, c);
            let b = self.get(j, c);
            self.set(i, c, u2[0][0].conj() * a + u2[1][0].conj() * b);
            self.set(j, c, u2[0][1].conj() * a + u2[1][1].conj() * b);
        }
    }

    /// Columns `i`, `j` <- [col_i, col_j] * v2.
    pub fn right_apply_2x2(&mut self, v2: &[[Complex64; 2]; 2], i: usize, j: usize) {
        for r in 0..self.rows {
            let a = self.get(r, i);
            let b = self.get(r, j);
            self.set(r, i, a * v2[0][0] + b * v2[1][0]);
            self.set(r, j, a * v2[0][1] + b * v2[1][1]);
        }
    }

    /// New matrix made of the selected columns (0-based), in order.
    pub fn select_columns(&self, cols: &[usize]) -> CMatrix {
        CMatrix::from_fn(self.rows, cols.len(), |r, c| self.get(r, cols[c]))
    }

    /// Principal submatrix with the given row and column index lists (0-based).
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> CMatrix {
        CMatrix::from_fn(rows.len(), cols.len(), |r, c| self.get(rows[r], cols[c]))
    }

    /// Reverse both row and column order (J * A * J with J the exchange matrix).
    pub fn flip(&self) -> CMatrix {
        CMatrix::from_fn(self.rows, self.cols, |r, c| {
            self.get(self.rows - 1 - r, self.cols - 1 - c)
        })
    }

    /// Determinant via LU elimination with partial pivoting.
    pub fn determinant(&self) -> Result<Complex64> {
        if !self.is_square() {
            return Err(Error::InvalidInput(format!(
                "determinant requires a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut det = Complex64::new(1.0, 0.0);
        for k in 0..n {
            let mut piv = k;
            let mut best = lu.get(k, k).norm();
            for r in k + 1..n {
                let v = lu.get(r, k).norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best == 0.0 {
                return Ok(Complex64::new(0.0, 0.0));
            }
            if piv != k {
                lu.swap_rows(piv, k);
                det = -det;
            }
            let d = lu.get(k, k);
            det *= d;
            for r in k + 1..n {
                let f = lu.get(r, k) / d;
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for c in k + 1..n {
                    let v = lu.get(r, c) - f * lu.get(k, c);
                    lu.set(r, c, v);
                }
            }
        }
        Ok(det)
    }

    /// Inverse via Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<CMatrix> {
        if !self.is_square() {
            return Err(Error::InvalidInput("inverse requires a square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = CMatrix::identity(n);
        for k in 0..n {
            let mut piv = k;
            let mut best = a.get(k, k).norm();
            for r in k + 1..n {
                let v = a.get(r, k).norm();
                if v > best {
                    best = v;
                    piv = r;
                }
            }
            if best < 1e-300 {
                return Err(Error::Singular("matrix is not invertible".into()));
            }
            a.swap_rows(piv, k);
            inv.swap_rows(piv, k);
            let d = a.get(k, k);
            for c in 0..n {
                a.set(k, c, a.get(k, c) / d);
                inv.set(k, c, inv.get(k, c) / d);
            }
            for r in 0..n {
                if r == k {
                    continue;
                }
                let f = a.get(r, k);
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let va = a.get(r, c) - f * a.get(k, c);
                    a.set(r, c, va);
                    let vi = inv.get(r, c) - f * inv.get(k, c);
                    inv.set(r, c, vi);
                }
            }
        }
        Ok(inv)
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        if !self.is_square() {
            return false;
        }
        let bound = tol.bound(self.max_abs());
        for r in 0..self.rows {
            for c in r..self.cols {
                if (self.get(r, c) - self.get(c, r).conj()).norm() > bound {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_unitary(&self, tol: &Tolerance) -> bool {
        self.is_square() && self.has_orthonormal_columns(tol)
    }

    /// A^dagger * A = I on the column space (columns <= rows allowed).
    pub fn has_orthonormal_columns(&self, tol: &Tolerance) -> bool {
        if self.cols > self.rows {
            return false;
        }
        let gram = self.adjoint().matmul(self);
        let bound = tol.bound(1.0);
        for r in 0..gram.rows() {
            for c in 0..gram.cols() {
                let target = if r == c { 1.0 } else { 0.0 };
                if (gram.get(r, c) - Complex64::new(target, 0.0)).norm() > bound {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_upper_triangular(&self, tol: &Tolerance) -> bool {
        if !self.is_square() {
            return false;
        }
        let bound = tol.bound(self.max_abs());
        for r in 1..self.rows {
            for c in 0..r {
                if self.get(r, c).norm() > bound {
                    return false;
                }
            }
        }
        true
    }

    /// Geometric mean of the diagonal magnitudes, computed through logs to
    /// avoid overflow on long diagonals.
    pub fn geometric_mean_of_diagonal(&self) -> f64 {
        let n = self.rows.min(self.cols);
        let sum: f64 = (0..n).map(|i| self.get(i, i).norm().ln()).sum();
        (sum / n as f64).exp()
    }

    /// Largest below-diagonal magnitude (0 for a 1x1 or fully triangular matrix).
    pub fn max_below_diagonal(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 1..self.rows {
            for c in 0..r.min(self.cols) {
                worst = worst.max(self.get(r, c).norm());
            }
        }
        worst
    }
}

/// QR decomposition via Householder reflections.
///
/// Requires rows >= cols and full column rank. Returns (Q, R) with Q of
/// size rows x cols with orthonormal columns and R square upper-triangular
/// with a real, strictly positive diagonal (phases are absorbed into Q).
pub fn qr_decompose(a: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    let m = a.rows();
    let n = a.cols();
    if m < n {
        return Err(Error::InvalidInput(format!(
            "qr_decompose requires rows >= cols, got {m}x{n}"
        )));
    }
    let mut r = a.clone();
    let mut q = CMatrix::identity(m);

    for k in 0..n {
        // Householder vector for column k, rows k..m.
        let mut norm_sq = 0.0;
        for i in k..m {
            norm_sq += r.get(i, k).norm_sqr();
        }
        let norm = norm_sq.sqrt();
        if norm > 0.0 {
            let x0 = r.get(k, k);
            let phase = if x0.norm() > 0.0 { x0 / x0.norm() } else { Complex64::new(1.0, 0.0) };
            let alpha = -phase * norm;
            // v = x - alpha*e1, beta = 2/||v||^2 (real), H = I - beta v v^dagger
            let mut v = vec![Complex64::new(0.0, 0.0); m - k];
            v[0] = x0 - alpha;
            for i in k + 1..m {
                v[i - k] = r.get(i, k);
            }
            let vnorm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if vnorm_sq > 0.0 {
                let beta = 2.0 / vnorm_sq;
                // R <- H R on columns k..n
                for c in k..n {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for i in k..m {
                        dot += v[i - k].conj() * r.get(i, c);
                    }
                    dot *= beta;
                    for i in k..m {
                        let val = r.get(i, c) - dot * v[i - k];
                        r.set(i, c, val);
                    }
                }
                // Q <- Q H (H is Hermitian)
                for row in 0..m {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for i in k..m {
                        dot += q.get(row, i) * v[i - k];
                    }
                    dot *= beta;
                    for i in k..m {
                        let val = q.get(row, i) - dot * v[i - k].conj();
                        q.set(row, i, val);
                    }
                }
            }
        }
        // Explicitly zero the eliminated entries.
        for i in k + 1..m {
            r.set(i, k, Complex64::new(0.0, 0.0));
        }
    }

    // Phase-normalize so the diagonal of R is real and strictly positive.
    let mut r_out = CMatrix::zeros(n, n);
    for i in 0..n {
        for c in i..n {
            r_out.set(i, c, r.get(i, c));
        }
    }
    let mut q_out = q.select_columns(&(0..n).collect::<Vec<_>>());
    for k in 0..n {
        let d = r_out.get(k, k);
        let mag = d.norm();
        if mag < tol.abs {
            return Err(Error::Singular(format!(
                "rank deficiency: |R[{k},{k}]| = {mag:.3e} below absolute tolerance"
            )));
        }
        let ph = d / mag;
        for c in k..n {
            r_out.set(k, c, r_out.get(k, c) * ph.conj());
        }
        r_out.set(k, k, Complex64::new(mag, 0.0));
        for row in 0..m {
            q_out.set(row, k, q_out.get(row, k) * ph);
        }
    }
    Ok((q_out, r_out))
}

/// QL decomposition of a square matrix: X = Q * L with Q unitary and L
/// lower-triangular with real positive diagonal. Computed by flipping the
/// matrix, running QR, and flipping back.
pub fn ql_decompose(x: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, CMatrix)> {
    if !x.is_square() {
        return Err(Error::InvalidInput("ql_decompose requires a square matrix".into()));
    }
    let (qf, rf) = qr_decompose(&x.flip(), tol)?;
    Ok((qf.flip(), rf.flip()))
}

/// SVD of a square complex matrix via one-sided Jacobi rotations.
///
/// Returns (W, sigma, Z) with A = W * diag(sigma) * Z^dagger, sigma sorted
/// in descending order. Caps at 60 sweeps; reports a numerical failure if
/// the column Gram terms have not converged by then.
pub fn svd(a: &CMatrix, tol: &Tolerance) -> Result<(CMatrix, Vec<f64>, CMatrix)> {
    if !a.is_square() {
        return Err(Error::InvalidInput(format!(
            "svd is only defined for square matrices here, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let mut b = a.clone();
    let mut z = CMatrix::identity(n);

    const MAX_SWEEPS: usize = 60;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = Complex64::new(0.0, 0.0);
                for i in 0..n {
                    let bp = b.get(i, p);
                    let bq = b.get(i, q);
                    app += bp.norm_sqr();
                    aqq += bq.norm_sqr();
                    apq += bp.conj() * bq;
                }
                let off = apq.norm();
                if off <= 1e-15 * (app * aqq).sqrt() + tol.abs * tol.abs {
                    continue;
                }
                rotated = true;
                // Diagonalize the 2x2 Hermitian Gram block.
                let phase = apq / off;
                let zeta = (aqq - app) / (2.0 * off);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                // V2 = diag(1, conj(phase)) * [[c, s], [-s, c]]
                let v2 = [
                    [Complex64::new(c, 0.0), Complex64::new(s, 0.0)],
                    [-phase.conj() * s, phase.conj() * c],
                ];
                b.right_apply_2x2(&v2, p, q);
                z.right_apply_2x2(&v2, p, q);
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(
            "one-sided Jacobi SVD did not converge within 60 sweeps".into(),
        ));
    }

    // Column norms are the singular values; normalize columns into W.
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n)
        .map(|c| (0..n).map(|r| b.get(r, c).norm_sqr()).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap());

    let sigma: Vec<f64> = order.iter().map(|&c| norms[c]).collect();
    let z_out = z.select_columns(&order);
    let mut w = CMatrix::zeros(n, n);
    let scale = norms.iter().cloned().fold(0.0, f64::max).max(1.0);
    for (new_c, &c) in order.iter().enumerate() {
        if norms[c] > 1e-15 * scale {
            for r in 0..n {
                w.set(r, new_c, b.get(r, c) / norms[c]);
            }
        }
    }
    // Complete any null-space columns of W to an orthonormal basis.
    for new_c in 0..n {
        let empty = (0..n).map(|r| w.get(r, new_c).norm_sqr()).sum::<f64>() < 0.5;
        if !empty {
            continue;
        }
        for basis in 0..n {
            let mut col: Vec<Complex64> = (0..n)
                .map(|r| if r == basis { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
                .collect();
            for other in 0..n {
                if other == new_c {
                    continue;
                }
                let dot: Complex64 = (0..n).map(|r| w.get(r, other).conj() * col[r]).sum();
                for r in 0..n {
                    let v = col[r] - dot * w.get(r, other);
                    col[r] = v;
                }
            }
            let nrm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > 0.5 {
                for r in 0..n {
                    w.set(r, new_c, col[r] / nrm);
                }
                break;
            }
        }
    }
    Ok((w, sigma, z_out))
}

/// Factor B with B * B^dagger = C for Hermitian positive semi-definite C.
///
/// B is lower triangular (a Cholesky factor) whenever C is positive
/// definite; semi-definite inputs produce zero columns at the defective
/// pivots. Non-Hermitian or indefinite inputs are rejected.
pub fn hermitian_sqrt_factor(c: &CMatrix, tol: &Tolerance) -> Result<CMatrix> {
    if !c.is_square() {
        return Err(Error::InvalidInput("hermitian_sqrt_factor requires a square matrix".into()));
    }
    if !c.is_hermitian(tol) {
        return Err(Error::InvalidInput(
            "hermitian_sqrt_factor requires a Hermitian matrix".into(),
        ));
    }
    let n = c.rows();
    let scale = (0..n).map(|i| c.get(i, i).re.abs()).fold(0.0, f64::max).max(1.0);
    let pivot_tol = tol.bound(scale);
    let mut b = CMatrix::zeros(n, n);
    for k in 0..n {
        let mut d = c.get(k, k).re;
        for j in 0..k {
            d -= b.get(k, j).norm_sqr();
        }
        if d > pivot_tol {
            let bkk = d.sqrt();
            b.set(k, k, Complex64::new(bkk, 0.0));
            for i in k + 1..n {
                let mut v = c.get(i, k);
                for j in 0..k {
                    v -= b.get(i, j) * b.get(k, j).conj();
                }
                b.set(i, k, v / bkk);
            }
        } else if d >= -pivot_tol {
            // Semi-definite pivot: the rest of the column must vanish too.
            let col_tol = (pivot_tol * scale).sqrt().max(pivot_tol);
            for i in k + 1..n {
                let mut v = c.get(i, k);
                for j in 0..k {
                    v -= b.get(i, j) * b.get(k, j).conj();
                }
                if v.norm() > 4.0 * col_tol {
                    return Err(Error::InvalidInput(
                        "matrix is not positive semi-definite".into(),
                    ));
                }
            }
        } else {
            return Err(Error::InvalidInput(format!(
                "matrix is indefinite: pivot {k} has Schur complement {d:.3e}"
            )));
        }
    }
    Ok(b)
}

/// Eigendecomposition of a Hermitian matrix via two-sided Jacobi rotations.
///
/// Returns (eigenvalues, Q) sorted in descending order with H = Q L Q^dagger.
pub fn hermitian_eigen(h: &CMatrix, tol: &Tolerance) -> Result<(Vec<f64>, CMatrix)> {
    if !h.is_square() {
        return Err(Error::InvalidInput("hermitian_eigen requires a square matrix".into()));
    }
    let n = h.rows();
    let mut a = h.clone();
    // Hermitize to wash out representation noise.
    for r in 0..n {
        for c in 0..n {
            let v = (a.get(r, c) + a.get(c, r).conj()) * Complex64::new(0.5, 0.0);
            a.set(r, c, v);
        }
    }
    let mut q = CMatrix::identity(n);
    let scale = a.max_abs().max(1.0);

    const MAX_SWEEPS: usize = 60;
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for qi in p + 1..n {
                let off = a.get(p, qi).norm();
                if off <= 1e-15 * scale + tol.abs * tol.abs {
                    continue;
                }
                rotated = true;
                let app = a.get(p, p).re;
                let aqq = a.get(qi, qi).re;
                let phase = a.get(p, qi) / off;
                let zeta = (aqq - app) / (2.0 * off);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let cth = 1.0 / (1.0 + t * t).sqrt();
                let sth = cth * t;
                let v2 = [
                    [Complex64::new(cth, 0.0), Complex64::new(sth, 0.0)],
                    [-phase.conj() * sth, phase.conj() * cth],
                ];
                a.right_apply_2x2(&v2, p, qi);
                a.left_apply_2x2_dagger(&v2, p, qi);
                q.right_apply_2x2(&v2, p, qi);
                a.set(p, qi, Complex64::new(0.0, 0.0));
                a.set(qi, p, Complex64::new(0.0, 0.0));
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericalFailure(
            "Jacobi eigendecomposition did not converge within 60 sweeps".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i).re).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap());
    let values: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    Ok((values, q.select_columns(&order)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{random_complex_matrix, random_unitary, rng_for, with_singular_values};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "expected {b}, got {a}");
    }

    #[test]
    fn qr_identity() {
        let a = CMatrix::identity(3);
        let (q, r) = qr_decompose(&a, &Tolerance::default()).unwrap();
        assert!(q.sub(&CMatrix::identity(3)).max_abs() < 1e-14);
        assert!(r.sub(&CMatrix::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn qr_permutation_has_unit_diagonal() {
        let a = CMatrix::from_rows(&[
            vec![(0.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap();
        let tol = Tolerance::default();
        let (q, r) = qr_decompose(&a, &tol).unwrap();
        assert!(q.is_unitary(&tol));
        assert_close(r.get(0, 0).re, 1.0, 1e-12);
        assert_close(r.get(1, 1).re, 1.0, 1e-12);
        assert_close(r.get(0, 0).im, 0.0, 0.0);
        assert_close(r.get(1, 1).im, 0.0, 0.0);
    }

    #[test]
    fn qr_reconstructs_random_tall_matrix() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            let mut rng = rng_for(900 + seed);
            let a = random_complex_matrix(&mut rng, 5, 3);
            let (q, r) = qr_decompose(&a, &tol).unwrap();
            let defect = q.matmul(&r).sub(&a).frobenius_norm() / a.frobenius_norm();
            assert!(defect < 1e-12, "seed {seed}: qr defect {defect}");
            assert!(q.has_orthonormal_columns(&tol));
            assert!(r.is_upper_triangular(&tol));
            for k in 0..3 {
                assert!(r.get(k, k).re > 0.0);
                assert_eq!(r.get(k, k).im, 0.0);
            }
        }
    }

    #[test]
    fn qr_rejects_rank_deficient() {
        let a = CMatrix::from_rows(&[
            vec![(1.0, 0.0), (2.0, 0.0)],
            vec![(2.0, 0.0), (4.0, 0.0)],
            vec![(3.0, 0.0), (6.0, 0.0)],
        ])
        .unwrap();
        match qr_decompose(&a, &Tolerance::default()) {
            Err(Error::Singular(_)) => {}
            other => panic!("expected singularity error, got {other:?}"),
        }
    }

    #[test]
    fn svd_of_diagonal() {
        let a = CMatrix::from_real_diag(&[3.0, 2.0]);
        let (w, sigma, z) = svd(&a, &Tolerance::default()).unwrap();
        assert_close(sigma[0], 3.0, 1e-12);
        assert_close(sigma[1], 2.0, 1e-12);
        assert!(w.sub(&CMatrix::identity(2)).max_abs() < 1e-12);
        assert!(z.sub(&CMatrix::identity(2)).max_abs() < 1e-12);
    }

    #[test]
    fn svd_of_monomial_matrix() {
        let a = CMatrix::from_rows(&[
            vec![(0.0, 0.0), (2.0, 0.0)],
            vec![(1.0, 0.0), (0.0, 0.0)],
        ])
        .unwrap();
        let (_, sigma, _) = svd(&a, &Tolerance::default()).unwrap();
        assert_close(sigma[0], 2.0, 1e-12);
        assert_close(sigma[1], 1.0, 1e-12);
    }

    #[test]
    fn svd_product_matches_lu_determinant() {
        let tol = Tolerance::default();
        for seed in 0..20 {
            let mut rng = rng_for(3100 + seed);
            let a = random_complex_matrix(&mut rng, 4, 4);
            let (w, sigma, z) = svd(&a, &tol).unwrap();
            let det = a.determinant().unwrap().norm();
            let prod: f64 = sigma.iter().product();
            assert!((prod - det).abs() <= 1e-10 * det.max(1e-30), "seed {seed}");
            let recon = w.matmul(&CMatrix::from_real_diag(&sigma)).matmul(&z.adjoint());
            let defect = recon.sub(&a).frobenius_norm() / a.frobenius_norm();
            assert!(defect < 1e-12, "seed {seed}: svd defect {defect}");
        }
    }

    #[test]
    fn svd_handles_singular_matrix() {
        let a = CMatrix::from_real_diag(&[3.0, 0.0]);
        let tol = Tolerance::default();
        let (w, sigma, z) = svd(&a, &tol).unwrap();
        assert_close(sigma[1], 0.0, 1e-14);
        assert!(w.is_unitary(&tol));
        assert!(z.is_unitary(&tol));
    }

    #[test]
    fn svd_respects_prescribed_singular_values() {
        let values = [4.0, 2.0, 1.0, 0.125];
        let mut rng = rng_for(77);
        let a = with_singular_values(&mut rng, &values);
        let (_, sigma, _) = svd(&a, &Tolerance::default()).unwrap();
        for (got, want) in sigma.iter().zip(values.iter()) {
            assert_close(*got, *want, 1e-10);
        }
    }

    #[test]
    fn sqrt_factor_identity_and_diag() {
        let tol = Tolerance::default();
        let b = hermitian_sqrt_factor(&CMatrix::identity(2), &tol).unwrap();
        assert!(b.sub(&CMatrix::identity(2)).max_abs() < 1e-14);

        let c = CMatrix::from_real_diag(&[4.0, 9.0]);
        let b = hermitian_sqrt_factor(&c, &tol).unwrap();
        assert_close(b.get(0, 0).re, 2.0, 1e-12);
        assert_close(b.get(1, 1).re, 3.0, 1e-12);
    }

    #[test]
    fn sqrt_factor_white_input_covariance() {
        // Covariance (P/2) * I with P = 1.
        let c = CMatrix::from_real_diag(&[0.5, 0.5]);
        let b = hermitian_sqrt_factor(&c, &Tolerance::default()).unwrap();
        assert_close(b.get(0, 0).re, 0.5f64.sqrt(), 1e-12);
        assert_close(b.get(1, 1).re, 0.5f64.sqrt(), 1e-12);
        let prod = b.matmul(&b.adjoint());
        assert!(prod.sub(&c).max_abs() < 1e-14);
    }

    #[test]
    fn sqrt_factor_semidefinite_rank_one() {
        let c = CMatrix::from_rows(&[
            vec![(1.0, 0.0), (1.0, 0.0)],
            vec![(1.0, 0.0), (1.0, 0.0)],
        ])
        .unwrap();
        let b = hermitian_sqrt_factor(&c, &Tolerance::default()).unwrap();
        assert!(b.matmul(&b.adjoint()).sub(&c).max_abs() < 1e-12);
    }

    #[test]
    fn sqrt_factor_rejects_bad_inputs() {
        let tol = Tolerance::default();
        let nonherm = CMatrix::from_rows(&[
            vec![(1.0, 0.0), (2.0, 0.0)],
            vec![(0.0, 0.0), (1.0, 0.0)],
        ])
        .unwrap();
        assert!(matches!(
            hermitian_sqrt_factor(&nonherm, &tol),
            Err(Error::InvalidInput(_))
        ));
        let indef = CMatrix::from_real_diag(&[1.0, -1.0]);
        assert!(matches!(
            hermitian_sqrt_factor(&indef, &tol),
            Err(Error::InvalidInput(_))
        ));
    }

    #[test]
    fn predicates() {
        let tol = Tolerance::default();
        assert!(CMatrix::identity(4).is_unitary(&tol));
        let a = CMatrix::from_rows(&[
            vec![(1.0, 0.0), (2.0, 0.0)],
            vec![(3.0, 0.0), (4.0, 0.0)],
        ])
        .unwrap();
        assert!(!a.is_upper_triangular(&tol));
        let g = CMatrix::from_real_diag(&[2.0, 0.5]);
        assert_close(g.geometric_mean_of_diagonal(), 1.0, 1e-14);
    }

    #[test]
    fn ql_produces_lower_factor() {
        let tol = Tolerance::default();
        let mut rng = rng_for(42);
        let a = random_complex_matrix(&mut rng, 4, 4);
        let (q, l) = ql_decompose(&a, &tol).unwrap();
        assert!(q.is_unitary(&tol));
        assert!(l.adjoint().is_upper_triangular(&tol));
        for k in 0..4 {
            assert!(l.get(k, k).re > 0.0);
        }
        assert!(q.matmul(&l).sub(&a).max_abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let tol = Tolerance::default();
        let mut rng = rng_for(4242);
        let u = random_unitary(&mut rng, 3);
        let h = u.matmul(&CMatrix::from_real_diag(&[5.0, 1.0, -2.0])).matmul(&u.adjoint());
        let (vals, q) = hermitian_eigen(&h, &tol).unwrap();
        assert_close(vals[0], 5.0, 1e-10);
        assert_close(vals[1], 1.0, 1e-10);
        assert_close(vals[2], -2.0, 1e-10);
        let recon = q.matmul(&CMatrix::from_real_diag(&vals)).matmul(&q.adjoint());
        assert!(recon.sub(&h).max_abs() < 1e-10);
    }

    #[test]
    fn determinant_of_triangular() {
        let a = CMatrix::from_rows(&[
            vec![(2.0, 0.0), (7.0, -1.0)],
            vec![(0.0, 0.0), (3.0, 0.0)],
        ])
        .unwrap();
        let d = a.determinant().unwrap();
        assert_close(d.re, 6.0, 1e-12);
        assert_close(d.im, 0.0, 1e-12);
    }

    #[test]
    fn inverse_round_trip() {
        let mut rng = rng_for(7);
        let a = random_complex_matrix(&mut rng, 4, 4);
        let inv = a.inverse().unwrap();
        assert!(a.matmul(&inv).sub(&CMatrix::identity(4)).max_abs() < 1e-10);
    }

    #[test]
    fn rejects_empty_and_nonfinite() {
        assert!(CMatrix::new(0, 2, vec![]).is_err());
        assert!(CMatrix::new(1, 1, vec![Complex64::new(f64::NAN, 0.0)]).is_err());
        assert!(Tolerance::new(-1.0, 1.0).is_err());
    }
}
