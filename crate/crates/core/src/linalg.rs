//! Dense complex matrix kernel.
//!
//! Row-major storage, deterministic loop order everywhere so repeated runs are
//! bit-identical. Hermitian spectral work is delegated to `nalgebra`, the rest
//! (products, tensor calculus, partial traces) is plain loops.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerance of the Hermiticity gate in [`herm_eig`].
pub const HERMITIAN_GATE: f64 = 1e-8;
/// Relative floor below which negative eigenvalues are an error for PSD functions.
pub const PSD_CLAMP_FLOOR: f64 = 1e-12;
/// Relative floor below which `inv_sqrt`/`log` reject an eigenvalue as singular.
pub const SINGULAR_FLOOR: f64 = 1e-14;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting wrong lengths and non-finite values.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for a {}x{} matrix",
                data.len(),
                rows,
                cols
            )));
        }
        if let Some(k) = data.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(k / cols.max(1), k % cols.max(1)));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(1.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Convenience constructor for literals; panics on ragged input.
    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let cc = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == cc), "ragged rows");
        Self { rows: r, cols: cc, data: rows.concat() }
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let v: Vec<Vec<C64>> = rows.iter().map(|r| r.iter().map(|&x| cr(x)).collect()).collect();
        Self::from_rows(&v)
    }

    pub fn diag(entries: &[C64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &z) in entries.iter().enumerate() {
            m[(i, i)] = z;
        }
        m
    }

    pub fn diag_real(entries: &[f64]) -> Self {
        let v: Vec<C64> = entries.iter().map(|&x| cr(x)).collect();
        Self::diag(&v)
    }

    /// Column vector from entries.
    pub fn column(entries: &[C64]) -> Self {
        Self { rows: entries.len(), cols: 1, data: entries.to_vec() }
    }

    /// `|e_i><e_j|` in dimension `rows x cols`.
    pub fn unit(rows: usize, cols: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(rows, cols);
        m[(i, j)] = cr(1.0);
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[C64]) {
        for (i, &z) in v.iter().enumerate() {
            self[(i, j)] = z;
        }
    }

    /// Columns `range` as a new matrix.
    pub fn columns(&self, idx: &[usize]) -> Self {
        Self::from_fn(self.rows, idx.len(), |i, k| self[(i, idx[k])])
    }

    /// Sub-matrix with the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z.conj()).collect() }
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(cr(s))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius distance; panics on shape mismatch.
    pub fn dist(&self, other: &Self) -> f64 {
        assert_eq!(self.shape(), other.shape(), "dist: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
    }

    /// Hilbert-Schmidt inner product `tr(self^dagger other)`.
    pub fn hs_inner(&self, other: &Self) -> C64 {
        assert_eq!(self.shape(), other.shape(), "hs_inner: shape mismatch");
        self.data.iter().zip(&other.data).map(|(a, b)| a.conj() * b).sum()
    }

    /// `||A - A^dagger||_F`.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
            }
        }
        s.sqrt()
    }

    pub fn hermitian_part(&self) -> Self {
        let a = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + a[(i, j)]) * 0.5)
    }

    /// `A^dagger A` residual from the identity, Frobenius.
    pub fn unitarity_residual(&self) -> f64 {
        (&self.adjoint() * self).dist(&Self::identity(self.cols))
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * rhs.cols..(k + 1) * rhs.cols];
                let dst = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (d, b) in dst.iter_mut().zip(row) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product with a column of entries.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "apply: length mismatch");
        (0..self.rows)
            .map(|i| self.data[i * self.cols..(i + 1) * self.cols].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `|u><v|`.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    /// `X ↦ A X A^dagger`.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        &(a * self) * &a.adjoint()
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product shape mismatch")
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "add: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.shape(), rhs.shape(), "sub: shape mismatch");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product: `(a⊗b)[i·rb + k, j·cb + l] = a[i,j]·b[k,l]`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = ComplexMatrix::zeros(ra * rb, ca * cb);
    for i in 0..ra {
        for j in 0..ca {
            let x = a[(i, j)];
            for k in 0..rb {
                for l in 0..cb {
                    out[(i * rb + k, j * cb + l)] = x * b[(k, l)];
                }
            }
        }
    }
    out
}

/// Kronecker product of two vectors.
pub fn kron_vec(u: &[C64], v: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(u.len() * v.len());
    for a in u {
        for b in v {
            out.push(a * b);
        }
    }
    out
}

/// Which tensor factor a partial trace removes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    First,
    Second,
}

/// Traces out one factor of an operator on `C^{d1} ⊗ C^{d2}`.
///
/// `Factor::Second` leaves a `d1 x d1` operator, `Factor::First` a `d2 x d2` one.
pub fn partial_trace(m: &ComplexMatrix, side: Factor, dims: (usize, usize)) -> Result<ComplexMatrix> {
    let (d1, d2) = dims;
    if !m.is_square() || m.rows() != d1 * d2 {
        return Err(Error::DimensionMismatch(format!(
            "partial trace of a {}x{} matrix over {}x{}",
            m.rows(),
            m.cols(),
            d1,
            d2
        )));
    }
    Ok(match side {
        Factor::Second => ComplexMatrix::from_fn(d1, d1, |i, j| (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()),
        Factor::First => ComplexMatrix::from_fn(d2, d2, |k, l| (0..d1).map(|i| m[(i * d2 + k, i * d2 + l)]).sum()),
    })
}

/// Swaps the two factors of an operator on `C^{d1} ⊗ C^{d2}`, giving one on `C^{d2} ⊗ C^{d1}`.
pub fn swap_factors(m: &ComplexMatrix, dims: (usize, usize)) -> ComplexMatrix {
    let (d1, d2) = dims;
    assert_eq!(m.shape(), (d1 * d2, d1 * d2), "swap_factors: shape mismatch");
    ComplexMatrix::from_fn(d1 * d2, d1 * d2, |r, s| {
        let (b, a) = (r / d1, r % d1);
        let (bb, aa) = (s / d1, s % d1);
        m[(a * d2 + b, aa * d2 + bb)]
    })
}

/// Swaps the factors of a vector in `C^{d1} ⊗ C^{d2}`.
pub fn swap_vector(v: &[C64], dims: (usize, usize)) -> Vec<C64> {
    let (d1, d2) = dims;
    assert_eq!(v.len(), d1 * d2, "swap_vector: length mismatch");
    (0..d1 * d2).map(|r| v[(r % d1) * d2 + r / d1]).collect()
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEig {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unitary, eigenvectors as columns in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.eigenvalues[j]);
        &scaled * &v.adjoint()
    }

    /// Applies `f` to the eigenvalues and reassembles in the same basis.
    pub fn map(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let vals: Vec<C64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * vals[j]);
        &scaled * &v.adjoint()
    }

    /// Largest absolute eigenvalue (operator norm).
    pub fn spectral_radius(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Hermitian eigendecomposition, eigenvalues ascending.
///
/// The input is gated at `‖a − a†‖_F ≤ 1e-8·max(1, ‖a‖_F)` and symmetrized before decomposition.
pub fn herm_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("eigendecomposition of a {}x{} matrix", a.rows(), a.cols())));
    }
    let res = a.hermitian_residual();
    if res > HERMITIAN_GATE * a.frobenius_norm().max(1.0) {
        return Err(Error::NonHermitian(res));
    }
    let n = a.rows();
    if n == 0 {
        return Ok(HermitianEig { eigenvalues: vec![], eigenvectors: ComplexMatrix::zeros(0, 0) });
    }
    let h = a.hermitian_part();
    let eig = nalgebra::SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(HermitianEig { eigenvalues, eigenvectors })
}

/// Scalar maps accepted by [`matrix_function`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatrixFn {
    Sqrt,
    InvSqrt,
    Log,
    /// `a^{it}`; unitary for positive definite `a`.
    PowIt(f64),
    /// Real power `a^p`.
    PowP(f64),
}

/// Applies `f` to the spectrum of a positive semidefinite Hermitian matrix.
pub fn matrix_function(a: &ComplexMatrix, f: MatrixFn) -> Result<ComplexMatrix> {
    let eig = herm_eig(a)?;
    matrix_function_eig(&eig, f)
}

/// Same as [`matrix_function`] on an existing decomposition.
pub fn matrix_function_eig(eig: &HermitianEig, f: MatrixFn) -> Result<ComplexMatrix> {
    let norm = eig.spectral_radius();
    let min = eig.min();
    if min < -PSD_CLAMP_FLOOR * norm {
        return Err(Error::NonPsd(min));
    }
    let needs_invertible = match f {
        MatrixFn::InvSqrt | MatrixFn::Log | MatrixFn::PowIt(_) => true,
        MatrixFn::PowP(p) => p < 0.0,
        MatrixFn::Sqrt => false,
    };
    if needs_invertible && (min <= SINGULAR_FLOOR * norm || min <= 0.0) {
        return Err(Error::Singular(min));
    }
    Ok(eig.map(|x| {
        let x = x.max(0.0);
        match f {
            MatrixFn::Sqrt => cr(x.sqrt()),
            MatrixFn::InvSqrt => cr(1.0 / x.sqrt()),
            MatrixFn::Log => cr(x.ln()),
            MatrixFn::PowIt(t) => C64::from_polar(1.0, t * x.ln()),
            MatrixFn::PowP(p) => {
                if x == 0.0 {
                    cr(if p == 0.0 { 1.0 } else { 0.0 })
                } else {
                    cr(x.powf(p))
                }
            }
        }
    }))
}

/// `exp(i·t·h)` for Hermitian `h`.
pub fn exp_i(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(h)?;
    Ok(eig.map(|x| C64::from_polar(1.0, t * x)))
}

/// Numerical rank of a Hermitian PSD matrix: eigenvalues above `rel·λ_max`.
pub fn psd_rank(eig: &HermitianEig, rel: f64) -> usize {
    let top = eig.max();
    if top <= 0.0 {
        return 0;
    }
    eig.eigenvalues.iter().filter(|&&x| x > rel * top).count()
}

/// Singular values of an arbitrary matrix, descending, with right singular vectors as columns.
pub fn svd_right(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let n = a.cols();
    if a.rows() == 0 || n == 0 {
        return (vec![0.0; n], ComplexMatrix::identity(n));
    }
    // Pad short-wide inputs so nalgebra returns a full set of right vectors.
    let padded = if a.rows() < n {
        let mut p = ComplexMatrix::zeros(n, n);
        for i in 0..a.rows() {
            for j in 0..n {
                p[(i, j)] = a[(i, j)];
            }
        }
        p
    } else {
        a.clone()
    };
    let svd = nalgebra::SVD::new(padded.to_nalgebra(), false, true);
    let vt = svd.v_t.expect("right singular vectors requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let values: Vec<f64> = order.iter().map(|&i| svd.singular_values[i]).collect();
    let v = ComplexMatrix::from_fn(n, order.len(), |i, k| vt[(order[k], i)].conj());
    (values, v)
}

/// Orthonormal basis (columns) of the nullspace of `a`, singular values `≤ rel·max(1, σ_max)`.
pub fn nullspace(a: &ComplexMatrix, rel: f64) -> ComplexMatrix {
    let (values, v) = svd_right(a);
    let top = values.first().copied().unwrap_or(0.0).max(1.0);
    let idx: Vec<usize> = (0..values.len()).filter(|&k| values[k] <= rel * top).collect();
    v.columns(&idx)
}
