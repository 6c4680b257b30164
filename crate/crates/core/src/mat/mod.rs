//! Dense complex matrices, vectors, and the numerical primitives the
//! rest of the crate is built on: commutators, Hilbert-Schmidt pairings,
//! the spectral matrix exponential, and real-span rank computation.
//!
//! Everything here is an immutable value after construction and every
//! operation is a pure function; nothing mutates shared state.

mod eig;
mod gram;

pub use eig::eigh;
pub use gram::{real_null_space, real_span_rank, RealSpan};

use num_complex::Complex64;
use std::fmt;
use thiserror::Error;

/// Errors from matrix construction and the numerical primitives.
#[derive(Debug, Error)]
pub enum MatError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },
    #[error("dimension must be at least 1")]
    ZeroDim,
    #[error("entries must be finite")]
    NonFinite,
    #[error("not skew-Hermitian: relative deviation {deviation:.3e} exceeds {tol:.3e}")]
    NotSkewHermitian { deviation: f64, tol: f64 },
    #[error("not a unit vector: |norm - 1| = {deviation:.3e}")]
    NotNormalized { deviation: f64 },
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigNotConverged { sweeps: usize, off: f64 },
    #[error("empty input list")]
    EmptyInput,
}

/// Dense square complex matrix, row-major storage.
#[derive(Clone, PartialEq)]
pub struct CMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    /// Zero matrix of dimension `dim`.
    pub fn zeros(dim: usize) -> Self {
        CMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// Identity matrix of dimension `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Build from a generator over (row, col).
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = CMatrix::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Build from row-major rows; fails on a ragged or empty layout.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, MatError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(MatError::ZeroDim);
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(MatError::DimMismatch {
                    left: dim,
                    right: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        let m = CMatrix { dim, data };
        if !m.is_finite() {
            return Err(MatError::NonFinite);
        }
        Ok(m)
    }

    /// Diagonal matrix from the given entries.
    pub fn diag(entries: &[Complex64]) -> Self {
        let mut m = CMatrix::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMatrix {
        CMatrix::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        CMatrix {
            dim: self.dim,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        CMatrix {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix product `self * other`.
    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.dim, other.dim, "matrix dimension mismatch");
        let n = self.dim;
        let mut out = CMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += aik * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &CVector) -> CVector {
        assert_eq!(self.dim, v.dim(), "matrix/vector dimension mismatch");
        let n = self.dim;
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..n {
                acc += self[(i, j)] * v[j];
            }
            out[i] = acc;
        }
        CVector::new(out)
    }

    /// Unitary conjugation `u * self * u†`.
    pub fn conjugate_by(&self, u: &CMatrix) -> CMatrix {
        u.matmul(self).matmul(&u.dagger())
    }

    /// Leading `k × k` principal block.
    pub fn leading_block(&self, k: usize) -> CMatrix {
        assert!(k <= self.dim, "block larger than matrix");
        CMatrix::from_fn(k, |i, j| self[(i, j)])
    }

    /// Direct sum `self ⊕ other`.
    pub fn direct_sum(&self, other: &CMatrix) -> CMatrix {
        let n = self.dim;
        let m = other.dim;
        CMatrix::from_fn(n + m, |i, j| {
            if i < n && j < n {
                self[(i, j)]
            } else if i >= n && j >= n {
                other[(i - n, j - n)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// `‖self†·self − I‖_F`, the unitarity defect.
    pub fn unitarity_defect(&self) -> f64 {
        self.dagger()
            .matmul(self)
            .sub(&CMatrix::identity(self.dim))
            .frobenius_norm()
    }

    /// Relative deviation of `self` from Hermitian symmetry.
    pub fn hermiticity_defect(&self) -> f64 {
        let norm = self.frobenius_norm();
        if norm == 0.0 {
            return 0.0;
        }
        self.sub(&self.dagger()).frobenius_norm() / norm
    }

    /// Flatten to interleaved `[re, im]` coordinates, the realification
    /// used by the real-span machinery.
    pub fn to_real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.data.len());
        for c in &self.data {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }

    /// Inverse of [`CMatrix::to_real_coords`].
    pub fn from_real_coords(dim: usize, coords: &[f64]) -> CMatrix {
        assert_eq!(coords.len(), 2 * dim * dim);
        let data = coords
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        CMatrix { dim, data }
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for CMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let c = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", c.re, c.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Complex column vector.
#[derive(Clone, PartialEq, Debug)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        CVector { data }
    }

    pub fn zeros(dim: usize) -> Self {
        CVector {
            data: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// Standard basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v.data[k] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Inner product `⟨self, other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> CVector {
        CVector {
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn add(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        CVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &CVector) -> CVector {
        assert_eq!(self.dim(), other.dim(), "vector dimension mismatch");
        CVector {
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn normalized(&self) -> CVector {
        let n = self.norm();
        assert!(n > 0.0, "cannot normalize the zero vector");
        self.scale(Complex64::new(1.0 / n, 0.0))
    }

    /// Flatten to interleaved `[re, im]` real coordinates.
    pub fn to_real_coords(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(2 * self.data.len());
        for c in &self.data {
            out.push(c.re);
            out.push(c.im);
        }
        out
    }
}

impl std::ops::Index<usize> for CVector {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.data[i]
    }
}

/// Unit vector on the Hilbert space; the refinement of [`CVector`]
/// accepted by state-dependent analyses.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    /// Validates `‖ψ‖ = 1` within 1e-10.
    pub fn new(v: CVector) -> Result<Self, MatError> {
        if !v.is_finite() {
            return Err(MatError::NonFinite);
        }
        let deviation = (v.norm() - 1.0).abs();
        if deviation > 1e-10 {
            return Err(MatError::NotNormalized { deviation });
        }
        Ok(StateVector(v))
    }

    /// Normalizes any nonzero vector into a state.
    pub fn normalize(v: &CVector) -> Result<Self, MatError> {
        if !v.is_finite() {
            return Err(MatError::NonFinite);
        }
        if v.norm() == 0.0 {
            return Err(MatError::NotNormalized { deviation: 1.0 });
        }
        Ok(StateVector(v.normalized()))
    }

    pub fn vector(&self) -> &CVector {
        &self.0
    }
}

/// Skew-Hermitian matrix, `A† = -A`. The generators of every dynamical
/// algebra in this crate live here.
#[derive(Clone, Debug, PartialEq)]
pub struct SkewHermitian {
    inner: CMatrix,
}

impl SkewHermitian {
    /// Validates skewness: `‖A + A†‖_F ≤ tol · ‖A‖_F`.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self, MatError> {
        if !m.is_finite() {
            return Err(MatError::NonFinite);
        }
        let norm = m.frobenius_norm();
        let dev = m.add(&m.dagger()).frobenius_norm();
        let deviation = if norm == 0.0 { 0.0 } else { dev / norm };
        if deviation > tol {
            return Err(MatError::NotSkewHermitian { deviation, tol });
        }
        Ok(SkewHermitian { inner: m })
    }

    /// Projects onto the skew-Hermitian part, `(A - A†)/2`, returning the
    /// relative deviation that was removed. File-loaded matrices carry
    /// decimal roundoff; this makes them exactly skew.
    pub fn symmetrize(m: CMatrix) -> (Self, f64) {
        let norm = m.frobenius_norm();
        let skew = m.sub(&m.dagger()).scale(Complex64::new(0.5, 0.0));
        let deviation = if norm == 0.0 {
            0.0
        } else {
            m.sub(&skew).frobenius_norm() / norm
        };
        (SkewHermitian { inner: skew }, deviation)
    }

    /// `-i H` for Hermitian `H`, symmetrizing away roundoff.
    pub fn from_hermitian(h: &CMatrix) -> Self {
        let m = h.add(&h.dagger()).scale(Complex64::new(0.0, -0.5));
        SkewHermitian { inner: m }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.inner
    }

    pub fn into_matrix(self) -> CMatrix {
        self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }
}

/// Commutator `[a, b] = ab - ba`.
///
/// Skew-Hermitian inputs give a skew-Hermitian result, which is what
/// keeps Lie-closure iterations inside `u(n)`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix, MatError> {
    if a.dim() != b.dim() {
        return Err(MatError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    Ok(a.matmul(b).sub(&b.matmul(a)))
}

/// Hilbert-Schmidt inner product `Tr(a† b)`, antilinear in `a`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<Complex64, MatError> {
    if a.dim() != b.dim() {
        return Err(MatError::DimMismatch {
            left: a.dim(),
            right: b.dim(),
        });
    }
    let n = a.dim();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)].conj() * b[(i, j)];
        }
    }
    Ok(acc)
}

/// Real part of the Hilbert-Schmidt pairing; the inner product of the
/// realified matrix space. Lie algebras are real vector spaces, so rank
/// and orthogonality decisions all happen under this form.
pub fn re_hs_inner(a: &CMatrix, b: &CMatrix) -> Result<f64, MatError> {
    Ok(hs_inner(a, b)?.re)
}

/// Matrix exponential of a skew-Hermitian matrix via unitary
/// diagonalization of the Hermitian matrix `iA`: with `iA = V Λ V†`,
/// `exp(A) = V e^{-iΛ} V†`. The result is unitary to roundoff, so chains
/// of propagator factors do not drift away from the unitary group the
/// way truncated series would.
pub fn expm(a: &SkewHermitian) -> Result<CMatrix, MatError> {
    let h = a.matrix().scale(Complex64::new(0.0, 1.0));
    let (eigvals, v) = eigh(&h)?;
    let phases: Vec<Complex64> = eigvals
        .iter()
        .map(|&l| Complex64::from_polar(1.0, -l))
        .collect();
    // V · diag(e^{-iλ}) · V†
    let n = h.dim();
    let mut scaled = v.clone();
    for j in 0..n {
        for i in 0..n {
            scaled[(i, j)] *= phases[j];
        }
    }
    Ok(scaled.matmul(&v.dagger()))
}

/// Common fixed matrices used across the crate and its tests.
pub mod pauli {
    use super::CMatrix;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub fn sigma_x() -> CMatrix {
        CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    pub fn sigma_y() -> CMatrix {
        CMatrix::from_rows(&[
            vec![c(0.0, 0.0), c(0.0, -1.0)],
            vec![c(0.0, 1.0), c(0.0, 0.0)],
        ])
        .unwrap()
    }

    pub fn sigma_z() -> CMatrix {
        CMatrix::from_rows(&[
            vec![c(1.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(-1.0, 0.0)],
        ])
        .unwrap()
    }
}
