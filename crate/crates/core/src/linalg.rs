//! Dense complex linear algebra for small Hilbert spaces.
//!
//! Vectors and square matrices of [`Complex`] scalars, the inner and outer
//! products, adjoint and trace, and a cyclic Jacobi eigensolver for
//! Hermitian matrices. All types are immutable once built.

use std::fmt;
use std::ops::Index;

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Sweep cap for the Jacobi eigensolver.
pub const MAX_SWEEPS: usize = 100;

/// Off-diagonal Frobenius norm (relative to `max(1, ||m||_F)`) at which the
/// Jacobi iteration stops.
pub const CONVERGENCE_THRESHOLD: f64 = 1e-13;

/// Components with modulus at or below this are treated as zero when fixing
/// eigenvector phases.
const PHASE_EPS: f64 = 1e-12;

#[inline]
fn is_finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A column vector of complex amplitudes with fixed length `n >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector {
    entries: Vec<Complex>,
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Empty("vector"));
        }
        if !entries.iter().copied().all(is_finite) {
            return Err(Error::NonFinite("vector"));
        }
        Ok(Self { entries })
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Complex::new(x, 0.0)).collect())
    }

    /// The `index`-th standard basis vector of `C^dim`.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        let mut entries = vec![Complex::new(0.0, 0.0); dim];
        entries[index] = Complex::new(1.0, 0.0);
        Ok(Self { entries })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn entries(&self) -> &[Complex] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = &Complex> {
        self.entries.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    /// Entrywise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.len(), other.len())?;
        Ok(Self {
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.len(), other.len())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn into_entries(self) -> Vec<Complex> {
        self.entries
    }
}

impl Index<usize> for ComplexVector {
    type Output = Complex;

    fn index(&self, i: usize) -> &Complex {
        &self.entries[i]
    }
}

#[inline]
fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// `<a|b> = sum_i conj(a_i) b_i`.
pub fn inner_product(a: &ComplexVector, b: &ComplexVector) -> Result<Complex> {
    check_dims(a.len(), b.len())?;
    Ok(a.entries
        .iter()
        .zip(&b.entries)
        .map(|(x, y)| x.conj() * y)
        .sum())
}

/// `|a><b|`, the matrix with entries `a_i conj(b_j)`.
pub fn outer_product(a: &ComplexVector, b: &ComplexVector) -> Result<ComplexMatrix> {
    check_dims(a.len(), b.len())?;
    let n = a.len();
    let mut data = Vec::with_capacity(n * n);
    for x in &a.entries {
        for y in &b.entries {
            data.push(x * y.conj());
        }
    }
    Ok(ComplexMatrix { dim: n, data })
}

/// Dense square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            data: vec![Complex::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = Complex::new(1.0, 0.0);
        }
        Ok(m)
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Empty("matrix"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (row, entries) in rows.into_iter().enumerate() {
            if entries.len() != dim {
                return Err(Error::NotSquare {
                    rows: dim,
                    row,
                    len: entries.len(),
                });
            }
            data.extend(entries);
        }
        if !data.iter().copied().all(is_finite) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Complex::new(x, 0.0)).collect())
                .collect(),
        )
    }

    /// `sum_i values[i] |vectors[i]><vectors[i]|`.
    pub fn from_spectrum(values: &[f64], vectors: &[ComplexVector]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("spectrum"));
        }
        check_dims(values.len(), vectors.len())?;
        let dim = vectors[0].len();
        let mut m = Self::zeros(dim)?;
        for (&value, v) in values.iter().zip(vectors) {
            check_dims(dim, v.len())?;
            for i in 0..dim {
                let vi = v[i] * value;
                for j in 0..dim {
                    m.data[i * dim + j] += vi * v[j].conj();
                }
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.data[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.data.chunks(self.dim)
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(self.data[j * n + i].conj());
            }
        }
        Self { dim: n, data }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let n = self.dim;
        let mut data = vec![Complex::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                for j in 0..n {
                    data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(Self { dim: n, data })
    }

    /// `M |v>`.
    pub fn apply(&self, v: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.dim, v.len())?;
        let entries = self
            .rows()
            .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector { entries })
    }

    /// `<a| M |b>`.
    pub fn sandwich(&self, a: &ComplexVector, b: &ComplexVector) -> Result<Complex> {
        inner_product(a, &self.apply(b)?)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: Complex) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    /// `U M U^dagger`.
    pub fn conjugate_by(&self, unitary: &Self) -> Result<Self> {
        unitary.matmul(self)?.matmul(&unitary.adjoint())
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// `max |m - m^dagger|` over all entries.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self.data[i * n + j] - self.data[j * n + i].conj()).norm());
            }
        }
        dev
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[ComplexVector]) -> Result<Self> {
        let n = columns.len();
        let mut m = Self::zeros(n)?;
        for (j, col) in columns.iter().enumerate() {
            check_dims(n, col.len())?;
            for i in 0..n {
                m.data[i * n + j] = col[i];
            }
        }
        Ok(m)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (row, col): (usize, usize)) -> &Complex {
        &self.data[row * self.dim + col]
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prec = f.precision().unwrap_or(6);
        for row in self.rows() {
            let cells: Vec<String> = row
                .iter()
                .map(|z| {
                    if z.im == 0.0 {
                        format!("{:.*}", prec, z.re)
                    } else {
                        format!("{:.*}{:+.*}i", prec, z.re, prec, z.im)
                    }
                })
                .collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Eigenvalues (descending) with index-aligned orthonormal eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomposition {
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<ComplexVector>,
}

impl SpectralDecomposition {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &[ComplexVector] {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `sum_i lambda_i |v_i><v_i|`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        ComplexMatrix::from_spectrum(&self.eigenvalues, &self.eigenvectors)
            .expect("decomposition is square and non-empty")
    }

    /// The unitary whose columns are the eigenvectors.
    pub fn eigenvector_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.eigenvectors).expect("decomposition is square")
    }

    /// Replace every eigenvalue by `f(lambda)`, keeping the eigenvectors.
    pub fn map_eigenvalues(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            eigenvalues: self.eigenvalues.iter().map(|&x| f(x)).collect(),
            eigenvectors: self.eigenvectors.clone(),
        }
    }
}

/// Diagonalizes a Hermitian matrix with cyclic complex Jacobi rotations.
///
/// `tol` bounds the accepted non-Hermiticity `max |m - m^dagger|`. Output
/// eigenvalues are sorted descending (ties keep their sweep order) and each
/// eigenvector has its first nonzero component real and positive, so the
/// result is fully determined by the input.
pub fn hermitian_eig(m: &ComplexMatrix, tol: f64) -> Result<SpectralDecomposition> {
    if !(tol.is_finite() && tol >= 0.0) {
        return Err(Error::NonFinite("tolerance"));
    }
    let deviation = m.hermitian_deviation();
    if deviation > tol {
        return Err(Error::NotHermitian { deviation, tol });
    }

    let n = m.dim;
    // work on the exact Hermitian part
    let mut a = m.add(&m.adjoint())?.scale(Complex::new(0.5, 0.0)).data;
    let mut v = ComplexMatrix::identity(n)?.data;
    let threshold = CONVERGENCE_THRESHOLD * m.frobenius_norm().max(1.0);

    let off_norm = |a: &[Complex]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    loop {
        let residual = off_norm(&a);
        if residual <= threshold {
            break;
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps, residual });
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, n, p, q);
            }
        }
        sweeps += 1;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].re.total_cmp(&a[i * n + i].re));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut eigenvectors = Vec::with_capacity(n);
    for &k in &order {
        eigenvalues.push(a[k * n + k].re);
        let mut col: Vec<Complex> = (0..n).map(|i| v[i * n + k]).collect();
        fix_phase(&mut col);
        eigenvectors.push(ComplexVector { entries: col });
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One Jacobi rotation annihilating `a[p][q]`.
///
/// The unitary is `G = diag(1, e^{-i phi}) R(theta)` where `phi = arg a[p][q]`
/// and `R` is the real rotation diagonalizing the phase-reduced 2x2 block.
fn rotate(a: &mut [Complex], v: &mut [Complex], n: usize, p: usize, q: usize) {
    let b = a[p * n + q];
    let b_abs = b.norm();
    if b_abs == 0.0 {
        return;
    }
    let phase = b / b_abs;
    let app = a[p * n + p].re;
    let aqq = a[q * n + q].re;

    let theta = (aqq - app) / (2.0 * b_abs);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    // signum(0) is 1 for +0.0, which is the rotation we want
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let e_minus = phase.conj();

    // A <- A G, V <- V G
    for k in 0..n {
        let x = a[k * n + p];
        let y = a[k * n + q];
        a[k * n + p] = x * c - y * e_minus * s;
        a[k * n + q] = x * s + y * e_minus * c;

        let x = v[k * n + p];
        let y = v[k * n + q];
        v[k * n + p] = x * c - y * e_minus * s;
        v[k * n + q] = x * s + y * e_minus * c;
    }
    // A <- G^dagger A
    for k in 0..n {
        let x = a[p * n + k];
        let y = a[q * n + k];
        a[p * n + k] = x * c - y * phase * s;
        a[q * n + k] = x * s + y * phase * c;
    }
    a[p * n + q] = Complex::new(0.0, 0.0);
    a[q * n + p] = Complex::new(0.0, 0.0);
    a[p * n + p].im = 0.0;
    a[q * n + q].im = 0.0;
}

fn fix_phase(col: &mut [Complex]) {
    if let Some(lead) = col.iter().find(|z| z.norm() > PHASE_EPS).copied() {
        let rot = lead.conj() / lead.norm();
        for z in col.iter_mut() {
            *z *= rot;
        }
        // exact zero imaginary part on the leading component
        if let Some(first) = col.iter_mut().find(|z| z.norm() > PHASE_EPS) {
            first.im = 0.0;
        }
    }
}
