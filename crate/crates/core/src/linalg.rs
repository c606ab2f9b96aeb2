//! Hermitian matrix utilities and the validated [`SpdMatrix`] type.
//!
//! Inverses and square roots go through the self-adjoint eigendecomposition
//! so that the positive-definiteness check and the factorization happen in
//! the same pass.

use std::ops::Index;

use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};

/// Relative asymmetry tolerated before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues down to `-PSD_TOL * lambda_max` are accepted as PSD round-off.
pub const PSD_TOL: f64 = 1e-10;
/// An inverse requires `lambda_min > PD_FLOOR * lambda_max`.
pub const PD_FLOOR: f64 = 1e-10;

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen<T: Scalar> {
    pub values: Vec<f64>,
    pub vectors: Mat<T>,
}

impl<T: Scalar> HermitianEigen<T> {
    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    /// `U f(Λ) U*`.
    pub fn reconstruct(&self, f: impl Fn(f64) -> f64) -> Mat<T> {
        let u = &self.vectors;
        let scaled = Mat::<T>::from_fn(u.nrows(), u.ncols(), |i, j| {
            u[(i, j)] * T::from_real(f(self.values[j]))
        });
        hermitian_part((&scaled * u.adjoint()).as_ref())
    }

    /// Unit eigenvector of the largest eigenvalue.
    pub fn top_vector(&self) -> Vec<T> {
        let j = self.vectors.ncols() - 1;
        (0..self.vectors.nrows()).map(|i| self.vectors[(i, j)]).collect()
    }
}

pub fn eigh<T: Scalar>(m: MatRef<'_, T>) -> Result<HermitianEigen<T>> {
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let s = evd.S();
    let values = (0..m.nrows()).map(|i| s[i].real()).collect();
    Ok(HermitianEigen {
        values,
        vectors: evd.U().to_owned(),
    })
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn eigvalsh<T: Scalar>(m: MatRef<'_, T>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)
}

/// `(M + M*) / 2`.
pub fn hermitian_part<T: Scalar>(m: MatRef<'_, T>) -> Mat<T> {
    let half = T::from_real(0.5);
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| {
        (m[(i, j)] + m[(j, i)].conjugate()) * half
    })
}

/// `max |M - M*| / max(|M|, tiny)` over entries.
pub fn relative_asymmetry<T: Scalar>(m: MatRef<'_, T>) -> f64 {
    let n = m.nrows();
    let mut scale = 0.0f64;
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            scale = scale.max(m[(i, j)].abs_sq());
            if i <= j {
                worst = worst.max((m[(i, j)] - m[(j, i)].conjugate()).abs_sq());
            }
        }
    }
    if scale == 0.0 {
        0.0
    } else {
        (worst / scale).sqrt()
    }
}

pub fn trace<T: Scalar>(m: MatRef<'_, T>) -> T {
    (0..m.nrows().min(m.ncols())).fold(T::from_real(0.0), |acc, i| acc + m[(i, i)])
}

/// `sum_ij |m_ij|^2`.
pub fn frobenius_sq<T: Scalar>(m: MatRef<'_, T>) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += m[(i, j)].abs_sq();
        }
    }
    acc
}

/// Promote a real matrix into any field.
pub fn lift<T: Scalar>(m: MatRef<'_, f64>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| T::from_real(m[(i, j)]))
}

fn check_square<T: Scalar>(m: MatRef<'_, T>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    Ok(())
}

/// A Hermitian positive semidefinite matrix.
///
/// The stored entries are always exactly Hermitian: constructors replace the
/// input by its Hermitian part after the tolerance check.
#[derive(Debug, Clone)]
pub struct SpdMatrix<T: Scalar> {
    m: Mat<T>,
}

impl<T: Scalar> SpdMatrix<T> {
    /// Validates Hermitian symmetry (relative `1e-10`) and the eigenvalue
    /// floor `lambda_min >= -1e-10 * lambda_max`.
    pub fn new(m: Mat<T>) -> Result<Self> {
        check_square(m.as_ref())?;
        let asym = relative_asymmetry(m.as_ref());
        if asym > HERMITIAN_TOL {
            return Err(Error::NotHermitian(asym));
        }
        let out = Self::from_hermitian_unchecked(m.as_ref());
        out.validate()?;
        Ok(out)
    }

    /// Takes the Hermitian part of `m` without checking the spectrum. For
    /// matrices that are PSD by construction (Gram matrices, means of PSD
    /// matrices).
    pub(crate) fn from_hermitian_unchecked(m: MatRef<'_, T>) -> Self {
        Self {
            m: hermitian_part(m),
        }
    }

    pub fn identity(p: usize) -> Self {
        Self {
            m: Mat::from_fn(p, p, |i, j| T::from_real(if i == j { 1.0 } else { 0.0 })),
        }
    }

    pub fn from_diagonal(diag: &[f64]) -> Result<Self> {
        if let Some(bad) = diag.iter().find(|d| !(**d >= 0.0) || !d.is_finite()) {
            return Err(Error::param(format!(
                "diagonal entry {bad} is not a finite non-negative number"
            )));
        }
        let p = diag.len();
        Ok(Self {
            m: Mat::from_fn(p, p, |i, j| T::from_real(if i == j { diag[i] } else { 0.0 })),
        })
    }

    /// Re-checks the PSD invariant.
    pub fn validate(&self) -> Result<()> {
        let values = eigvalsh(self.m.as_ref())?;
        let (min, max) = (values[0], values[values.len() - 1]);
        if values.iter().any(|v| !v.is_finite()) || min < -PSD_TOL * max.abs().max(f64::MIN_POSITIVE)
        {
            return Err(Error::NotPositiveSemidefinite { min, max });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn as_mat(&self) -> MatRef<'_, T> {
        self.m.as_ref()
    }

    pub fn into_mat(self) -> Mat<T> {
        self.m
    }

    pub fn eigen(&self) -> Result<HermitianEigen<T>> {
        eigh(self.m.as_ref())
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        eigvalsh(self.m.as_ref())
    }

    pub fn trace(&self) -> f64 {
        trace(self.m.as_ref()).real()
    }

    /// Exact comparison against the identity (no tolerance).
    pub fn is_identity(&self) -> bool {
        let p = self.dim();
        (0..p).all(|j| {
            (0..p).all(|i| {
                let v = self.m[(i, j)];
                v.imag() == 0.0 && v.real() == if i == j { 1.0 } else { 0.0 }
            })
        })
    }

    /// Inverse of a strictly positive definite matrix.
    pub fn inverse(&self) -> Result<Mat<T>> {
        let eig = self.eigen()?;
        check_floor(&eig)?;
        Ok(eig.reconstruct(|l| 1.0 / l))
    }

    /// Principal square root; tiny negative round-off eigenvalues are clamped
    /// to zero.
    pub fn sqrt(&self) -> Result<Mat<T>> {
        let eig = self.eigen()?;
        Ok(eig.reconstruct(|l| l.max(0.0).sqrt()))
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::param(format!("scale {c} must be finite and non-negative")));
        }
        let s = T::from_real(c);
        Ok(Self {
            m: Mat::from_fn(self.dim(), self.dim(), |i, j| self.m[(i, j)] * s),
        })
    }

}

impl SpdMatrix<f64> {
    /// Same matrix promoted to another field.
    pub fn to_field<U: Scalar>(&self) -> SpdMatrix<U> {
        SpdMatrix {
            m: lift(self.m.as_ref()),
        }
    }
}

impl<T: Scalar> Index<(usize, usize)> for SpdMatrix<T> {
    type Output = T;

    fn index(&self, idx: (usize, usize)) -> &T {
        &self.m[idx]
    }
}

pub(crate) fn check_floor<T: Scalar>(eig: &HermitianEigen<T>) -> Result<()> {
    let (min, max) = (eig.min(), eig.max());
    if !(min > PD_FLOOR * max) || !(max > 0.0) {
        return Err(Error::Singular { min, max });
    }
    Ok(())
}

/// Inverse of a Hermitian matrix that must be strictly positive definite.
pub fn inverse_pd<T: Scalar>(m: MatRef<'_, T>) -> Result<Mat<T>> {
    let eig = eigh(m)?;
    check_floor(&eig)?;
    Ok(eig.reconstruct(|l| 1.0 / l))
}
