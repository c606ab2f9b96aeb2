//! Error functionals of an estimate against the truth and against a
//! limiting spectral law.

use faer::Mat;

use crate::asymptotics::{LawCdf, SpectralLaw};
use crate::error::{Error, Result};
use crate::field::Scalar;
use crate::linalg::{eigvalsh, frobenius_sq, HermitianEigen, SpdMatrix};

fn check_dims<T: Scalar>(est: &SpdMatrix<T>, sigma: &SpdMatrix<T>) -> Result<()> {
    if est.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: est.dim(),
        });
    }
    Ok(())
}

fn difference<T: Scalar>(est: &SpdMatrix<T>, sigma: &SpdMatrix<T>) -> Mat<T> {
    est.as_mat() - sigma.as_mat()
}

/// `‖est − sigma‖`, the largest absolute eigenvalue of the difference.
pub fn operator_norm_error<T: Scalar>(est: &SpdMatrix<T>, sigma: &SpdMatrix<T>) -> Result<f64> {
    check_dims(est, sigma)?;
    let values = eigvalsh(difference(est, sigma).as_ref())?;
    Ok(values.iter().fold(0.0f64, |acc, v| acc.max(v.abs())))
}

/// `‖est − sigma‖_F² / p`.
pub fn frobenius_sq_per_p<T: Scalar>(est: &SpdMatrix<T>, sigma: &SpdMatrix<T>) -> Result<f64> {
    check_dims(est, sigma)?;
    Ok(frobenius_sq(difference(est, sigma).as_ref()) / est.dim() as f64)
}

fn check_unit<T: Scalar>(v: &[T], p: usize) -> Result<()> {
    if v.len() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: v.len(),
        });
    }
    let norm_sq: f64 = v.iter().map(|x| x.abs_sq()).sum();
    if (norm_sq.sqrt() - 1.0).abs() > 1e-8 {
        return Err(Error::param(format!("direction must have unit norm, got {}", norm_sq.sqrt())));
    }
    Ok(())
}

fn overlap_from_eigen<T: Scalar>(eig: &HermitianEigen<T>, v: &[T]) -> f64 {
    let top = eig.top_vector();
    let inner = top
        .iter()
        .zip(v)
        .fold(T::from_real(0.0), |acc, (u, w)| acc + u.conjugate() * *w);
    inner.abs_sq().min(1.0)
}

/// `|⟨u₁(est), v⟩|²` for the unit top eigenvector `u₁` of `est`.
pub fn leading_overlap_sq<T: Scalar>(est: &SpdMatrix<T>, v: &[T]) -> Result<f64> {
    check_unit(v, est.dim())?;
    Ok(overlap_from_eigen(&est.eigen()?, v))
}

/// Kolmogorov-Smirnov distance between the empirical distribution of
/// sorted `eigenvalues` and a tabulated law.
pub fn ks_distance(eigenvalues: &[f64], cdf: &LawCdf) -> Result<f64> {
    if eigenvalues.is_empty() {
        return Err(Error::param("need at least one eigenvalue"));
    }
    if eigenvalues.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::param("eigenvalues must be sorted ascending"));
    }
    let n = eigenvalues.len() as f64;
    let mut worst = 0.0f64;
    for (i, &x) in eigenvalues.iter().enumerate() {
        let f = cdf.cdf(x);
        worst = worst.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(worst.clamp(0.0, 1.0))
}

pub fn spectral_law_distance(eigenvalues: &[f64], law: &SpectralLaw) -> Result<f64> {
    ks_distance(eigenvalues, &law.cdf_table())
}

/// The truth an estimate is scored against.
#[derive(Debug, Clone)]
pub struct Truth<T: Scalar> {
    pub sigma: SpdMatrix<T>,
    pub sigma_norm: f64,
    /// Unit spike direction, when the overlap is of interest.
    pub spike: Option<Vec<T>>,
}

impl<T: Scalar> Truth<T> {
    pub fn new(sigma: SpdMatrix<T>, spike: Option<Vec<T>>) -> Result<Self> {
        if let Some(v) = &spike {
            check_unit(v, sigma.dim())?;
        }
        let sigma_norm = if sigma.is_identity() {
            1.0
        } else {
            sigma.eigenvalues()?.last().copied().unwrap_or(0.0)
        };
        Ok(Self {
            sigma,
            sigma_norm,
            spike,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    pub op_error: f64,
    pub op_rel_error: f64,
    pub frob_sq_per_p: f64,
    pub lambda1: f64,
    pub overlap_sq: Option<f64>,
}

impl TrialMetrics {
    pub fn compute<T: Scalar>(est: &SpdMatrix<T>, truth: &Truth<T>) -> Result<Self> {
        let op_error = operator_norm_error(est, &truth.sigma)?;
        let (lambda1, overlap_sq) = match &truth.spike {
            Some(v) => {
                let eig = est.eigen()?;
                (eig.max(), Some(overlap_from_eigen(&eig, v)))
            }
            None => (est.eigenvalues()?.last().copied().unwrap_or(0.0), None),
        };
        Ok(Self {
            op_error,
            op_rel_error: op_error / truth.sigma_norm,
            frob_sq_per_p: frobenius_sq_per_p(est, &truth.sigma)?,
            lambda1,
            overlap_sq,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::MeanKind;

    fn diag(d: &[f64]) -> SpdMatrix<f64> {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    #[test]
    fn operator_examples() {
        let id = SpdMatrix::<f64>::identity(3);
        assert_eq!(operator_norm_error(&id, &id).unwrap(), 0.0);
        assert!((operator_norm_error(&diag(&[2.0, 2.0]), &diag(&[1.0, 1.0])).unwrap() - 1.0).abs() < 1e-14);
        assert!((operator_norm_error(&diag(&[3.0, 0.0]), &diag(&[1.0, 1.0])).unwrap() - 2.0).abs() < 1e-14);
        assert!(operator_norm_error(&id, &SpdMatrix::identity(2)).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let id = SpdMatrix::<f64>::identity(4);
        assert_eq!(frobenius_sq_per_p(&id, &id).unwrap(), 0.0);
        assert!((frobenius_sq_per_p(&id.scaled(2.0).unwrap(), &id).unwrap() - 1.0).abs() < 1e-15);
        let ones = SpdMatrix::new(Mat::from_fn(2, 2, |_, _| 1.0)).unwrap();
        let zero = diag(&[0.0, 0.0]);
        assert!((frobenius_sq_per_p(&ones, &zero).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn overlap_examples() {
        let v = [0.6, 0.8, 0.0];
        let w = [0.8, -0.6, 0.0];
        let spike = |u: &[f64]| {
            SpdMatrix::new(Mat::from_fn(3, 3, |i, j| u[i] * u[j] + if i == j { 1.0 } else { 0.0 })).unwrap()
        };
        assert!((leading_overlap_sq(&spike(&v), &v).unwrap() - 1.0).abs() < 1e-12);
        assert!(leading_overlap_sq(&spike(&w), &v).unwrap() < 1e-10);
        assert!(leading_overlap_sq(&spike(&v), &[1.0, 1.0, 0.0]).is_err());
    }

    #[test]
    fn ks_examples() {
        let law = SpectralLaw::harmonic(0.25, 2).unwrap();
        let cdf = law.cdf_table();
        let p = 1000;
        let quantiles: Vec<f64> = (0..p).map(|i| cdf.quantile((i as f64 + 0.5) / p as f64)).collect();
        let d = ks_distance(&quantiles, &cdf).unwrap();
        assert!(d <= 1.0 / p as f64 + 1e-9, "{d}");
        let point = vec![1.0; 50];
        let d = ks_distance(&point, &cdf).unwrap();
        let f = cdf.cdf(1.0);
        assert!(d >= f.max(1.0 - f) - 1e-12 && d >= 0.5);
        let mp = SpectralLaw::new(0.25, MeanKind::Arithmetic, 1).unwrap();
        assert!((0.0..=1.0).contains(&spectral_law_distance(&[0.0, 5.0], &mp).unwrap()));
        assert!(ks_distance(&[2.0, 1.0], &cdf).is_err());
    }

    #[test]
    fn trial_metrics_fields() {
        let sigma = diag(&[2.0, 1.0]);
        let truth = Truth::new(sigma.clone(), Some(vec![1.0, 0.0])).unwrap();
        let est = diag(&[3.0, 1.5]);
        let m = TrialMetrics::compute(&est, &truth).unwrap();
        assert!((m.op_error - 1.0).abs() < 1e-14);
        assert!((m.op_rel_error - 0.5).abs() < 1e-14);
        assert!((m.frob_sq_per_p - 0.625).abs() < 1e-14);
        assert!((m.lambda1 - 3.0).abs() < 1e-14);
        assert!((m.overlap_sq.unwrap() - 1.0).abs() < 1e-14);
    }
}
