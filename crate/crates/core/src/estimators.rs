//! Covariance estimators built from a split sample.
//!
//! All estimators take the per-block Wishart matrices `W_1, ..., W_N` and/or
//! their arithmetic mean `A`. The Rao-Blackwellized variants use the exact
//! conditional moments of a real two-block split and are therefore only
//! defined over the real field.

use std::fmt;
use std::str::FromStr;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{inverse_pd, trace, SpdMatrix};
use crate::sampling::{block_wisharts, split_wisharts, DataMatrix, Partition};

/// Shrinkage target `Λ̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShrinkageTarget {
    Identity,
    /// `(tr A / p) I`.
    ScaledIdentity,
}

impl ShrinkageTarget {
    pub fn matrix<T: Scalar>(&self, a: &SpdMatrix<T>) -> SpdMatrix<T> {
        match self {
            ShrinkageTarget::Identity => SpdMatrix::identity(a.dim()),
            ShrinkageTarget::ScaledIdentity => {
                let mu = a.trace() / a.dim() as f64;
                SpdMatrix::from_diagonal(&vec![mu.max(0.0); a.dim()])
                    .expect("mean eigenvalue of a PSD matrix is non-negative")
            }
        }
    }

    fn tag(&self) -> &'static str {
        match self {
            ShrinkageTarget::Identity => "identity",
            ShrinkageTarget::ScaledIdentity => "scaled_identity",
        }
    }
}

impl FromStr for ShrinkageTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "identity" => Ok(ShrinkageTarget::Identity),
            "scaled_identity" => Ok(ShrinkageTarget::ScaledIdentity),
            other => Err(Error::param(format!("unknown shrinkage target `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ShrinkageIntensity {
    Fixed(f64),
    /// Data-driven intensity from [`fisher_sun_intensity`].
    FisherSun,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorKind {
    Arithmetic,
    Harmonic,
    RaoBlackwellHarmonic,
    RegularizedRbHarmonic {
        c: f64,
        d: f64,
        target: ShrinkageTarget,
    },
    LinearShrinkage {
        intensity: ShrinkageIntensity,
        target: ShrinkageTarget,
    },
}

impl EstimatorKind {
    pub const FISHER_SUN: EstimatorKind = EstimatorKind::LinearShrinkage {
        intensity: ShrinkageIntensity::FisherSun,
        target: ShrinkageTarget::Identity,
    };

    pub fn validate(&self) -> Result<()> {
        match *self {
            EstimatorKind::RegularizedRbHarmonic { c, d, .. } => {
                if !(c > 0.0) || !c.is_finite() {
                    return Err(Error::param(format!("c = {c} must be > 0")));
                }
                if !(d >= 0.0) || !d.is_finite() {
                    return Err(Error::param(format!("d = {d} must be >= 0")));
                }
                Ok(())
            }
            EstimatorKind::LinearShrinkage { intensity, target } => match intensity {
                ShrinkageIntensity::Fixed(l) => check_lambda(l),
                ShrinkageIntensity::FisherSun if target != ShrinkageTarget::Identity => Err(
                    Error::param("the Fisher-Sun intensity is defined for the identity target only"),
                ),
                ShrinkageIntensity::FisherSun => Ok(()),
            },
            _ => Ok(()),
        }
    }

    /// Needs every block Wishart to be invertible.
    pub fn needs_invertible_blocks(&self) -> bool {
        matches!(
            self,
            EstimatorKind::Harmonic
                | EstimatorKind::RaoBlackwellHarmonic
                | EstimatorKind::RegularizedRbHarmonic { .. }
        )
    }

    /// Rao-Blackwellized variants: real field, two blocks.
    pub fn is_rao_blackwell(&self) -> bool {
        matches!(
            self,
            EstimatorKind::RaoBlackwellHarmonic | EstimatorKind::RegularizedRbHarmonic { .. }
        )
    }

    pub fn estimate<T: Scalar>(&self, sample: &SplitSample<T>) -> Result<SpdMatrix<T>> {
        self.validate()?;
        let n_blocks = sample.wisharts.len();
        if self.is_rao_blackwell() && n_blocks != 2 {
            return Err(Error::param(format!(
                "{self} needs a two-block split, got {n_blocks} blocks"
            )));
        }
        let (p, n) = (sample.p(), sample.block_size());
        match *self {
            EstimatorKind::Arithmetic => Ok(sample.pooled.clone()),
            EstimatorKind::Harmonic => harmonic_mean(&sample.wisharts),
            EstimatorKind::RaoBlackwellHarmonic => rao_blackwell_harmonic(&sample.pooled, p, n),
            EstimatorKind::RegularizedRbHarmonic { c, d, target } => {
                let lambda_hat = target.matrix(&sample.pooled);
                rb_regularized_harmonic(&sample.pooled, c, d, &lambda_hat, p, n)
            }
            EstimatorKind::LinearShrinkage { intensity, target } => {
                let lambda = match intensity {
                    ShrinkageIntensity::Fixed(l) => l,
                    ShrinkageIntensity::FisherSun => {
                        fisher_sun_intensity(&sample.pooled, sample.total())?
                    }
                };
                linear_shrinkage(&sample.pooled, lambda, &target.matrix(&sample.pooled))
            }
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorKind::Arithmetic => f.write_str("arithmetic"),
            EstimatorKind::Harmonic => f.write_str("harmonic"),
            EstimatorKind::RaoBlackwellHarmonic => f.write_str("rb_harmonic"),
            EstimatorKind::RegularizedRbHarmonic { c, d, target } => {
                write!(f, "rb_regularized(c={c},d={d}")?;
                if *target != ShrinkageTarget::Identity {
                    write!(f, ",target={}", target.tag())?;
                }
                f.write_str(")")
            }
            EstimatorKind::LinearShrinkage {
                intensity: ShrinkageIntensity::FisherSun,
                ..
            } => f.write_str("fisher_sun"),
            EstimatorKind::LinearShrinkage {
                intensity: ShrinkageIntensity::Fixed(l),
                target,
            } => {
                write!(f, "shrinkage(lambda={l}")?;
                if *target != ShrinkageTarget::Identity {
                    write!(f, ",target={}", target.tag())?;
                }
                f.write_str(")")
            }
        }
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    /// Parses the [`Display`](fmt::Display) form, e.g. `harmonic`,
    /// `shrinkage(lambda=0.3)` or `rb_regularized(c=0.9,d=0.1)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, args) = match s.find('(') {
            Some(open) => {
                let close = s
                    .strip_suffix(')')
                    .ok_or_else(|| Error::param(format!("unbalanced parentheses in `{s}`")))?;
                (&s[..open], Some(&close[open + 1..]))
            }
            None => (s, None),
        };
        let mut kv = Vec::new();
        for part in args.into_iter().flat_map(|a| a.split(',')).filter(|p| !p.trim().is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::param(format!("expected key=value in `{part}`")))?;
            kv.push((k.trim(), v.trim()));
        }
        let num = |key: &str| -> Result<f64> {
            let v = kv
                .iter()
                .find(|(k, _)| *k == key)
                .ok_or_else(|| Error::param(format!("`{name}` needs `{key}=`")))?
                .1;
            v.parse()
                .map_err(|_| Error::param(format!("`{key}={v}` is not a number")))
        };
        let target = match kv.iter().find(|(k, _)| *k == "target") {
            Some((_, v)) => v.parse()?,
            None => ShrinkageTarget::Identity,
        };
        let allowed: &[&str] = match name.trim() {
            "rb_regularized" => &["c", "d", "target"],
            "shrinkage" => &["lambda", "target"],
            _ => &[],
        };
        if let Some((k, _)) = kv.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::param(format!("unknown argument `{k}` for `{name}`")));
        }
        let kind = match name.trim() {
            "arithmetic" => EstimatorKind::Arithmetic,
            "harmonic" => EstimatorKind::Harmonic,
            "rb_harmonic" => EstimatorKind::RaoBlackwellHarmonic,
            "fisher_sun" => EstimatorKind::FISHER_SUN,
            "rb_regularized" => EstimatorKind::RegularizedRbHarmonic {
                c: num("c")?,
                d: num("d")?,
                target,
            },
            "shrinkage" => EstimatorKind::LinearShrinkage {
                intensity: ShrinkageIntensity::Fixed(num("lambda")?),
                target,
            },
            other => return Err(Error::param(format!("unknown estimator `{other}`"))),
        };
        kind.validate()?;
        Ok(kind)
    }
}

/// The block Wisharts of one data draw together with their arithmetic mean.
#[derive(Debug, Clone)]
pub struct SplitSample<T: Scalar> {
    pub wisharts: Vec<SpdMatrix<T>>,
    pub pooled: SpdMatrix<T>,
    block_size: usize,
}

impl<T: Scalar> SplitSample<T> {
    pub fn new(data: &DataMatrix<T>, partition: &Partition) -> Result<Self> {
        let wisharts = split_wisharts(data, partition)?;
        let pooled = arithmetic_mean(&wisharts)?;
        Ok(Self {
            wisharts,
            pooled,
            block_size: partition.block_size(),
        })
    }

    /// Like [`SplitSample::new`] but allows blocks smaller than `p`; only
    /// estimators that never invert a block can be evaluated on it.
    pub fn new_allow_singular(data: &DataMatrix<T>, partition: &Partition) -> Result<Self> {
        let wisharts = block_wisharts(data, partition)?;
        let pooled = arithmetic_mean(&wisharts)?;
        Ok(Self {
            wisharts,
            pooled,
            block_size: partition.block_size(),
        })
    }

    pub fn p(&self) -> usize {
        self.pooled.dim()
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn total(&self) -> usize {
        self.block_size * self.wisharts.len()
    }
}

fn check_same_dims<T: Scalar>(ws: &[SpdMatrix<T>]) -> Result<usize> {
    let first = ws
        .first()
        .ok_or_else(|| Error::param("need at least one matrix"))?;
    let p = first.dim();
    if let Some(bad) = ws.iter().find(|w| w.dim() != p) {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: bad.dim(),
        });
    }
    Ok(p)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::param(format!("shrinkage intensity {lambda} is outside [0, 1]")));
    }
    Ok(())
}

fn ensure_real<T: Scalar>(what: &'static str) -> Result<()> {
    match T::FIELD {
        Field::Real => Ok(()),
        Field::Complex => Err(Error::RealFieldOnly { field: what }),
    }
}

/// `(1/N) Σ W_i`.
pub fn arithmetic_mean<T: Scalar>(ws: &[SpdMatrix<T>]) -> Result<SpdMatrix<T>> {
    let p = check_same_dims(ws)?;
    let inv_n = T::from_real(1.0 / ws.len() as f64);
    let mut acc = Mat::<T>::zeros(p, p);
    for w in ws {
        acc = &acc + w.as_mat();
    }
    let mean = Mat::from_fn(p, p, |i, j| acc[(i, j)] * inv_n);
    Ok(SpdMatrix::from_hermitian_unchecked(mean.as_ref()))
}

/// `N (Σ W_i⁻¹)⁻¹`. Every summand must be strictly positive definite.
pub fn harmonic_mean<T: Scalar>(ws: &[SpdMatrix<T>]) -> Result<SpdMatrix<T>> {
    let p = check_same_dims(ws)?;
    let mut acc = Mat::<T>::zeros(p, p);
    for (index, w) in ws.iter().enumerate() {
        let inv = w.inverse().map_err(|e| match e {
            Error::Singular { min, max } => Error::SingularSummand { index, min, max },
            other => other,
        })?;
        acc = &acc + &inv;
    }
    let h = inverse_pd(acc.as_ref())?;
    let n = T::from_real(ws.len() as f64);
    let h = Mat::from_fn(p, p, |i, j| h[(i, j)] * n);
    Ok(SpdMatrix::from_hermitian_unchecked(h.as_ref()))
}

/// `n(2n−p) / ((2n−1)(n+1))`, the scalar with `E[H | A] = factor · A` for a
/// real two-block split with `n` samples per block.
pub fn rao_blackwell_factor(p: usize, n: usize) -> Result<f64> {
    if p == 0 || n < p {
        return Err(Error::DegenerateRegime { n, p });
    }
    let (p, n) = (p as f64, n as f64);
    Ok(n * (2.0 * n - p) / ((2.0 * n - 1.0) * (n + 1.0)))
}

fn check_rb_dims<T: Scalar>(a: &SpdMatrix<T>, p: usize, n: usize) -> Result<()> {
    if a.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: a.dim(),
        });
    }
    if n < p {
        return Err(Error::DegenerateRegime { n, p });
    }
    Ok(())
}

/// `E[H | A]` for a real two-block split with `n` samples per block.
pub fn rao_blackwell_harmonic<T: Scalar>(a: &SpdMatrix<T>, p: usize, n: usize) -> Result<SpdMatrix<T>> {
    ensure_real::<T>("Rao-Blackwell")?;
    check_rb_dims(a, p, n)?;
    a.scaled(rao_blackwell_factor(p, n)?)
}

/// `E[W_1 F W_1 | A]` for a real two-block split:
///
/// `[{n(2n+1) − 2} AFA + n{(AFA)ᵀ + tr(AF) A}] / ((2n−1)(n+1))`.
pub fn conditional_quadratic_expectation<T: Scalar>(
    a: &SpdMatrix<T>,
    f: MatRef<'_, T>,
    n: usize,
) -> Result<Mat<T>> {
    ensure_real::<T>("conditional expectation")?;
    let p = a.dim();
    if f.nrows() != p || f.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: if f.nrows() != p { f.nrows() } else { f.ncols() },
        });
    }
    if n == 0 {
        return Err(Error::param("block size n must be positive"));
    }
    let a = a.as_mat();
    let af = a * f;
    let afa = &af * a;
    let tr_af = trace(af.as_ref());
    let nf = n as f64;
    let k = (2.0 * nf - 1.0) * (nf + 1.0);
    let c_main = T::from_real((nf * (2.0 * nf + 1.0) - 2.0) / k);
    let c_side = T::from_real(nf / k);
    Ok(Mat::from_fn(p, p, |i, j| {
        c_main * afa[(i, j)] + c_side * (afa[(j, i)] + tr_af * a[(i, j)])
    }))
}

/// Rao-Blackwellization of the harmonic mean of `c(W_i + d Λ̂)`, `i = 1, 2`.
///
/// With `Ã = c(A + dΛ̂)`, `L = cdΛ̂`, `τ = tr(L Ã⁻¹)` and `K = (2n−1)(n+1)`:
///
/// `n(2n − p + τ)/K · Ã + (1 − n)/K · L Ã⁻¹ L + (2n + np − 2 − nτ)/K · L`.
pub fn rb_regularized_harmonic<T: Scalar>(
    a: &SpdMatrix<T>,
    c: f64,
    d: f64,
    lambda_hat: &SpdMatrix<T>,
    p: usize,
    n: usize,
) -> Result<SpdMatrix<T>> {
    ensure_real::<T>("Rao-Blackwell")?;
    check_rb_dims(a, p, n)?;
    EstimatorKind::RegularizedRbHarmonic {
        c,
        d,
        target: ShrinkageTarget::Identity,
    }
    .validate()?;
    if lambda_hat.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: lambda_hat.dim(),
        });
    }
    let (a, lam) = (a.as_mat(), lambda_hat.as_mat());
    let ct = T::from_real(c);
    let cdt = T::from_real(c * d);
    let a_tilde = Mat::from_fn(p, p, |i, j| ct * (a[(i, j)] + T::from_real(d) * lam[(i, j)]));
    let l = Mat::from_fn(p, p, |i, j| cdt * lam[(i, j)]);
    let a_tilde_inv = inverse_pd(a_tilde.as_ref())?;
    let l_ainv = &l * &a_tilde_inv;
    let tau = trace(l_ainv.as_ref()).real();
    let l_ainv_l = &l_ainv * &l;

    let (nf, pf) = (n as f64, p as f64);
    let k = (2.0 * nf - 1.0) * (nf + 1.0);
    let c_a = T::from_real(nf * (2.0 * nf - pf + tau) / k);
    let c_q = T::from_real((1.0 - nf) / k);
    let c_l = T::from_real((2.0 * nf + nf * pf - 2.0 - nf * tau) / k);
    let out = Mat::from_fn(p, p, |i, j| {
        c_a * a_tilde[(i, j)] + c_q * l_ainv_l[(i, j)] + c_l * l[(i, j)]
    });
    Ok(SpdMatrix::from_hermitian_unchecked(out.as_ref()))
}

/// Rao-Blackwellized harmonic mean of `(1−λ)W_i + λI`, written directly in
/// terms of `Ã = (1−λ)A + λI`:
///
/// `n(2n − p + λ tr Ã⁻¹)/K · Ã + (1−n)/K · λ² Ã⁻¹ + (2n + np − 2 − nλ tr Ã⁻¹)/K · λ I`.
///
/// This is [`rb_regularized_harmonic`] with `Λ̂ = I`, `c = 1−λ`, `cd = λ`.
pub fn rb_shrinkage_harmonic<T: Scalar>(
    a: &SpdMatrix<T>,
    lambda: f64,
    p: usize,
    n: usize,
) -> Result<SpdMatrix<T>> {
    ensure_real::<T>("Rao-Blackwell")?;
    check_rb_dims(a, p, n)?;
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::param(format!("shrinkage intensity {lambda} must lie in [0, 1)")));
    }
    let a_tilde = linear_shrinkage(a, lambda, &SpdMatrix::identity(p))?;
    let inv = a_tilde.inverse()?;
    let tr_inv = trace(inv.as_ref()).real();
    let (nf, pf) = (n as f64, p as f64);
    let k = (2.0 * nf - 1.0) * (nf + 1.0);
    let c_a = T::from_real(nf * (2.0 * nf - pf + lambda * tr_inv) / k);
    let c_inv = T::from_real((1.0 - nf) / k * lambda * lambda);
    let c_id = (2.0 * nf + nf * pf - 2.0 - nf * lambda * tr_inv) / k * lambda;
    let am = a_tilde.as_mat();
    let out = Mat::from_fn(p, p, |i, j| {
        let id = if i == j { T::from_real(c_id) } else { T::from_real(0.0) };
        c_a * am[(i, j)] + c_inv * inv[(i, j)] + id
    });
    Ok(SpdMatrix::from_hermitian_unchecked(out.as_ref()))
}

/// `(1 − λ) A + λ target`.
pub fn linear_shrinkage<T: Scalar>(
    a: &SpdMatrix<T>,
    lambda: f64,
    target: &SpdMatrix<T>,
) -> Result<SpdMatrix<T>> {
    check_lambda(lambda)?;
    if target.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: target.dim(),
        });
    }
    let (keep, shrink) = (T::from_real(1.0 - lambda), T::from_real(lambda));
    let (am, tm) = (a.as_mat(), target.as_mat());
    let out = Mat::from_fn(a.dim(), a.dim(), |i, j| keep * am[(i, j)] + shrink * tm[(i, j)]);
    Ok(SpdMatrix::from_hermitian_unchecked(out.as_ref()))
}

/// Shrinkage intensity toward `I` for normal data with known mean.
///
/// `a` is the sample covariance of `total` observations. With
/// `a1 = tr(A)/p` and the unbiased estimate
/// `a2 = T² / ((T−1)(T+2)) · [tr(A²) − tr(A)²/T] / p` of `tr(Σ²)/p`,
///
/// `λ = [(a2 + p a1²)/T] / [(T+1)/T · a2 + p/T · a1² − 2 a1 + 1]`,
///
/// which minimizes `E‖(1−λ)A + λI − Σ‖_F²` when the moments are exact. The
/// result is clipped to `[0, 1]`; a non-positive denominator (sample
/// spectrum indistinguishable from `I`) gives `λ = 1`.
pub fn fisher_sun_intensity<T: Scalar>(a: &SpdMatrix<T>, total: usize) -> Result<f64> {
    if total < 2 {
        return Err(Error::param(format!("need at least two observations, got {total}")));
    }
    let p = a.dim() as f64;
    let t = total as f64;
    let tr = a.trace();
    let tr_sq = crate::linalg::frobenius_sq(a.as_mat());
    let a1 = tr / p;
    let a2 = t * t / ((t - 1.0) * (t + 2.0)) * (tr_sq - tr * tr / t) / p;
    let num = (a2 + p * a1 * a1) / t;
    let den = (t + 1.0) / t * a2 + p / t * a1 * a1 - 2.0 * a1 + 1.0;
    let lambda = if den > 0.0 && den.is_finite() {
        num / den
    } else {
        1.0
    };
    Ok(if lambda.is_nan() { 1.0 } else { lambda.clamp(0.0, 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::c64;
    use crate::sampling::{build_covariance, sample_data, CovarianceSpec};

    fn diag(d: &[f64]) -> SpdMatrix<f64> {
        SpdMatrix::from_diagonal(d).unwrap()
    }

    fn assert_mat_close(a: MatRef<'_, f64>, b: MatRef<'_, f64>, tol: f64) {
        for i in 0..a.nrows() {
            for j in 0..a.ncols() {
                assert!(
                    (a[(i, j)] - b[(i, j)]).abs() <= tol,
                    "({i},{j}): {} vs {}",
                    a[(i, j)],
                    b[(i, j)]
                );
            }
        }
    }

    #[test]
    fn arithmetic_examples() {
        let w = diag(&[1.0, 3.0]);
        let m = arithmetic_mean(&[w.clone(), w.clone()]).unwrap();
        assert_mat_close(m.as_mat(), w.as_mat(), 0.0);
        let m = arithmetic_mean(&[diag(&[1.0, 3.0]), diag(&[3.0, 1.0])]).unwrap();
        assert_mat_close(m.as_mat(), diag(&[2.0, 2.0]).as_mat(), 0.0);
        let single = arithmetic_mean(std::slice::from_ref(&w)).unwrap();
        assert_mat_close(single.as_mat(), w.as_mat(), 0.0);
        assert!(matches!(
            arithmetic_mean(&[diag(&[1.0]), diag(&[1.0, 1.0])]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn harmonic_examples() {
        let w = diag(&[1.0, 3.0]);
        let h = harmonic_mean(&[w.clone(), w.clone()]).unwrap();
        assert_mat_close(h.as_mat(), w.as_mat(), 1e-14);
        let h = harmonic_mean(&[diag(&[2.0]), diag(&[6.0])]).unwrap();
        assert!((h[(0, 0)] - 3.0).abs() < 1e-14);
        let h = harmonic_mean(&[diag(&[1.0, 4.0]), diag(&[4.0, 1.0])]).unwrap();
        assert_mat_close(h.as_mat(), diag(&[1.6, 1.6]).as_mat(), 1e-14);
    }

    #[test]
    fn harmonic_singular_summand() {
        let err = harmonic_mean(&[diag(&[1.0, 1.0]), diag(&[1.0, 0.0])]).unwrap_err();
        assert!(matches!(err, Error::SingularSummand { index: 1, .. }), "{err}");
    }

    #[test]
    fn rao_blackwell_factors() {
        assert!((rao_blackwell_factor(4, 10).unwrap() - 160.0 / 209.0).abs() < 1e-15);
        assert!((rao_blackwell_factor(20, 40).unwrap() - 2400.0 / 3239.0).abs() < 1e-15);
        assert!(matches!(
            rao_blackwell_factor(5, 4),
            Err(Error::DegenerateRegime { n: 4, p: 5 })
        ));
        // p/(2n) -> gamma gives 1 - gamma
        let gamma = 0.3;
        let n = 1_000_000usize;
        let p = (2.0 * gamma * n as f64) as usize;
        assert!((rao_blackwell_factor(p, n).unwrap() - (1.0 - gamma)).abs() < 1e-5);
        for (p, n) in [(1, 1), (3, 3), (10, 12), (50, 400)] {
            assert!(rao_blackwell_factor(p, n).unwrap() < 1.0);
        }
    }

    #[test]
    fn rb_is_real_only() {
        let a = SpdMatrix::<c64>::identity(2);
        assert!(matches!(
            rao_blackwell_harmonic(&a, 2, 4),
            Err(Error::RealFieldOnly { .. })
        ));
    }

    #[test]
    fn condexp_at_inverse() {
        let sigma = build_covariance(&CovarianceSpec::HaarDiagonal { p: 4, b: 3.0 }, 2).unwrap();
        let x = sample_data::<f64>(&sigma, 40, 9).unwrap();
        let a = crate::sampling::wishart(&x);
        let n = 20;
        let got = conditional_quadratic_expectation(&a, a.inverse().unwrap().as_ref(), n).unwrap();
        let (nf, pf) = (n as f64, 4.0);
        let factor = (2.0 * nf * (nf + 1.0) - 2.0 + pf * nf) / ((2.0 * nf - 1.0) * (nf + 1.0));
        let want = a.scaled(factor).unwrap();
        assert_mat_close(got.as_ref(), want.as_mat(), 1e-12);
    }

    #[test]
    fn condexp_scalar() {
        let one = SpdMatrix::<f64>::identity(1);
        let f = Mat::<f64>::identity(1, 1);
        let got = conditional_quadratic_expectation(&one, f.as_ref(), 3).unwrap();
        assert!((got[(0, 0)] - 1.25).abs() < 1e-15);
        let bad = Mat::<f64>::identity(2, 2);
        assert!(matches!(
            conditional_quadratic_expectation(&one, bad.as_ref(), 3),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn shrinkage_examples() {
        let a = diag(&[2.0, 4.0]);
        let id = SpdMatrix::identity(2);
        assert_mat_close(linear_shrinkage(&a, 0.0, &id).unwrap().as_mat(), a.as_mat(), 0.0);
        assert_mat_close(linear_shrinkage(&a, 1.0, &id).unwrap().as_mat(), id.as_mat(), 0.0);
        assert_mat_close(
            linear_shrinkage(&a, 0.5, &id).unwrap().as_mat(),
            diag(&[1.5, 2.5]).as_mat(),
            1e-15,
        );
        assert!(linear_shrinkage(&a, 1.5, &id).is_err());
        assert!(linear_shrinkage(&a, -0.1, &id).is_err());
    }

    #[test]
    fn fisher_sun_identity_truth() {
        let sigma = SpdMatrix::identity(10);
        let x = sample_data::<f64>(&sigma, 5_000, 4).unwrap();
        let lambda = fisher_sun_intensity(&crate::sampling::wishart(&x), 5_000).unwrap();
        assert!(lambda > 0.9, "{lambda}");
    }

    #[test]
    fn fisher_sun_haar_range() {
        for trial in 0..20u64 {
            let sigma =
                build_covariance(&CovarianceSpec::HaarDiagonal { p: 100, b: 5.0 }, trial).unwrap();
            let x = sample_data::<f64>(&sigma, 400, 1000 + trial).unwrap();
            let lambda = fisher_sun_intensity(&crate::sampling::wishart(&x), 400).unwrap();
            assert!(lambda > 0.0 && lambda < 1.0, "trial {trial}: {lambda}");
        }
    }

    #[test]
    fn estimator_tags_round_trip() {
        let kinds = [
            EstimatorKind::Arithmetic,
            EstimatorKind::Harmonic,
            EstimatorKind::RaoBlackwellHarmonic,
            EstimatorKind::FISHER_SUN,
            EstimatorKind::RegularizedRbHarmonic {
                c: 0.9,
                d: 0.25,
                target: ShrinkageTarget::Identity,
            },
            EstimatorKind::LinearShrinkage {
                intensity: ShrinkageIntensity::Fixed(0.3),
                target: ShrinkageTarget::ScaledIdentity,
            },
        ];
        for k in kinds {
            assert_eq!(k.to_string().parse::<EstimatorKind>().unwrap(), k);
        }
        for bad in ["geometric", "shrinkage(lambda=2)", "rb_regularized(c=0,d=1)", "shrinkage(x=1)"] {
            assert!(bad.parse::<EstimatorKind>().is_err(), "{bad}");
        }
    }
}
