//! Real matrix-variate Beta distribution `B(p; n₁, n₂; Δ)`.
//!
//! Density on `0 ⪯ ℓ ⪯ Δ`:
//!
//! `K · det(ℓ)^{(n₁−p−1)/2} det(Δ−ℓ)^{(n₂−p−1)/2} / det(Δ)^{(N−p−1)/2}`
//!
//! with `N = n₁ + n₂` and `K = Γ_p(N/2) / (Γ_p(n₁/2) Γ_p(n₂/2))`.

use faer::{Mat, MatRef};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::linalg::{check_floor, eigvalsh, trace, SpdMatrix};

/// Eigenvalues of `Δ^{-1/2} ℓ Δ^{-1/2}` must sit in `(SUPPORT_TOL, 1 − SUPPORT_TOL)`.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `log Γ_p(x) = p(p−1)/4 · log π + Σ_{i=1}^p log Γ(x − (i−1)/2)`.
pub fn multivariate_gamma_log(p: usize, x: f64) -> Result<f64> {
    if p == 0 {
        return Err(Error::param("dimension p must be >= 1"));
    }
    if !(x > (p as f64 - 1.0) / 2.0) {
        return Err(Error::param(format!(
            "multivariate gamma needs x > (p-1)/2 = {}, got {x}",
            (p as f64 - 1.0) / 2.0
        )));
    }
    let pf = p as f64;
    let head = pf * (pf - 1.0) / 4.0 * std::f64::consts::PI.ln();
    Ok(head + (0..p).map(|i| ln_gamma(x - i as f64 / 2.0)).sum::<f64>())
}

#[derive(Debug, Clone)]
pub struct MatrixBetaParams {
    n1: f64,
    n2: f64,
    delta: SpdMatrix<f64>,
}

impl MatrixBetaParams {
    pub fn new(n1: f64, n2: f64, delta: SpdMatrix<f64>) -> Result<Self> {
        let p = delta.dim();
        if p == 0 {
            return Err(Error::param("Δ must be at least 1x1"));
        }
        let floor = p as f64 - 1.0;
        if !(n1 > floor && n2 > floor) || !n1.is_finite() || !n2.is_finite() {
            return Err(Error::param(format!(
                "degrees of freedom must exceed p - 1 = {floor}, got n1 = {n1}, n2 = {n2}"
            )));
        }
        check_floor(&delta.eigen()?)?;
        Ok(Self { n1, n2, delta })
    }

    pub fn p(&self) -> usize {
        self.delta.dim()
    }

    pub fn n1(&self) -> f64 {
        self.n1
    }

    pub fn n2(&self) -> f64 {
        self.n2
    }

    pub fn total(&self) -> f64 {
        self.n1 + self.n2
    }

    pub fn delta(&self) -> &SpdMatrix<f64> {
        &self.delta
    }

    /// `log K = log Γ_p(N/2) − log Γ_p(n₁/2) − log Γ_p(n₂/2)`.
    pub fn log_normalizer(&self) -> f64 {
        let p = self.p();
        let g = |x: f64| multivariate_gamma_log(p, x).expect("validated in new");
        g(self.total() / 2.0) - g(self.n1 / 2.0) - g(self.n2 / 2.0)
    }
}

pub fn matbeta_log_density(l: &SpdMatrix<f64>, params: &MatrixBetaParams) -> Result<f64> {
    let p = params.p();
    if l.dim() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: l.dim(),
        });
    }
    let de = params.delta.eigen()?;
    let inv_root = de.reconstruct(|v| 1.0 / v.sqrt());
    let whitened = &inv_root * l.as_mat() * &inv_root;
    let mu = eigvalsh(crate::linalg::hermitian_part(whitened.as_ref()).as_ref())?;
    let (lo, hi) = (mu[0], mu[p - 1]);
    if !(lo > SUPPORT_TOL && hi < 1.0 - SUPPORT_TOL) {
        return Err(Error::SupportViolation(format!(
            "eigenvalues of Δ^(-1/2) ℓ Δ^(-1/2) span [{lo:.6e}, {hi:.6e}], need (0, 1)"
        )));
    }
    let pf = p as f64;
    let log_det_delta: f64 = de.values.iter().map(|v| v.ln()).sum();
    let sum_ln_mu: f64 = mu.iter().map(|m| m.ln()).sum();
    let sum_ln_rest: f64 = mu.iter().map(|m| (-m).ln_1p()).sum();
    Ok(params.log_normalizer()
        + 0.5 * (params.n1 - pf - 1.0) * sum_ln_mu
        + 0.5 * (params.n2 - pf - 1.0) * sum_ln_rest
        - 0.5 * (pf + 1.0) * log_det_delta)
}

/// `E[LTL] = n₁ / (N(N−1)(N+2)) · [{n₁(N+1) − 2} ΔTΔ + n₂{(ΔTΔ)ᵀ + tr(ΔT) Δ}]`.
pub fn expected_ltl(t: MatRef<'_, f64>, params: &MatrixBetaParams) -> Result<Mat<f64>> {
    let p = params.p();
    if t.nrows() != p || t.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: p,
            found: if t.nrows() != p { t.nrows() } else { t.ncols() },
        });
    }
    let d = params.delta.as_mat();
    let dt = d * t;
    let dtd = &dt * d;
    let tr = trace(dt.as_ref());
    let (n1, n2, n) = (params.n1, params.n2, params.total());
    let scale = n1 / (n * (n - 1.0) * (n + 2.0));
    let c_main = n1 * (n + 1.0) - 2.0;
    Ok(Mat::from_fn(p, p, |i, j| {
        scale * (c_main * dtd[(i, j)] + n2 * (dtd[(j, i)] + tr * d[(i, j)]))
    }))
}
