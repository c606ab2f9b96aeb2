//! Deterministic large-dimensional limits.
//!
//! Everything here is parametrized by `Γ = lim p/T`, the ratio of the
//! dimension to the total number of samples, and lives in `Γ ∈ (0, 1/2)`.
//! The arithmetic mean follows the Marčenko-Pastur law with ratio `Γ`. The
//! harmonic mean of `N` equal splits has a law of the same shape on
//! `[E₋, E₊]` with `E± = 1 − (N−2)Γ ± 2√Γ √(1 − (N−1)Γ)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::quadrature::gk15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeanKind {
    Arithmetic,
    Harmonic,
}

impl fmt::Display for MeanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeanKind::Arithmetic => "arithmetic",
            MeanKind::Harmonic => "harmonic",
        })
    }
}

impl FromStr for MeanKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "arithmetic" => Ok(MeanKind::Arithmetic),
            "harmonic" => Ok(MeanKind::Harmonic),
            other => Err(Error::param(format!(
                "mean must be `arithmetic` or `harmonic`, got `{other}`"
            ))),
        }
    }
}

pub fn check_gamma(gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < 0.5) {
        return Err(Error::param(format!("gamma must lie in (0, 0.5), got {gamma}")));
    }
    Ok(())
}

/// Largest admissible number of splits, `⌊1/Γ⌋`.
pub fn max_splits(gamma: f64) -> Result<usize> {
    check_gamma(gamma)?;
    Ok((1.0 / gamma + 1e-12).floor() as usize)
}

fn check_splits(gamma: f64, n_split: usize) -> Result<()> {
    let max = max_splits(gamma)?;
    if n_split < 2 || n_split > max {
        return Err(Error::SupportUndefined(format!(
            "harmonic law needs 2 <= N <= floor(1/gamma) = {max}, got N = {n_split}"
        )));
    }
    Ok(())
}

/// Limiting spectral law of `A` or `H` when `Σ = I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLaw {
    pub kind: MeanKind,
    pub gamma: f64,
    /// Number of splits; 1 for the arithmetic mean, whose law does not
    /// depend on the partition.
    pub n_split: usize,
    pub lower: f64,
    pub upper: f64,
}

impl SpectralLaw {
    pub fn new(gamma: f64, kind: MeanKind, n_split: usize) -> Result<Self> {
        match kind {
            MeanKind::Arithmetic => Self::arithmetic(gamma),
            MeanKind::Harmonic => Self::harmonic(gamma, n_split),
        }
    }

    pub fn arithmetic(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        let r = gamma.sqrt();
        Ok(Self {
            kind: MeanKind::Arithmetic,
            gamma,
            n_split: 1,
            lower: (1.0 - r) * (1.0 - r),
            upper: (1.0 + r) * (1.0 + r),
        })
    }

    pub fn harmonic(gamma: f64, n_split: usize) -> Result<Self> {
        check_splits(gamma, n_split)?;
        let n = n_split as f64;
        let centre = 1.0 - (n - 2.0) * gamma;
        let half = 2.0 * gamma.sqrt() * (1.0 - (n - 1.0) * gamma).max(0.0).sqrt();
        Ok(Self {
            kind: MeanKind::Harmonic,
            gamma,
            n_split,
            lower: (centre - half).max(0.0),
            upper: centre + half,
        })
    }

    pub fn density(&self, x: f64) -> f64 {
        if x <= self.lower || x >= self.upper || x <= 0.0 {
            return 0.0;
        }
        ((self.upper - x) * (x - self.lower)).sqrt() / (2.0 * PI * self.gamma * x)
    }

    /// `∫ x^k dν`; exact through [`closed_form_moment`].
    pub fn moment(&self, k: u32) -> f64 {
        if k == 0 {
            return 1.0;
        }
        closed_form_moment(self.lower, self.upper, k).expect("edges are ordered")
            / (2.0 * PI * self.gamma)
    }

    /// Equals `1` for the arithmetic law and `1 − (N−1)Γ` for the harmonic
    /// one.
    pub fn mean(&self) -> f64 {
        self.moment(1)
    }

    /// `max(E₊ − 1, 1 − E₋)`, the operator-norm distance of the spectrum
    /// from 1.
    pub fn op_distance_from_one(&self) -> f64 {
        (self.upper - 1.0).max(1.0 - self.lower)
    }

    pub fn cdf_table(&self) -> LawCdf {
        LawCdf::new(*self)
    }
}

/// Number of panels in a [`LawCdf`] table.
pub const CDF_PANELS: usize = 4096;

/// Tabulated distribution function of a [`SpectralLaw`].
///
/// Uses `x = a + (b − a)(1 − cos φ)/2`, under which the density becomes the
/// smooth `((b−a)/2)² sin²φ / (2πΓ x(φ))` on `φ ∈ [0, π]`; each panel is
/// integrated with a single GK15 rule.
#[derive(Debug, Clone)]
pub struct LawCdf {
    law: SpectralLaw,
    cumulative: Vec<f64>,
}

impl LawCdf {
    fn integrand(law: &SpectralLaw) -> impl Fn(f64) -> f64 + '_ {
        let half = 0.5 * (law.upper - law.lower);
        move |phi: f64| {
            let sh = (0.5 * phi).sin();
            let x = law.lower + 2.0 * half * sh * sh;
            if x <= 0.0 {
                // lower edge at 0: sin²φ / x stays bounded, take the limit
                return half / (PI * law.gamma);
            }
            let s = phi.sin();
            half * half * s * s / (2.0 * PI * law.gamma * x)
        }
    }

    fn step() -> f64 {
        PI / CDF_PANELS as f64
    }

    pub fn new(law: SpectralLaw) -> Self {
        let f = Self::integrand(&law);
        let h = Self::step();
        let mut cumulative = Vec::with_capacity(CDF_PANELS + 1);
        let mut acc = 0.0;
        cumulative.push(0.0);
        for k in 0..CDF_PANELS {
            acc += gk15(&f, k as f64 * h, (k + 1) as f64 * h).0;
            cumulative.push(acc);
        }
        Self { law, cumulative }
    }

    pub fn law(&self) -> &SpectralLaw {
        &self.law
    }

    /// Total tabulated mass; 1 up to quadrature error.
    pub fn total_mass(&self) -> f64 {
        self.cumulative[CDF_PANELS]
    }

    fn phi_of(&self, x: f64) -> f64 {
        let u = (x - self.law.lower) / (self.law.upper - self.law.lower);
        2.0 * u.clamp(0.0, 1.0).sqrt().asin()
    }

    fn cdf_phi(&self, phi: f64) -> f64 {
        let h = Self::step();
        let k = ((phi / h).floor() as usize).min(CDF_PANELS - 1);
        let start = k as f64 * h;
        let partial = if phi > start {
            gk15(&Self::integrand(&self.law), start, phi).0
        } else {
            0.0
        };
        (self.cumulative[k] + partial).clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.law.lower {
            0.0
        } else if x >= self.law.upper {
            1.0
        } else {
            self.cdf_phi(self.phi_of(x))
        }
    }

    /// Smallest `x` with `cdf(x) >= u`, to about 1e-14 in `φ`.
    pub fn quantile(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return self.law.lower;
        }
        if u >= 1.0 {
            return self.law.upper;
        }
        let k = self.cumulative.partition_point(|&c| c < u).clamp(1, CDF_PANELS);
        let h = Self::step();
        let (mut lo, mut hi) = ((k - 1) as f64 * h, k as f64 * h);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.cdf_phi(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let phi = 0.5 * (lo + hi);
        let sh = (0.5 * phi).sin();
        self.law.lower + (self.law.upper - self.law.lower) * sh * sh
    }
}

pub fn limiting_law(gamma: f64, kind: MeanKind, n_split: usize) -> Result<SpectralLaw> {
    SpectralLaw::new(gamma, kind, n_split)
}

/// Almost-sure limit of `‖mean − I‖` when `Σ = I`: `Γ + 2√Γ` for the
/// arithmetic mean, `(N−2)Γ + 2√Γ √(1−(N−1)Γ)` for the harmonic mean.
pub fn op_error_limit(gamma: f64, kind: MeanKind, n_split: usize) -> Result<f64> {
    Ok(SpectralLaw::new(gamma, kind, n_split)?.op_distance_from_one())
}

/// Minimizer of the harmonic operator-norm limit over `N ∈ {2..n_max}`
/// together with the evaluated curve.
pub fn optimal_split_size(gamma: f64, n_max: usize) -> Result<(usize, Vec<(usize, f64)>)> {
    check_splits(gamma, n_max)?;
    let curve = (2..=n_max)
        .map(|n| Ok((n, op_error_limit(gamma, MeanKind::Harmonic, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let best = curve
        .iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|c| c.0)
        .expect("curve is non-empty");
    Ok((best, curve))
}

/// Limit of `‖mean − I‖_F² / p` for `Σ = I`; `Γ` for both the arithmetic
/// mean and the two-split harmonic mean.
pub fn frobenius_sq_limit(gamma: f64, _kind: MeanKind) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(gamma)
}

fn binomial(n: u32, r: u32) -> f64 {
    if r > n {
        return 0.0;
    }
    let r = r.min(n - r);
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `∫_a^b x^{k−1} √((b−x)(x−a)) dx` as a finite sum:
///
/// `π/2 · ((a+b)/2)^{k+1} · Σ_j 1/(j+1) · C(k−1, 2j) C(2j, j) / 4^j · ((b−a)/(b+a))^{2j+2}`.
pub fn closed_form_moment(a: f64, b: f64, k: u32) -> Result<f64> {
    if !(a < b) || !(a >= 0.0) || !b.is_finite() {
        return Err(Error::param(format!("need 0 <= a < b, got a = {a}, b = {b}")));
    }
    if k < 1 {
        return Err(Error::param("moment order k must be >= 1"));
    }
    let mid = 0.5 * (a + b);
    let ratio = (b - a) / (b + a);
    let r2 = ratio * ratio;
    let mut sum = 0.0;
    let mut pow = r2;
    for j in 0..=(k - 1) / 2 {
        sum += binomial(k - 1, 2 * j) * binomial(2 * j, j) / 4f64.powi(j as i32) * pow
            / (j + 1) as f64;
        pow *= r2;
    }
    Ok(0.5 * PI * mid.powi(k as i32 + 1) * sum)
}

/// Transforms of the two-split harmonic law, `t(z) = −1 + z m(z)` with
/// `m(z) = ∫ ν(dx)/(z − x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTransform {
    pub gamma: f64,
}

impl TTransform {
    pub fn new(gamma: f64) -> Result<Self> {
        check_gamma(gamma)?;
        Ok(Self { gamma })
    }

    pub fn upper_edge(&self) -> f64 {
        1.0 + 2.0 * (self.gamma * (1.0 - self.gamma)).sqrt()
    }

    /// `t(E₊) = √((1−Γ)/Γ)`.
    pub fn t_at_edge(&self) -> f64 {
        ((1.0 - self.gamma) / self.gamma).sqrt()
    }

    fn check_z(&self, z: f64) -> Result<()> {
        let edge = self.upper_edge();
        if !(z >= edge) || !z.is_finite() {
            return Err(Error::EdgeOrInterior { z, edge });
        }
        Ok(())
    }

    /// Root of `Γt² + (1−z)t + (1−Γ) = 0` that vanishes as `z → ∞`.
    pub fn t(&self, z: f64) -> Result<f64> {
        self.check_z(z)?;
        let g = self.gamma;
        let disc = ((z - 1.0) * (z - 1.0) - 4.0 * g * (1.0 - g)).max(0.0);
        Ok(2.0 * (1.0 - g) / ((z - 1.0) + disc.sqrt()))
    }

    pub fn m(&self, z: f64) -> Result<f64> {
        Ok((1.0 + self.t(z)?) / z)
    }

    /// `t′(z) = t / (2Γt + 1 − z)`; infinite at the edge.
    pub fn t_prime(&self, z: f64) -> Result<f64> {
        let t = self.t(z)?;
        Ok(t / (2.0 * self.gamma * t + 1.0 - z))
    }

    /// `t⁻¹(w) = 1 + Γw + (1−Γ)/w` on `0 < w <= t(E₊)`.
    pub fn t_inverse(&self, w: f64) -> Result<f64> {
        let top = self.t_at_edge();
        if !(w > 0.0 && w <= top * (1.0 + 1e-12)) {
            return Err(Error::param(format!("w = {w} is outside (0, {top}]")));
        }
        Ok(1.0 + self.gamma * w + (1.0 - self.gamma) / w)
    }
}

/// Rank-one spike `Σ = I + θvv*` seen through a two-split mean.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikePrediction {
    pub mean_kind: MeanKind,
    pub theta: f64,
    pub gamma: f64,
    pub threshold: f64,
    pub lambda1_limit: f64,
    pub overlap_sq_limit: f64,
}

impl SpikePrediction {
    pub fn is_supercritical(&self) -> bool {
        self.theta > self.threshold
    }
}

pub fn spike_threshold(gamma: f64, kind: MeanKind) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(match kind {
        MeanKind::Arithmetic => gamma.sqrt(),
        MeanKind::Harmonic => (gamma / (1.0 - gamma)).sqrt(),
    })
}

pub fn spike_prediction(theta: f64, gamma: f64, kind: MeanKind) -> Result<SpikePrediction> {
    if !(theta > 0.0) || !theta.is_finite() {
        return Err(Error::param(format!("theta must be > 0, got {theta}")));
    }
    let threshold = spike_threshold(gamma, kind)?;
    let law = SpectralLaw::new(gamma, kind, 2)?;
    let g = gamma;
    let (lambda1_limit, overlap_sq_limit) = if theta <= threshold {
        (law.upper, 0.0)
    } else {
        match kind {
            MeanKind::Harmonic => {
                let q = theta * theta * (1.0 - g);
                (
                    1.0 + g / theta + (1.0 - g) * theta,
                    (theta + 1.0) / theta * (q - g) / (q + theta + g),
                )
            }
            MeanKind::Arithmetic => (
                (theta + 1.0) * (1.0 + g / theta),
                (1.0 - g / (theta * theta)) / (1.0 + g / theta),
            ),
        }
    };
    Ok(SpikePrediction {
        mean_kind: kind,
        theta,
        gamma,
        threshold,
        lambda1_limit,
        overlap_sq_limit,
    })
}

/// `overlap²(A) − overlap²(H)` when both are supercritical:
/// `Γ²(1+θ)² / ((1 + Γ/θ) θ (θ²(1−Γ) + θ + Γ))`.
pub fn overlap_gap(theta: f64, gamma: f64) -> Result<f64> {
    let threshold = spike_threshold(gamma, MeanKind::Harmonic)?;
    if !(theta > threshold) {
        return Err(Error::param(format!(
            "theta = {theta} must exceed the harmonic threshold {threshold}"
        )));
    }
    let g = gamma;
    Ok(g * g * (1.0 + theta).powi(2)
        / ((1.0 + g / theta) * theta * (theta * theta * (1.0 - g) + theta + g)))
}

/// `(2 + √Γ) / (2√(1−Γ)) − 1`.
pub fn harmonic_favorable_threshold(gamma: f64) -> Result<f64> {
    check_gamma(gamma)?;
    Ok((2.0 + gamma.sqrt()) / (2.0 * (1.0 - gamma).sqrt()) - 1.0)
}

/// Whether the operator-norm guarantee for the spiked model favours the
/// harmonic mean.
pub fn harmonic_favorable_bound(theta: f64, gamma: f64) -> Result<bool> {
    if !(theta > 0.0) {
        return Err(Error::param(format!("theta must be > 0, got {theta}")));
    }
    Ok(theta < harmonic_favorable_threshold(gamma)?)
}

/// `2^{3/2} · op_err / eigengap`.
pub fn davis_kahan_bound(op_err: f64, eigengap: f64) -> Result<f64> {
    if !(eigengap > 0.0) {
        return Err(Error::param(format!("eigengap must be > 0, got {eigengap}")));
    }
    if !(op_err >= 0.0) {
        return Err(Error::param(format!("operator-norm error must be >= 0, got {op_err}")));
    }
    Ok(2f64.powf(1.5) * op_err / eigengap)
}

/// `κ · 2√Γ√(1−Γ) / (Γ + 2√Γ) < 1`.
pub fn ratio_condition(kappa: f64, gamma: f64) -> Result<bool> {
    if !(kappa >= 1.0) {
        return Err(Error::param(format!("condition number must be >= 1, got {kappa}")));
    }
    let h = op_error_limit(gamma, MeanKind::Harmonic, 2)?;
    let a = op_error_limit(gamma, MeanKind::Arithmetic, 1)?;
    Ok(kappa * h / a < 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;

    const S3: f64 = 0.866_025_403_784_438_6;

    #[test]
    fn edges() {
        let a = SpectralLaw::arithmetic(0.25).unwrap();
        assert!((a.lower - 0.25).abs() < 1e-15 && (a.upper - 2.25).abs() < 1e-15);
        let h = SpectralLaw::harmonic(0.25, 2).unwrap();
        assert!((h.lower - (1.0 - S3)).abs() < 1e-15);
        assert!((h.upper - (1.0 + S3)).abs() < 1e-15);
        assert!((0.5 * (h.lower + h.upper) - 1.0).abs() < 1e-15);
        assert!(SpectralLaw::harmonic(0.25, 5).is_err());
        assert!(SpectralLaw::harmonic(0.25, 4).is_ok());
        assert!(SpectralLaw::arithmetic(0.5).is_err());
        assert!(SpectralLaw::arithmetic(0.0).is_err());
    }

    #[test]
    fn op_limits() {
        assert!((op_error_limit(0.25, MeanKind::Arithmetic, 2).unwrap() - 1.25).abs() < 1e-15);
        assert!((op_error_limit(0.25, MeanKind::Harmonic, 2).unwrap() - S3).abs() < 1e-15);
        for i in 1..100 {
            let g = 0.5 * i as f64 / 100.0;
            assert!(
                op_error_limit(g, MeanKind::Harmonic, 2).unwrap()
                    < op_error_limit(g, MeanKind::Arithmetic, 1).unwrap()
            );
        }
    }

    #[test]
    fn split_curve() {
        let (best, curve) = optimal_split_size(0.125, 4).unwrap();
        assert_eq!(best, 2);
        assert!((curve[0].1 - 0.661_438).abs() < 1e-6);
        assert!((curve[2].1 - 0.809_017).abs() < 1e-6);
        assert_eq!(optimal_split_size(0.4, 2).unwrap().0, 2);
        for i in 1..50 {
            let g = 0.5 * i as f64 / 50.0;
            let (_, curve) = optimal_split_size(g, max_splits(g).unwrap().max(2)).unwrap();
            for w in curve.windows(2) {
                assert!(w[1].1 >= w[0].1 - 1e-15, "gamma {g}: {w:?}");
            }
        }
    }

    #[test]
    fn moment_examples() {
        let half_disc = closed_form_moment(1e-12, 2.0, 1).unwrap();
        assert!((half_disc - PI / 2.0).abs() < 1e-6);
        assert!((closed_form_moment(1.0, 3.0, 1).unwrap() - PI / 2.0).abs() < 1e-15);
        for k in 1..=8 {
            let q = integrate(
                |x: f64| x.powi(k as i32 - 1) * ((2.5 - x) * (x - 0.5)).max(0.0).sqrt(),
                0.5,
                2.5,
                0.0,
                1e-13,
            );
            let c = closed_form_moment(0.5, 2.5, k).unwrap();
            assert!(((c - q.value) / c).abs() < 1e-10, "k={k}: {c} vs {}", q.value);
        }
        assert!(closed_form_moment(2.0, 1.0, 1).is_err());
        assert!(closed_form_moment(1.0, 2.0, 0).is_err());
    }

    #[test]
    fn harmonic_law_moments() {
        for g in [0.05, 0.125, 0.25, 0.4] {
            let law = SpectralLaw::harmonic(g, 2).unwrap();
            assert!((law.mean() - (1.0 - g)).abs() < 1e-12);
            let second_about_one = law.moment(2) - 2.0 * law.moment(1) + 1.0;
            assert!((second_about_one - g).abs() < 1e-12);
            let mp = SpectralLaw::arithmetic(g).unwrap();
            assert!((mp.mean() - 1.0).abs() < 1e-12);
            assert!((mp.moment(2) - (1.0 + g)).abs() < 1e-12);
            assert!(law.upper < mp.upper);
        }
    }

    #[test]
    fn cdf_table_mass_and_quantiles() {
        for law in [
            SpectralLaw::harmonic(0.25, 2).unwrap(),
            SpectralLaw::harmonic(0.25, 4).unwrap(),
            SpectralLaw::arithmetic(0.3).unwrap(),
        ] {
            let cdf = law.cdf_table();
            assert!((cdf.total_mass() - 1.0).abs() < 1e-12, "{law:?} {}", cdf.total_mass());
            for u in [0.01, 0.25, 0.5, 0.9, 0.999] {
                let x = cdf.quantile(u);
                assert!((cdf.cdf(x) - u).abs() < 1e-12);
            }
            let mid = 0.5 * (law.lower + law.upper);
            let q = integrate(|x| law.density(x), law.lower, mid, 1e-13, 0.0);
            assert!((cdf.cdf(mid) - q.value).abs() < 1e-10);
        }
    }

    #[test]
    fn t_transform_examples() {
        let t = TTransform::new(0.25).unwrap();
        assert!((t.t_at_edge() - 3f64.sqrt()).abs() < 1e-15);
        assert!((t.t(t.upper_edge()).unwrap() - 3f64.sqrt()).abs() < 1e-7);
        assert!((t.t_inverse(1.0).unwrap() - 2.0).abs() < 1e-15);
        for w in [0.01, 0.3, 1.0, 1.5, 1.7] {
            let z = t.t_inverse(w).unwrap();
            assert!((t.t(z).unwrap() - w).abs() < 1e-10);
        }
        assert!(matches!(t.t(1.5), Err(Error::EdgeOrInterior { .. })));
        assert!(t.t_inverse(2.0).is_err());
        let theta = 1.0;
        let rho = t.t_inverse(1.0 / theta).unwrap();
        let want = 1.0 / (0.25 - theta * theta * 0.75);
        assert!((t.t_prime(rho).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn t_transform_is_stieltjes() {
        let law = SpectralLaw::harmonic(0.25, 2).unwrap();
        let tt = TTransform::new(0.25).unwrap();
        for z in [2.0, 3.0, 10.0] {
            let q = integrate(|x| law.density(x) / (z - x), law.lower, law.upper, 1e-13, 0.0);
            assert!((q.value - tt.m(z).unwrap()).abs() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn spike_examples() {
        let h = spike_prediction(1.0, 0.25, MeanKind::Harmonic).unwrap();
        assert!((h.lambda1_limit - 2.0).abs() < 1e-15);
        assert!((h.overlap_sq_limit - 0.5).abs() < 1e-15);
        let a = spike_prediction(1.0, 0.25, MeanKind::Arithmetic).unwrap();
        assert!((a.lambda1_limit - 2.5).abs() < 1e-15);
        assert!((a.overlap_sq_limit - 0.6).abs() < 1e-15);
        let sub = spike_prediction(0.55, 0.25, MeanKind::Harmonic).unwrap();
        assert_eq!(sub.overlap_sq_limit, 0.0);
        assert!((sub.lambda1_limit - (1.0 + S3)).abs() < 1e-12);
        assert!(spike_prediction(0.0, 0.25, MeanKind::Harmonic).is_err());
    }

    #[test]
    fn spike_continuity_at_threshold() {
        for g in [0.05, 0.2, 0.25, 0.45] {
            for kind in [MeanKind::Arithmetic, MeanKind::Harmonic] {
                let th = spike_threshold(g, kind).unwrap();
                let above = spike_prediction(th * (1.0 + 1e-12), g, kind).unwrap();
                let law = SpectralLaw::new(g, kind, 2).unwrap();
                assert!((above.lambda1_limit - law.upper).abs() < 1e-9);
                assert!(above.overlap_sq_limit.abs() < 1e-9);
            }
        }
    }

    #[test]
    fn harmonic_overlap_via_transform() {
        let g = 0.25;
        let tt = TTransform::new(g).unwrap();
        for theta in [0.7, 1.0, 2.0, 5.0] {
            let rho = tt.t_inverse(1.0 / theta).unwrap();
            let via = -(theta + 1.0) / (theta * theta * rho * tt.t_prime(rho).unwrap());
            let direct = spike_prediction(theta, g, MeanKind::Harmonic).unwrap();
            assert!((via - direct.overlap_sq_limit).abs() < 1e-12);
            assert!((rho - direct.lambda1_limit).abs() < 1e-12);
        }
    }

    #[test]
    fn gap_examples() {
        assert!((overlap_gap(1.0, 0.25).unwrap() - 0.1).abs() < 1e-15);
        for g in [0.05, 0.25, 0.45] {
            for theta in [1.0, 3.0, 10.0] {
                let gap = overlap_gap(theta, g).unwrap();
                let a = spike_prediction(theta, g, MeanKind::Arithmetic).unwrap();
                let h = spike_prediction(theta, g, MeanKind::Harmonic).unwrap();
                assert!(gap > 0.0);
                assert!((gap - (a.overlap_sq_limit - h.overlap_sq_limit)).abs() < 1e-12);
            }
        }
        assert!(overlap_gap(0.5, 0.25).is_err());
    }

    #[test]
    fn bounds() {
        let near_half = harmonic_favorable_threshold(0.5 - 1e-12).unwrap();
        assert!((near_half - (2f64.sqrt() - 0.5)).abs() < 1e-9);
        assert!(near_half > 0.5f64.sqrt());
        assert!(harmonic_favorable_bound(0.3, 0.25).unwrap());
        assert!(!harmonic_favorable_bound(2.0, 0.25).unwrap());
        assert!((davis_kahan_bound(S3, 1.0).unwrap() - 6f64.sqrt()).abs() < 1e-12);
        assert!((davis_kahan_bound(0.75, 1.0).unwrap() - 2.121_320).abs() < 1e-6);
        assert_eq!(davis_kahan_bound(0.0, 3.0).unwrap(), 0.0);
        assert!(davis_kahan_bound(1.0, 0.0).is_err());
    }

    #[test]
    fn ratio_examples() {
        assert!(ratio_condition(1.0, 0.25).unwrap());
        assert!(!ratio_condition(2.0, 0.25).unwrap());
        assert!(ratio_condition(0.5, 0.25).is_err());
        for g in [0.01, 0.2, 0.49] {
            assert!(ratio_condition(1.0, g).unwrap());
            let th = harmonic_favorable_threshold(g).unwrap();
            assert!(ratio_condition(1.0 + th * 0.999, g).unwrap());
            assert!(!ratio_condition(1.0 + th * 1.001, g).unwrap());
        }
    }
}
