//! Deterministic invariant suites, run by the `selftest` command.
//!
//! Each suite reports the worst discrepancy it saw next to its tolerance.

use std::fmt;

use faer::{Mat, MatRef};
use rand::Rng;
use rand_distr::{Distribution, Uniform};
use statrs::distribution::{Beta, Continuous};
use statrs::statistics::Distribution as _;

use crate::asymptotics::{closed_form_moment, max_splits, MeanKind, SpectralLaw, TTransform};
use crate::error::Result;
use crate::estimators::{
    arithmetic_mean, harmonic_mean, rao_blackwell_harmonic, rb_regularized_harmonic,
    rb_shrinkage_harmonic, ShrinkageTarget,
};
use crate::field::{c64, Scalar};
use crate::linalg::{eigvalsh, frobenius_sq, SpdMatrix};
use crate::matbeta::{expected_ltl, matbeta_log_density, MatrixBetaParams};
use crate::quadrature::integrate;
use crate::rng::{derive_seed, rng_from_seed, ExperimentRng};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub cases: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<28} cases={:<5} worst={:.3e} tol={:.0e}",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.cases,
            self.worst,
            self.tolerance
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct SelftestReport {
    pub checks: Vec<Check>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Runs every suite with randomness derived from `seed`.
pub fn run(seed: u64) -> Result<SelftestReport> {
    let rng = |k: u64| rng_from_seed(derive_seed(seed, k));
    let checks = vec![
        closed_form_vs_quadrature(&mut rng(1)),
        scalar_beta(&mut rng(2))?,
        am_hm_loewner(&mut rng(3))?,
        congruence(&mut rng(4))?,
        two_matrix_identity(&mut rng(5))?,
        t_fixed_point(&mut rng(6))?,
        t_round_trip(&mut rng(7))?,
        density_unit_mass()?,
        harmonic_law_moments()?,
        rb_regularized_reduction(&mut rng(8))?,
    ];
    Ok(SelftestReport { checks })
}

/// `X X* / m` with `m = 2p + 3` Gaussian columns; well conditioned and
/// strictly positive definite.
pub fn random_pd<T: Scalar, R: Rng + ?Sized>(p: usize, rng: &mut R) -> SpdMatrix<T> {
    let m = 2 * p + 3;
    let x = Mat::<T>::from_fn(p, m, |_, _| T::standard_gaussian(rng));
    let g = &x * x.adjoint();
    let g = Mat::from_fn(p, p, |i, j| g[(i, j)] * T::from_real(1.0 / m as f64));
    SpdMatrix::new(g).expect("Gram matrix is Hermitian PSD")
}

fn rel_diff<T: Scalar>(a: MatRef<'_, T>, b: MatRef<'_, T>) -> f64 {
    let d = frobenius_sq((a - b).as_ref()).sqrt();
    d / frobenius_sq(b).sqrt().max(f64::MIN_POSITIVE)
}

fn closed_form_vs_quadrature(rng: &mut ExperimentRng) -> Check {
    let unif = Uniform::new(0.0, 5.0).expect("valid range");
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..20 {
        let (x, y): (f64, f64) = (unif.sample(rng), unif.sample(rng));
        let (a, b) = (x.min(y), x.max(y));
        if b - a < 1e-3 {
            continue;
        }
        for k in 1..=8u32 {
            let exact = closed_form_moment(a, b, k).expect("a < b");
            let q = integrate(
                |t: f64| t.powi(k as i32 - 1) * ((b - t) * (t - a)).max(0.0).sqrt(),
                a,
                b,
                0.0,
                1e-13,
            );
            worst = worst.max(((q.value - exact) / exact).abs());
            cases += 1;
        }
    }
    Check {
        name: "closed_form_moment",
        cases,
        worst,
        tolerance: 1e-10,
    }
}

fn scalar_beta(rng: &mut ExperimentRng) -> Result<Check> {
    let dof = Uniform::new(0.5, 40.0).expect("valid range");
    let point = Uniform::new(0.01, 0.99).expect("valid range");
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..25 {
        let (n1, n2) = (dof.sample(rng), dof.sample(rng));
        let params = MatrixBetaParams::new(n1, n2, SpdMatrix::identity(1))?;
        let oracle = Beta::new(n1 / 2.0, n2 / 2.0).expect("positive shape");
        for _ in 0..4 {
            let x = point.sample(rng);
            let got = matbeta_log_density(&SpdMatrix::from_diagonal(&[x])?, &params)?;
            let want = oracle.ln_pdf(x);
            worst = worst.max((got - want).abs() / want.abs().max(1.0));
            cases += 1;
        }
        let second = expected_ltl(Mat::<f64>::identity(1, 1).as_ref(), &params)?[(0, 0)];
        let mean = oracle.mean().expect("finite mean");
        let var = oracle.variance().expect("finite variance");
        worst = worst.max((second - (var + mean * mean)).abs());
        cases += 1;
    }
    Ok(Check {
        name: "scalar_beta_reduction",
        cases,
        worst,
        tolerance: 1e-12,
    })
}

fn loewner_gap<T: Scalar>(ws: &[SpdMatrix<T>]) -> Result<f64> {
    let a = arithmetic_mean(ws)?;
    let h = harmonic_mean(ws)?;
    let values = eigvalsh((a.as_mat() - h.as_mat()).as_ref())?;
    // violation measured relative to the spread of A − H
    Ok((-values[0]).max(0.0) / values[values.len() - 1].abs().max(1.0))
}

fn am_hm_loewner(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for &(p, n_mats) in &[(1, 2), (3, 2), (5, 3), (8, 4), (20, 2)] {
        for _ in 0..10 {
            let real: Vec<SpdMatrix<f64>> = (0..n_mats).map(|_| random_pd(p, rng)).collect();
            let cplx: Vec<SpdMatrix<c64>> = (0..n_mats).map(|_| random_pd(p, rng)).collect();
            worst = worst.max(loewner_gap(&real)?).max(loewner_gap(&cplx)?);
            cases += 2;
        }
    }
    Ok(Check {
        name: "am_hm_loewner_order",
        cases,
        worst,
        tolerance: 1e-9,
    })
}

fn congruence_case<T: Scalar>(p: usize, rng: &mut ExperimentRng) -> Result<f64> {
    let ws: Vec<SpdMatrix<T>> = (0..3).map(|_| random_pd(p, rng)).collect();
    let s = Mat::<T>::from_fn(p, p, |i, j| {
        let g = T::standard_gaussian(rng) * T::from_real(0.3 / (p as f64).sqrt());
        if i == j {
            g + T::from_real(1.0)
        } else {
            g
        }
    });
    let moved: Vec<SpdMatrix<T>> = ws
        .iter()
        .map(|w| SpdMatrix::new(&s * w.as_mat() * s.adjoint()))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for mean in [harmonic_mean::<T>, arithmetic_mean::<T>] {
        let lhs = mean(&moved)?;
        let rhs = &s * mean(&ws)?.as_mat() * s.adjoint();
        worst = worst.max(rel_diff(lhs.as_mat(), rhs.as_ref()));
    }
    let c = 3.7;
    let scaled: Vec<SpdMatrix<T>> = ws.iter().map(|w| w.scaled(c)).collect::<Result<_>>()?;
    let rhs = harmonic_mean(&ws)?.scaled(c)?;
    worst = worst.max(rel_diff(harmonic_mean(&scaled)?.as_mat(), rhs.as_mat()));
    Ok(worst)
}

fn congruence(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in [1, 2, 5, 12] {
        for _ in 0..5 {
            worst = worst
                .max(congruence_case::<f64>(p, rng)?)
                .max(congruence_case::<c64>(p, rng)?);
            cases += 2;
        }
    }
    Ok(Check {
        name: "congruence_equivariance",
        cases,
        worst,
        tolerance: 1e-9,
    })
}

fn two_matrix_case<T: Scalar>(p: usize, rng: &mut ExperimentRng) -> Result<f64> {
    let (w1, w2): (SpdMatrix<T>, SpdMatrix<T>) = (random_pd(p, rng), random_pd(p, rng));
    let a = arithmetic_mean(&[w1.clone(), w2.clone()])?;
    let h = harmonic_mean(&[w1.clone(), w2.clone()])?;
    let a_inv = a.inverse()?;
    let q1 = w1.as_mat() * &a_inv * w1.as_mat();
    let q2 = w2.as_mat() * &a_inv * w2.as_mat();
    let half = T::from_real(0.5);
    let two = T::from_real(2.0);
    let rhs = Mat::from_fn(p, p, |i, j| two * a[(i, j)] - half * (q1[(i, j)] + q2[(i, j)]));
    Ok(rel_diff(h.as_mat(), rhs.as_ref()))
}

fn two_matrix_identity(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for p in [1, 3, 6, 15] {
        for _ in 0..5 {
            worst = worst
                .max(two_matrix_case::<f64>(p, rng)?)
                .max(two_matrix_case::<c64>(p, rng)?);
            cases += 2;
        }
    }
    Ok(Check {
        name: "two_matrix_identity",
        cases,
        worst,
        tolerance: 1e-9,
    })
}

const GAMMAS: [f64; 5] = [0.05, 0.125, 0.25, 0.4, 0.49];

fn t_fixed_point(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let log_offset = Uniform::new(-8.0, 3.0).expect("valid range");
    for g in GAMMAS {
        let tt = TTransform::new(g)?;
        for _ in 0..100 {
            let z = tt.upper_edge() + 10f64.powf(log_offset.sample(rng));
            let t = tt.t(z)?;
            let residual = g * t * t + (1.0 - z) * t + (1.0 - g);
            worst = worst.max(residual.abs() / z.max(1.0));
            cases += 1;
        }
    }
    Ok(Check {
        name: "t_transform_fixed_point",
        cases,
        worst,
        tolerance: 1e-10,
    })
}

fn t_round_trip(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let unit = Uniform::new(0.001, 0.999).expect("valid range");
    for g in GAMMAS {
        let tt = TTransform::new(g)?;
        for _ in 0..100 {
            let w = unit.sample(rng) * tt.t_at_edge();
            worst = worst.max((tt.t(tt.t_inverse(w)?)? - w).abs());
            cases += 1;
        }
    }
    Ok(Check {
        name: "t_transform_round_trip",
        cases,
        worst,
        tolerance: 1e-10,
    })
}

fn density_unit_mass() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for g in GAMMAS {
        let mut laws = vec![SpectralLaw::new(g, MeanKind::Arithmetic, 1)?];
        for n in 2..=max_splits(g)?.min(8) {
            laws.push(SpectralLaw::new(g, MeanKind::Harmonic, n)?);
        }
        for law in laws {
            let q = integrate(|x| law.density(x), law.lower, law.upper, 1e-12, 0.0);
            worst = worst.max((q.value - 1.0).abs());
            cases += 1;
        }
    }
    Ok(Check {
        name: "density_unit_mass",
        cases,
        worst,
        tolerance: 1e-8,
    })
}

/// Quadrature against the closed form for the two-split harmonic law: mean
/// `1 − Γ` and `∫ (x − 1)² dν = Γ`.
fn harmonic_law_moments() -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    for g in GAMMAS {
        let law = SpectralLaw::harmonic(g, 2)?;
        let mean = integrate(|x| x * law.density(x), law.lower, law.upper, 1e-12, 0.0).value;
        let spread = integrate(|x| (x - 1.0).powi(2) * law.density(x), law.lower, law.upper, 1e-12, 0.0).value;
        worst = worst
            .max((mean - (1.0 - g)).abs())
            .max((law.mean() - (1.0 - g)).abs())
            .max((spread - g).abs())
            .max((law.moment(2) - 2.0 * law.moment(1) + 1.0 - g).abs());
        cases += 1;
    }
    Ok(Check {
        name: "harmonic_law_moments",
        cases,
        worst,
        tolerance: 1e-8,
    })
}

fn rb_regularized_reduction(rng: &mut ExperimentRng) -> Result<Check> {
    let mut worst = 0.0f64;
    let mut cases = 0;
    let id = |p| SpdMatrix::<f64>::identity(p);
    // scalar case from the shrinkage remark
    let one = SpdMatrix::<f64>::identity(1);
    let general = rb_regularized_harmonic(&one, 0.5, 1.0, &one, 1, 4)?;
    let special = rb_shrinkage_harmonic(&one, 0.5, 1, 4)?;
    worst = worst.max((general[(0, 0)] - special[(0, 0)]).abs());
    cases += 1;
    for &(p, n) in &[(1, 3), (4, 10), (10, 25), (20, 40)] {
        for _ in 0..3 {
            let a: SpdMatrix<f64> = random_pd(p, rng);
            let plain = rao_blackwell_harmonic(&a, p, n)?;
            let reduced = rb_regularized_harmonic(&a, 1.0, 0.0, &id(p), p, n)?;
            worst = worst.max(rel_diff(reduced.as_mat(), plain.as_mat()));
            for lambda in [0.1, 0.5, 0.9] {
                let general = rb_regularized_harmonic(&a, 1.0 - lambda, lambda / (1.0 - lambda), &id(p), p, n)?;
                let special = rb_shrinkage_harmonic(&a, lambda, p, n)?;
                worst = worst.max(rel_diff(general.as_mat(), special.as_mat()));
            }
            let scaled_target = ShrinkageTarget::ScaledIdentity.matrix(&a);
            let r = rb_regularized_harmonic(&a, 1.0, 0.0, &scaled_target, p, n)?;
            worst = worst.max(rel_diff(r.as_mat(), plain.as_mat()));
            cases += 5;
        }
    }
    Ok(Check {
        name: "rb_regularized_reduction",
        cases,
        worst,
        tolerance: 1e-12,
    })
}
