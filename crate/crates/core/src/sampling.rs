//! Population covariance models, Gaussian data and Wishart matrices.

use std::ops::Range;

use faer::{Mat, MatRef};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{Error, Result};
use crate::field::{Field, Scalar};
use crate::linalg::{check_floor, lift, SpdMatrix};
use crate::rng::rng_from_seed;

/// Direction `v` of a rank-one spike.
#[derive(Debug, Clone, PartialEq)]
pub enum SpikeDirection {
    /// First canonical basis vector `e_1`.
    Canonical,
    Vector(Vec<f64>),
}

/// Declarative population covariance model.
#[derive(Debug, Clone, PartialEq)]
pub enum CovarianceSpec {
    Identity { p: usize },
    /// `Σ = I + θ v v*`.
    Spiked {
        p: usize,
        theta: f64,
        direction: SpikeDirection,
    },
    /// `Σ = U D Uᵀ`, `U` Haar orthogonal and `D` i.i.d. uniform on `[1, b]`.
    HaarDiagonal { p: usize, b: f64 },
}

impl CovarianceSpec {
    pub fn dim(&self) -> usize {
        match self {
            CovarianceSpec::Identity { p }
            | CovarianceSpec::Spiked { p, .. }
            | CovarianceSpec::HaarDiagonal { p, .. } => *p,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.dim();
        if p == 0 {
            return Err(Error::param("dimension p must be at least 1"));
        }
        match self {
            CovarianceSpec::Identity { .. } => Ok(()),
            CovarianceSpec::Spiked {
                theta, direction, ..
            } => {
                if !(*theta > 0.0) || !theta.is_finite() {
                    return Err(Error::param(format!("spike strength theta = {theta} must be > 0")));
                }
                if let SpikeDirection::Vector(v) = direction {
                    if v.len() != p {
                        return Err(Error::DimensionMismatch {
                            expected: p,
                            found: v.len(),
                        });
                    }
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                    if (norm - 1.0).abs() > 1e-12 {
                        return Err(Error::param(format!(
                            "spike direction must have unit norm, found {norm}"
                        )));
                    }
                }
                Ok(())
            }
            CovarianceSpec::HaarDiagonal { b, .. } => {
                if !(*b >= 1.0) || !b.is_finite() {
                    return Err(Error::param(format!("condition parameter b = {b} must be >= 1")));
                }
                Ok(())
            }
        }
    }

    /// True when each build draws a fresh random matrix.
    pub fn is_random(&self) -> bool {
        matches!(self, CovarianceSpec::HaarDiagonal { .. })
    }

    pub fn model_name(&self) -> &'static str {
        match self {
            CovarianceSpec::Identity { .. } => "identity",
            CovarianceSpec::Spiked { .. } => "spiked",
            CovarianceSpec::HaarDiagonal { .. } => "haar_diagonal",
        }
    }

    /// `θ` for spiked models, `b` for Haar models.
    pub fn model_param(&self) -> Option<f64> {
        match self {
            CovarianceSpec::Identity { .. } => None,
            CovarianceSpec::Spiked { theta, .. } => Some(*theta),
            CovarianceSpec::HaarDiagonal { b, .. } => Some(*b),
        }
    }

    pub fn spike_vector(&self) -> Option<Vec<f64>> {
        match self {
            CovarianceSpec::Spiked { p, direction, .. } => Some(match direction {
                SpikeDirection::Canonical => {
                    let mut v = vec![0.0; *p];
                    v[0] = 1.0;
                    v
                }
                SpikeDirection::Vector(v) => v.clone(),
            }),
            _ => None,
        }
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// columns of `Q` multiplied by the signs of `diag(R)`.
pub fn haar_orthogonal<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Mat<f64> {
    let g = Mat::<f64>::from_fn(p, p, |_, _| StandardNormal.sample(rng));
    let qr = g.qr();
    let q = qr.compute_Q();
    let r = qr.R();
    Mat::from_fn(p, p, |i, j| {
        if r[(j, j)] < 0.0 {
            -q[(i, j)]
        } else {
            q[(i, j)]
        }
    })
}

/// Builds `Σ` for `spec`. Only [`CovarianceSpec::HaarDiagonal`] consumes the
/// seed.
pub fn build_covariance(spec: &CovarianceSpec, seed: u64) -> Result<SpdMatrix<f64>> {
    spec.validate()?;
    match spec {
        CovarianceSpec::Identity { p } => Ok(SpdMatrix::identity(*p)),
        CovarianceSpec::Spiked { p, theta, .. } => {
            let v = spec.spike_vector().expect("spiked model has a direction");
            let m = Mat::<f64>::from_fn(*p, *p, |i, j| {
                let id = if i == j { 1.0 } else { 0.0 };
                id + theta * v[i] * v[j]
            });
            SpdMatrix::new(m)
        }
        CovarianceSpec::HaarDiagonal { p, b } => {
            let (sigma, _) = haar_diagonal_parts(*p, *b, seed);
            Ok(sigma)
        }
    }
}

/// `(Σ, diag(D))` for the Haar ensemble, exposed so tests can compare the
/// spectrum of `Σ` against the draw of `D`.
pub fn haar_diagonal_parts(p: usize, b: f64, seed: u64) -> (SpdMatrix<f64>, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let u = haar_orthogonal(p, &mut rng);
    let d: Vec<f64> = if b == 1.0 {
        vec![1.0; p]
    } else {
        let unif = Uniform::new_inclusive(1.0, b).expect("b > 1");
        (0..p).map(|_| unif.sample(&mut rng)).collect()
    };
    let ud = Mat::<f64>::from_fn(p, p, |i, j| u[(i, j)] * d[j]);
    let sigma = &ud * u.transpose();
    (SpdMatrix::from_hermitian_unchecked(sigma.as_ref()), d)
}

/// `p × n` sample whose columns are the observations.
#[derive(Debug, Clone)]
pub struct DataMatrix<T: Scalar> {
    entries: Mat<T>,
}

impl<T: Scalar> DataMatrix<T> {
    pub fn new(entries: Mat<T>) -> Result<Self> {
        if entries.nrows() == 0 || entries.ncols() == 0 {
            return Err(Error::param("data matrix must be non-empty"));
        }
        Ok(Self { entries })
    }

    pub fn p(&self) -> usize {
        self.entries.nrows()
    }

    pub fn n(&self) -> usize {
        self.entries.ncols()
    }

    pub fn field(&self) -> Field {
        T::FIELD
    }

    pub fn as_mat(&self) -> MatRef<'_, T> {
        self.entries.as_ref()
    }

    pub fn columns(&self, range: Range<usize>) -> MatRef<'_, T> {
        self.entries.as_ref().subcols(range.start, range.len())
    }
}

#[derive(Debug, Clone)]
enum Root {
    Identity,
    Diagonal(Vec<f64>),
    Dense(Mat<f64>),
}

/// Draws `X = √Σ Z` with the square root computed once.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    p: usize,
    root: Root,
}

impl GaussianSampler {
    pub fn new(sigma: &SpdMatrix<f64>) -> Result<Self> {
        let p = sigma.dim();
        let m = sigma.as_mat();
        let is_diagonal = (0..p).all(|j| (0..p).all(|i| i == j || m[(i, j)] == 0.0));
        let root = if sigma.is_identity() {
            Root::Identity
        } else if is_diagonal {
            let d: Vec<f64> = (0..p).map(|i| m[(i, i)]).collect();
            let (min, max) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
            if !(min > crate::linalg::PD_FLOOR * max) {
                return Err(Error::Singular { min, max });
            }
            Root::Diagonal(d.into_iter().map(f64::sqrt).collect())
        } else {
            let eig = sigma.eigen()?;
            check_floor(&eig)?;
            Root::Dense(eig.reconstruct(f64::sqrt))
        };
        Ok(Self { p, root })
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    pub fn sample<T: Scalar, R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<DataMatrix<T>> {
        if n == 0 {
            return Err(Error::param("sample size n must be at least 1"));
        }
        let z = Mat::<T>::from_fn(self.p, n, |_, _| T::standard_gaussian(rng));
        let x = match &self.root {
            Root::Identity => z,
            Root::Diagonal(d) => Mat::from_fn(self.p, n, |i, j| z[(i, j)] * T::from_real(d[i])),
            Root::Dense(root) => lift::<T>(root.as_ref()) * z,
        };
        DataMatrix::new(x)
    }
}

/// `n` i.i.d. centered Gaussian columns with covariance `sigma`, over the
/// field `T`.
pub fn sample_data<T: Scalar>(sigma: &SpdMatrix<f64>, n: usize, seed: u64) -> Result<DataMatrix<T>> {
    if n == 0 {
        return Err(Error::param("sample size n must be at least 1"));
    }
    let sampler = GaussianSampler::new(sigma)?;
    sampler.sample(n, &mut rng_from_seed(seed))
}

/// `W = X X* / n`.
pub fn wishart<T: Scalar>(data: &DataMatrix<T>) -> SpdMatrix<T> {
    gram(data.as_mat())
}

fn gram<T: Scalar>(x: MatRef<'_, T>) -> SpdMatrix<T> {
    let scale = T::from_real(1.0 / x.ncols() as f64);
    let g = x * x.adjoint() * faer::Scale(scale);
    SpdMatrix::from_hermitian_unchecked(g.as_ref())
}

/// Equal-size partition of the column indices `0..total` into contiguous
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    total: usize,
    blocks: Vec<Range<usize>>,
}

impl Partition {
    pub fn equal(total: usize, n_blocks: usize) -> Result<Self> {
        if n_blocks == 0 || total == 0 {
            return Err(Error::param("partition needs at least one block and one sample"));
        }
        if total % n_blocks != 0 {
            return Err(Error::param(format!(
                "T = {total} is not divisible into {n_blocks} equal blocks"
            )));
        }
        let size = total / n_blocks;
        let blocks = (0..n_blocks).map(|i| i * size..(i + 1) * size).collect();
        Ok(Self { total, blocks })
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn block_size(&self) -> usize {
        self.total / self.blocks.len()
    }

    pub fn blocks(&self) -> &[Range<usize>] {
        &self.blocks
    }
}

/// One Wishart matrix per block, each normalized by its own block size.
pub fn split_wisharts<T: Scalar>(
    data: &DataMatrix<T>,
    partition: &Partition,
) -> Result<Vec<SpdMatrix<T>>> {
    if partition.total() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            found: partition.total(),
        });
    }
    if partition.block_size() < data.p() {
        return Err(Error::NonInvertibleSplit {
            block_size: partition.block_size(),
            p: data.p(),
        });
    }
    block_wisharts(data, partition)
}

/// As [`split_wisharts`] but without requiring `block_size >= p`, so the
/// blocks may be singular.
pub fn block_wisharts<T: Scalar>(
    data: &DataMatrix<T>,
    partition: &Partition,
) -> Result<Vec<SpdMatrix<T>>> {
    if partition.total() != data.n() {
        return Err(Error::DimensionMismatch {
            expected: data.n(),
            found: partition.total(),
        });
    }
    Ok(partition
        .blocks()
        .iter()
        .map(|b| gram(data.columns(b.clone())))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::c64;
    use crate::rng::rng_from_seed;

    #[test]
    fn identity_and_spiked() {
        let id = build_covariance(&CovarianceSpec::Identity { p: 3 }, 0).unwrap();
        assert!(id.is_identity());

        let spec = CovarianceSpec::Spiked {
            p: 2,
            theta: 1.0,
            direction: SpikeDirection::Canonical,
        };
        let s = build_covariance(&spec, 0).unwrap();
        assert_eq!(s[(0, 0)], 2.0);
        assert_eq!(s[(1, 1)], 1.0);
        assert_eq!(s[(0, 1)], 0.0);
    }

    #[test]
    fn invalid_specs() {
        let bad = [
            CovarianceSpec::Identity { p: 0 },
            CovarianceSpec::Spiked {
                p: 2,
                theta: 0.0,
                direction: SpikeDirection::Canonical,
            },
            CovarianceSpec::Spiked {
                p: 2,
                theta: 1.0,
                direction: SpikeDirection::Vector(vec![1.0, 1.0]),
            },
            CovarianceSpec::HaarDiagonal { p: 3, b: 0.5 },
        ];
        for spec in bad {
            assert!(matches!(build_covariance(&spec, 1), Err(Error::Parameter(_))), "{spec:?}");
        }
    }

    #[test]
    fn haar_spectrum_matches_diagonal_draw() {
        let (sigma, mut d) = haar_diagonal_parts(50, 5.0, 7);
        let ev = sigma.eigenvalues().unwrap();
        d.sort_by(f64::total_cmp);
        assert!(d.iter().all(|x| (1.0..=5.0).contains(x)));
        for (a, b) in ev.iter().zip(&d) {
            assert!((a - b).abs() < 1e-10, "{a} vs {b}");
        }
        let again = build_covariance(&CovarianceSpec::HaarDiagonal { p: 50, b: 5.0 }, 7).unwrap();
        assert_eq!(again.as_mat(), sigma.as_mat());
    }

    #[test]
    fn haar_is_orthogonal() {
        let u = haar_orthogonal(40, &mut rng_from_seed(3));
        let utu = u.transpose() * &u;
        for i in 0..40 {
            for j in 0..40 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((utu[(i, j)] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn wishart_hand_cases() {
        let x = DataMatrix::new(Mat::<f64>::identity(3, 3)).unwrap();
        let w = wishart(&x);
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(w[(i, j)], if i == j { 1.0 / 3.0 } else { 0.0 });
            }
        }
        let x = DataMatrix::new(Mat::<f64>::from_fn(2, 2, |i, j| {
            if i == j {
                (i + 1) as f64
            } else {
                0.0
            }
        }))
        .unwrap();
        let w = wishart(&x);
        assert_eq!(w[(0, 0)], 0.5);
        assert_eq!(w[(1, 1)], 2.0);
        assert_eq!(w[(0, 1)], 0.0);
    }

    #[test]
    fn wishart_is_psd() {
        let sigma = SpdMatrix::identity(6);
        let x = sample_data::<c64>(&sigma, 4, 11).unwrap();
        wishart(&x).validate().unwrap();
    }

    #[test]
    fn empty_sample_rejected() {
        let sigma = SpdMatrix::identity(2);
        assert!(matches!(sample_data::<f64>(&sigma, 0, 1), Err(Error::Parameter(_))));
    }

    #[test]
    fn splitting_rules() {
        let p = 5;
        let sigma = SpdMatrix::identity(p);
        let x = sample_data::<f64>(&sigma, 2 * p - 2, 4).unwrap();
        let part = Partition::equal(2 * p - 2, 2).unwrap();
        assert!(matches!(
            split_wisharts(&x, &part),
            Err(Error::NonInvertibleSplit { block_size: 4, p: 5 })
        ));

        let x = sample_data::<f64>(&sigma, 24, 4).unwrap();
        let one = split_wisharts(&x, &Partition::equal(24, 1).unwrap()).unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one[0].as_mat(), wishart(&x).as_mat());

        assert!(Partition::equal(25, 2).is_err());
    }

    #[test]
    fn real_sample_covariance_converges() {
        let sigma = SpdMatrix::identity(4);
        let x = sample_data::<f64>(&sigma, 100_000, 21).unwrap();
        let w = wishart(&x);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((w[(i, j)] - want).abs() < 0.02, "{i},{j}: {}", w[(i, j)]);
            }
        }
    }

    #[test]
    fn complex_entry_moments() {
        let mut rng = rng_from_seed(99);
        let n = 100_000;
        let (mut m2, mut pseudo) = (0.0, c64::new(0.0, 0.0));
        for _ in 0..n {
            let z = c64::standard_gaussian(&mut rng);
            m2 += z.norm_sqr();
            pseudo += z * z;
        }
        m2 /= n as f64;
        pseudo /= n as f64;
        // sd of |Z|^2 is 1 and of Z^2 is 1/sqrt(2) per component, so 5 sigma ~ 0.016
        assert!((m2 - 1.0).abs() < 0.016, "{m2}");
        assert!(pseudo.norm() < 0.016, "{pseudo}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let sigma = build_covariance(&CovarianceSpec::HaarDiagonal { p: 8, b: 3.0 }, 5).unwrap();
        let a = sample_data::<c64>(&sigma, 20, 17).unwrap();
        let b = sample_data::<c64>(&sigma, 20, 17).unwrap();
        assert_eq!(a.as_mat(), b.as_mat());
    }
}
