//! Harmonic versus arithmetic means of Wishart matrices.
//!
//! The crate covers the estimators (arithmetic, harmonic, Rao-Blackwellized
//! and shrinkage variants), the closed-form large-dimensional limits that
//! predict their behaviour, matrix-variate Beta utilities, error metrics, and
//! a seeded Monte Carlo harness that checks the predictions and writes CSV.

// Negated float comparisons are how NaN inputs get rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod error;
pub mod estimators;
pub mod field;
pub mod harness;
pub mod linalg;
pub mod matbeta;
pub mod metrics;
pub mod quadrature;
pub mod rng;
pub mod sampling;
pub mod selftest;

pub use asymptotics::{MeanKind, SpectralLaw, SpikePrediction};
pub use error::{Error, Result};
pub use estimators::{EstimatorKind, ShrinkageIntensity, ShrinkageTarget, SplitSample};
pub use field::{c64, Field, Scalar};
pub use harness::{ExperimentConfig, TrialRecord};
pub use linalg::SpdMatrix;
pub use matbeta::MatrixBetaParams;
pub use metrics::TrialMetrics;
pub use sampling::{CovarianceSpec, DataMatrix, Partition, SpikeDirection};
