//! Seeded Monte Carlo runner.
//!
//! A trial draws `Σ` (fresh per trial for the Haar ensemble, shared
//! otherwise), draws `T = nN` observations, splits them into `N` contiguous
//! blocks and evaluates every requested estimator on the same split. Rows
//! come out trial-major in estimator order regardless of how the trials
//! were scheduled.

pub mod config;
pub mod presets;
pub mod record;

use rayon::prelude::*;

use crate::asymptotics::{spike_prediction, MeanKind, SpectralLaw};
use crate::error::{Error, Result};
use crate::estimators::{EstimatorKind, SplitSample};
use crate::field::{c64, Field, Scalar};
use crate::linalg::{eigvalsh, SpdMatrix};
use crate::metrics::{TrialMetrics, Truth};
use crate::rng::{derive_seed, rng_from_seed, DATA_STREAM, SIGMA_STREAM};
use crate::sampling::{build_covariance, CovarianceSpec, GaussianSampler, Partition};

pub use config::ExperimentConfig;
pub use presets::{figure_configs, spike_configs, Figure};
pub use record::{read_csv_file, summarize, write_csv, write_csv_file, CellSummary, TrialRecord};

/// `λ_min(A − H) >= −LOEWNER_TOL · max(1, λ_max(A − H))` is enforced on
/// every trial that forms the harmonic mean.
pub const LOEWNER_TOL: f64 = 1e-9;

pub fn trial_seed(base_seed: u64, trial: usize) -> u64 {
    derive_seed(base_seed, trial as u64)
}

/// Limits matching one row, where the theory provides them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Predictions {
    pub op_error: Option<f64>,
    pub lambda1: Option<f64>,
    pub overlap_sq: Option<f64>,
}

pub fn predictions(config: &ExperimentConfig, kind: &EstimatorKind) -> Predictions {
    let gamma = config.gamma();
    let mean = match kind {
        EstimatorKind::Arithmetic => MeanKind::Arithmetic,
        EstimatorKind::Harmonic => MeanKind::Harmonic,
        _ => return Predictions::default(),
    };
    match &config.covariance {
        CovarianceSpec::Identity { .. } => match SpectralLaw::new(gamma, mean, config.n_splits) {
            Ok(law) => Predictions {
                op_error: Some(law.op_distance_from_one()),
                lambda1: Some(law.upper),
                overlap_sq: None,
            },
            Err(_) => Predictions::default(),
        },
        CovarianceSpec::Spiked { theta, .. } if mean == MeanKind::Arithmetic || config.n_splits == 2 => {
            match spike_prediction(*theta, gamma, mean) {
                Ok(s) => Predictions {
                    op_error: None,
                    lambda1: Some(s.lambda1_limit),
                    overlap_sq: Some(s.overlap_sq_limit),
                },
                Err(_) => Predictions::default(),
            }
        }
        _ => Predictions::default(),
    }
}

fn shared_sigma(config: &ExperimentConfig) -> Result<Option<SpdMatrix<f64>>> {
    if config.covariance.is_random() {
        Ok(None)
    } else {
        build_covariance(&config.covariance, derive_seed(config.base_seed, SIGMA_STREAM)).map(Some)
    }
}

/// Runs one trial; deterministic in `(config.base_seed, trial)`.
pub fn run_trial(config: &ExperimentConfig, trial: usize) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let shared = shared_sigma(config)?;
    run_trial_with(config, trial, shared.as_ref())
}

fn run_trial_with(
    config: &ExperimentConfig,
    trial: usize,
    shared: Option<&SpdMatrix<f64>>,
) -> Result<Vec<TrialRecord>> {
    let result = match config.field {
        Field::Real => run_trial_typed::<f64>(config, trial, shared),
        Field::Complex => run_trial_typed::<c64>(config, trial, shared),
    };
    result.map_err(|e| Error::Trial {
        trial,
        source: Box::new(e),
    })
}

fn check_loewner<T: Scalar>(a: &SpdMatrix<T>, h: &SpdMatrix<T>) -> Result<()> {
    let values = eigvalsh((a.as_mat() - h.as_mat()).as_ref())?;
    let (min, max) = (values[0], values[values.len() - 1]);
    if min < -LOEWNER_TOL * max.abs().max(1.0) {
        return Err(Error::LoewnerViolation { min });
    }
    Ok(())
}

fn run_trial_typed<T: Scalar>(
    config: &ExperimentConfig,
    trial: usize,
    shared: Option<&SpdMatrix<f64>>,
) -> Result<Vec<TrialRecord>> {
    let seed = trial_seed(config.base_seed, trial);
    let drawn;
    let sigma = match shared {
        Some(s) => s,
        None => {
            drawn = build_covariance(&config.covariance, derive_seed(seed, SIGMA_STREAM))?;
            &drawn
        }
    };
    let data = GaussianSampler::new(sigma)?
        .sample::<T, _>(config.total_samples(), &mut rng_from_seed(derive_seed(seed, DATA_STREAM)))?;
    let partition = Partition::equal(config.total_samples(), config.n_splits)?;
    let split = if config.estimators.iter().any(|k| k.needs_invertible_blocks()) {
        SplitSample::new(&data, &partition)?
    } else {
        SplitSample::new_allow_singular(&data, &partition)?
    };
    let spike = config
        .covariance
        .spike_vector()
        .map(|v| v.into_iter().map(T::from_real).collect());
    let truth = Truth::new(sigma.to_field::<T>(), spike)?;

    let mut rows = Vec::with_capacity(config.estimators.len());
    for kind in &config.estimators {
        let estimate = kind.estimate(&split)?;
        if *kind == EstimatorKind::Harmonic {
            check_loewner(&split.pooled, &estimate)?;
        }
        let m = TrialMetrics::compute(&estimate, &truth)?;
        let pred = predictions(config, kind);
        rows.push(TrialRecord {
            experiment_id: config.experiment_id.clone(),
            trial,
            seed,
            p: config.p,
            n: config.n,
            n_splits: config.n_splits,
            gamma: config.gamma(),
            field: config.field,
            model: config.covariance.model_name().to_string(),
            model_param: config.covariance.model_param(),
            estimator: kind.to_string(),
            op_error: m.op_error,
            op_rel_error: m.op_rel_error,
            frob_sq_per_p: m.frob_sq_per_p,
            lambda1: m.lambda1,
            overlap_sq: m.overlap_sq,
            pred_op_error: pred.op_error,
            pred_lambda1: pred.lambda1,
            pred_overlap_sq: pred.overlap_sq,
        });
    }
    Ok(rows)
}

/// All trials of one configuration, run in parallel.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let shared = shared_sigma(config)?;
    let per_trial = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial_with(config, t, shared.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    Ok(per_trial.into_iter().flatten().collect())
}

/// Concatenation of [`run_experiment`] over `configs`, in order.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Result<Vec<TrialRecord>> {
    let mut rows = Vec::new();
    for c in configs {
        rows.extend(run_experiment(c)?);
    }
    Ok(rows)
}

/// Arithmetic and harmonic means on a rank-one spike for each `θ`, with
/// `T = p/Γ` split in two.
pub fn spike_experiment(
    p: usize,
    gamma: f64,
    thetas: &[f64],
    trials: usize,
    field: Field,
    seed: u64,
) -> Result<Vec<TrialRecord>> {
    run_sweep(&spike_configs(p, gamma, thetas, trials, field, seed)?)
}
