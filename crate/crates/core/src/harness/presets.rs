//! Figure presets and the spike sweep.
//!
//! All presets use the Haar ensemble with `N = 2` and the same base seed in
//! every cell, so cells that differ only in `b` see the same rotations and
//! the same uniforms.

use std::fmt;
use std::str::FromStr;

use crate::asymptotics::check_gamma;
use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::field::Field;
use crate::sampling::{CovarianceSpec, SpikeDirection};

use super::config::ExperimentConfig;

pub const PRESET_SEED: u64 = 20_190_507;
pub const PRESET_TRIALS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Relative error against `b`, faceted by `p`.
    One,
    /// Relative error against `p`, faceted by `b`.
    Two,
    /// Relative error against the sample-size multiplier `q`.
    Three,
    /// Figure one with the Rao-Blackwellized harmonic mean added.
    Four,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" => Ok(Figure::One),
            "2" => Ok(Figure::Two),
            "3" => Ok(Figure::Three),
            "4" => Ok(Figure::Four),
            other => Err(Error::param(format!("figure must be 1, 2, 3 or 4, got `{other}`"))),
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Figure::One => 1,
            Figure::Two => 2,
            Figure::Three => 3,
            Figure::Four => 4,
        };
        write!(f, "{n}")
    }
}

pub const FIG1_P: [usize; 2] = [50, 100];
pub const FIG1_B: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const FIG2_P: [usize; 5] = [25, 50, 100, 200, 300];
pub const FIG2_B: [f64; 4] = [1.0, 2.0, 4.0, 8.0];
pub const FIG3_P: [usize; 2] = [50, 100];
pub const FIG3_B: [f64; 2] = [1.0, 4.0];
pub const FIG3_Q: [f64; 5] = [1.1, 1.5, 2.0, 3.0, 4.0];

fn check_scale(scale: f64) -> Result<()> {
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::param(format!("scale must be a positive number, got {scale}")));
    }
    Ok(())
}

pub fn scaled_p(p: usize, scale: f64) -> usize {
    ((p as f64 * scale).round() as usize).max(2)
}

pub fn scaled_trials(trials: usize, scale: f64) -> usize {
    ((trials as f64 * scale).round() as usize).max(1)
}

/// `⌈2qp⌉` rounded up to the next even number so the two splits are equal.
/// The small offset keeps `2 · 1.1 · 50` from rounding up past 110.
pub fn q_total_samples(q: f64, p: usize) -> usize {
    let t = (2.0 * q * p as f64 - 1e-9).ceil() as usize;
    t + t % 2
}

fn haar_config(id: String, p: usize, total: usize, b: f64, estimators: &[EstimatorKind], trials: usize) -> ExperimentConfig {
    ExperimentConfig {
        experiment_id: id,
        p,
        n: total / 2,
        n_splits: 2,
        field: Field::Real,
        covariance: CovarianceSpec::HaarDiagonal { p, b },
        estimators: estimators.to_vec(),
        trials,
        base_seed: PRESET_SEED,
        output_path: None,
    }
}

/// Cells of a figure preset; `scale` multiplies `p` and the trial count.
pub fn figure_configs(figure: Figure, scale: f64) -> Result<Vec<ExperimentConfig>> {
    check_scale(scale)?;
    let trials = scaled_trials(PRESET_TRIALS, scale);
    let three = [
        EstimatorKind::Arithmetic,
        EstimatorKind::FISHER_SUN,
        EstimatorKind::Harmonic,
    ];
    let four = [
        EstimatorKind::Arithmetic,
        EstimatorKind::FISHER_SUN,
        EstimatorKind::Harmonic,
        EstimatorKind::RaoBlackwellHarmonic,
    ];
    let mut out = Vec::new();
    match figure {
        Figure::One | Figure::Four => {
            let (tag, est): (&str, &[EstimatorKind]) = if figure == Figure::One {
                ("fig1", &three)
            } else {
                ("fig4", &four)
            };
            for p in FIG1_P.map(|p| scaled_p(p, scale)) {
                for b in FIG1_B {
                    out.push(haar_config(format!("{tag}_p{p}_b{b}"), p, 4 * p, b, est, trials));
                }
            }
        }
        Figure::Two => {
            for b in FIG2_B {
                for p in FIG2_P.map(|p| scaled_p(p, scale)) {
                    out.push(haar_config(format!("fig2_b{b}_p{p}"), p, 4 * p, b, &three, trials));
                }
            }
        }
        Figure::Three => {
            let two = [EstimatorKind::Arithmetic, EstimatorKind::Harmonic];
            for p in FIG3_P.map(|p| scaled_p(p, scale)) {
                for b in FIG3_B {
                    for q in FIG3_Q {
                        let total = q_total_samples(q, p);
                        out.push(haar_config(format!("fig3_p{p}_b{b}_q{q}"), p, total, b, &two, trials));
                    }
                }
            }
        }
    }
    for c in &out {
        c.validate()?;
    }
    Ok(out)
}

/// One configuration per `θ`: `Σ = I + θ e₁e₁ᵀ`, `T = p/Γ` (must be an even
/// integer), arithmetic and harmonic means over two splits.
pub fn spike_configs(
    p: usize,
    gamma: f64,
    thetas: &[f64],
    trials: usize,
    field: Field,
    seed: u64,
) -> Result<Vec<ExperimentConfig>> {
    check_gamma(gamma)?;
    if thetas.is_empty() {
        return Err(Error::param("need at least one theta"));
    }
    let t = (p as f64 / gamma).round();
    if (t * gamma - p as f64).abs() > 1e-9 * p as f64 || t as usize % 2 != 0 {
        return Err(Error::param(format!(
            "p / gamma = {} must be an even integer",
            p as f64 / gamma
        )));
    }
    let n = t as usize / 2;
    thetas
        .iter()
        .map(|&theta| {
            let c = ExperimentConfig {
                experiment_id: format!("spike_p{p}_theta{theta}"),
                p,
                n,
                n_splits: 2,
                field,
                covariance: CovarianceSpec::Spiked {
                    p,
                    theta,
                    direction: SpikeDirection::Canonical,
                },
                estimators: vec![EstimatorKind::Arithmetic, EstimatorKind::Harmonic],
                trials,
                base_seed: seed,
                output_path: None,
            };
            c.validate()?;
            Ok(c)
        })
        .collect()
}
