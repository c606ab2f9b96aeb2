//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comment
//! experiment_id = identity_g025
//! p = 400
//! n = 800            # samples per split; or total_samples = 1600
//! n_splits = 2
//! field = complex
//! covariance = identity   # identity | spiked | haar_diagonal
//! estimators = arithmetic, harmonic
//! trials = 20
//! base_seed = 7
//! ```
//!
//! `theta` is required for `spiked` and `b` for `haar_diagonal`.
//! `output_path` is optional.

use std::collections::HashMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::estimators::EstimatorKind;
use crate::field::Field;
use crate::sampling::{CovarianceSpec, SpikeDirection};

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment_id: String,
    pub p: usize,
    /// Samples per split.
    pub n: usize,
    pub n_splits: usize,
    pub field: Field,
    pub covariance: CovarianceSpec,
    pub estimators: Vec<EstimatorKind>,
    pub trials: usize,
    pub base_seed: u64,
    pub output_path: Option<PathBuf>,
}

const KEYS: &[&str] = &[
    "experiment_id",
    "p",
    "n",
    "total_samples",
    "n_splits",
    "field",
    "covariance",
    "theta",
    "b",
    "estimators",
    "trials",
    "base_seed",
    "output_path",
];

impl ExperimentConfig {
    pub fn total_samples(&self) -> usize {
        self.n * self.n_splits
    }

    /// `p / T`, exactly as a ratio of the integers.
    pub fn gamma(&self) -> f64 {
        self.p as f64 / self.total_samples() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment_id.is_empty() || self.experiment_id.contains([',', '"', '\n']) {
            return Err(Error::param(format!(
                "experiment_id `{}` must be non-empty without commas, quotes or newlines",
                self.experiment_id
            )));
        }
        if self.p == 0 || self.n == 0 || self.n_splits == 0 {
            return Err(Error::param("p, n and n_splits must all be >= 1"));
        }
        if self.trials == 0 {
            return Err(Error::param("trials must be >= 1"));
        }
        if self.covariance.dim() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                found: self.covariance.dim(),
            });
        }
        self.covariance.validate()?;
        if self.estimators.is_empty() {
            return Err(Error::param("at least one estimator is required"));
        }
        for kind in &self.estimators {
            kind.validate()?;
            if kind.is_rao_blackwell() {
                if self.field != Field::Real {
                    return Err(Error::RealFieldOnly { field: "Rao-Blackwell" });
                }
                if self.n_splits != 2 {
                    return Err(Error::param(format!("{kind} needs n_splits = 2")));
                }
            }
        }
        if self.estimators.iter().any(|k| k.needs_invertible_blocks()) && self.n < self.p {
            return Err(Error::NonInvertibleSplit {
                block_size: self.n,
                p: self.p,
            });
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }
}

fn config_err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

/// Splits on commas that are not inside parentheses.
pub fn split_estimator_list(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(s[start..].trim());
    out.retain(|x| !x.is_empty());
    out
}

impl FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut entries: HashMap<&str, (usize, &str)> = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| config_err(line, format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(config_err(line, format!("unknown key `{key}`")));
            }
            if value.is_empty() {
                return Err(config_err(line, format!("`{key}` has no value")));
            }
            if let Some((first, _)) = entries.insert(key, (line, value)) {
                return Err(config_err(line, format!("`{key}` already set on line {first}")));
            }
        }

        fn parse<T: FromStr>(entries: &HashMap<&str, (usize, &str)>, key: &str) -> Result<Option<T>>
        where
            T::Err: fmt::Display,
        {
            match entries.get(key) {
                None => Ok(None),
                Some(&(line, v)) => v
                    .parse()
                    .map(Some)
                    .map_err(|e| config_err(line, format!("`{key} = {v}`: {e}"))),
            }
        }
        let line_of = |key: &str| entries.get(key).map(|e| e.0).unwrap_or(0);
        let require = |key: &str| config_err(0, format!("missing required key `{key}`"));

        let p: usize = parse(&entries, "p")?.ok_or_else(|| require("p"))?;
        let n_splits: usize = parse(&entries, "n_splits")?.unwrap_or(2);
        if n_splits == 0 {
            return Err(config_err(line_of("n_splits"), "n_splits must be >= 1"));
        }
        let n = match (parse::<usize>(&entries, "n")?, parse::<usize>(&entries, "total_samples")?) {
            (Some(_), Some(_)) => {
                return Err(config_err(
                    line_of("total_samples"),
                    "set either `n` or `total_samples`, not both",
                ))
            }
            (Some(n), None) => n,
            (None, Some(t)) => {
                if t % n_splits != 0 {
                    return Err(config_err(
                        line_of("total_samples"),
                        format!("total_samples = {t} is not divisible by n_splits = {n_splits}"),
                    ));
                }
                t / n_splits
            }
            (None, None) => return Err(require("n")),
        };
        let theta: Option<f64> = parse(&entries, "theta")?;
        let b: Option<f64> = parse(&entries, "b")?;
        let cov_name = entries.get("covariance").map(|e| e.1).unwrap_or("identity");
        let cov_line = line_of("covariance");
        let unused = |key: &str| -> Result<()> {
            if entries.contains_key(key) {
                return Err(config_err(
                    line_of(key),
                    format!("`{key}` does not apply to covariance `{cov_name}`"),
                ));
            }
            Ok(())
        };
        let covariance = match cov_name {
            "identity" => {
                unused("theta")?;
                unused("b")?;
                CovarianceSpec::Identity { p }
            }
            "spiked" => {
                unused("b")?;
                CovarianceSpec::Spiked {
                    p,
                    theta: theta.ok_or_else(|| config_err(cov_line, "spiked covariance needs `theta`"))?,
                    direction: SpikeDirection::Canonical,
                }
            }
            "haar_diagonal" => {
                unused("theta")?;
                CovarianceSpec::HaarDiagonal {
                    p,
                    b: b.ok_or_else(|| config_err(cov_line, "haar_diagonal covariance needs `b`"))?,
                }
            }
            other => {
                return Err(config_err(
                    cov_line,
                    format!("unknown covariance `{other}` (identity, spiked or haar_diagonal)"),
                ))
            }
        };
        covariance
            .validate()
            .map_err(|e| config_err(line_of(if theta.is_some() { "theta" } else { "b" }), e.to_string()))?;

        let (est_line, est_text) = *entries.get("estimators").ok_or_else(|| require("estimators"))?;
        let estimators = split_estimator_list(est_text)
            .into_iter()
            .map(|s| s.parse::<EstimatorKind>().map_err(|e| config_err(est_line, e.to_string())))
            .collect::<Result<Vec<_>>>()?;

        let config = ExperimentConfig {
            experiment_id: entries
                .get("experiment_id")
                .map(|e| e.1.to_string())
                .unwrap_or_else(|| "experiment".to_string()),
            p,
            n,
            n_splits,
            field: parse(&entries, "field")?.unwrap_or(Field::Real),
            covariance,
            estimators,
            trials: parse(&entries, "trials")?.unwrap_or(20),
            base_seed: parse(&entries, "base_seed")?.unwrap_or(0),
            output_path: entries.get("output_path").map(|e| PathBuf::from(e.1)),
        };
        config.validate().map_err(|e| match e {
            e @ Error::NonInvertibleSplit { .. } => e,
            e => config_err(0, e.to_string()),
        })?;
        Ok(config)
    }
}

impl fmt::Display for ExperimentConfig {
    /// Writes the file format; parsing the output gives back `self`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "experiment_id = {}", self.experiment_id)?;
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "n = {}", self.n)?;
        writeln!(f, "n_splits = {}", self.n_splits)?;
        writeln!(f, "field = {}", self.field)?;
        writeln!(f, "covariance = {}", self.covariance.model_name())?;
        match &self.covariance {
            CovarianceSpec::Spiked { theta, .. } => writeln!(f, "theta = {theta}")?,
            CovarianceSpec::HaarDiagonal { b, .. } => writeln!(f, "b = {b}")?,
            CovarianceSpec::Identity { .. } => {}
        }
        let names: Vec<String> = self.estimators.iter().map(|e| e.to_string()).collect();
        writeln!(f, "estimators = {}", names.join(", "))?;
        writeln!(f, "trials = {}", self.trials)?;
        writeln!(f, "base_seed = {}", self.base_seed)?;
        if let Some(path) = &self.output_path {
            writeln!(f, "output_path = {}", path.display())?;
        }
        Ok(())
    }
}
