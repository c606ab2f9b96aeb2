use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min:.6e}, largest {max:.6e})")]
    NotPositiveSemidefinite { min: f64, max: f64 },

    #[error("matrix is singular to working precision (smallest eigenvalue {min:.6e}, largest {max:.6e})")]
    Singular { min: f64, max: f64 },

    #[error("singular summand {index} in harmonic mean (smallest eigenvalue {min:.6e}, largest {max:.6e})")]
    SingularSummand { index: usize, min: f64, max: f64 },

    #[error("non-invertible split: {block_size} samples per block is fewer than the dimension {p}")]
    NonInvertibleSplit { block_size: usize, p: usize },

    #[error("degenerate regime: n = {n} is smaller than p = {p}")]
    DegenerateRegime { n: usize, p: usize },

    #[error("support undefined: {0}")]
    SupportUndefined(String),

    #[error("z = {z} is not above the upper support edge {edge}")]
    EdgeOrInterior { z: f64, edge: f64 },

    #[error("support violation: {0}")]
    SupportViolation(String),

    #[error("Loewner order violated: smallest eigenvalue of A - H is {min:.6e}")]
    LoewnerViolation { min: f64 },

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("{field} estimators are restricted to the real field")]
    RealFieldOnly { field: &'static str },

    /// `line` is 1-based; 0 means the problem is not tied to one line.
    #[error("{}", config_message(*line, message))]
    Config { line: usize, message: String },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn config_message(line: usize, message: &str) -> String {
    if line == 0 {
        format!("config: {message}")
    } else {
        format!("config line {line}: {message}")
    }
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    /// True for failures of the numerics (singular matrices, failed
    /// decompositions) as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            Error::Singular { .. }
            | Error::SingularSummand { .. }
            | Error::NonInvertibleSplit { .. }
            | Error::NotPositiveSemidefinite { .. }
            | Error::NotHermitian(_)
            | Error::LoewnerViolation { .. }
            | Error::EigenFailure => true,
            Error::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}
