use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("not locally expanding: no generator expands at x = {point} (best derivative {best_derivative})")]
    NotLocallyExpanding { point: f64, best_derivative: f64 },

    #[error("cover leaves a gap at x = {0}")]
    CoverGap(f64),

    #[error("word is not admissible: {0}")]
    NotAdmissible(String),

    #[error("no mixing witness from base ball {from} to base ball {to} within word length {max_len}")]
    MixingWitnessMissing { from: usize, to: usize, max_len: usize },

    #[error("point {point} lies on a partition boundary at step {step}")]
    BoundaryOrbit { point: f64, step: usize },

    #[error("point {point} at step {step} lies outside every retained partition element")]
    OutsideDomain { point: f64, step: usize },

    #[error("transition {from} -> {to} is not allowed")]
    ForbiddenTransition { from: usize, to: usize },

    #[error("power iteration did not converge: {0}")]
    Convergence(String),

    #[error("matrix is reducible: state {0} does not communicate with state {1}")]
    Reducible(usize, usize),

    #[error("measure is not shift-invariant: mass balance off by {0:e} at state {1}")]
    NotInvariant(f64, usize),

    #[error("no periodic words through base state {0}")]
    NoCycles(usize),

    #[error("inducing scheme condition {condition} fails: {detail}")]
    InducingScheme { condition: &'static str, detail: String },

    #[error("missing artifact: {0}")]
    MissingArtifact(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that are mathematical statements about the input
    /// system (as opposed to malformed input or I/O trouble).
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Io(_) | Error::MissingArtifact(_)
        )
    }
}
