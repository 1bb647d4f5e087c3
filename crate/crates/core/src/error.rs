use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("operands live in different contexts")]
    ContextMismatch,

    #[error("expected a homogeneous element, found total degrees {0:?}")]
    MixedDegree(Vec<i32>),

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("series did not terminate within {budget} steps: {what}")]
    NonTerminating { what: String, budget: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("linear system has no solution: {0}")]
    Unsolvable(String),

    #[error("assertion failed in {stage} (step {step}): {detail}")]
    StageAssertion { stage: String, step: usize, detail: String },

    #[error("[Q,Q] does not vanish on `{variable}`: residual {residual}")]
    NotHomological { variable: String, residual: String },

    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
}

impl Error {
    pub(crate) fn stage(stage: &str, step: usize, detail: impl Into<String>) -> Self {
        Error::StageAssertion { stage: stage.to_string(), step, detail: detail.into() }
    }

    /// True for failures that express a mathematical fact about the input
    /// (as opposed to malformed input or usage).
    pub fn is_mathematical(&self) -> bool {
        !matches!(
            self,
            Error::Parse { .. } | Error::UnknownVariable(_) | Error::InvalidContext(_)
        )
    }
}
