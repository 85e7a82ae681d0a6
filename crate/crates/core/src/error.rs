use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x-precision exhausted: no future bit left to shift")]
    EmptyFuture,

    #[error("y-precision exhausted: no past bit left to shift")]
    EmptyPast,

    #[error("coordinate {coordinate} lies outside the stored bits")]
    PrecisionExhausted { coordinate: i64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("age is undefined for the equilibrium (constant) component")]
    AgeUndefinedForEquilibrium,

    #[error("expansion is not contained in the requested subspace: {0}")]
    InvalidSubspace(String),

    #[error("expansion has no terms")]
    EmptyExpansion,

    #[error("decay violation: tail magnitude {magnitude:e} exceeds threshold {threshold:e}")]
    DecayViolation { magnitude: f64, threshold: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("state has zero norm")]
    ZeroState,

    #[error("window overflow at t = {t}: {lost:e} of the mass would wrap around the age window")]
    WindowOverflow { t: f64, lost: f64 },

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }
}
