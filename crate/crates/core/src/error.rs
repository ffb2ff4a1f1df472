use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration key is missing, malformed or violates an invariant.
    #[error("config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("config document could not be parsed: {0}")]
    ConfigParse(String),

    /// Argument outside the mathematical domain of a function.
    #[error("{function}: argument {value} outside domain ({reason})")]
    Domain {
        function: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("series for {what} did not converge within {terms} terms")]
    NonConvergence { what: &'static str, terms: usize },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    /// A power-planning target that cannot be met inside the search range.
    #[error("target {target} is infeasible: {reason}")]
    Infeasible { target: f64, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("refusing to compare results from different configs ({analytic} vs {simulated})")]
    ConfigMismatch { analytic: String, simulated: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
