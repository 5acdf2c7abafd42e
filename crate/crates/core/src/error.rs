//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric or structural precondition was violated by the caller.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An observation trace is too short to estimate transition frequencies.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The contract demands more accuracy than its session budget allows,
    /// or no UE can serve it.
    #[error("infeasible contract: {0}")]
    InfeasibleContract(String),

    /// A session would push a UE past its maximum CPU frequency.
    #[error("frequency cap exceeded for UE {ue} in session {session}: {required_hz:.3e} Hz > {cap_hz:.3e} Hz")]
    FrequencyCap {
        ue: u32,
        session: usize,
        required_hz: f64,
        cap_hz: f64,
    },

    /// A solver or market mode was combined with parameters it does not admit.
    #[error("configuration error: {0}")]
    Configuration(String),

    /// A verification oracle could not produce a trustworthy answer.
    #[error("oracle failure: {0}")]
    OracleFailure(String),

    /// Scenario file could not be parsed.
    #[error("failed to parse scenario {path}: {detail}")]
    ScenarioParse { path: String, detail: String },

    /// Scenario parsed but violates an invariant.
    #[error("invalid scenario {path}: {detail}")]
    ScenarioValidation { path: String, detail: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
