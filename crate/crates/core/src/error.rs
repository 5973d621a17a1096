use thiserror::Error;

/// Errors raised by the link-level state-vector engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateError {
    #[error("malformed pulse: {0}")]
    MalformedPulse(String),
    #[error("pulse set couples basis labels in a non-star pattern ({0} labels in one component)")]
    UnsupportedCoupling(usize),
    #[error("operation on a state that has been reset and not re-prepared")]
    ResetState,
    #[error("probability {name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },
    #[error("level {0} cannot be ionized")]
    NotIonizable(String),
    #[error("photon transfer precondition violated: {0}")]
    PhotonPrecondition(String),
    #[error("cannot parse basis label {0:?}")]
    LabelParse(String),
}

/// Errors raised by closed-form evaluation and parameter validation.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("parameter {name} = {value}: {reason}")]
    Invalid {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },
    #[error("factor {name} = {value} is outside [0, 1]")]
    FactorOutOfRange { name: &'static str, value: f64 },
}

impl ParamError {
    pub(crate) fn invalid(name: &'static str, value: f64, reason: &'static str) -> Self {
        ParamError::Invalid {
            name,
            value,
            reason,
        }
    }
}

/// Errors raised by the chain-level simulator and the swap oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChainError {
    #[error("swap oracle supports 3..=6 nodes, got {0}")]
    OracleSize(usize),
    #[error("expected {expected} measurement outcomes for the intermediate nodes, got {got}")]
    OutcomeCount { expected: usize, got: usize },
    #[error("measurement outcomes {outcomes:?} have zero Born probability")]
    ImpossibleOutcome { outcomes: Vec<(u8, u8)> },
    #[error("correction for outcomes {outcomes:?} leaves fidelity {fidelity:.3e} with Phi+")]
    CorrectionFailed {
        outcomes: Vec<(u8, u8)>,
        fidelity: f64,
    },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error(transparent)]
    State(#[from] StateError),
}
