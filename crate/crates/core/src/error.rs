//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong when building models or running queries.
#[derive(Debug, Error)]
pub enum Error {
    #[error("index set {indices:?} is invalid for a space with {arity} variables: {reason}")]
    InvalidIndexSet {
        indices: Vec<usize>,
        arity: usize,
        reason: String,
    },

    #[error("gambles/previsions live on different spaces")]
    SpaceMismatch,

    #[error("event is empty")]
    EmptyEvent,

    #[error("conditioning event has mass {mass} <= {eps}")]
    ZeroMassEvent { mass: f64, eps: f64 },

    #[error("conditioning event has zero upper probability (max vertex mass {max_mass} <= {eps})")]
    ZeroUpperProbability { max_mass: f64, eps: f64 },

    #[error("invalid mass vector: {0}")]
    InvalidMass(String),

    #[error("invalid chain of conditional previsions: {0}")]
    InvalidChain(String),

    #[error("enumeration would produce {needed} items, cap is {cap}")]
    EnumerationCapExceeded { needed: u128, cap: u128 },

    #[error("unknown observation label `{0}`")]
    UnknownObservation(String),

    #[error("LP has {vars} variables and {constraints} constraints, cap is {cap}")]
    ProblemTooLarge {
        vars: usize,
        constraints: usize,
        cap: usize,
    },

    #[error("observation has zero upper probability under the joint; cannot condition")]
    ObservationImpossible,

    #[error("CUR precondition violated: completion {completion:?} has zero upper probability")]
    CurPreconditionViolated { completion: Vec<String> },

    #[error("invalid collection: {0}")]
    InvalidCollection(String),

    #[error("collection is not A1-representable; no compatible order exists")]
    NoCompatibleOrder,

    #[error("invalid evidence: {0}")]
    InvalidEvidence(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("EM did not converge within {max_iters} iterations (last delta {last_delta})")]
    EmDidNotConverge { max_iters: u32, last_delta: f64 },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("class variable has {0} states; only binary classes are supported")]
    UnsupportedClassArity(usize),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
