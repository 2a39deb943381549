use thiserror::Error;

/// Errors raised by constructions and predicates on finite U-equivalence spaces.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("carrier must contain at least one element")]
    EmptyCarrier,
    #[error("element {index} is out of range for a carrier of size {size}")]
    Index { index: usize, size: usize },
    #[error("blocks overlap at element {element}")]
    Overlap { element: usize },
    #[error("blocks do not cover element {element}")]
    Coverage { element: usize },
    #[error("carrier mismatch: {left} vs {right}")]
    CarrierMismatch { left: usize, right: usize },
    #[error("generator list is empty")]
    EmptyGeneratorSet,
    #[error("family of maps or factors is empty")]
    EmptyFamily,
    #[error("subset is empty")]
    EmptySubset,
    #[error("product carrier of size {size} exceeds the cap of {cap}")]
    TooManyFactors { size: usize, cap: usize },
    #[error("map is not total: expected {expected} values, got {actual}")]
    NotTotal { expected: usize, actual: usize },
    #[error("g composed with f is not the identity (fails at element {element})")]
    NotLeftInverse { element: usize },
    #[error("characterizations disagree: {0}")]
    CharacterizationMismatch(String),
    #[error("not a pseudo-metric: {0}")]
    NotAPseudoMetric(String),
    #[error("pseudo-metric is not transitive")]
    NotTransitive,
    #[error("alpha must be positive")]
    NonPositiveAlpha,
    #[error("radius must be positive")]
    NonPositiveRadius,
    #[error("not a topology: {0}")]
    NotATopology(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
