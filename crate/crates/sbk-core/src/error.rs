use thiserror::Error;

/// Errors shared across the library.
///
/// Bounded engines never return a wrong answer: when a configured limit is
/// hit they fail with `ResourceCap`/`IterationCap` and the caller decides
/// whether to retry with larger budgets.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resource cap exceeded in {context}: {detail}")]
    ResourceCap { context: &'static str, detail: String },

    #[error("iteration cap exceeded in {context} after {iterations} rounds")]
    IterationCap { context: &'static str, iterations: usize },

    #[error("truncation overflow: shift index {index} exceeds D = {max}")]
    TruncationOverflow { index: usize, max: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector where a nonzero lattice element is required")]
    ZeroVector,

    #[error("degenerate binomial: both monomials cancel to the same support")]
    ZeroBinomial,

    #[error("precondition violated in {op}: {detail}")]
    Precondition { op: &'static str, detail: String },

    #[error("element is not in the lattice at degree bound {bound}")]
    NotInLattice { bound: usize },

    #[error("no applicable basis element for {stuck}")]
    NoApplicableBasis { stuck: String },

    #[error("rule {rule} is disabled by the active configuration")]
    RuleDisabled { rule: &'static str },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
