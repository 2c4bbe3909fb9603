use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by an element indistinguishable from zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("not a square modulo p: {0}")]
    NotASquare(String),
    #[error("not a unit: {0}")]
    NotAUnit(String),
    #[error("indeterminate at working precision: {0}")]
    IndeterminateAtPrecision(String),
    #[error("pole at T = 0; use the leading-term machinery")]
    PoleAtZero,
    #[error("differentials do not compose to zero at degree {0}")]
    NotAComplex(i64),
    #[error("inconsistent dimensions: {0}")]
    InconsistentDims(String),
    #[error("route mismatch beyond precision: {0}")]
    MismatchBeyondPrecision(String),
    #[error("complex is not acyclic over the fraction field: {0}")]
    NotTorsion(String),
    #[error("complex is not semisimple: {0}")]
    NotSemisimple(String),
    #[error("complex is not semisimple over the DVR: {0}")]
    NotSemisimpleOverR(String),
    #[error("character order not supported for p = {p}: {detail}")]
    UnsupportedCharacterOrder { p: u64, detail: String },
    #[error("twisted complex is not semisimple at the character: {0}")]
    NotSemisimpleAtRho(String),
    #[error("missing character component: {0}")]
    MissingComponent(String),
    #[error("evaluation window too small: {0}")]
    PoleWindowTooSmall(String),
    #[error("pole at s = 1 for the trivial character")]
    PoleAtOne,
    #[error("limit did not stabilise: {0}")]
    NonConvergence(String),
    #[error("unsupported prime {p}: {detail}")]
    UnsupportedPrime { p: u64, detail: String },
    #[error("sides disagree: {0}")]
    Disagreement(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
