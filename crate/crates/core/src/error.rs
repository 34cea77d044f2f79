use thiserror::Error;

use crate::curves::Violation;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty sum")]
    EmptySum,
    #[error("log_sum requires positive values (entry {0} is not)")]
    NonPositiveSummand(usize),

    #[error("twist power must be positive")]
    NonPositiveTwist,
    #[error("invalid weight vector: {0}")]
    InvalidWeights(&'static str),

    #[error("sequence rejected: {}", format_violations(.0))]
    InvalidSequence(Vec<Violation>),
    #[error("r_{0} is not available (sequence has length {1})")]
    IndexOutOfRange(usize, usize),
    #[error("γ₀, γ₁ are not carried")]
    NotCarried,
    #[error("small case unvalidated: i(γ_{0}, γ_{1})")]
    SmallCaseUnvalidated(usize, usize),
    #[error("curves must be distinct (got γ_{0} twice)")]
    SameCurve(usize),
    #[error("marking sum needs k ≥ j+7 (got j={0}, k={1})")]
    MarkingOutOfRange(usize, usize),
    #[error("indices must have equal parity (got j={0}, k={1})")]
    ParityMismatch(usize, usize),

    #[error("not converged at length {len}: last sup-norm change {change:e}")]
    NotConverged { len: usize, change: f64 },
    #[error("intersection with γ_{curve} did not stabilize: relative change {change:e}")]
    NotStabilized { curve: usize, change: f64 },
    #[error("blend weights must be nonnegative and not both zero")]
    InvalidBlend,

    #[error("curve not crossed by measure")]
    NotCrossed,
    #[error("timeline exhausted at t = {0}")]
    TimelineExhausted(f64),
    #[error("timeline has no row for index {0}")]
    MissingRow(usize),
    #[error("growth condition {0} does not hold on the prefix")]
    GrowthConditionFailed(&'static str),
    #[error("test curve γ_{0} is not crossed by the target measure")]
    NonCrossingTestCurve(usize),

    #[error("config: {0}")]
    Config(String),
    #[error("io: {0}")]
    Io(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
