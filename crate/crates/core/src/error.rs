use thiserror::Error;

use crate::rational::{ParseRationalError, Rational};
use crate::space::TriangleViolation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a space needs at least one point")]
    EmptySpace,
    #[error("duplicate point label `{0}`")]
    DuplicateLabel(String),
    #[error("distance matrix has {found} rows, expected {expected}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("row {row} of the distance matrix has {found} entries, expected {expected}")]
    RowLengthMismatch { row: usize, expected: usize, found: usize },
    #[error("negative distance {value} between `{a}` and `{b}`")]
    NegativeEntry { a: String, b: String, value: Rational },
    #[error("nonzero diagonal entry {value} at `{point}`")]
    NonzeroDiagonal { point: String, value: Rational },
    #[error("asymmetric entries: d({a},{b}) = {ab} but d({b},{a}) = {ba}")]
    Asymmetric { a: String, b: String, ab: Rational, ba: Rational },
    #[error("distinct points `{a}` and `{b}` are at distance 0")]
    ZeroDistance { a: String, b: String },

    #[error("unknown point label `{0}`")]
    UnknownLabel(String),
    #[error("subset must be non-empty")]
    EmptySubset,
    #[error("space is not ultrametric: {0}")]
    NotUltrametric(TriangleViolation),
    #[error("pair ({x}, {y}) is at distance {distance}, above the minimum {minimum}")]
    NotMinimalPair { x: String, y: String, distance: Rational, minimum: Rational },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("epsilon {eps} must lie strictly between 0 and {bound}")]
    EpsilonOutOfRange { eps: Rational, bound: Rational },
    #[error("epsilon {0} must be positive")]
    NonPositiveEpsilon(Rational),
    #[error("search over {n} points exceeds the cap of {cap}")]
    SizeCapExceeded { n: usize, cap: usize },
    #[error("spaces have different sizes ({left} vs {right})")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("negative label {value} at `{vertex}`")]
    NegativeLabel { vertex: String, value: Rational },
    #[error("degenerate labeling: both endpoints of edge ({u}, {v}) carry label 0")]
    DegenerateLabeling { u: String, v: String },
    #[error("`{center}` is not a center: d({center},{x}) > d({y},{x})")]
    NotACenter { center: String, x: String, y: String },

    #[error("diametrical graph needs at least two points")]
    SingletonSpace,
    #[error("expected exactly {expected} points, found {found}")]
    WrongCardinality { expected: usize, found: usize },
    #[error("diametrical graph is not complete multipartite, so the space is not ultrametric")]
    NotCompleteMultipartite,
    #[error("diametrical signature is {0:?}, not (2, 2)")]
    NotForbiddenQuad(Vec<usize>),

    #[error("shift {delta} must satisfy 0 <= delta < {bound}")]
    DeltaOutOfRange { delta: Rational, bound: Rational },
    #[error("shift {0} must be non-negative")]
    NegativeDelta(Rational),
    #[error("center criterion and forbidden-quad scan disagree: {0}")]
    CriteriaDisagree(String),
    #[error("duplicate value {0}")]
    DuplicateValue(Rational),
    #[error("value {0} is not positive")]
    NonPositiveValue(Rational),
    #[error("value list is empty")]
    EmptyValues,

    #[error("exhaustive enumeration cap exceeded: {0}")]
    GeneratorCap(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("alphabet too small: {0}")]
    AlphabetTooSmall(String),
    #[error("unknown conjecture id `{0}`")]
    UnknownConjecture(String),
    #[error("needs at least {needed} points, found {found}")]
    TooFewPoints { needed: usize, found: usize },
    #[error("counterexample failed to re-verify: {0}")]
    CounterexampleNotReproduced(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid rational: {0}")]
    Rational(#[from] ParseRationalError),
    #[error("I/O error: {0}")]
    Io(String),
}
