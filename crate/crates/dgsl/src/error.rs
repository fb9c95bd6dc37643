use thiserror::Error;

/// Errors produced by graph construction, the solvers, and the text parsers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("shape mismatch in {context}: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("requested {k} eigenpairs from a {dim}x{dim} matrix")]
    KOutOfRange { k: usize, dim: usize },

    #[error("matrix is not positive definite: Cholesky factorization failed")]
    NotPositiveDefinite,

    #[error("invalid parameter {name}: {why}")]
    InvalidParam { name: &'static str, why: String },

    #[error("{what} needs at least {needed} points, got {n}")]
    TooFewPoints {
        what: &'static str,
        needed: usize,
        n: usize,
    },

    #[error("index {index} out of range for {n} points in {context}")]
    IndexOutOfRange {
        context: &'static str,
        index: usize,
        n: usize,
    },

    #[error("pair ({i},{j}) appears as both must-link and cannot-link")]
    ContradictoryPair { i: usize, j: usize },

    #[error("cannot-link set empty: trace-ratio denominator undefined")]
    EmptyCannotLink,

    #[error("zero-degree vertex {index}: {context}")]
    ZeroDegree { context: &'static str, index: usize },

    #[error("degenerate denominator in {0}: cannot-link term vanished")]
    DegenerateDenominator(&'static str),

    #[error("objective became non-finite at outer iteration {iteration}")]
    NonFiniteObjective { iteration: usize },

    #[error("labelings differ in length: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("class {class} has {size} members, fewer than the {needed} requested")]
    ClassTooSmall {
        class: usize,
        size: usize,
        needed: usize,
    },

    #[error("requested {requested} {kind} pairs but only {available} exist")]
    NotEnoughPairs {
        kind: &'static str,
        requested: usize,
        available: usize,
    },

    #[error("need at least {needed} classes, found {found}")]
    TooFewClasses { found: usize, needed: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
