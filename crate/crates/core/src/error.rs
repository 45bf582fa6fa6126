use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscillatorError {
    #[error("eigenfunction argument must be finite, got {x}")]
    NonFiniteInput { x: f64 },
    #[error("phi_{n}({x}) out of range (log magnitude {log_magnitude:.1})")]
    Range { n: u32, x: f64, log_magnitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty number")]
    Empty,
    #[error("invalid number {0:?}")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
    #[error("{0}")]
    Other(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{levels} levels but {powers} powers; energy matrix must be square")]
    DimensionMismatch { levels: usize, powers: usize },
    #[error("{what} must be strictly increasing")]
    NotIncreasing { what: &'static str },
    #[error("spectrum target is empty")]
    EmptyTarget,
    #[error("right-hand side has length {rhs}, matrix has size {size}")]
    RhsLength { size: usize, rhs: usize },
    #[error("polynomial powers must be >= 1 (no constant term)")]
    ConstantTerm,
    #[error("full dial needs levels 0..{expected}, got a different level set")]
    LevelsNotContiguous { expected: usize },
    #[error("invalid drop powers {drop:?}: {reason}")]
    InvalidDropPowers { drop: Vec<u32>, reason: String },
    #[error("singular matrix: no pivot in column {column}")]
    Singular { column: usize },
    #[error(
        "stripped energy matrix is singular (levels {levels:?}, dropped powers {dropped:?}, no pivot in column {column})"
    )]
    SingularStripped {
        levels: Vec<u32>,
        dropped: Vec<u32>,
        column: usize,
    },
    #[error("internal consistency failure: exact back-substitution left residual in row {row}")]
    Consistency { row: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidSpec(String),
    #[error("requested {count} eigenpairs from a {size}x{size} matrix")]
    TooManyEigenpairs { count: usize, size: usize },
    #[error("eigensolver did not converge for {size}x{size} matrix within {cap} iterations")]
    NonConvergence { size: usize, cap: usize },
    #[error("eigenpair {index} residual {residual:e} exceeds bound {bound:e}")]
    Residual { index: usize, residual: f64, bound: f64 },
}
