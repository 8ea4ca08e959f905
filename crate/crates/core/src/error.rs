use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("letter {letter} outside alphabet [1, {k}]")]
    LetterOutOfRange { letter: u32, k: u32 },
    #[error("alphabet size must be at least 2, got {0}")]
    AlphabetTooSmall(u32),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("arity mismatch: expected {expected} letters, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid variable word: {0}")]
    InvalidVariableWord(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0} is not an element of the structure")]
    NotAMember(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing oracle value {0}")]
    MissingOracle(String),
    #[error("no regular level set found: {0}")]
    BestEffortFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
