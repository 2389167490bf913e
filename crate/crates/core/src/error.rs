use thiserror::Error;

/// A syntax error in the text format, with 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("duplicate identifier `{0}`")]
    DuplicateIdentifier(String),
    #[error("{what} index {index} out of range (have {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },
    #[error("the two indices must differ (both are {0})")]
    SameIndex(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("move `{0}` is not defined on this kind of presentation")]
    UnsupportedMove(&'static str),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("homology obstruction: {0}")]
    HomologyObstruction(String),
    #[error("invalid group table: {0}")]
    InvalidGroup(String),
    #[error("invalid multicork: {0}")]
    InvalidMulticork(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_index(what: &'static str, index: usize, len: usize) -> Result<()> {
    if index < len {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange { what, index, len })
    }
}
