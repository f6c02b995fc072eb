use thiserror::Error;

/// Errors surfaced by the toolkit. Every variant carries a stable
/// machine-readable code (see [`Error::code`]).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index is infinite")]
    IndexInfinite,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("elements belong to different groups")]
    ParentMismatch,
    #[error("inconsistent presentation: overlap ({0}, {1}, {2}) collects differently")]
    Inconsistent(usize, usize, usize),
    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),
    #[error("relation violated: {0}")]
    RelationViolated(String),
    #[error("subgroup is not normal")]
    NotNormal,
    #[error("cap exceeded: {what} needs {needed}, cap is {cap}")]
    CapExceeded { what: &'static str, needed: String, cap: usize },
    #[error("element is not in the required subgroup: {0}")]
    NotInSubgroup(String),
    #[error("group has torsion")]
    TorsionPresent,
    #[error("nilpotency class {0} exceeds the cap {1}")]
    ClassCap(usize, usize),
    #[error("embedding unavailable: {0}")]
    EmbeddingUnavailable(String),
    #[error("budget exhausted: {0}")]
    BudgetExhausted(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::IndexInfinite => "index-infinite",
            Error::Dimension(_) => "dimension-mismatch",
            Error::ParentMismatch => "parent-mismatch",
            Error::Inconsistent(..) => "inconsistent-presentation",
            Error::InvalidPresentation(_) => "invalid-presentation",
            Error::RelationViolated(_) => "relation-violated",
            Error::NotNormal => "not-normal",
            Error::CapExceeded { .. } => "cap-exceeded",
            Error::NotInSubgroup(_) => "not-in-subgroup",
            Error::TorsionPresent => "torsion-present",
            Error::ClassCap(..) => "class-cap",
            Error::EmbeddingUnavailable(_) => "embedding-unavailable",
            Error::BudgetExhausted(_) => "budget-exhausted",
            Error::Parse { .. } => "parse-error",
            Error::Input(_) => "input-error",
        }
    }

    pub(crate) fn cap(what: &'static str, needed: impl ToString, cap: usize) -> Self {
        Error::CapExceeded { what, needed: needed.to_string(), cap }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
