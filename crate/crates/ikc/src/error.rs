use thiserror::Error;

/// Every failure the kernel can report.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("degree error: {0}")]
    Degree(String),
    #[error("joinability error: {0}")]
    Joinability(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("rule error at {node}: {reason}")]
    Rule { node: String, reason: String },
    #[error("shape refutation: {0}")]
    ShapeRefutation(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not a reduct: {0}")]
    NotAReduct(String),
    #[error("not an expansion: {0}")]
    NotAnExpansion(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
}

impl Error {
    pub(crate) fn rule(node: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Rule { node: node.into(), reason: reason.into() }
    }

    /// Short stable name of the variant, used in diagnostics and exit reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "SyntaxError",
            Error::Degree(_) => "DegreeError",
            Error::Joinability(_) => "JoinabilityError",
            Error::Shape(_) => "ShapeError",
            Error::Domain(_) => "DomainError",
            Error::Rule { .. } => "RuleError",
            Error::ShapeRefutation(_) => "ShapeRefutation",
            Error::Precondition(_) => "PreconditionError",
            Error::NotAReduct(_) => "NotAReductError",
            Error::NotAnExpansion(_) => "NotAnExpansionError",
            Error::TypeMismatch(_) => "TypeMismatchError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
