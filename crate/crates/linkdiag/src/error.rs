use thiserror::Error;

/// Errors surfaced by diagram parsing, validation and the operations built
/// on top of them. `exit_code` groups them the way the CLI reports them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinkError {
    #[error("malformed code: {0}")]
    MalformedCode(String),

    #[error("rotation system is not planar: {0}")]
    NonPlanar(String),

    #[error("empty diagram")]
    EmptyDiagram,

    #[error("diagram is disconnected: {0}")]
    Disconnected(String),

    #[error("operation requires a knot, got {0} components")]
    MultiComponent(usize),

    #[error("operation requires a single-component companion: {0}")]
    NotAKnot(String),

    #[error("no kink tags on input: {0}")]
    UntaggedInput(String),

    #[error("invalid companion disk: {0}")]
    InvalidDisk(String),

    #[error("pattern wrapping number {0} is below 2")]
    WrappingTooSmall(usize),

    #[error("local-triviality screening failed: {0}")]
    ScreeningFailed(String),

    #[error("no crossing between distinct components")]
    NoInterComponentCrossing,

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("series length mismatch: {0}")]
    LengthMismatch(String),

    #[error("x = {0} outside (0, 1]")]
    XOutOfRange(String),

    #[error("census table mismatch: {0}")]
    TableMismatch(String),

    #[error("io: {0}")]
    Io(String),
}

impl LinkError {
    /// CLI exit code: 3 for domain errors, 4 when a budget was exceeded.
    pub fn exit_code(&self) -> i32 {
        match self {
            LinkError::BudgetExceeded(_) => 4,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, LinkError>;
