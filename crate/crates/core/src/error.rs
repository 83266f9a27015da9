use thiserror::Error;

/// Errors surfaced by the library.
///
/// The CLI maps these onto exit codes: `Parse`/`Precondition`/`Degenerate`
/// are usage errors, `Invariant` is an internal consistency failure and
/// `Resource` means a configured cap was exceeded.
#[derive(Debug, Error)]
pub enum Error {
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
