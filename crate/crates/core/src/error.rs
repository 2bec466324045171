use std::fmt;
use std::path::PathBuf;

/// Errors produced by the simulation and reconstruction routines.
#[derive(Debug)]
pub enum Error {
    /// An argument violated a documented precondition.
    InvalidInput(String),
    /// Two arrays that must share dimensions do not.
    ShapeMismatch {
        context: &'static str,
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A numeric quantity became NaN or infinite.
    NonFinite(&'static str),
    /// Underlying file system failure.
    Io { path: PathBuf, source: std::io::Error },
    /// A file exists but its contents do not match the expected format.
    Format { path: PathBuf, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::ShapeMismatch {
                context,
                expected,
                found,
            } => write!(
                f,
                "shape mismatch in {context}: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::NonFinite(context) => write!(f, "non-finite value in {context}"),
            Error::Io { path, source } => write!(f, "io error on {}: {source}", path.display()),
            Error::Format { path, detail } => {
                write!(f, "malformed file {}: {detail}", path.display())
            }
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
