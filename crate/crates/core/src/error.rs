use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("parse error at line {line}: {message}")]
    ParseAt { line: usize, message: String },

    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("cone check failed: {0}")]
    Cone(String),

    #[error("fan validation failed: {0}")]
    Fan(String),

    #[error("no big-volume oracle for {variety}: class {class} is pseudo-effective but not nef")]
    NefOnly { variety: String, class: String },

    #[error("{0}")]
    Unsupported(String),

    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
