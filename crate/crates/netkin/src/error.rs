use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{origin}:{line}:{column}: field `{field}`: {message}")]
    Parse { origin: String, line: usize, column: usize, field: String, message: String },
    /// Semantic problem in a scenario field; converted to [`Error::Invalid`] with
    /// the source name before it leaves the loader.
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("writing {}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error(transparent)]
    Core(#[from] netkin_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
