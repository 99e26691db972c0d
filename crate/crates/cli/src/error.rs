use thiserror::Error;

/// A position in a manifest file, 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Location {
    pub path: String,
    pub line: usize,
    pub column: usize,
}

impl Location {
    /// The line and column of a byte offset into `source`.
    pub fn of(path: &str, source: &str, offset: usize) -> Self {
        let before = &source[..offset.min(source.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        Self { path: path.to_string(), line, column }
    }

    /// The file as a whole, for errors without a precise span.
    pub fn file(path: &str) -> Self {
        Self { path: path.to_string(), line: 1, column: 1 }
    }
}

impl std::fmt::Display for Location {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}:{}", self.path, self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{location}: parse error: {message}")]
    Parse { location: Location, message: String },

    #[error("{location}: validation error: {message}")]
    Validation { location: Location, message: String },

    #[error(transparent)]
    Core(#[from] schober_core::Error),

    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// Process exit code: 2 for input problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Validation { .. } | CliError::Io { .. } => 2,
            CliError::Core(schober_core::Error::NotRank2(_)) => 2,
            CliError::Core(_) => 1,
        }
    }
}
