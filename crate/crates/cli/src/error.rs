use qif::QifError;

/// A syntax error in one of the CSV formats.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

/// Failure to turn a file's text into a model value: either the text is
/// malformed or the value it describes is invalid.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Invalid(#[from] QifError),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Input {
        path: String,
        source: Box<FormatError>,
    },
    #[error("invalid request: {0}")]
    Request(String),
    #[error(transparent)]
    Model(#[from] QifError),
}

impl CliError {
    /// 3 for malformed input files, 2 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input { source, .. } if matches!(**source, FormatError::Parse(_)) => 3,
            _ => 2,
        }
    }
}
