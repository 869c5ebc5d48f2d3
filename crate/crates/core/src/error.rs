use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// IA has no value before the first full slot has elapsed.
    #[error("instantaneous accuracy is undefined before the first slot")]
    UndefinedAtZero,

    /// Malformed or invalid row in an input file. `line` is 1-based.
    #[error("{message}, line {line}")]
    Parse { line: usize, message: String },

    /// An event stream went backwards in emit time for one video.
    #[error("stream order violation: {message}, line {line}")]
    StreamOrder { line: usize, message: String },

    /// An event claimed time beyond its emission instant, or rewrote a slot that was already reported.
    #[error("causality violation: {message}, line {line}")]
    Causality { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    /// True for errors that come from the event-stream protocol rather than from malformed input.
    pub fn is_stream_protocol(&self) -> bool {
        matches!(self, Error::StreamOrder { .. } | Error::Causality { .. })
    }
}
