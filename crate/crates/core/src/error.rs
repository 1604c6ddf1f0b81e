use thiserror::Error;

/// Errors raised by the library. The CLI maps each variant onto an exit code
/// via [`Error::exit_code`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("gamma must be positive and finite, got {0}")]
    InvalidGamma(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} is outside the supported range {range}")]
    OutOfRange {
        what: &'static str,
        value: f64,
        range: String,
    },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("numeric diagnostic: {0}")]
    Numeric(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// 2 for configuration/argument problems, 3 for numeric diagnostics.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numeric(_) => 3,
            Error::Io(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn out_of_range(what: &'static str, value: impl Into<f64>, range: impl Into<String>) -> Self {
        Error::OutOfRange {
            what,
            value: value.into(),
            range: range.into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Error::Numeric("underflow".into()).exit_code(), 3);
        assert_eq!(Error::Config("x".into()).exit_code(), 2);
        assert_eq!(Error::InvalidGamma(-1.0).exit_code(), 2);
        assert_eq!(Error::out_of_range("n", 9.0, "1..=5").exit_code(), 2);
        assert_eq!(Error::Io(std::io::Error::other("disk")).exit_code(), 1);
    }
}
