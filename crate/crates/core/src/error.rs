use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("index error: {0}")]
    Index(String),
    #[error("numeric error: {0}")]
    Numeric(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("stratification error: {0}")]
    Stratification(String),
    #[error("metric error: {0}")]
    Metric(String),
    #[error("ingestion error at {location}: {message}")]
    Ingestion { location: String, message: String },
    #[error("imputation error: {0}")]
    Imputation(String),
    #[error("comparability error: {0}")]
    Comparability(String),
    #[error("grid spec error: {0}")]
    Spec(String),
    #[error("query error: {0}")]
    Query(String),
    #[error("integrity error: {0}")]
    Integrity(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

/// Broad failure classes, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Data,
    Integrity,
}

impl Error {
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    pub fn ingestion(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Ingestion {
            location: location.into(),
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Config(_) | Error::Spec(_) | Error::Query(_) | Error::Contract(_) => {
                ErrorClass::Usage
            }
            Error::Integrity(_) => ErrorClass::Integrity,
            _ => ErrorClass::Data,
        }
    }
}
