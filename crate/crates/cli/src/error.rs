use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },

    #[error("invalid configuration: {0}")]
    Parse(String),

    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),

    #[error("`{key}` must be a {expected}")]
    TypeMismatch { key: String, expected: &'static str },

    #[error("`{key}` = {value} is out of range: {constraint}")]
    OutOfRange {
        key: String,
        value: f64,
        constraint: String,
    },

    #[error("override `{0}` is not of the form section.key=value")]
    BadOverride(String),

    #[error(transparent)]
    Engine(twoway_cvqkd::Error),
}

impl From<twoway_cvqkd::Error> for CliError {
    fn from(e: twoway_cvqkd::Error) -> Self {
        match e {
            twoway_cvqkd::Error::InvalidParameter { name, value, constraint } => CliError::OutOfRange {
                key: name.to_string(),
                value,
                constraint: constraint.to_string(),
            },
            other => CliError::Engine(other),
        }
    }
}
