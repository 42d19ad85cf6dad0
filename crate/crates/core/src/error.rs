use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("spectral support [{lo:.3}, {hi:.3}] is outside the retained band ({band_lo:.3}, {band_hi:.3})")]
    OutOfBand {
        lo: f64,
        hi: f64,
        band_lo: f64,
        band_hi: f64,
    },

    #[error("step-size failure on [{t_start}, {t_end}]: {detail}")]
    StepSizeFailure {
        t_start: f64,
        t_end: f64,
        detail: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("index {index} out of range for {len} atoms")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("correlation field is numerically zero; no reference mode above floor")]
    DegenerateField,

    #[error("spectrum has no positive samples")]
    DegenerateSpectrum,

    #[error("invalid comparison: {0}")]
    InvalidComparison(String),

    #[error("validation error at `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Validation {
        field: field.into(),
        message: message.into(),
    }
}
