use thiserror::Error;

/// Everything that can go wrong in this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {n} is invalid: N must be even and at least 8")]
    InvalidGrid { n: usize },

    #[error("expected {expected} samples, found {found}")]
    ShapeMismatch { expected: usize, found: usize },

    #[error("field is not conjugate-symmetric (defect {defect:e}); it does not represent a real function")]
    CorruptedField { defect: f64 },

    #[error("fields live on incompatible grids (N = {left} vs N = {right})")]
    GridMismatch { left: usize, right: usize },

    #[error("wavenumber {k} is not represented on a grid with N = {n}")]
    WavenumberOutOfRange { k: i64, n: usize },

    #[error("Lambda^{s} with s < 0 is singular on a field with nonzero mean ({mean:e})")]
    SingularMode { s: f64, mean: f64 },

    #[error("multiplier `{name}`: {reason}")]
    InvalidMultiplier { name: String, reason: String },

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid simulation settings: {0}")]
    InvalidSimConfig(String),

    #[error("blow-up at t = {t}: {detail}")]
    BlowUp {
        t: f64,
        mode: Option<i64>,
        detail: String,
    },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("invalid config: {0}")]
    ConfigInvalid(String),

    #[error("snapshot format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("unsupported version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors caused by user-supplied configuration or parameters.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::ConfigParse { .. }
                | Error::ConfigInvalid(_)
                | Error::InvalidParams(_)
                | Error::InvalidSimConfig(_)
                | Error::InvalidGrid { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
