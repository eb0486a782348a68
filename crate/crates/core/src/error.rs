use thiserror::Error;

/// Errors raised by the numerical modules.
///
/// Every variant has a stable name (see [`Error::name`]) that the command-line
/// front end reports verbatim.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NonHermitianInput { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm² = {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("central moment of order {0} is not supported (max 3)")]
    UnsupportedOrder(usize),

    #[error("clean QFI {0:.3e} is zero; the disorder marker is undefined")]
    ZeroCleanQfi(f64),

    #[error("skewness supplied but the report has no third-order data")]
    MissingThirdOrder,

    #[error("parameter grid is empty")]
    EmptyGrid,

    #[error("only {found} grid points inside the fit window (need at least 3)")]
    InsufficientWindow { found: usize },

    #[error("marker does not change sign on the supplied grid")]
    NoSignChange,

    #[error("field strength {0:.3e} is too close to zero")]
    SingularField(f64),

    #[error("sin(h·t) = {0:.3e} vanishes; optimal phase undefined")]
    SingularPoint(f64),

    #[error("σ_x == σ_y: the marker does not depend on β")]
    DegenerateSigmas,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid chain size {0} (GHZ expectations need N ≥ 5)")]
    InvalidSize(usize),

    #[error("chain of {0} sites is too large for dense Jordan-Wigner (max 12)")]
    TooLarge(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

impl Error {
    /// Variant name, used in user-facing diagnostics.
    pub fn name(&self) -> &'static str {
        match self {
            Error::NonHermitianInput { .. } => "NonHermitianInput",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::UnsupportedOrder(_) => "UnsupportedOrder",
            Error::ZeroCleanQfi(_) => "ZeroCleanQfi",
            Error::MissingThirdOrder => "MissingThirdOrder",
            Error::EmptyGrid => "EmptyGrid",
            Error::InsufficientWindow { .. } => "InsufficientWindow",
            Error::NoSignChange => "NoSignChange",
            Error::SingularField(_) => "SingularField",
            Error::SingularPoint(_) => "SingularPoint",
            Error::DegenerateSigmas => "DegenerateSigmas",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::InvalidSize(_) => "InvalidSize",
            Error::TooLarge(_) => "TooLarge",
            Error::InvalidParameter(_) => "InvalidParameter",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
