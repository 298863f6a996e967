use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("system dimension must be at least 2, found {0}")]
    DimensionTooSmall(usize),

    #[error("state is not normalized: squared norm {norm_sq}")]
    NotNormalized { norm_sq: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("post-selection probability is zero (|overlap| = {overlap:e})")]
    ZeroPostSelection { overlap: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("domain too small: edge amplitude ratio {ratio:e} exceeds {limit:e}")]
    DomainTooSmall { ratio: f64, limit: f64 },

    #[error("invalid pointer parameter: {0}")]
    InvalidParameter(String),

    #[error("no closed form available for the {0} pointer")]
    UnsupportedFamily(&'static str),

    #[error("pointer states are of incompatible kinds")]
    PointerMismatch,

    #[error("no readout observables attached to this pointer space")]
    MissingReadout,

    #[error("measurement parameter unknown for this state")]
    UnknownStrength,

    #[error("effective measurement strength is zero at eta = {0}")]
    ZeroEffectiveStrength(f64),

    #[error("flipped post-selection is defined for two-level systems only, found dimension {0}")]
    FlipUnsupported(usize),

    #[error("hermiticity violated: imaginary residue {residue:e} in {quantity}")]
    HermiticityViolation {
        quantity: &'static str,
        residue: f64,
    },
}

impl Error {
    /// Errors that signal a broken numerical contract rather than bad input.
    pub fn is_numerical_contract(&self) -> bool {
        matches!(
            self,
            Error::HermiticityViolation { .. } | Error::DomainTooSmall { .. } | Error::NonFinite(_)
        )
    }
}
