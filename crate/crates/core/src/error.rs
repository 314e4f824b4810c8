use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Shapes do not fit the operation (non-square, mismatched sizes, too large).
    #[error("dimension error: {0}")]
    Dimension(String),

    /// An input violated a numerical precondition (Hermiticity, orthonormality, ...).
    #[error("contract violated: {0}")]
    Contract(String),

    /// A parameter is outside the domain of a state family or curve.
    #[error("domain error: {0}")]
    Domain(String),

    /// The operation is only defined for equal local dimensions.
    #[error("unsupported dimensions: {0}")]
    UnsupportedDimension(String),

    /// Subsystem indices are empty, repeated or out of range.
    #[error("invalid subsystem indices: {0}")]
    InvalidIndices(String),

    /// ψ + εψ_R has vanishing norm.
    #[error("degenerate cancellation: |psi + eps*psi_r| = {0:e}")]
    DegenerateCancellation(f64),

    /// τ = (R⁴ − C⁴)/C² requested with C ≈ 0.
    #[error("undefined ratio: concurrence {0:e} is too small to recover the 3-tangle")]
    UndefinedRatio(f64),

    /// A measure came out outside [0, 1] by more than the tolerance.
    #[error("measure {name} = {value} lies outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    /// A record lacks a field required by a verification region.
    #[error("record {index} has no `{field}` value required by region {region}")]
    MissingField {
        index: usize,
        field: &'static str,
        region: &'static str,
    },

    #[error("unknown {kind} `{tag}`")]
    UnknownTag { kind: &'static str, tag: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
