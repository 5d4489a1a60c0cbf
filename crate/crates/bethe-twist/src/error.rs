use thiserror::Error;

/// Crate-wide error type.
///
/// Every fallible operation distinguishes *pole* conditions (a structure
/// function evaluated at coincident arguments), *mode* violations (exact and
/// floating scalars meeting in one expression), and plain invalid input. In
/// float mode a pole means two points closer than [`crate::scalar::COLLISION_DELTA`];
/// in exact mode it means true equality.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),

    #[error("scalar mode mismatch: {0}")]
    ModeMismatch(String),

    #[error("coincident parameters: {0}")]
    CoincidentParameters(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid twist: {0}")]
    InvalidTwist(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Roots handed to the on-shell collapse check do not satisfy the Bethe
    /// equations; carries the offending residual and the sub-leading
    /// coefficients that survive because of it.
    #[error("roots are off shell (max Bethe residual {max_residual:.3e}); surviving sub-leading coefficients: {surviving:?}")]
    OffShellRoots {
        max_residual: f64,
        surviving: Vec<(String, f64)>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("eigenvalue backend error: {0}")]
    Backend(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
