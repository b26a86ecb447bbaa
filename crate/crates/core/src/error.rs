use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown root system type `{0}`")]
    UnknownType(String),
    #[error("mismatched root data: {0} vs {1}")]
    RootDatumMismatch(String, String),
    #[error("wall index {index} out of range (have {count} walls)")]
    BadWall { index: usize, count: usize },
    #[error("length budget exceeded: needed {needed}, budget {budget}")]
    Budget { needed: i64, budget: i64 },
    #[error("window has {size} vertices, cap is {cap}")]
    WindowTooLarge { size: usize, cap: usize },
    #[error("vertex not in graph: {0}")]
    MissingVertex(String),
    #[error("window is not closed under the wall s{0}")]
    NotWallStable(usize),
    #[error("degree cutoff {cutoff} too small: new generators in degree {degree}")]
    Cutoff { cutoff: i32, degree: i32 },
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("element is not a minimal coset representative: {0}")]
    NotMinimal(String),
    #[error("module is not free: {0}")]
    NotFree(String),
    #[error("sheaf hypothesis failed: {0}")]
    Hypothesis(String),
    #[error("negative residual while decomposing at vertex {0}")]
    Decomposition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnknownType(_) => "unknown_type",
            Error::RootDatumMismatch(..) => "root_datum_mismatch",
            Error::BadWall { .. } => "bad_wall",
            Error::Budget { .. } => "budget",
            Error::WindowTooLarge { .. } => "window_too_large",
            Error::MissingVertex(_) => "missing_vertex",
            Error::NotWallStable(_) => "not_wall_stable",
            Error::Cutoff { .. } => "cutoff",
            Error::Overflow => "overflow",
            Error::NotMinimal(_) => "not_minimal",
            Error::NotFree(_) => "not_free",
            Error::Hypothesis(_) => "hypothesis",
            Error::Decomposition(_) => "decomposition",
            Error::Unsupported(_) => "unsupported",
            Error::Invalid(_) => "invalid",
        }
    }

    /// Resource limits rather than bad input or a failed hypothesis.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Budget { .. } | Error::WindowTooLarge { .. } | Error::Cutoff { .. } | Error::Overflow)
    }
}
