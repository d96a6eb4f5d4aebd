use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("at least 2 sites are required, got {sites}")]
    TooFewSites { sites: usize },

    #[error("field vector has {found} entries, expected one per site ({expected})")]
    FieldLength { expected: usize, found: usize },

    #[error("{what}: requested {requested} exceeds the limit of {limit}")]
    SizeGuard {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("matrix is not unitary (max |U†U - 1| = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not Hermitian (max |M - M†| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("classification tolerance {tol} must lie in (0, π/4)")]
    InvalidTolerance { tol: f64 },

    #[error("Rényi index must be positive, got {alpha}")]
    InvalidAlpha { alpha: f64 },

    #[error("moment order must be at least 1, got {n}")]
    InvalidMomentOrder { n: usize },

    #[error("invalid partition {a}/{b}/{c} for {sites} sites")]
    InvalidPartition {
        a: usize,
        b: usize,
        c: usize,
        sites: usize,
    },

    #[error("unknown preset `{name}`; valid presets: {}", valid.join(", "))]
    UnknownPreset {
        name: String,
        valid: Vec<&'static str>,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("transfer-matrix moment is not real: {re} + {im}i")]
    NonRealMoment { re: f64, im: f64 },

    #[error("at least 2 samples are required, got {0}")]
    TooFewSamples(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
