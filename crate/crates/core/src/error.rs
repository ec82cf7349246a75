use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("excitation number {m} out of range for {n_sites} sites")]
    SectorOutOfRange { n_sites: usize, m: usize },

    #[error("configuration has weight {found}, sector expects {expected}")]
    WeightMismatch { expected: usize, found: usize },

    #[error("index {index} out of range for dimension {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("trace is {trace}, expected 1")]
    NotNormalized { trace: f64 },

    #[error("size budget exceeded: {0}")]
    Budget(String),

    #[error("numerical contract violated: {0}")]
    Contract(String),

    #[error("operation requires the XX model (delta = -j_xy, b_perp = 0)")]
    NotXxModel,

    #[error("sector restriction requires b_perp = 0, got {0}")]
    SectorBreaking(f64),

    #[error("bracket [{lo}, {hi}] does not contain a sign change")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("window [{lo}, {hi}] does not contain an interior gap minimum")]
    GapNotBracketed { lo: f64, hi: f64 },
}
