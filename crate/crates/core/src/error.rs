use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix has non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("invalid register layout: {0}")]
    InvalidLayout(String),

    #[error("register sets overlap on `{0}`")]
    OverlappingParts(String),

    #[error("argument {value} outside [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("state dimension {dim} exceeds the cap of {cap}")]
    StateBlowup { dim: usize, cap: usize },

    #[error("protocol is invalid: {0}")]
    InvalidProtocol(String),

    #[error("operation requires binary inputs")]
    RequiresBinaryInputs,

    #[error("operation requires a memoryless protocol")]
    RequiresMemoryless,

    #[error("operation requires an odd number of rounds (Alice sends last)")]
    RequiresAliceLast,

    #[error("protocol coins are not one-shot: {0}")]
    NotOneShot(String),

    #[error("unsupported output register: {0}")]
    UnsupportedOutput(String),

    #[error("key of length {got} does not fit a block of {qubits} qubits")]
    KeyLengthMismatch { got: usize, qubits: usize },

    #[error("invalid input distribution: {0}")]
    InvalidDistribution(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
