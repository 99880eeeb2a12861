use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid subsystem: {0}")]
    InvalidSubsystem(String),

    #[error("not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("not unitary (max deviation {0:e})")]
    NotUnitary(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("port {0} out of range")]
    PortOutOfRange(usize),

    #[error("port {0} is outside support")]
    OutsideSupport(usize),

    #[error("epsilon must lie in (0, 1], got {0}")]
    InvalidEpsilon(f64),

    #[error("basis is not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("state class has no closed form; use eigenbasis route")]
    UseEigenbasisRoute,

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("invalid phase grid: {0}")]
    InvalidGrid(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
