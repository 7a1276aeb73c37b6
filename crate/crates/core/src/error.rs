use thiserror::Error;

/// Errors raised by the symbolic algebra, the dense back-end and the compiler.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid term: {0}")]
    InvalidTerm(String),

    #[error("term {0} acts on more than two qubits")]
    NotTwoBody(String),

    #[error("qubits {0} and {1} are not coupled by the drift Hamiltonian")]
    NotCoupled(usize, usize),

    #[error("qubits {0} and {1} are not connected in the coupling graph")]
    NotConnected(usize, usize),

    #[error("matrix is not Hermitian (defect {0:e})")]
    NotHermitian(f64),

    #[error("dense verification on {qubits} qubits exceeds the cap of {cap}")]
    TooLarge { qubits: usize, cap: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("invalid step: {0}")]
    InvalidStep(String),

    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
