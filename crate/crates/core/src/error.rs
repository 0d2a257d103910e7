//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by lattice operations, encoders, and simulators.
#[derive(Debug, Error)]
pub enum Error {
    /// Input rows are rank-deficient or structurally invalid.
    #[error("not a basis: {0}")]
    NotABasis(String),
    /// A numeric argument fell outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// Enumeration (SVP/HKZ) refused above the dimension cap.
    #[error("enumeration cap exceeded: dimension {dim} > cap {cap}")]
    EnumerationCap { dim: usize, cap: usize },
    /// A diagonal/statevector table would exceed the qubit cap.
    #[error("qubit cap exceeded: {qubits} qubits > cap {cap}")]
    QubitCap { qubits: usize, cap: usize },
    /// Mismatched vector/matrix dimensions between arguments.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Text or JSON input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Every decodable coefficient matrix in the box is rank-deficient.
    #[error("no nontrivial sub-lattice in box")]
    NoNontrivialSubLattice,
    /// The Grover oracle marks no state.
    #[error("empty target set")]
    EmptyTargetSet,
    /// Binary search for the spectral gap cannot succeed.
    #[error("gap search failed: {0}")]
    GapSearchFailed(String),
    /// An operation required an LLL-reduced basis.
    #[error("basis is not LLL-reduced")]
    NotReduced,
    /// Symbolic Pauli expansion refused for large K.
    #[error("symbolic expansion unavailable for k = {0} (max 4)")]
    SymbolicKTooLarge(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
