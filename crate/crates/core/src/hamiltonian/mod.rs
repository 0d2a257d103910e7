//! Diagonal K-DSP cost Hamiltonians over the encoded qubit space.
//!
//! The squared covolume of the decoded sub-lattice is computed three
//! equivalent ways: direct Gram-determinant evaluation per bitstring, the
//! symbolic Z-monomial expansion of the Leibniz determinant (2K-local), and
//! closed forms for K = 2, 3 kept as regression fixtures in tests. The
//! module also applies ground-state penalization and bounds/estimates the
//! spectral gap.

mod encoding;
mod gap;
mod pauli;

pub use encoding::{
    decode_coefficients, diagonal_vector, diagonal_vector_with_cap, effective_statevector_cap,
    eval_cost_direct, penalize, DiagonalCost, DiagonalSidecar, EncodingConfig, PenaltyScheme,
    DEFAULT_STATEVECTOR_CAP,
};
pub use gap::{estimate_gap, exp_penalty_params, spectral_gap_bound};
pub use pauli::{build_pauli_cost, count_gates, GateCount, PauliPolynomial};

pub(crate) use encoding::CostEvaluator;
