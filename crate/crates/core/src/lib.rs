//! Exact lattice reduction, diagonal covolume Hamiltonians, and desk-scale
//! quantum-search simulators for the K-densest sub-lattice problem (K-DSP).
//!
//! The pipeline: parse a basis, LLL/gap preprocess it ([`preprocess`]),
//! budget qubits, encode the squared-covolume cost over a finite coefficient
//! box ([`hamiltonian`]), then search the box with exhaustive scan, Grover
//! amplitude amplification, or QAOA ([`solvers`], [`qaoa`]).
//!
//! All basis reduction and gap logic runs on exact arbitrary-precision
//! rationals; floating point appears only in Hamiltonian coefficient tables
//! and the statevector simulators. Every value is immutable after
//! construction and safe to share across threads.

pub mod error;
pub mod hamiltonian;
pub mod lattice;
pub mod preprocess;
pub mod qaoa;
pub mod rational;
pub mod rng;
pub mod solvers;
pub mod testing;

pub use error::{Error, Result};
pub use num::{BigInt, BigRational};
pub use hamiltonian::{
    build_pauli_cost, count_gates, decode_coefficients, diagonal_vector, estimate_gap,
    eval_cost_direct, penalize, spectral_gap_bound, DiagonalCost, EncodingConfig, PauliPolynomial,
    PenaltyScheme,
};
pub use lattice::{
    covolume_sq, find_gap, gram, gso, hkz_reduce, lll_reduce, svp_enumerate, Basis, GapReport,
    GramMatrix, GsoData, SvpResult,
};
pub use preprocess::{
    lift_solution, preprocess, qubit_budget, BudgetMode, PlanAction, PreprocessPlan, QubitBudget,
};
pub use qaoa::{optimize_params, qaoa_state, sample_report, QaoaParams, RunReport, Statevector};
pub use solvers::{brute_force_solve, grover_runtime_estimate, grover_simulate, SolveResult};
