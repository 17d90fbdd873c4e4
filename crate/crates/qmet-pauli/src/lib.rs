//! Pauli strings and Clifford tableaux over at most 64 qubits.
//!
//! Qubit 0 is the leftmost letter of a Pauli literal and the most significant
//! bit of a computational-basis index, matching `qmet_dense`.

pub mod channel;
pub mod clifford;
pub mod pauli;
pub mod twirl;

pub use channel::{channel_pauli_coeffs, PauliChannel};
pub use clifford::{clifford_apply, clifford_to_matrix, enumerate_clifford, random_clifford, CliffordElement};
pub use pauli::{commutes, pauli_mul, PauliString};
pub use twirl::{verify_twirl, TwirlKind};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PauliError {
    #[error("qubit count mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("{what} not supported for m = {m}")]
    TooLarge { what: &'static str, m: usize },
    #[error("twirl requires distinct Paulis")]
    EqualPaulis,
    #[error("Kraus operators are not trace preserving (deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("cannot parse Pauli literal `{0}`")]
    Parse(String),
    #[error("tableau images violate the symplectic condition")]
    NotSymplectic,
}

pub type Result<T> = std::result::Result<T, PauliError>;
