//! Dense complex linear algebra for small quantum systems.
//!
//! Everything here works on explicit `dim x dim` matrices and is meant as
//! brute-force ground truth for the closed forms in the sibling crates.

pub mod density;
pub mod eig;
pub mod fd;
pub mod lindblad;
pub mod matrix;
pub mod qfi;
pub mod tolerances;

pub use density::{fidelity, partial_trace, trace_distance, DensityMatrix};
pub use eig::{hermitian_eig, Spectrum};
pub use lindblad::{evolve_lindblad, evolve_lindblad_adaptive, evolve_lindblad_fixed, Jump};
pub use matrix::CMatrix;
pub use num_complex::Complex64 as C64;
pub use qfi::{qfi_fidelity_limit, qfi_pure, qfi_spectral, ThetaFamily};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DenseError {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NonHermitian(f64),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("bad qubit index {0} for a {1}-qubit register")]
    BadIndex(usize, usize),
    #[error("not a density matrix: {0}")]
    InvalidDensity(String),
    #[error("step refinement did not reach tolerance within {0} steps")]
    StepTooCoarse(usize),
    #[error("family returned matrices of differing dimension")]
    DegenerateFamily,
    #[error("state vector not normalized (norm {0})")]
    NotNormalized(f64),
}

pub type Result<T> = std::result::Result<T, DenseError>;

/// Index of the computational basis bit for `qubit` in an `m`-qubit register.
/// Qubit 0 is the most significant bit.
#[inline]
pub fn bit_of(qubit: usize, m: usize) -> usize {
    m - 1 - qubit
}
