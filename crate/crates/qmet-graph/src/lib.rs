//! Graph states as probes for phase estimation.
//!
//! Closed forms are derived from the neighbourhood partition of the graph;
//! `oracle` rebuilds every quantity from dense state vectors for checking.

pub mod counting;
pub mod graph;
pub mod noise;
pub mod oracle;
pub mod partition;
pub mod stabilizer;

pub use counting::{heisenberg_count_bound, stabilizer_count};
pub use graph::{bundle, Graph};
pub use noise::{mean_qfi_erasure, qfi_dephasing, qfi_erasure, qfi_erasure_light_cone, ErasurePattern};
pub use oracle::{oracle_graph_qfi, Encoding, Noise};
pub use partition::{partition, qfi_x, qfi_y, NeighborhoodPartition};
pub use stabilizer::{
    best_partial_stabilizer, expval_pauli, extend_with_ancilla, find_yz_stabilizer, measurement_variance,
    stabilizer_generators,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("vertex {0} is isolated; the closed form needs every vertex to have a neighbour")]
    IsolatedVertex(usize),
    #[error("expected {expected} bundle sizes, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("probability {0} outside [0, 1]")]
    BadProbability(f64),
    #[error("vertex {0} out of range")]
    BadVertex(usize),
    #[error("{0} erasure patterns exceed the enumeration cap")]
    TooManyPatterns(u128),
    #[error("qubit count mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("{what} not supported for n = {n}")]
    TooLarge { what: &'static str, n: usize },
    #[error("the given Pauli is not a stabilizer of the graph state")]
    NotAStabilizer,
    #[error("the partial stabilizer already has a Y or Z on every qubit")]
    NotNeeded,
    #[error("the ancilla-extended graph has no Y/Z-only stabilizer")]
    ExtensionFailed,
    #[error("the graph has no stabilizer made only of Y and Z factors")]
    NoYZStabilizer,
    #[error("the measured expectation has zero slope at this θ")]
    DegenerateSlope,
    #[error("the Pauli is not Hermitian")]
    NotHermitian,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Dense(#[from] qmet_dense::DenseError),
}

pub type Result<T> = std::result::Result<T, GraphError>;
