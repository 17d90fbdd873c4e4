//! Authentication protocols that protect a metrology resource sent over an
//! untrusted channel or handed to an untrusted measuring party.
//!
//! Two independent evaluators exist for every soundness quantity: a Pauli
//! casework path that works with twirled attack weights, and a dense path
//! that enumerates keys and applies the attack's Kraus operators literally.
//! A seeded Monte-Carlo sampler covers sizes beyond exact enumeration.

pub mod attack;
pub mod casework;
pub mod delegated;
pub mod demo;
pub mod dense;
pub mod instance;
pub mod integrity;
pub mod keys;
pub mod privacy;
pub mod sampled;
pub mod soundness;
pub mod sum;

pub use attack::{attack_battery, AttackSpec};
pub use delegated::{delegated_measured_lhs, delegated_measurement_round, DelegatedRound};
pub use demo::{end_to_end_demo, DemoConfig, DemoReport};
pub use dense::{trap_round_single, TrapRound};
pub use instance::Instance;
pub use integrity::{flags_required, functionality_retained, integrity_bias_bound, integrity_mse_bound, IntegrityParams};
pub use keys::{CliffordKey, TrapKey};
pub use privacy::privacy_deviation;
pub use soundness::{
    reused_key_lhs, reused_key_lhs_dense, soundness_clifford_single, soundness_delegated, soundness_double, soundness_trap_single,
    Mode, Protocol, ReportMode, SoundnessReport,
};

use qmet_dense::DenseError;
use qmet_pauli::PauliError;
use thiserror::Error;

/// Largest register for the Pauli casework evaluators (single use).
pub const CASEWORK_MAX_M: usize = 6;
/// Largest register for the casework evaluator with two channel uses.
pub const DOUBLE_CASEWORK_MAX_M: usize = 4;
/// Largest register for per-key dense enumeration with local Cliffords.
pub const DENSE_TRAP_MAX_M: usize = 3;
/// Largest register for per-key dense enumeration over the full Clifford group.
pub const DENSE_CLIFFORD_MAX_M: usize = 2;
/// Largest register for a single dense protocol round.
pub const ROUND_MAX_M: usize = 7;
/// Largest register for Monte-Carlo estimation.
pub const SAMPLED_MAX_M: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CryptoError {
    #[error("{what} supports at most {max} qubits, got {m}")]
    TooLarge { what: &'static str, m: usize, max: usize },
    #[error("invalid key: {0}")]
    BadKey(String),
    #[error("invalid attack: {0}")]
    BadAttack(String),
    #[error("cannot parse attack `{0}`")]
    Parse(String),
    #[error("observable slope must be nonzero")]
    ZeroSlope,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Dense(#[from] DenseError),
}

pub type Result<T> = std::result::Result<T, CryptoError>;

pub(crate) fn check_size(what: &'static str, m: usize, max: usize) -> Result<()> {
    if m > max {
        Err(CryptoError::TooLarge { what, m, max })
    } else {
        Ok(())
    }
}
