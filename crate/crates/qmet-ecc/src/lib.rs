//! GHZ phase sensing under transverse dephasing, with and without repeated
//! error correction.
//!
//! Closed forms for the final rank-2 state are evaluated with forward-mode
//! dual numbers in ω. The `oracle` module rebuilds the same states from
//! explicit Kronecker-product propagators and feeds them to the dense QFI.

pub mod bitflip;
pub mod dual;
pub mod factors;
pub mod noecc;
pub mod oracle;
pub mod parity;
pub mod rank2;
pub mod sweep;

pub use bitflip::{bitflip_state, qfi_bitflip};
pub use factors::{factors, EvolutionFactors};
pub use noecc::{no_ecc_decay_fit, qfi_no_ecc};
pub use oracle::{amplitude_oracle, amplitude_oracle_qfi, amplitude_oracle_state, lindblad_oracle_no_ecc, AmplitudeOracleState};
pub use parity::{
    collapse_onset, fisher_alpha, ideal_diagnostics, imperfect_diagnostics, optimal_time, parity_state, qfi_parity, qfi_parity_ideal,
    qfi_parity_imperfect, qfi_parity_literal, qfi_parity_noisy_ancilla, IdealDiagnostics, ImperfectDiagnostics, NoisyAncilla,
};
pub use rank2::{coherence_report, rank2_qfi, Coherence, Rank2State};
pub use sweep::{preset, qfi, run_sweep, write_csv, Code, Spacing, SweepParam, SweepRow, SweepSpec};

use qmet_dense::DenseError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EccError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("t/tau = {0} is not an integer")]
    NonIntegerRounds(f64),
    #[error("R = {r} is at the pure limit but dR/dω = {dr} is nonzero")]
    SingularPurity { r: f64, dr: f64 },
    #[error("this evaluator requires {0}")]
    WrongSpecialization(&'static str),
    #[error("the bit-flip code needs an odd number of qubits, got {0}")]
    EvenN(usize),
    #[error("{what} supports at most {max} qubits, got {n}")]
    TooLarge { what: &'static str, n: usize, max: usize },
    #[error(transparent)]
    Dense(#[from] DenseError),
}

pub type Result<T> = std::result::Result<T, EccError>;

/// Sensing parameters shared by every evaluator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EccParams {
    pub n: usize,
    pub omega: f64,
    pub gamma: f64,
    /// Ancilla dephasing rate.
    pub xi: f64,
    /// Syndrome error probability.
    pub p: f64,
    /// Time between corrections.
    pub tau: f64,
    /// Total sensing time.
    pub t: f64,
}

impl EccParams {
    pub fn new(n: usize, omega: f64, gamma: f64, tau: f64, t: f64) -> Self {
        Self { n, omega, gamma, xi: 0.0, p: 0.0, tau, t }
    }

    pub fn with_xi(mut self, xi: f64) -> Self {
        self.xi = xi;
        self
    }

    pub fn with_p(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn with_omega(mut self, omega: f64) -> Self {
        self.omega = omega;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(EccError::InvalidParams(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !self.omega.is_finite() {
            return bad(format!("omega = {}", self.omega));
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad(format!("gamma = {} must be >= 0", self.gamma));
        }
        if !(self.xi >= 0.0 && self.xi.is_finite()) {
            return bad(format!("xi = {} must be >= 0", self.xi));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return bad(format!("p = {} outside [0, 1]", self.p));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return bad(format!("tau = {} must be > 0", self.tau));
        }
        if !(self.t >= 0.0 && self.t.is_finite()) {
            return bad(format!("t = {} must be >= 0", self.t));
        }
        Ok(())
    }

    /// Number of correction rounds t/τ, validated to be an integer within
    /// 1e-9 relative.
    pub fn rounds(&self) -> Result<u64> {
        self.validate()?;
        let k = self.t / self.tau;
        let kr = k.round();
        if (k - kr).abs() > 1e-9 * kr.max(1.0) || kr > u32::MAX as f64 {
            return Err(EccError::NonIntegerRounds(k));
        }
        Ok(kr as u64)
    }

    /// (n t)²
    pub fn heisenberg(&self) -> f64 {
        let nt = self.n as f64 * self.t;
        nt * nt
    }
}
