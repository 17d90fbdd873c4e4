//! Soundness reports for the trap code, the Clifford code and delegated
//! measurements.

use num_complex::Complex64 as C64;
use qmet_dense::{trace_distance, DensityMatrix};
use serde::Serialize;

use crate::attack::AttackSpec;
use crate::dense::{self, Eval};
use crate::instance::{phase_encode, Instance};
use crate::sampled::{self, Estimate, KeyFamily};
use crate::{casework, CryptoError, Result, CASEWORK_MAX_M, DENSE_CLIFFORD_MAX_M, DENSE_TRAP_MAX_M, DOUBLE_CASEWORK_MAX_M};

/// How a soundness quantity is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Pauli casework (trap code) or closed form (Clifford code).
    Exact,
    /// Brute-force key enumeration with the attack applied to dense states.
    Dense,
    Sampled { trials: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Trap,
    Clifford,
    Delegated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ReportMode {
    Exact,
    Dense,
    Sampled { trials: usize, seed: u64, stderr: f64 },
}

/// Key-averaged Pr(accept)·(1 − F) against the protocol's bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SoundnessReport {
    pub protocol: Protocol,
    pub uses: usize,
    pub n: usize,
    pub t: usize,
    pub lhs: f64,
    pub bound: f64,
    pub accept_rate: f64,
    /// Trace distance between the ideal output and the acceptance-weighted
    /// average output state; absent in sampled mode.
    pub conditional_trace_distance: Option<f64>,
    pub mode: ReportMode,
}

impl SoundnessReport {
    pub fn within_bound(&self) -> bool {
        self.lhs <= self.bound + 1e-9
    }
}

pub fn bound(protocol: Protocol, uses: usize, n: usize, t: usize) -> f64 {
    let (n, t) = (n as f64, t as f64);
    match (protocol, uses) {
        (Protocol::Trap, 1) => 1.5 * n / t,
        (Protocol::Trap, _) => 2.25 * n / t,
        (Protocol::Clifford, _) => 0.5f64.powf(t),
        (Protocol::Delegated, _) => 3.0 * n / (2.0 * t),
    }
}

/// Whether the exact evaluator handles this size.
pub fn exact_feasible(protocol: Protocol, uses: usize, m: usize) -> bool {
    match (protocol, uses) {
        (Protocol::Clifford, _) => m <= 16,
        (_, 1) => m <= CASEWORK_MAX_M,
        _ => m <= DOUBLE_CASEWORK_MAX_M,
    }
}

/// Whether brute-force key enumeration handles this size.
pub fn dense_feasible(protocol: Protocol, m: usize) -> bool {
    match protocol {
        Protocol::Clifford => m <= DENSE_CLIFFORD_MAX_M,
        _ => m <= DENSE_TRAP_MAX_M,
    }
}

/// Splits a `double` attack into its two uses; any other attack is used twice.
pub fn split_double(attack: &AttackSpec) -> (AttackSpec, AttackSpec) {
    match attack {
        AttackSpec::Double(a, b) => ((**a).clone(), (**b).clone()),
        other => (other.clone(), other.clone()),
    }
}

fn conditional_distance(eval: &Eval, ideal: &[C64]) -> Result<Option<f64>> {
    if eval.accept <= 1e-14 {
        return Ok(None);
    }
    let out = DensityMatrix::new_unchecked(eval.block.scale_re(1.0 / eval.accept));
    Ok(Some(trace_distance(&DensityMatrix::from_pure(ideal), &out)?))
}

fn from_eval(protocol: Protocol, uses: usize, inst: &Instance, eval: Eval, ideal: &[C64], mode: ReportMode) -> Result<SoundnessReport> {
    Ok(SoundnessReport {
        protocol,
        uses,
        n: inst.n,
        t: inst.t,
        conditional_trace_distance: conditional_distance(&eval, ideal)?,
        lhs: eval.lhs,
        bound: bound(protocol, uses, inst.n, inst.t),
        accept_rate: eval.accept,
        mode,
    })
}

fn from_estimate(protocol: Protocol, uses: usize, inst: &Instance, est: Estimate, trials: usize, seed: u64) -> SoundnessReport {
    SoundnessReport {
        protocol,
        uses,
        n: inst.n,
        t: inst.t,
        lhs: est.lhs,
        bound: bound(protocol, uses, inst.n, inst.t),
        accept_rate: est.accept,
        conditional_trace_distance: None,
        mode: ReportMode::Sampled { trials, seed, stderr: est.stderr },
    }
}

fn single(protocol: Protocol, inst: &Instance, attack: &AttackSpec, mode: Mode) -> Result<SoundnessReport> {
    attack.single_use(inst.m())?;
    let family = if protocol == Protocol::Clifford { KeyFamily::Clifford } else { KeyFamily::Trap };
    let report = |eval, mode| from_eval(protocol, 1, inst, eval, &inst.psi, mode);
    match (mode, family) {
        (Mode::Exact, KeyFamily::Trap) => report(casework::trap_single(inst, attack)?, ReportMode::Exact),
        (Mode::Exact, KeyFamily::Clifford) => report(casework::clifford_single(inst, attack)?, ReportMode::Exact),
        (Mode::Dense, KeyFamily::Trap) => report(dense::trap_single_dense(inst, attack)?, ReportMode::Dense),
        (Mode::Dense, KeyFamily::Clifford) => report(dense::clifford_single_dense(inst, attack)?, ReportMode::Dense),
        (Mode::Sampled { trials, seed }, _) => {
            Ok(from_estimate(protocol, 1, inst, sampled::single(family, inst, attack, trials, seed)?, trials, seed))
        }
    }
}

/// Trap code with one channel use; bound 3(m − t)/(2t).
pub fn soundness_trap_single(inst: &Instance, attack: &AttackSpec, mode: Mode) -> Result<SoundnessReport> {
    single(Protocol::Trap, inst, attack, mode)
}

/// Clifford code with one channel use; bound 2^{−t}.
pub fn soundness_clifford_single(inst: &Instance, attack: &AttackSpec, mode: Mode) -> Result<SoundnessReport> {
    single(Protocol::Clifford, inst, attack, mode)
}

/// Delegated measurement on the encoded state ρ_θ (carried by `inst`).
/// The state the untrusted party measures is the trap-code output for
/// ρ_θ, so the trap-code evaluators apply with bound 3n/(2t).
pub fn soundness_delegated(inst: &Instance, attack: &AttackSpec, mode: Mode) -> Result<SoundnessReport> {
    single(Protocol::Delegated, inst, attack, mode)
}

/// Two channel uses with independent keys and the phase imprint
/// exp(−iθ/2 ΣZ) on the data between them.
pub fn soundness_double(
    protocol: Protocol,
    inst: &Instance,
    first: &AttackSpec,
    second: &AttackSpec,
    theta: f64,
    mode: Mode,
) -> Result<SoundnessReport> {
    let m = inst.m();
    first.single_use(m)?;
    second.single_use(m)?;
    let family = match protocol {
        Protocol::Trap => KeyFamily::Trap,
        Protocol::Clifford => KeyFamily::Clifford,
        Protocol::Delegated => return Err(CryptoError::InvalidParams("delegated measurement uses the channel once".into())),
    };
    let phi = phase_encode(&inst.psi, theta);
    let report = |eval, mode| from_eval(protocol, 2, inst, eval, &phi, mode);
    match (mode, family) {
        (Mode::Exact, KeyFamily::Trap) => report(casework::trap_double(inst, first, second, theta)?, ReportMode::Exact),
        (Mode::Exact, KeyFamily::Clifford) => report(casework::clifford_double(inst, first, second, theta)?, ReportMode::Exact),
        (Mode::Dense, KeyFamily::Trap) => report(dense::trap_double_dense(inst, first, second, theta)?, ReportMode::Dense),
        (Mode::Dense, KeyFamily::Clifford) => {
            report(dense::clifford_double_dense(inst, first, second, theta)?, ReportMode::Dense)
        }
        (Mode::Sampled { trials, seed }, _) => Ok(from_estimate(
            protocol,
            2,
            inst,
            sampled::double(family, inst, first, second, theta, trials, seed)?,
            trials,
            seed,
        )),
    }
}

/// Two-use trap code that wrongly reuses the first key for the second use,
/// reported against the honest two-use bound. Pauli-channel attacks only.
pub fn reused_key_lhs(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<SoundnessReport> {
    let phi = phase_encode(&inst.psi, theta);
    from_eval(Protocol::Trap, 2, inst, casework::reused_key(inst, first, second, theta)?, &phi, ReportMode::Exact)
}

/// Dense-enumeration counterpart of [`reused_key_lhs`]; any attack, m ≤ 3.
pub fn reused_key_lhs_dense(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<SoundnessReport> {
    let phi = phase_encode(&inst.psi, theta);
    from_eval(Protocol::Trap, 2, inst, dense::reused_key_dense(inst, first, second, theta)?, &phi, ReportMode::Dense)
}
