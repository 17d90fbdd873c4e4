//! End-to-end delegated phase estimation with a GHZ probe and a parity
//! readout, compared against the integrity bounds.
//!
//! Each repetition runs ν delegated rounds, keeps the accepted ones and
//! inverts the parity mean through the first-order expansion of cos(nθ)
//! around the working point.

use std::f64::consts::PI;

use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;

use crate::attack::AttackSpec;
use crate::casework;
use crate::delegated::delegated_measurement_round;
use crate::instance::{ghz, phase_encode, Instance, Layout};
use crate::integrity::{integrity_bias_bound, integrity_mse_bound, IntegrityParams};
use crate::keys::{conjugate_local, TrapKey};
use crate::sampled::trial_rng;
use crate::sum::{chunk_map, mean_stderr};
use crate::{check_size, CryptoError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct DemoConfig {
    pub n: usize,
    pub t: usize,
    /// Delegated rounds per repetition.
    pub nu: u64,
    /// Independent repetitions used for the bias and MSE statistics.
    pub reps: usize,
    pub attack: AttackSpec,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DemoReport {
    pub theta: f64,
    pub accept_rate: f64,
    pub empirical_bias: f64,
    pub bias_stderr: f64,
    pub empirical_mse: f64,
    pub ideal_mse: f64,
    /// Empirical MSE minus the ideal MSE for the same accepted counts.
    pub mse_excess: f64,
    pub mse_stderr: f64,
    /// Exact soundness quantity and acceptance rate at the true θ.
    pub delta: f64,
    pub alpha: f64,
    pub bound_bias: f64,
    pub bound_mse: f64,
    /// Repetitions in which no round was accepted.
    pub empty_reps: usize,
}

impl DemoReport {
    /// Both empirical quantities below their bounds with 4σ slack.
    pub fn within_bounds(&self) -> bool {
        self.empirical_bias.abs() <= self.bound_bias + 4.0 * self.bias_stderr
            && self.mse_excess <= self.bound_mse + 4.0 * self.mse_stderr
    }
}

const MAX_NU: u64 = 100_000;

/// Parity outcome of one round, or `None` when the flags reject.
fn pauli_round<R: Rng>(n: usize, t: usize, cos_nt: f64, sampler: &crate::attack::PauliSampler, rng: &mut R) -> Option<f64> {
    let m = n + t;
    let flags = sample(rng, m, t).into_vec();
    let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..24)).collect();
    let layout = Layout::new(m, &flags).expect("sampled flags are valid");
    let (x, z) = sampler.sample(rng);
    let (px, pz) = conjugate_local(&idx, x, z);
    if px & layout.flag_mask != 0 {
        return None;
    }
    // Y and Z anticommute with X, flipping the parity expectation
    let sign = if (pz & !layout.flag_mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
    let p_plus = 0.5 * (1.0 + sign * cos_nt);
    Some(if rng.gen::<f64>() < p_plus { 1.0 } else { -1.0 })
}

fn dense_round<R: Rng>(rho: &qmet_dense::DensityMatrix, n: usize, t: usize, attack: &AttackSpec, rng: &mut R) -> Result<Option<f64>> {
    let key = TrapKey::random(n + t, t, rng)?;
    let round = delegated_measurement_round(rho, 'X', &key, attack)?;
    if rng.gen::<f64>() >= round.accept_prob {
        return Ok(None);
    }
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut outcome = round.outcomes.len() - 1;
    for (k, p) in round.outcomes.iter().enumerate() {
        acc += p;
        if u < acc {
            outcome = k;
            break;
        }
    }
    Ok(Some(if outcome.count_ones() % 2 == 0 { 1.0 } else { -1.0 }))
}

/// Runs the delegated estimation and the matching integrity bounds.
pub fn end_to_end_demo(cfg: &DemoConfig) -> Result<DemoReport> {
    let (n, t) = (cfg.n, cfg.t);
    check_size("end-to-end demo", n + t, 6)?;
    if n == 0 || t == 0 || cfg.nu == 0 || cfg.nu > MAX_NU || cfg.reps < 2 {
        return Err(CryptoError::InvalidParams(format!(
            "need n, t >= 1, 1 <= nu <= {MAX_NU} and reps >= 2, got n = {n}, t = {t}, nu = {}, reps = {}",
            cfg.nu, cfg.reps
        )));
    }
    let m = n + t;
    cfg.attack.single_use(m)?;
    let nf = n as f64;
    let theta = PI / (2.0 * nf) + (trial_rng(cfg.seed, 0).gen::<f64>() - 0.5) * 0.1 / nf;
    let cos_nt = (nf * theta).cos();
    let slope = -nf * (nf * theta).sin();
    let psi = phase_encode(&ghz(n), theta);
    let inst = Instance::new(n, t, psi.clone())?;
    let exact = casework::trap_single(&inst, &cfg.attack)?;

    let sampler = if cfg.attack.is_pauli_mixture() { Some(cfg.attack.sampler(m)?) } else { None };
    let rho = inst.density();
    // per repetition: (accepted rounds, estimation error)
    let runs: Vec<Result<(u64, f64)>> = chunk_map(cfg.reps, 1, |range| {
        let rep = range.start;
        let mut rng = trial_rng(cfg.seed, rep as u64 + 1);
        let (mut accepted, mut sum) = (0u64, 0.0);
        for _ in 0..cfg.nu {
            let out = match &sampler {
                Some(s) => pauli_round(n, t, cos_nt, s, &mut rng),
                None => dense_round(&rho, n, t, &cfg.attack, &mut rng)?,
            };
            if let Some(parity) = out {
                accepted += 1;
                sum += parity;
            }
        }
        let err = if accepted == 0 { f64::NAN } else { (sum / accepted as f64 - cos_nt) / slope };
        Ok((accepted, err))
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let kept: Vec<(u64, f64)> = runs.iter().copied().filter(|r| r.0 > 0).collect();
    let empty_reps = runs.len() - kept.len();
    if kept.len() < 2 {
        return Err(CryptoError::InvalidParams("fewer than two repetitions accepted any round".into()));
    }
    let errs: Vec<f64> = kept.iter().map(|r| r.1).collect();
    let sq: Vec<f64> = errs.iter().map(|e| e * e).collect();
    let ideal: Vec<f64> = kept.iter().map(|r| 1.0 / (r.0 as f64 * nf * nf)).collect();
    let excess: Vec<f64> = sq.iter().zip(&ideal).map(|(s, i)| s - i).collect();
    let (empirical_bias, bias_stderr) = mean_stderr(&errs);
    let (empirical_mse, _) = mean_stderr(&sq);
    let (ideal_mse, _) = mean_stderr(&ideal);
    let (mse_excess, mse_stderr) = mean_stderr(&excess);
    let accepted: Vec<f64> = runs.iter().map(|r| r.0 as f64).collect();
    let (mean_accepted, _) = mean_stderr(&accepted);

    let alpha = exact.accept;
    let (bound_bias, bound_mse) = if alpha > 0.0 {
        let ip = IntegrityParams { o: 1.0, d_o_dtheta: slope, delta: exact.lhs, alpha: alpha.min(1.0), nu: (mean_accepted.round() as u64).max(1) };
        (integrity_bias_bound(&ip)?, integrity_mse_bound(&ip)?)
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(DemoReport {
        theta,
        accept_rate: mean_accepted / cfg.nu as f64,
        empirical_bias,
        bias_stderr,
        empirical_mse,
        ideal_mse,
        mse_excess,
        mse_stderr,
        delta: exact.lhs,
        alpha,
        bound_bias,
        bound_mse,
        empty_reps,
    })
}
