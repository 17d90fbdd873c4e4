//! Delegated measurement: the untrusted party measures the encrypted state
//! in rotated bases and the key holder remaps the outcome bits.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use qmet_dense::{CMatrix, DensityMatrix};

use crate::attack::AttackSpec;
use crate::dense::{apply_local, local_conjugate};
use crate::instance::{combinations, Layout};
use crate::keys::{local_table, TrapKey};
use crate::sum::chunk_map;
use crate::{check_size, CryptoError, Result, DENSE_TRAP_MAX_M, ROUND_MAX_M};

/// Outcome of one delegated round for a fixed key.
#[derive(Debug, Clone, PartialEq)]
pub struct DelegatedRound {
    pub accept_prob: f64,
    /// Distribution over data outcome strings conditioned on acceptance.
    /// Bit i of the index (data qubit 0 most significant) is 1 for outcome −1.
    /// Empty when acceptance is impossible.
    pub outcomes: Vec<f64>,
}

fn letter_of(basis: char) -> Result<u8> {
    match basis.to_ascii_uppercase() {
        'X' => Ok(1),
        'Y' => Ok(2),
        'Z' => Ok(3),
        other => Err(CryptoError::InvalidParams(format!("measurement basis must be X, Y or Z, got {other}"))),
    }
}

/// V with V L V† = Z for a non-identity letter.
fn rotation(letter: u8) -> CMatrix {
    let h = FRAC_1_SQRT_2;
    let c = |re: f64, im: f64| C64::new(re, im);
    match letter {
        1 => CMatrix::from_fn(2, |i, j| c(if i == 1 && j == 1 { -h } else { h }, 0.0)),
        // H·S†
        2 => CMatrix::from_fn(2, |i, j| match (i, j) {
            (0, 0) => c(h, 0.0),
            (0, 1) => c(0.0, -h),
            (1, 0) => c(h, 0.0),
            _ => c(0.0, h),
        }),
        _ => CMatrix::identity(2),
    }
}

/// Unnormalized accepted outcome distribution for one key.
fn accepted_counts(rho_theta: &CMatrix, basis: u8, key: &TrapKey, attack: &AttackSpec) -> Result<Vec<f64>> {
    let m = key.m();
    let layout = key.layout();
    let table = local_table();
    let rin = layout.embed(rho_theta);
    let seen = attack.apply_dense(&local_conjugate(&rin, key.indices(), false))?;
    // the party is asked for C B C† = s·L on every qubit and measures L
    let mut sign_mask = 0usize;
    let rotations: Vec<CMatrix> = (0..m)
        .map(|q| {
            let b = if layout.flag_mask >> q & 1 == 1 { 3 } else { basis };
            let (l, neg) = table.image[key.indices()[q]][b as usize];
            if neg {
                sign_mask |= 1 << (m - 1 - q);
            }
            rotation(l)
        })
        .collect();
    let ops: Vec<Option<&CMatrix>> = rotations.iter().map(Some).collect();
    let rotated = apply_local(&seen, &ops);
    let n = layout.n();
    let flag_bits = layout.flags.iter().fold(0usize, |acc, &q| acc | 1 << (m - 1 - q));
    let mut counts = vec![0.0; 1 << n];
    for e in 0..1usize << m {
        let b = e ^ sign_mask;
        if b & flag_bits != 0 {
            continue;
        }
        let data = layout.data.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | ((b >> (m - 1 - q)) & 1) << (n - 1 - i));
        counts[data] += rotated[(e, e)].re.max(0.0);
    }
    Ok(counts)
}

/// One delegated round: encrypt ρ_θ ⊗ |0..0> with the key, let the attack
/// act, have the untrusted party measure the instructed observables, and
/// post-process the outcome bits classically.
pub fn delegated_measurement_round(rho_theta: &DensityMatrix, basis: char, key: &TrapKey, attack: &AttackSpec) -> Result<DelegatedRound> {
    let m = key.m();
    check_size("delegated measurement round", m, ROUND_MAX_M)?;
    if rho_theta.dim() != 1 << (m - key.t()) {
        return Err(CryptoError::InvalidParams(format!("state dimension {} does not match {} data qubits", rho_theta.dim(), m - key.t())));
    }
    let counts = accepted_counts(rho_theta.matrix(), letter_of(basis)?, key, attack)?;
    let accept_prob: f64 = counts.iter().sum();
    let outcomes = if accept_prob > 1e-14 { counts.iter().map(|c| c / accept_prob).collect() } else { Vec::new() };
    Ok(DelegatedRound { accept_prob: accept_prob.min(1.0), outcomes })
}

/// Key average of Pr(accept) − (Σ_x √(p(x) q(x)))², where p is the ideal
/// outcome distribution and q the unnormalized accepted one. The classical
/// fidelity of the outcomes dominates the quantum fidelity, so this never
/// exceeds the state-level soundness quantity.
pub fn delegated_measured_lhs(psi_theta: &[C64], t: usize, basis: char, attack: &AttackSpec) -> Result<f64> {
    let n = psi_theta.len().trailing_zeros() as usize;
    let m = n + t;
    check_size("delegated measurement enumeration", m, DENSE_TRAP_MAX_M)?;
    let b = letter_of(basis)?;
    let rho = CMatrix::outer(psi_theta, psi_theta);
    let ideal = ideal_distribution(psi_theta, b);
    let keys = 24usize.pow(m as u32);
    let layouts = combinations(m, t);
    let mut total = 0.0;
    for flags in &layouts {
        Layout::new(m, flags)?;
        let parts = chunk_map(keys, 512, |range| -> Result<f64> {
            let mut acc = 0.0;
            for k in range {
                let mut idx = vec![0; m];
                let mut r = k;
                for slot in idx.iter_mut().rev() {
                    *slot = r % 24;
                    r /= 24;
                }
                let key = TrapKey::from_indices(flags.clone(), idx)?;
                let q = accepted_counts(&rho, b, &key, attack)?;
                let bc: f64 = ideal.iter().zip(&q).map(|(p, q)| (p * q).sqrt()).sum();
                acc += q.iter().sum::<f64>() - bc * bc;
            }
            Ok(acc)
        });
        for p in parts {
            total += p?;
        }
    }
    Ok((total / (keys * layouts.len()) as f64).max(0.0))
}

/// Ideal outcome distribution of measuring every data qubit in one basis.
pub fn ideal_distribution(psi: &[C64], basis: u8) -> Vec<f64> {
    let n = psi.len().trailing_zeros() as usize;
    let v = rotation(basis);
    let mut out = psi.to_vec();
    for q in 0..n {
        let stride = 1usize << (n - 1 - q);
        for k0 in (0..out.len()).filter(|k| k & stride == 0) {
            let (a0, a1) = (out[k0], out[k0 | stride]);
            out[k0] = v[(0, 0)] * a0 + v[(0, 1)] * a1;
            out[k0 | stride] = v[(1, 0)] * a0 + v[(1, 1)] * a1;
        }
    }
    out.iter().map(|a| a.norm_sqr()).collect()
}
