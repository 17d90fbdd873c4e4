//! Phase estimation with separable, GHZ and NOON probes, and thermometry.

use num_complex::Complex64 as C64;
use qmet_dense::fd::{default_step, derivative};

use crate::{error_propagation, EstimationError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseProbe {
    Separable,
    Ghz,
}

/// Closed-form QFI for n-qubit phase encoding exp(-iθ Σ Z_j / 2).
pub fn phase_qfi(n: usize, probe: PhaseProbe) -> f64 {
    let n = n as f64;
    match probe {
        PhaseProbe::Separable => n,
        PhaseProbe::Ghz => n * n,
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// Encoded probe in the symmetric (Dicke) basis |k, n-k>, k = 0..n. The
/// generator weight of |k, n-k> is (2k - n)/2.
pub fn phase_state(n: usize, probe: PhaseProbe, theta: f64) -> Vec<C64> {
    let amps: Vec<f64> = match probe {
        PhaseProbe::Separable => (0..=n).map(|k| (binomial(n, k) / 2f64.powi(n as i32)).sqrt()).collect(),
        PhaseProbe::Ghz => {
            let mut a = vec![0.0; n + 1];
            a[0] = 0.5f64.sqrt();
            a[n] += 0.5f64.sqrt();
            a
        }
    };
    amps.iter()
        .enumerate()
        .map(|(k, &a)| C64::from_polar(a, -(2.0 * k as f64 - n as f64) * theta / 2.0))
        .collect()
}

/// NOON-state amplitudes on |k, n-k> after the second beam splitter.
pub fn noon_output_amplitudes(n: usize, theta: f64) -> Vec<C64> {
    let nf = n as f64;
    let i = C64::new(0.0, 1.0);
    // 2^{-(n+1)/2}: each bracket has modulus 2 cos(nθ/2 + π(2k-n)/4)
    let norm = 2f64.powi(n as i32 + 1).sqrt().recip();
    (0..=n)
        .map(|k| {
            let a = C64::from_polar(1.0, -nf * theta / 2.0) * i.powu((n - k) as u32);
            let b = C64::from_polar(1.0, nf * theta / 2.0) * i.powu(k as u32);
            (a + b) * binomial(n, k).sqrt() * norm
        })
        .collect()
}

/// ⟨Σ_k (-1)^k |k, n-k><k, n-k|⟩ on the NOON output state.
pub fn noon_parity_expectation(n: usize, theta: f64) -> f64 {
    noon_output_amplitudes(n, theta)
        .iter()
        .enumerate()
        .map(|(k, a)| if k % 2 == 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}

/// Error-propagation MSE of the parity estimator after ν repetitions.
pub fn noon_parity_mse(n: usize, theta: f64, nu: usize) -> Result<f64> {
    let o = noon_parity_expectation(n, theta);
    let slope = derivative(|t| noon_parity_expectation(n, t), theta, default_step(theta));
    error_propagation(1.0 - o * o, slope, nu)
}

fn gibbs_weights(energies: &[f64], t: f64) -> Vec<f64> {
    let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let w: Vec<f64> = energies.iter().map(|e| (-(e - e0) / t).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|x| x / z).collect()
}

/// Gibbs populations e^{-E/T}/Z (k_B = 1).
pub fn gibbs_populations(energies: &[f64], t: f64) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(EstimationError::BadTemperature(t));
    }
    Ok(gibbs_weights(energies, t))
}

fn energy_moments(energies: &[f64], t: f64) -> (f64, f64) {
    let p = gibbs_weights(energies, t);
    let mean: f64 = p.iter().zip(energies).map(|(p, e)| p * e).sum();
    let var: f64 = p.iter().zip(energies).map(|(p, e)| p * (e - mean).powi(2)).sum();
    (mean, var)
}

/// Var_T(H) / T⁴ for the Gibbs state of the given spectrum.
pub fn thermometry_qfi(energies: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(EstimationError::BadTemperature(t));
    }
    let (_, var) = energy_moments(energies, t);
    Ok(var / t.powi(4))
}

/// ∂⟨H⟩/∂T by central differences.
pub fn heat_capacity(energies: &[f64], t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(EstimationError::BadTemperature(t));
    }
    Ok(derivative(|x| energy_moments(energies, x).0, t, default_step(t) * t.min(1.0)))
}

/// Var_T(H).
pub fn energy_variance(energies: &[f64], t: f64) -> f64 {
    energy_moments(energies, t).1
}
