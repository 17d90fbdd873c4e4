//! Exact estimator statistics by enumerating every multinomial count vector.

use crate::{fisher_information_default, score, EstimationError, Pmf, Result};

pub const MAX_TRIALS: usize = 25;
pub const MAX_OUTCOMES: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorStats {
    pub mean: f64,
    pub variance: f64,
    pub mse: f64,
    pub bias: f64,
}

impl EstimatorStats {
    fn from_moments(m1: f64, m2_central: f64, truth: f64) -> Self {
        let bias = m1 - truth;
        Self { mean: m1, variance: m2_central, mse: m2_central + bias * bias, bias }
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Calls `f(counts, probability)` for every count vector of N draws.
fn for_each_count(probs: &[f64], n: usize, mut f: impl FnMut(&[usize], f64)) {
    let k = probs.len();
    let lnf: Vec<f64> = (0..=n).map(ln_factorial).collect();
    let lnp: Vec<f64> = probs.iter().map(|p| p.ln()).collect();
    let mut counts = vec![0usize; k];
    fn rec(
        i: usize,
        left: usize,
        counts: &mut Vec<usize>,
        probs: &[f64],
        lnp: &[f64],
        lnf: &[f64],
        f: &mut dyn FnMut(&[usize], f64),
    ) {
        let k = counts.len();
        if i == k - 1 {
            counts[i] = left;
            let n: usize = counts.iter().sum();
            let mut lw = lnf[n];
            for (j, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                if probs[j] <= 0.0 {
                    return;
                }
                lw += c as f64 * lnp[j] - lnf[c];
            }
            f(counts, lw.exp());
            return;
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, probs, lnp, lnf, f);
        }
    }
    rec(0, n, &mut counts, probs, &lnp, &lnf, &mut f);
}

/// Mean, variance, bias and MSE of `estimator(counts)` under N i.i.d. draws
/// from `pmf` at `theta`.
pub fn estimator_stats(pmf: &Pmf, theta: f64, n: usize, estimator: impl Fn(&[usize]) -> f64) -> Result<EstimatorStats> {
    if n == 0 || n > MAX_TRIALS || pmf.len() > MAX_OUTCOMES {
        return Err(EstimationError::TooLarge(format!("N = {n}, {} outcomes", pmf.len())));
    }
    let p = pmf.check(theta)?;
    let p: Vec<f64> = p.into_iter().map(|x| x.max(0.0)).collect();
    let mut m1 = 0.0;
    for_each_count(&p, n, |c, w| m1 += w * estimator(c));
    let mut m2 = 0.0;
    for_each_count(&p, n, |c, w| m2 += w * (estimator(c) - m1).powi(2));
    Ok(EstimatorStats::from_moments(m1, m2, theta))
}

/// The maximum-likelihood estimator h/N for N flips of a coin with bias p.
pub fn coin_mle_stats(p_true: f64, n: usize) -> Result<EstimatorStats> {
    if !(p_true > 0.0 && p_true < 1.0) {
        return Err(EstimationError::BadProbability(p_true));
    }
    estimator_stats(&Pmf::coin(), p_true, n, |c| c[0] as f64 / n as f64)
}

/// θ̂ = θ0 + (Σ_x counts_x ∂ ln p(x|θ0)) / (N·FI(θ0)), evaluated at `theta`.
pub fn local_estimator_stats(pmf: &Pmf, theta: f64, theta0: f64, n: usize) -> Result<EstimatorStats> {
    let fi = fisher_information_default(pmf, theta0);
    if !(fi > 0.0) {
        return Err(EstimationError::ZeroInformation(fi));
    }
    let s = score(pmf, theta0);
    let denom = n as f64 * fi;
    estimator_stats(pmf, theta, n, |c| {
        theta0 + c.iter().zip(&s).map(|(&k, sc)| k as f64 * sc).sum::<f64>() / denom
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coin_examples() {
        let s = coin_mle_stats(0.5, 10).unwrap();
        assert!((s.variance - 0.025).abs() < 1e-12);
        let s = coin_mle_stats(0.3, 20).unwrap();
        assert!(s.bias.abs() < 1e-12);
        let s = coin_mle_stats(0.37, 1).unwrap();
        assert!((s.variance - 0.37 * 0.63).abs() < 1e-12);
        assert!(coin_mle_stats(1.0, 3).is_err());
        assert!(coin_mle_stats(0.5, 26).is_err());
    }

    #[test]
    fn mse_decomposes() {
        let pmf = Pmf::coin();
        let s = estimator_stats(&pmf, 0.4, 7, |c| (c[0] as f64 + 1.0) / 9.0).unwrap();
        assert!((s.mse - (s.variance + s.bias * s.bias)).abs() < 1e-12);
        assert!(s.bias.abs() > 1e-3);
    }
}
