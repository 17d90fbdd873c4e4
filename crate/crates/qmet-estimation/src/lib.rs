//! Estimation-theory primitives: Fisher information, Cramér-Rao bounds,
//! error propagation, exact estimator statistics by enumeration, and the
//! phase-estimation and thermometry examples.

pub mod enumerate;
pub mod examples;

pub use enumerate::{coin_mle_stats, estimator_stats, local_estimator_stats, EstimatorStats};
pub use examples::{
    energy_variance, gibbs_populations, heat_capacity, noon_output_amplitudes, noon_parity_expectation, noon_parity_mse, phase_qfi, phase_state,
    thermometry_qfi, PhaseProbe,
};

use qmet_dense::fd::{default_step, derivative};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimationError {
    #[error("Fisher information must be positive, got {0}")]
    ZeroInformation(f64),
    #[error("observable slope is zero")]
    ZeroSlope,
    #[error("probability {0} outside (0, 1)")]
    BadProbability(f64),
    #[error("enumeration too large: {0}")]
    TooLarge(String),
    #[error("invalid pmf at θ = {theta}: {reason}")]
    InvalidPmf { theta: f64, reason: String },
    #[error("temperature must be positive, got {0}")]
    BadTemperature(f64),
}

pub type Result<T> = std::result::Result<T, EstimationError>;

/// Probability cut below which an outcome contributes nothing to the FI.
pub const PROB_CUT: f64 = 1e-12;

type ProbFn<'a> = Box<dyn Fn(f64) -> Vec<f64> + Send + Sync + 'a>;

/// Discrete outcome distribution p(x|θ).
pub struct Pmf<'a> {
    labels: Vec<String>,
    probs: ProbFn<'a>,
}

impl<'a> Pmf<'a> {
    pub fn new(labels: Vec<String>, probs: impl Fn(f64) -> Vec<f64> + Send + Sync + 'a) -> Self {
        Self { labels, probs: Box::new(probs) }
    }

    /// Outcomes labelled 0, 1, ..
    pub fn unlabelled(k: usize, probs: impl Fn(f64) -> Vec<f64> + Send + Sync + 'a) -> Self {
        Self::new((0..k).map(|i| i.to_string()).collect(), probs)
    }

    /// Single flip with P(heads) = θ.
    pub fn coin() -> Pmf<'static> {
        Pmf::new(vec!["H".into(), "T".into()], |p| vec![p, 1.0 - p])
    }

    /// Parity of an n-qubit GHZ state after phase θ per qubit: (1 ± cos nθ)/2.
    pub fn ghz_parity(n: usize) -> Pmf<'static> {
        let nf = n as f64;
        Pmf::new(vec!["+1".into(), "-1".into()], move |t| {
            let c = (nf * t).cos();
            vec![0.5 * (1.0 + c), 0.5 * (1.0 - c)]
        })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn probs(&self, theta: f64) -> Vec<f64> {
        (self.probs)(theta)
    }

    /// Normalization within 1e-10 and entries ≥ -1e-12.
    pub fn check(&self, theta: f64) -> Result<Vec<f64>> {
        let p = self.probs(theta);
        let bad = |reason: String| Err(EstimationError::InvalidPmf { theta, reason });
        if p.len() != self.labels.len() {
            return bad(format!("{} probabilities for {} labels", p.len(), self.labels.len()));
        }
        if let Some(x) = p.iter().find(|&&x| !(x >= -PROB_CUT)) {
            return bad(format!("negative probability {x}"));
        }
        let s: f64 = p.iter().sum();
        if (s - 1.0).abs() > 1e-10 {
            return bad(format!("probabilities sum to {s}"));
        }
        Ok(p)
    }
}

/// Σ_x (∂_θ p)² / p with central differences of step `h`.
pub fn fisher_information(pmf: &Pmf, theta: f64, h: f64) -> f64 {
    let p = pmf.probs(theta);
    let dp = derivative(|t| pmf.probs(t), theta, h);
    p.iter()
        .zip(&dp)
        .filter(|(p, _)| **p >= PROB_CUT)
        .map(|(p, d)| d * d / p)
        .sum()
}

/// `fisher_information` with the shared default step.
pub fn fisher_information_default(pmf: &Pmf, theta: f64) -> f64 {
    fisher_information(pmf, theta, default_step(theta))
}

/// Per-outcome score ∂_θ ln p(x|θ); zero for outcomes below the cut.
pub fn score(pmf: &Pmf, theta: f64) -> Vec<f64> {
    let p = pmf.probs(theta);
    let dp = derivative(|t| pmf.probs(t), theta, default_step(theta));
    p.iter().zip(&dp).map(|(p, d)| if *p >= PROB_CUT { d / p } else { 0.0 }).collect()
}

/// Cramér-Rao bound 1/(N·FI).
pub fn crb(fi: f64, n: usize) -> Result<f64> {
    if !(fi > 0.0) {
        return Err(EstimationError::ZeroInformation(fi));
    }
    Ok(1.0 / (n as f64 * fi))
}

/// Var(O) / (ν (∂⟨O⟩/∂θ)²).
pub fn error_propagation(var_o: f64, slope: f64, nu: usize) -> Result<f64> {
    if slope == 0.0 || !slope.is_finite() {
        return Err(EstimationError::ZeroSlope);
    }
    Ok(var_o / (nu as f64 * slope * slope))
}
