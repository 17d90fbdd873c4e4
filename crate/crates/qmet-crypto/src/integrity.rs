//! From soundness to metrology: bias and MSE added by an undetected attack.
//!
//! With δ the soundness quantity and α the acceptance rate, the accepted
//! state lies within trace distance ε ≤ √(δ/α) of the ideal one.

use serde::Serialize;

use crate::soundness::Protocol;
use crate::{CryptoError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrityParams {
    /// Largest |eigenvalue| of the observable.
    pub o: f64,
    /// Slope d⟨O⟩/dθ at the working point.
    pub d_o_dtheta: f64,
    pub delta: f64,
    pub alpha: f64,
    /// Number of accepted rounds.
    pub nu: u64,
}

impl IntegrityParams {
    fn validate(&self) -> Result<()> {
        if self.d_o_dtheta == 0.0 || !self.d_o_dtheta.is_finite() {
            return Err(CryptoError::ZeroSlope);
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(CryptoError::InvalidParams(format!("alpha = {} outside (0, 1]", self.alpha)));
        }
        if !(self.delta >= 0.0) || !(self.o >= 0.0) || self.nu == 0 {
            return Err(CryptoError::InvalidParams("need delta >= 0, o >= 0 and nu >= 1".into()));
        }
        Ok(())
    }

    /// ε = √(δ/α).
    pub fn epsilon(&self) -> f64 {
        (self.delta / self.alpha).sqrt()
    }
}

/// 2o·√(δ/α) / |d⟨O⟩/dθ|.
pub fn integrity_bias_bound(ip: &IntegrityParams) -> Result<f64> {
    ip.validate()?;
    Ok(2.0 * ip.o * ip.epsilon() / ip.d_o_dtheta.abs())
}

/// (4o²/|d⟨O⟩/dθ|²)·(2ν⁻¹√(δ/α) + δ/α).
pub fn integrity_mse_bound(ip: &IntegrityParams) -> Result<f64> {
    ip.validate()?;
    let r = ip.delta / ip.alpha;
    Ok(4.0 * ip.o * ip.o / (ip.d_o_dtheta * ip.d_o_dtheta) * (2.0 * ip.epsilon() / ip.nu as f64 + r))
}

/// The attack stays below statistical noise when δ/α ≤ 1/ν.
pub fn functionality_retained(ip: &IntegrityParams) -> Result<bool> {
    ip.validate()?;
    Ok(ip.delta / ip.alpha <= 1.0 / ip.nu as f64)
}

/// Smallest flag count meeting δ/α ≤ 1/ν from the protocol's soundness bound,
/// never less than one: trap ⌈3nν/(2α)⌉, Clifford ⌈log₂(ν/α)⌉.
pub fn flags_required(protocol: Protocol, n: usize, nu: u64, alpha: f64) -> Result<u64> {
    if !(alpha > 0.0 && alpha <= 1.0) || nu == 0 {
        return Err(CryptoError::InvalidParams(format!("need alpha in (0, 1] and nu >= 1, got {alpha}, {nu}")));
    }
    let raw = match protocol {
        Protocol::Trap | Protocol::Delegated => (3.0 * n as f64 * nu as f64 / (2.0 * alpha) - 1e-9).ceil(),
        Protocol::Clifford => ((nu as f64 / alpha).log2() - 1e-12).ceil(),
    };
    Ok((raw.max(1.0)) as u64)
}
