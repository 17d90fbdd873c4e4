//! The rank-2 GHZ mixture (1+R)/2 |ψ₊⟩⟨ψ₊| + (1−R)/2 |ψ₋⟩⟨ψ₋| with
//! |ψ±⟩ = (e^{-iθ/2}|0..0⟩ ± e^{iθ/2}|1..1⟩)/√2, its QFI, a product-basis
//! Fisher information, and coherence measures.

use crate::{EccError, Result};

/// 1 − R² at or below this is treated as the pure limit, where dR/dω is
/// dropped.
pub const PURE_GAP: f64 = 1e-13;

/// Positive ln R below this is accumulated rounding and is set to zero.
const LN_R_ROUNDING: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank2State {
    pub r: f64,
    pub theta: f64,
    /// dR/dω
    pub dr: f64,
    /// dθ/dω
    pub dtheta: f64,
    one_minus_r2: f64,
}

impl Rank2State {
    pub fn new(r: f64, theta: f64, dr: f64, dtheta: f64) -> Self {
        Self { r, theta, dr, dtheta, one_minus_r2: (1.0 - r) * (1.0 + r) }
    }

    /// Built from ln R so that 1 − R² keeps full relative precision near
    /// the pure limit.
    pub(crate) fn from_log(ln_r: f64, dln_r: f64, theta: f64, dtheta: f64) -> Self {
        // long products of unit-modulus factors drift a few ulps per round above R = 1
        let ln_r = if ln_r > 0.0 && ln_r < LN_R_ROUNDING { 0.0 } else { ln_r };
        let r = ln_r.exp();
        let om = -(2.0 * ln_r).exp_m1();
        let dr = if om <= PURE_GAP { 0.0 } else { r * dln_r };
        Self { r, theta, dr, dtheta, one_minus_r2: om }
    }

    pub fn one_minus_r2(&self) -> f64 {
        self.one_minus_r2
    }
}

/// Q = Ṙ²/(1 − R²) + R²θ̇²
pub fn rank2_qfi(s: &Rank2State) -> Result<f64> {
    if !(s.r >= 0.0 && s.r <= 1.0 + 1e-12) {
        return Err(EccError::InvalidParams(format!("R = {} outside [0, 1]", s.r)));
    }
    let phase = s.r * s.r * s.dtheta * s.dtheta;
    if s.r >= 1.0 - 1e-14 || s.one_minus_r2 <= 0.0 {
        if s.dr == 0.0 {
            return Ok(phase);
        }
        return Err(EccError::SingularPurity { r: s.r, dr: s.dr });
    }
    Ok(s.dr * s.dr / s.one_minus_r2 + phase)
}

/// Fisher information of the product measurement in the basis
/// {(|0⟩ ± e^{iα}|1⟩)/√2}^{⊗m}, computed outcome by outcome from
/// Tr(E_j ρ) = (1 + (−1)^j R cos(θ − α))/2^m with multiplicity C(m, j).
pub fn fisher_from_state(s: &Rank2State, alpha: f64, m: usize) -> f64 {
    let (sn, cs) = (s.theta - alpha).sin_cos();
    let x = s.r * cs;
    let dx = s.dr * cs - s.r * s.dtheta * sn;
    let mut ln_w = -(m as f64) * std::f64::consts::LN_2;
    let mut total = 0.0;
    for j in 0..=m {
        if j > 0 {
            ln_w += ((m + 1 - j) as f64).ln() - (j as f64).ln();
        }
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let w = ln_w.exp();
        let p = w * (1.0 + sign * x);
        let dp = w * sign * dx;
        if p <= 0.0 {
            if dp != 0.0 {
                return f64::INFINITY;
            }
            continue;
        }
        total += dp * dp / p;
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coherence {
    /// Geometric measure of entanglement (1 − √(1 − R²))/2.
    pub g: f64,
    /// (1 + R²)/2
    pub purity: f64,
    /// Von Neumann entropy in nats.
    pub entropy: f64,
}

pub fn coherence_report(r: f64) -> Result<Coherence> {
    if !(0.0..=1.0).contains(&r) {
        return Err(EccError::InvalidParams(format!("R = {r} outside [0, 1]")));
    }
    let om = (1.0 - r) * (1.0 + r);
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    Ok(Coherence {
        // (1 − √(1 − R²))/2 without cancellation at small R
        g: 0.5 * r * r / (1.0 + om.sqrt()),
        purity: 0.5 * (1.0 + r * r),
        entropy: -xlnx(0.5 * (1.0 + r)) - xlnx(0.5 * (1.0 - r)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qfi_examples() {
        let nt = 12.0;
        assert_eq!(rank2_qfi(&Rank2State::new(1.0, 0.3, 0.0, nt)).unwrap(), nt * nt);
        assert_eq!(rank2_qfi(&Rank2State::new(0.0, 0.3, 0.4, 7.0)).unwrap(), 0.4 * 0.4);
        let q = rank2_qfi(&Rank2State::new(0.6, 0.0, 0.1, 2.0)).unwrap();
        assert!((q - 1.455625).abs() < 1e-14);
    }

    #[test]
    fn singular_purity_is_reported() {
        let e = rank2_qfi(&Rank2State::new(1.0, 0.0, 0.1, 1.0)).unwrap_err();
        assert!(matches!(e, EccError::SingularPurity { .. }));
    }

    #[test]
    fn rounding_above_unit_radius_is_clamped() {
        let s = Rank2State::from_log(3e-12, 0.5, 0.1, 4.0);
        assert_eq!((s.r, s.dr, s.one_minus_r2()), (1.0, 0.0, 0.0));
        assert_eq!(rank2_qfi(&s).unwrap(), 16.0);
        let s = Rank2State::from_log(1e-6, 0.0, 0.0, 1.0);
        assert!(rank2_qfi(&s).is_err());
    }

    #[test]
    fn coherence_examples() {
        let c = coherence_report(1.0).unwrap();
        assert_eq!((c.g, c.purity, c.entropy), (0.5, 1.0, 0.0));
        let c = coherence_report(0.0).unwrap();
        assert!((c.g).abs() < 1e-16 && (c.purity - 0.5).abs() < 1e-16);
        assert!((c.entropy - std::f64::consts::LN_2).abs() < 1e-15);
        assert!((coherence_report(0.6).unwrap().g - 0.1).abs() < 1e-15);
    }

    #[test]
    fn entanglement_identity() {
        for k in 0..=100 {
            let r = k as f64 / 100.0;
            let g = coherence_report(r).unwrap().g;
            assert!((r * r - 4.0 * g * (1.0 - g)).abs() < 1e-12);
        }
    }

    #[test]
    fn fisher_on_phase_quadrature_is_phase_term() {
        let s = Rank2State::new(0.8, 0.4, 0.05, 3.0);
        let f = fisher_from_state(&s, 0.4 + std::f64::consts::FRAC_PI_2, 4);
        assert!((f - 0.64 * 9.0).abs() < 1e-12);
    }
}
