//! The parity-check code: the GHZ register is corrected every τ using a
//! (possibly dephased) ancilla and a syndrome that flips with probability p.
//!
//! After T = t/τ rounds the coherence is z = r^{nT}[M̂^{T-1} υ̂]₀ with
//! M̂ = [[ĉ_ξ q₋ⁿ, ŝ_ξ q₊ⁿ], [ŝ_ξ q₋ⁿ, ĉ_ξ q₊ⁿ]], υ̂± = ĉ_ξ e^{±inφ} + ŝ_ξ e^{∓inφ},
//! q± = (1 − p)e^{±iφ} + p e^{∓iφ} and ĉ_ξ, ŝ_ξ the damped cosh/sinh of ξτ.
//! The block weights sum to one, so the final state is rank 2 with R = |z|.

use num_complex::Complex64 as C64;

use crate::dual::{mat_pow, mat_vec, Dual};
use crate::factors::leaves;
use crate::noecc::TINY_R;
use crate::rank2::{fisher_from_state, rank2_qfi, Rank2State, PURE_GAP};
use crate::{EccError, EccParams, Result};

/// e^{-x}cosh x and e^{-x}sinh x.
fn damped_cosh_sinh(x: f64) -> (f64, f64) {
    (0.5 * (1.0 + (-2.0 * x).exp()), -0.5 * (-2.0 * x).exp_m1())
}

fn require_ideal(params: &EccParams) -> Result<()> {
    if params.xi != 0.0 || params.p != 0.0 {
        return Err(EccError::WrongSpecialization("xi = 0 and p = 0"));
    }
    Ok(())
}

/// Final rank-2 state of the general recurrence.
pub fn parity_state(params: &EccParams) -> Result<Rank2State> {
    let rounds = params.rounds()?;
    if rounds == 0 {
        return Ok(Rank2State::new(1.0, 0.0, 0.0, 0.0));
    }
    let n = params.n as u64;
    let lv = leaves(params.omega, params.gamma, params.tau);
    let (cx, sx) = damped_cosh_sinh(params.xi * params.tau);
    let u = lv.unit;
    let ub = u.conj();
    let p = params.p;
    let qp = u.scale(1.0 - p) + ub.scale(p);
    let qm = ub.scale(1.0 - p) + u.scale(p);
    let (big_p, big_m) = (qp.powu(n), qm.powu(n));
    let m = [[big_m.scale(cx), big_p.scale(sx)], [big_m.scale(sx), big_p.scale(cx)]];
    let (un, ubn) = (u.powu(n), ub.powu(n));
    let upsilon = [ubn.scale(cx) + un.scale(sx), un.scale(cx) + ubn.scale(sx)];
    let w = mat_vec(&mat_pow(&m, rounds - 1), upsilon)[0];
    Ok(state_from_block(&lv, n * rounds, w))
}

/// Rank2State for z = r^{big_n}·w.
fn state_from_block(lv: &crate::factors::Leaves, big_n: u64, w: Dual) -> Rank2State {
    let wn = w.norm();
    let bn = big_n as f64;
    let scale = (bn * lv.ln_r).exp();
    if wn * scale <= TINY_R {
        // ż = r^N (ẇ + N (ṙ/r) w)
        let dz = (w.d + w.v * (bn * lv.dln_r)).norm() * scale;
        return Rank2State::new(0.0, 0.0, dz, 0.0);
    }
    let ld = w.log_derivative();
    Rank2State::from_log(bn * lv.ln_r + wn.ln(), bn * lv.dln_r + ld.re, -w.v.arg(), -ld.im)
}

/// QFI of the general code for any ξ ≥ 0 and p ∈ [0, 1].
pub fn qfi_parity(params: &EccParams) -> Result<f64> {
    rank2_qfi(&parity_state(params)?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealDiagnostics {
    /// r^{2nt/τ}
    pub r_pow: f64,
    /// Q₁/(n²t² r^{2nt/τ})
    pub f: f64,
    pub qfi: f64,
}

/// Q₁ = n²t² r^{2N} f with N = nt/τ and
/// f = (1/τ²)[(ṙ/r)²/(1 − r^{2N}) + φ̇²].
pub fn ideal_diagnostics(params: &EccParams) -> Result<IdealDiagnostics> {
    require_ideal(params)?;
    let rounds = params.rounds()?;
    if rounds == 0 {
        return Ok(IdealDiagnostics { r_pow: 1.0, f: 0.0, qfi: 0.0 });
    }
    let lv = leaves(params.omega, params.gamma, params.tau);
    let big_n = (params.n as u64 * rounds) as f64;
    let r_pow = (2.0 * big_n * lv.ln_r).exp();
    let gap = -(2.0 * big_n * lv.ln_r).exp_m1();
    let radial = if gap <= PURE_GAP { 0.0 } else { lv.dln_r * lv.dln_r / gap };
    let dphi = lv.dphi();
    let f = (radial + dphi * dphi) / (params.tau * params.tau);
    Ok(IdealDiagnostics { r_pow, f, qfi: params.heisenberg() * r_pow * f })
}

/// Q₁, the ideal code with a noiseless ancilla and perfect syndromes.
pub fn qfi_parity_ideal(params: &EccParams) -> Result<f64> {
    Ok(ideal_diagnostics(params)?.qfi)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyAncilla {
    /// Q₂
    pub qfi: f64,
    /// (Q₁ − Q₂)/(ξ n²t² r^{2nt/τ}); `None` when ξ = 0.
    pub g_estimate: Option<f64>,
}

/// Q₂, the code with a dephasing ancilla and perfect syndromes.
pub fn qfi_parity_noisy_ancilla(params: &EccParams) -> Result<NoisyAncilla> {
    if params.p != 0.0 {
        return Err(EccError::WrongSpecialization("p = 0"));
    }
    let qfi = qfi_parity(params)?;
    if params.xi == 0.0 {
        return Ok(NoisyAncilla { qfi, g_estimate: None });
    }
    let ideal = ideal_diagnostics(&EccParams { xi: 0.0, ..*params })?;
    let scale = params.xi * params.heisenberg() * ideal.r_pow;
    let g = if scale > 0.0 { Some((ideal.qfi - qfi) / scale) } else { None };
    Ok(NoisyAncilla { qfi, g_estimate: g })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImperfectDiagnostics {
    /// |q|^{2nt/τ}
    pub q_pow: f64,
    /// (r|q|)^{2nt/τ}
    pub rq_pow: f64,
    /// Q₃/(n²t² (r|q|)^{2nt/τ})
    pub h: f64,
    pub qfi: f64,
}

/// Q₃ from Re^{∓iθ} = (re^{∓iφ})^{nT}(q₋e^{iφ})^{n(T−1)}, with
/// |q|² = 1 − 4p(1 − p)sin²φ.
pub fn imperfect_diagnostics(params: &EccParams) -> Result<ImperfectDiagnostics> {
    if params.xi != 0.0 {
        return Err(EccError::WrongSpecialization("xi = 0"));
    }
    let rounds = params.rounds()?;
    if rounds == 0 {
        return Ok(ImperfectDiagnostics { q_pow: 1.0, rq_pow: 1.0, h: 0.0, qfi: 0.0 });
    }
    let lv = leaves(params.omega, params.gamma, params.tau);
    let p = params.p;
    let n = params.n as f64;
    let big_n = n * rounds as f64;
    let extra = n * (rounds - 1) as f64;
    let phi = lv.unit.v.arg();
    let dphi = lv.dphi();
    let (s, c) = phi.sin_cos();
    let k = 4.0 * p * (1.0 - p);
    let q2 = 1.0 - k * s * s;
    let ln_q = 0.5 * (-k * s * s).ln_1p();
    let dln_q = -k * s * c * dphi / q2;
    // arg(q₋e^{iφ}) = arg(1 − p + p e^{2iφ})
    let qe = C64::new(1.0 - p, 0.0) + C64::from_polar(p, 2.0 * phi);
    let darg_qe = if qe.norm() == 0.0 { 0.0 } else { (C64::new(0.0, 2.0 * p * dphi) * C64::from_polar(1.0, 2.0 * phi) / qe).im };
    let theta = -(-big_n * phi + extra * qe.arg());
    let dtheta = big_n * dphi - extra * darg_qe;
    let state = if q2 <= 0.0 {
        Rank2State::new(0.0, 0.0, 0.0, 0.0)
    } else {
        Rank2State::from_log(big_n * lv.ln_r + extra * ln_q, big_n * lv.dln_r + extra * dln_q, theta, dtheta)
    };
    let qfi = rank2_qfi(&state)?;
    let q_pow = (2.0 * big_n * ln_q).exp();
    let rq_pow = (2.0 * big_n * (lv.ln_r + ln_q)).exp();
    let denom = params.heisenberg() * rq_pow;
    Ok(ImperfectDiagnostics { q_pow, rq_pow, h: if denom > 0.0 { qfi / denom } else { 0.0 }, qfi })
}

/// Q₃, the code with a noiseless ancilla and syndrome error probability p.
pub fn qfi_parity_imperfect(params: &EccParams) -> Result<f64> {
    Ok(imperfect_diagnostics(params)?.qfi)
}

/// The recurrence with unscaled cosh/sinh entries, single-qubit q± and
/// exponent n(T − 1), scaled by r^{nT} e^{−ξt}. Agrees with `qfi_parity`
/// only when ξ = 0 or n = 1; kept for comparison.
pub fn qfi_parity_literal(params: &EccParams) -> Result<f64> {
    let rounds = params.rounds()?;
    if rounds == 0 {
        return Ok(0.0);
    }
    let n = params.n as u64;
    let lv = leaves(params.omega, params.gamma, params.tau);
    let x = params.xi * params.tau;
    let (cx, sx) = (x.cosh(), x.sinh());
    let u = lv.unit;
    let ub = u.conj();
    let p = params.p;
    let qp = u.scale(1.0 - p) + ub.scale(p);
    let qm = ub.scale(1.0 - p) + u.scale(p);
    let m = [[qm.scale(cx), qp.scale(sx)], [qm.scale(sx), qp.scale(cx)]];
    let (un, ubn) = (u.powu(n), ub.powu(n));
    let upsilon = [ubn.scale(cx) + un.scale(sx), un.scale(cx) + ubn.scale(sx)];
    let w = mat_vec(&mat_pow(&m, n * (rounds - 1)), upsilon)[0].scale((-params.xi * params.t).exp());
    rank2_qfi(&state_from_block(&lv, n * rounds, w))
}

/// Fisher information for ω of the product measurement at angle α, from the
/// explicit outcome distribution of the ideal code.
pub fn fisher_alpha(params: &EccParams, alpha: f64) -> Result<f64> {
    require_ideal(params)?;
    let s = parity_state(params)?;
    Ok(fisher_from_state(&s, alpha, params.n + 1))
}

/// (t_analytic, t_numeric) for the ideal code. The analytic value is
/// 1/((2/3)nγω²τ²); the numeric one maximizes Q₁ over integer multiples of
/// τ by golden-section search in log t followed by a neighbour scan.
pub fn optimal_time(params: &EccParams) -> Result<(f64, f64)> {
    require_ideal(params)?;
    params.validate()?;
    if params.omega == 0.0 || params.gamma <= 0.0 {
        return Err(EccError::InvalidParams("optimal_time needs ω ≠ 0 and γ > 0".into()));
    }
    let tau = params.tau;
    let n = params.n as f64;
    let t_analytic = 1.0 / ((2.0 / 3.0) * n * params.gamma * params.omega * params.omega * tau * tau);
    let q_at = |k: u64| -> Result<f64> { qfi_parity_ideal(&EccParams { t: k as f64 * tau, ..*params }) };
    let snap = |x: f64| -> u64 { x.exp().round().max(1.0) as u64 };
    let (mut a, mut b) = (0.0f64, (20.0 * t_analytic / tau).max(10.0).ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (q_at(snap(c))?, q_at(snap(d))?);
    for _ in 0..200 {
        if snap(a) + 1 >= snap(b) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = q_at(snap(c))?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = q_at(snap(d))?;
        }
    }
    let centre = snap(0.5 * (a + b));
    let mut best = (centre, q_at(centre)?);
    for k in centre.saturating_sub(4).max(1)..=centre + 4 {
        let q = q_at(k)?;
        if q > best.1 {
            best = (k, q);
        }
    }
    Ok((t_analytic, best.0 as f64 * tau))
}

/// τ at which the ideal-code QFI with t = rounds·τ falls to half the
/// Heisenberg value, located by bisection in log τ.
pub fn collapse_onset(n: usize, omega: f64, gamma: f64, rounds: u64) -> Result<f64> {
    if rounds == 0 || !(gamma > 0.0) || omega == 0.0 {
        return Err(EccError::InvalidParams("collapse_onset needs rounds ≥ 1, γ > 0, ω ≠ 0".into()));
    }
    let normalized = |tau: f64| -> Result<f64> {
        let params = EccParams::new(n, omega, gamma, tau, rounds as f64 * tau);
        Ok(qfi_parity_ideal(&params)? / params.heisenberg())
    };
    let mut lo = (1e-12 / gamma).ln();
    if normalized(lo.exp())? < 0.5 {
        return Err(EccError::InvalidParams("normalized QFI already below 1/2 at the smallest τ".into()));
    }
    let mut hi = lo;
    loop {
        hi += std::f64::consts::LN_10;
        if normalized(hi.exp())? < 0.5 {
            break;
        }
        if hi > (1e3 / gamma).ln() {
            return Err(EccError::InvalidParams("no collapse found".into()));
        }
        lo = hi;
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if normalized(mid.exp())? >= 0.5 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}
