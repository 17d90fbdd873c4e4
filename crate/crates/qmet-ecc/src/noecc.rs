//! QFI of an n-qubit GHZ state after free evolution under transverse
//! dephasing, with no correction.
//!
//! The state splits into 2x2 blocks on {|j⟩, |j̄⟩}. A block with Hamming
//! weight h carries weight W_h = ĉ^{n-h}ŝ^h + ĉ^hŝ^{n-h} (with ĉ, ŝ the
//! damped cosh/sinh) and coherence z_h = x̂₋^{n-h}ŷ^h + x̂₊^hŷ^{n-h}, so each is
//! a rank-2 state with R_h = |z_h|/W_h.

use crate::factors::leaves;
use crate::rank2::{rank2_qfi, Rank2State};
use crate::{EccError, Result};

pub const NO_ECC_MAX_N: usize = 30;

/// Below this R the rank-2 QFI is replaced by its R → 0 limit |ż|².
pub(crate) const TINY_R: f64 = 1e-100;

pub fn qfi_no_ecc(n: usize, omega: f64, gamma: f64, t: f64) -> Result<f64> {
    if n == 0 {
        return Err(EccError::InvalidParams("n must be at least 1".into()));
    }
    if n > NO_ECC_MAX_N {
        return Err(EccError::TooLarge { what: "qfi_no_ecc", n, max: NO_ECC_MAX_N });
    }
    if !(gamma >= 0.0) || !(t >= 0.0) || !omega.is_finite() || !t.is_finite() {
        return Err(EccError::InvalidParams(format!("ω={omega}, γ={gamma}, t={t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let lv = leaves(omega, gamma, t);
    let mut binom = 1.0;
    let mut total = 0.0;
    for h in 0..=n {
        if h > 0 {
            binom *= (n + 1 - h) as f64 / h as f64;
        }
        let (hi, lo) = ((n - h) as i32, h as i32);
        let w = lv.c.powi(hi) * lv.s.powi(lo) + lv.c.powi(lo) * lv.s.powi(hi);
        if w == 0.0 {
            continue;
        }
        let z = lv.xm.powu((n - h) as u64) * lv.y.powu(h as u64) + lv.xp.powu(h as u64) * lv.y.powu((n - h) as u64);
        let zn = z.norm();
        if zn <= TINY_R * w {
            // Ṙ²/(1 − R²) + R²θ̇² → |ż|²/W² as R → 0
            let dr = z.d.norm() / w;
            total += binom * w * dr * dr;
            continue;
        }
        let r = (zn / w).min(1.0);
        let mut dr = (z.v.conj() * z.d).re / (zn * w);
        let dtheta = -z.log_derivative().im;
        if (1.0 - r) * (1.0 + r) <= 1e-12 {
            dr = 0.0;
        }
        total += binom * w * rank2_qfi(&Rank2State::new(r, -z.v.arg(), dr, dtheta))?;
    }
    Ok(0.5 * total)
}

/// Intercept of a quadratic least-squares fit of (1 − Q/(nt)²)/(γt)
/// against γt on twenty equally spaced points in (0, gt_max], with γ = 1 and
/// ω = ratio. Short-time theory puts it at 2 − 4/(3n).
pub fn no_ecc_decay_fit(n: usize, ratio: f64, gt_max: f64) -> Result<f64> {
    let k = 20;
    let mut xs = Vec::with_capacity(k);
    let mut ys = Vec::with_capacity(k);
    for i in 1..=k {
        let t = gt_max * i as f64 / k as f64;
        let q = qfi_no_ecc(n, ratio, 1.0, t)?;
        let nt = n as f64 * t;
        xs.push(t);
        ys.push((1.0 - q / (nt * nt)) / t);
    }
    Ok(quadratic_fit(&xs, &ys)[0])
}

/// Least-squares coefficients (a, b, c) of y ≈ a + b x + c x².
pub(crate) fn quadratic_fit(xs: &[f64], ys: &[f64]) -> [f64; 3] {
    let mut m = [[0.0f64; 4]; 3];
    for (&x, &y) in xs.iter().zip(ys) {
        let pw = [1.0, x, x * x];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += pw[i] * pw[j];
            }
            m[i][3] += pw[i] * y;
        }
    }
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).unwrap();
        m.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let f = m[row][col] / m[col][col];
                for k in col..4 {
                    m[row][k] -= f * m[col][k];
                }
            }
        }
    }
    [m[0][3] / m[0][0], m[1][3] / m[1][1], m[2][3] / m[2][2]]
}
