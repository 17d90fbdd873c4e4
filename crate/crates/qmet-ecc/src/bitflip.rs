//! The n-qubit bit-flip code: after every interval each block |j⟩⟨j̄| is
//! mapped to |0..0⟩⟨1..1| when the Hamming weight of j is below n/2 and to
//! |1..1⟩⟨0..0| otherwise. The two surviving coherences obey a 2x2
//! recurrence [[η₋, ζ₊], [ζ₋, η₊]] started from (1/2, 1/2).

use crate::dual::{mat_pow, mat_vec, Dual};
use crate::factors::{leaves, Leaves};
use crate::noecc::TINY_R;
use crate::rank2::{rank2_qfi, Rank2State};
use crate::{EccError, EccParams, Result};

/// (η±, ζ±) with η± = Σ_{m≤⌊n/2⌋} C(n,m) x̂±^{n−m} ŷ^m and
/// ζ± = Σ_{m≤⌊n/2⌋} C(n,m) x̂±^m ŷ^{n−m}.
pub(crate) fn eta_zeta(lv: &Leaves, n: usize) -> [Dual; 4] {
    let mut eta_m = Dual::zero();
    let mut eta_p = Dual::zero();
    let mut zeta_m = Dual::zero();
    let mut zeta_p = Dual::zero();
    let mut binom = 1.0;
    for m in 0..=n / 2 {
        if m > 0 {
            binom *= (n + 1 - m) as f64 / m as f64;
        }
        let (hi, lo) = ((n - m) as u64, m as u64);
        let (yh, yl) = (lv.y.powu(hi), lv.y.powu(lo));
        eta_m = eta_m + (lv.xm.powu(hi) * yl).scale(binom);
        eta_p = eta_p + (lv.xp.powu(hi) * yl).scale(binom);
        zeta_m = zeta_m + (lv.xm.powu(lo) * yh).scale(binom);
        zeta_p = zeta_p + (lv.xp.powu(lo) * yh).scale(binom);
    }
    [eta_m, eta_p, zeta_m, zeta_p]
}

pub fn bitflip_state(params: &EccParams) -> Result<Rank2State> {
    if params.xi != 0.0 || params.p != 0.0 {
        return Err(EccError::WrongSpecialization("xi = 0 and p = 0"));
    }
    if params.n.is_multiple_of(2) {
        return Err(EccError::EvenN(params.n));
    }
    let rounds = params.rounds()?;
    if rounds == 0 {
        return Ok(Rank2State::new(1.0, 0.0, 0.0, 0.0));
    }
    let lv = leaves(params.omega, params.gamma, params.tau);
    let [eta_m, eta_p, zeta_m, zeta_p] = eta_zeta(&lv, params.n);
    let m = [[eta_m, zeta_p], [zeta_m, eta_p]];
    let half = Dual::real(0.5);
    let b0 = mat_vec(&mat_pow(&m, rounds), [half, half])[0];
    let bn = b0.norm();
    if 2.0 * bn <= TINY_R {
        return Ok(Rank2State::new(0.0, 0.0, 2.0 * b0.d.norm(), 0.0));
    }
    let ld = b0.log_derivative();
    Ok(Rank2State::from_log((2.0 * bn).ln(), ld.re, -b0.v.arg(), -ld.im))
}

/// QFI of the bit-flip code for odd n with a perfect correction.
pub fn qfi_bitflip(params: &EccParams) -> Result<f64> {
    rank2_qfi(&bitflip_state(params)?)
}
