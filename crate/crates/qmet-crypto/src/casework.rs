//! Exact soundness through Pauli casework.
//!
//! After averaging over local Cliffords, a Pauli of support S is replaced by a
//! uniform mixture of the 3^|S| Paulis with the same support, and cross terms
//! between different Paulis vanish. Only the support weights of an attack
//! matter, so key enumeration reduces to sums over Pauli letters.

use num_complex::Complex64 as C64;
use qmet_dense::CMatrix;
use qmet_pauli::PauliString;

use crate::attack::AttackSpec;
use crate::dense::Eval;
use crate::instance::{combinations, phase_encode, Instance, Layout};
use crate::keys::{letter_bits, local_table};
use crate::{check_size, CryptoError, Result, CASEWORK_MAX_M, DOUBLE_CASEWORK_MAX_M};

/// Largest register for the reused-key casework.
pub const REUSED_MAX_M: usize = 8;

fn data_pauli(n: usize, dp: usize) -> PauliString {
    PauliString::hermitian(n, (dp >> n) as u64, (dp & ((1 << n) - 1)) as u64, false)
}

/// Twirled weight of every (data Pauli, flag X pattern) for one layout.
/// Index: data Pauli (x << n | z) times 2^t plus the flag X pattern
/// (bit j = j-th flag in sorted order).
fn layout_weights(layout: &Layout, support: &[f64]) -> Vec<f64> {
    let (m, n, t) = (layout.m, layout.n(), layout.flags.len());
    let mut out = vec![0.0; (1 << (2 * n)) << t];
    for (s, &ws) in support.iter().enumerate() {
        if ws <= 0.0 {
            continue;
        }
        let qubits: Vec<usize> = (0..m).filter(|q| s >> q & 1 == 1).collect();
        let each = ws / 3f64.powi(qubits.len() as i32);
        let combos = 3usize.pow(qubits.len() as u32);
        for mut c in 0..combos {
            let (mut x, mut z) = (0u64, 0u64);
            for &q in &qubits {
                let (bx, bz) = letter_bits((c % 3) as u8 + 1);
                c /= 3;
                x |= bx << q;
                z |= bz << q;
            }
            let fx = fx_pattern(layout, x);
            let dp = (layout.data_mask(x) as usize) << n | layout.data_mask(z) as usize;
            out[dp << t | fx] += each;
        }
    }
    out
}

fn fx_pattern(layout: &Layout, x: u64) -> usize {
    layout.flags.iter().enumerate().fold(0usize, |acc, (j, &q)| acc | (((x >> q) & 1) as usize) << j)
}

/// Trap code, one channel use.
pub fn trap_single(inst: &Instance, attack: &AttackSpec) -> Result<Eval> {
    let m = inst.m();
    check_size("trap-code casework", m, CASEWORK_MAX_M)?;
    let support = attack.support_weights(m)?;
    let n = inst.n;
    let images: Vec<Vec<C64>> = (0..1usize << (2 * n)).map(|dp| data_pauli(n, dp).apply_vec(&inst.psi)).collect();
    let blocks = combinations(m, inst.t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let w = layout_weights(&layout, &support);
            let t = inst.t;
            let mut block = CMatrix::zeros(1 << n);
            for (dp, v) in images.iter().enumerate() {
                let c = w[dp << t];
                if c > 0.0 {
                    block += &CMatrix::outer(v, v).scale_re(c);
                }
            }
            Ok(block)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &inst.psi))
}

/// Trap code, two channel uses with independent local Cliffords and a
/// shared flag layout. Flags return to |0> when the two decrypted Paulis
/// flip the same flags.
pub fn trap_double(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let m = inst.m();
    check_size("two-use trap-code casework", m, DOUBLE_CASEWORK_MAX_M)?;
    let (s1, s2) = (first.support_weights(m)?, second.support_weights(m)?);
    let (n, t) = (inst.n, inst.t);
    let phi = phase_encode(&inst.psi, theta);
    let paulis: Vec<PauliString> = (0..1usize << (2 * n)).map(|dp| data_pauli(n, dp)).collect();
    // U_θ P ψ for every data Pauli P
    let mid: Vec<Vec<C64>> = paulis.iter().map(|p| phase_encode(&p.apply_vec(&inst.psi), theta)).collect();
    let blocks = combinations(m, t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let (w1, w2) = (layout_weights(&layout, &s1), layout_weights(&layout, &s2));
            let mut block = CMatrix::zeros(1 << n);
            for (d1, v) in mid.iter().enumerate() {
                for (d2, q) in paulis.iter().enumerate() {
                    let c: f64 = (0..1usize << t).map(|fx| w1[d1 << t | fx] * w2[d2 << t | fx]).sum();
                    if c > 0.0 {
                        let out = q.apply_vec(v);
                        block += &CMatrix::outer(&out, &out).scale_re(c);
                    }
                }
            }
            Ok(block)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &phi))
}

/// Clifford code, one channel use, from the identity weight a alone:
/// the key average maps ρ to (a − c)ρ + c·2^m·I with c = (1 − a)/(4^m − 1).
pub fn clifford_single(inst: &Instance, attack: &AttackSpec) -> Result<Eval> {
    let m = inst.m();
    let a = attack.identity_weight(m)?;
    let (state, scalar) = clifford_affine(m, a, 1.0, 0.0);
    Ok(Eval::from_block(pure_plus_identity(&inst.psi, state, scalar), &inst.psi))
}

/// Clifford code, two channel uses. With b the identity weight of the
/// second attack, the output is (b − c')(a − c)Λρ + 2^m[(b − c')c + c']·I.
pub fn clifford_double(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let m = inst.m();
    let a = first.identity_weight(m)?;
    let b = second.identity_weight(m)?;
    let (s1, i1) = clifford_affine(m, a, 1.0, 0.0);
    // the intermediate state has unit trace, so the second twirl maps
    // s1·Λρ + i1·I to (b − c')(s1·Λρ + i1·I) + c'·2^m·I
    let (state, scalar) = clifford_affine(m, b, s1, i1);
    let phi = phase_encode(&inst.psi, theta);
    Ok(Eval::from_block(pure_plus_identity(&phi, state, scalar), &phi))
}

/// Applies the Clifford twirl with identity weight `a` to s·ρ + i·I
/// (unit trace), returning the new (s, i).
fn clifford_affine(m: usize, a: f64, s: f64, i: f64) -> (f64, f64) {
    if m >= 32 {
        return (0.0, 0.0);
    }
    let dm = (1u64 << m) as f64;
    let c = (1.0 - a) / (dm * dm - 1.0);
    ((a - c) * s, (a - c) * i + c * dm)
}

fn pure_plus_identity(psi: &[C64], s: f64, i: f64) -> CMatrix {
    let mut block = CMatrix::outer(psi, psi).scale_re(s);
    block += &CMatrix::identity(psi.len()).scale_re(i);
    block
}

/// The broken two-use trap code that reuses one key for both uses, with
/// Pauli-channel attacks. For a shared local Clifford the two decrypted
/// Paulis are correlated qubit by qubit; the joint letter distribution is
/// read from the 24-element table.
pub fn reused_key(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let m = inst.m();
    check_size("reused-key casework", m, REUSED_MAX_M)?;
    if !first.is_pauli_mixture() || !second.is_pauli_mixture() {
        return Err(CryptoError::BadAttack("reused-key casework needs Pauli-channel attacks".into()));
    }
    let (w1, w2) = (first.pauli_weights(m)?, second.pauli_weights(m)?);
    let (n, t) = (inst.n, inst.t);
    let phi = phase_encode(&inst.psi, theta);
    let table = local_table();
    let blocks = combinations(m, t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let mut block = CMatrix::zeros(1 << n);
            for &(x1, z1, p1) in &w1 {
                for &(x2, z2, p2) in &w2 {
                    // per qubit: distribution over (letter of C†PC, letter of C†QC)
                    let per_qubit: Vec<Vec<((u8, u8), f64)>> = (0..m)
                        .map(|q| {
                            let l1 = crate::keys::bits_letter(x1 >> q, z1 >> q) as usize;
                            let l2 = crate::keys::bits_letter(x2 >> q, z2 >> q) as usize;
                            let mut d: Vec<((u8, u8), f64)> = Vec::new();
                            for c in 0..24 {
                                let key = (table.conj_inv[c][l1], table.conj_inv[c][l2]);
                                match d.iter_mut().find(|e| e.0 == key) {
                                    Some(e) => e.1 += 1.0 / 24.0,
                                    None => d.push((key, 1.0 / 24.0)),
                                }
                            }
                            d
                        })
                        .collect();
                    accumulate_reused(&layout, &per_qubit, p1 * p2, &inst.psi, theta, &mut block);
                }
            }
            Ok(block)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &phi))
}

fn accumulate_reused(
    layout: &Layout,
    per_qubit: &[Vec<((u8, u8), f64)>],
    weight: f64,
    psi: &[C64],
    theta: f64,
    block: &mut CMatrix,
) {
    let m = layout.m;
    let n = layout.n();
    let mut choice = vec![0usize; m];
    loop {
        let mut w = weight;
        let (mut x1, mut z1, mut x2, mut z2) = (0u64, 0u64, 0u64, 0u64);
        for q in 0..m {
            let ((a, b), p) = per_qubit[q][choice[q]];
            w *= p;
            let (ax, az) = letter_bits(a);
            let (bx, bz) = letter_bits(b);
            x1 |= ax << q;
            z1 |= az << q;
            x2 |= bx << q;
            z2 |= bz << q;
        }
        if (x1 ^ x2) & layout.flag_mask == 0 {
            let p = PauliString::hermitian(n, layout.data_mask(x1), layout.data_mask(z1), false);
            let q = PauliString::hermitian(n, layout.data_mask(x2), layout.data_mask(z2), false);
            let out = q.apply_vec(&phase_encode(&p.apply_vec(psi), theta));
            *block += &CMatrix::outer(&out, &out).scale_re(w);
        }
        // odometer over the per-qubit choices
        let mut q = 0;
        while q < m {
            choice[q] += 1;
            if choice[q] < per_qubit[q].len() {
                break;
            }
            choice[q] = 0;
            q += 1;
        }
        if q == m {
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_attack_is_sound() {
        let inst = Instance::ghz(2, 2).unwrap();
        let e = trap_single(&inst, &AttackSpec::Identity).unwrap();
        assert!(e.lhs.abs() < 1e-12);
        assert!((e.accept - 1.0).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_flags_accept_with_two_to_minus_t() {
        let inst = Instance::ghz(2, 3).unwrap();
        let e = trap_single(&inst, &AttackSpec::Depolarizing(1.0)).unwrap();
        assert!((e.accept - 0.125).abs() < 1e-12);
    }

    #[test]
    fn clifford_closed_form_matches_lhs_formula() {
        let inst = Instance::ghz(3, 2).unwrap();
        let a: AttackSpec = "mix:0.6*IIIII,0.4*XZIIY".parse().unwrap();
        let e = clifford_single(&inst, &a).unwrap();
        let want = 32.0 * 7.0 * 0.4 / 1023.0;
        assert!((e.lhs - want).abs() < 1e-12);
    }

    #[test]
    fn reused_key_identity_has_no_error() {
        let inst = Instance::ghz(1, 2).unwrap();
        let e = reused_key(&inst, &AttackSpec::Identity, &AttackSpec::Identity, 0.3).unwrap();
        assert!(e.lhs.abs() < 1e-12);
    }
}
