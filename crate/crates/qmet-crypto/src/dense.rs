//! Dense simulation of protocol rounds and brute-force key averages.
//!
//! These evaluators apply the attack's operators literally and never use the
//! Pauli twirl, so they serve as the reference for the casework formulas.

use num_complex::Complex64 as C64;
use qmet_dense::{CMatrix, DensityMatrix};
use qmet_pauli::{clifford_to_matrix, enumerate_clifford};

use crate::attack::AttackSpec;
use crate::instance::{combinations, phase_encode, Instance, Layout};
use crate::keys::{local_table, TrapKey};
use crate::sum::chunk_map;
use crate::{check_size, Result, DENSE_CLIFFORD_MAX_M, DENSE_TRAP_MAX_M, ROUND_MAX_M};

const KEY_CHUNK: usize = 512;

/// (⊗_q U_q) ρ (⊗_q U_q)† with `None` meaning identity on that qubit.
pub fn apply_local(rho: &CMatrix, ops: &[Option<&CMatrix>]) -> CMatrix {
    let d = rho.dim();
    let m = ops.len();
    debug_assert_eq!(d, 1 << m);
    let mut out = rho.clone();
    for (q, u) in ops.iter().enumerate() {
        let Some(u) = u else { continue };
        let stride = 1usize << (m - 1 - q);
        let (u00, u01, u10, u11) = (u[(0, 0)], u[(0, 1)], u[(1, 0)], u[(1, 1)]);
        let data = out.data_mut();
        // rows
        for r0 in (0..d).filter(|r| r & stride == 0) {
            let r1 = r0 | stride;
            for c in 0..d {
                let (a0, a1) = (data[r0 * d + c], data[r1 * d + c]);
                data[r0 * d + c] = u00 * a0 + u01 * a1;
                data[r1 * d + c] = u10 * a0 + u11 * a1;
            }
        }
        // columns, multiplying by U† on the right
        let (c00, c01, c10, c11) = (u00.conj(), u01.conj(), u10.conj(), u11.conj());
        for r in 0..d {
            let row = &mut data[r * d..(r + 1) * d];
            for k0 in (0..d).filter(|k| k & stride == 0) {
                let k1 = k0 | stride;
                let (a0, a1) = (row[k0], row[k1]);
                row[k0] = a0 * c00 + a1 * c01;
                row[k1] = a0 * c10 + a1 * c11;
            }
        }
    }
    out
}

/// Encrypts (or decrypts) with the local Clifford whose table indices are `idx`.
pub(crate) fn local_conjugate(rho: &CMatrix, idx: &[usize], decrypt: bool) -> CMatrix {
    let table = local_table();
    let src = if decrypt { &table.unitaries_dag } else { &table.unitaries };
    let ops: Vec<Option<&CMatrix>> = idx.iter().map(|&i| Some(&src[i])).collect();
    apply_local(rho, &ops)
}

/// Key index k in 0..24^m as base-24 digits, qubit 0 most significant.
fn digits(mut k: usize, m: usize) -> Vec<usize> {
    let mut out = vec![0; m];
    for slot in out.iter_mut().rev() {
        *slot = k % 24;
        k /= 24;
    }
    out
}

/// exp(-iθZ/2) on the data qubits of a layout, identity on flags.
fn encode_on_layout(rho: &CMatrix, layout: &Layout, theta: f64) -> CMatrix {
    let gate = CMatrix::diag(&[C64::from_polar(1.0, -0.5 * theta), C64::from_polar(1.0, 0.5 * theta)]);
    let ops: Vec<Option<&CMatrix>> = (0..layout.m).map(|q| if layout.flag_mask >> q & 1 == 1 { None } else { Some(&gate) }).collect();
    apply_local(rho, &ops)
}

/// Key average over ⊗C_q of C† Γ(C σ C†) C, enumerating all 24^m keys.
pub fn twirl_local_dense(sigma: &CMatrix, attack: &AttackSpec) -> Result<CMatrix> {
    let m = sigma.dim().trailing_zeros() as usize;
    check_size("dense local-Clifford enumeration", m, DENSE_TRAP_MAX_M)?;
    attack.single_use(m)?;
    let keys = 24usize.pow(m as u32);
    let parts = chunk_map(keys, KEY_CHUNK, |range| -> Result<CMatrix> {
        let mut acc = CMatrix::zeros(sigma.dim());
        for k in range {
            let idx = digits(k, m);
            let enc = local_conjugate(sigma, &idx, false);
            let hit = attack.apply_dense(&enc)?;
            acc += &local_conjugate(&hit, &idx, true);
        }
        Ok(acc)
    });
    sum_parts(parts, sigma.dim(), keys)
}

/// Key average over the full m-qubit Clifford group (m ≤ 2).
pub fn twirl_clifford_dense(sigma: &CMatrix, attack: &AttackSpec) -> Result<CMatrix> {
    let m = sigma.dim().trailing_zeros() as usize;
    check_size("dense Clifford-group enumeration", m, DENSE_CLIFFORD_MAX_M)?;
    attack.single_use(m)?;
    let group = enumerate_clifford(m)?;
    let unitaries: Vec<CMatrix> = group.iter().map(clifford_to_matrix).collect::<std::result::Result<_, _>>()?;
    let parts = chunk_map(unitaries.len(), KEY_CHUNK, |range| -> Result<CMatrix> {
        let mut acc = CMatrix::zeros(sigma.dim());
        for u in &unitaries[range] {
            let hit = attack.apply_dense(&u.sandwich(sigma))?;
            acc += &u.dagger().sandwich(&hit);
        }
        Ok(acc)
    });
    sum_parts(parts, sigma.dim(), unitaries.len())
}

fn sum_parts(parts: Vec<Result<CMatrix>>, dim: usize, count: usize) -> Result<CMatrix> {
    let mut total = CMatrix::zeros(dim);
    for p in parts {
        total += &p?;
    }
    Ok(total.scale_re(1.0 / count as f64))
}

/// Key-averaged accepted data block, its trace and the soundness quantity.
#[derive(Debug, Clone, PartialEq)]
pub struct Eval {
    /// Σ_k Pr(k) ⟨0_F| ρ_f(k) |0_F⟩ on the data qubits.
    pub block: CMatrix,
    pub accept: f64,
    pub lhs: f64,
}

impl Eval {
    pub fn from_block(block: CMatrix, ideal: &[C64]) -> Self {
        let accept = block.trace().re;
        let fid = qmet_dense::matrix::inner(ideal, &block.apply(ideal)).re;
        Self { block, accept, lhs: (accept - fid).max(0.0) }
    }

    pub(crate) fn average(evals: Vec<CMatrix>, ideal: &[C64]) -> Self {
        let count = evals.len() as f64;
        let mut it = evals.into_iter();
        let mut total = it.next().expect("at least one layout");
        for b in it {
            total += &b;
        }
        Self::from_block(total.scale_re(1.0 / count), ideal)
    }
}

/// Trap code, one channel use, by dense key enumeration.
pub fn trap_single_dense(inst: &Instance, attack: &AttackSpec) -> Result<Eval> {
    let m = inst.m();
    check_size("dense trap-code evaluation", m, DENSE_TRAP_MAX_M)?;
    let rho = inst.density().into_matrix();
    let blocks = combinations(m, inst.t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let out = twirl_local_dense(&layout.embed(&rho), attack)?;
            Ok(layout.accepted_block(&out))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &inst.psi))
}

/// Trap code, two channel uses with independent keys, by dense enumeration.
/// The key average factorizes over the two independent local Cliffords.
pub fn trap_double_dense(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let m = inst.m();
    check_size("dense trap-code evaluation", m, DENSE_TRAP_MAX_M)?;
    let rho = inst.density().into_matrix();
    let blocks = combinations(m, inst.t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let s1 = twirl_local_dense(&layout.embed(&rho), first)?;
            let s2 = encode_on_layout(&s1, &layout, theta);
            let s3 = twirl_local_dense(&s2, second)?;
            Ok(layout.accepted_block(&s3))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &phase_encode(&inst.psi, theta)))
}

/// The broken two-use trap code that re-applies the first key on the way back.
pub fn reused_key_dense(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let m = inst.m();
    check_size("dense trap-code evaluation", m, DENSE_TRAP_MAX_M)?;
    first.single_use(m)?;
    second.single_use(m)?;
    let rho = inst.density().into_matrix();
    let keys = 24usize.pow(m as u32);
    let blocks = combinations(m, inst.t)
        .iter()
        .map(|flags| {
            let layout = Layout::new(m, flags)?;
            let rin = layout.embed(&rho);
            let parts = chunk_map(keys, KEY_CHUNK, |range| -> Result<CMatrix> {
                let mut acc = CMatrix::zeros(rin.dim());
                for k in range {
                    let idx = digits(k, m);
                    let s = local_conjugate(&first.apply_dense(&local_conjugate(&rin, &idx, false))?, &idx, true);
                    let s = encode_on_layout(&s, &layout, theta);
                    let s = local_conjugate(&second.apply_dense(&local_conjugate(&s, &idx, false))?, &idx, true);
                    acc += &s;
                }
                Ok(acc)
            });
            Ok(layout.accepted_block(&sum_parts(parts, rin.dim(), keys)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eval::average(blocks, &phase_encode(&inst.psi, theta)))
}

/// Clifford code, one channel use, flags on the trailing qubits.
pub fn clifford_single_dense(inst: &Instance, attack: &AttackSpec) -> Result<Eval> {
    let layout = Layout::trailing(inst.n, inst.t)?;
    let out = twirl_clifford_dense(&layout.embed(&inst.density().into_matrix()), attack)?;
    Ok(Eval::from_block(layout.accepted_block(&out), &inst.psi))
}

/// Clifford code, two channel uses with independent keys.
pub fn clifford_double_dense(inst: &Instance, first: &AttackSpec, second: &AttackSpec, theta: f64) -> Result<Eval> {
    let layout = Layout::trailing(inst.n, inst.t)?;
    let s1 = twirl_clifford_dense(&layout.embed(&inst.density().into_matrix()), first)?;
    let s2 = encode_on_layout(&s1, &layout, theta);
    let s3 = twirl_clifford_dense(&s2, second)?;
    Ok(Eval::from_block(layout.accepted_block(&s3), &phase_encode(&inst.psi, theta)))
}

/// Outcome of one trap-code round for a fixed key.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapRound {
    pub accept_prob: f64,
    /// Normalized data state after acceptance; `None` when acceptance is impossible.
    pub output: Option<DensityMatrix>,
}

/// Encrypt, attack, decrypt and measure the flags for one key.
pub fn trap_round_single(psi: &[C64], key: &TrapKey, attack: &AttackSpec) -> Result<TrapRound> {
    let m = key.m();
    check_size("dense trap-code round", m, ROUND_MAX_M)?;
    let layout = key.layout();
    let inst = Instance::new(layout.n(), key.t(), psi.to_vec())?;
    let rin = layout.embed(&inst.density().into_matrix());
    let hit = attack.apply_dense(&local_conjugate(&rin, key.indices(), false))?;
    let out = local_conjugate(&hit, key.indices(), true);
    let block = layout.accepted_block(&out);
    let accept_prob = block.trace().re.clamp(0.0, 1.0);
    let output = (accept_prob > 1e-14).then(|| DensityMatrix::new_unchecked(block.scale_re(1.0 / accept_prob)));
    Ok(TrapRound { accept_prob, output })
}
