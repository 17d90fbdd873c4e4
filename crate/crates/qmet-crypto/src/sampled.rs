//! Monte-Carlo soundness estimates over random keys and attack Paulis.
//!
//! Trial i draws from its own ChaCha8 stream (master seed, stream i), so the
//! estimate does not depend on how trials are spread over threads.

use num_complex::Complex64 as C64;
use qmet_dense::matrix::inner;
use qmet_pauli::{random_clifford, PauliString};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::attack::{AttackSpec, PauliSampler};
use crate::instance::{phase_encode, Instance, Layout};
use crate::keys::conjugate_local;
use crate::sum::{chunk_map, mean_stderr};
use crate::{check_size, CryptoError, Result, SAMPLED_MAX_M};

const TRIAL_CHUNK: usize = 256;

/// Sample means with standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub lhs: f64,
    pub stderr: f64,
    pub accept: f64,
}

pub(crate) fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum KeyFamily {
    Trap,
    Clifford,
}

/// Draws a key and returns the map P ↦ C†PC on masks together with the layout.
fn draw_key(family: KeyFamily, n: usize, t: usize, rng: &mut ChaCha8Rng) -> (Layout, Box<dyn Fn(u64, u64) -> (u64, u64)>) {
    let m = n + t;
    match family {
        KeyFamily::Trap => {
            let flags = sample(rng, m, t).into_vec();
            let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..24)).collect();
            let layout = Layout::new(m, &flags).expect("sampled flags are valid");
            (layout, Box::new(move |x, z| conjugate_local(&idx, x, z)))
        }
        KeyFamily::Clifford => {
            let inv = random_clifford(m, rng).inverse();
            let layout = Layout::trailing(n, t).expect("t >= 1");
            (
                layout,
                Box::new(move |x, z| {
                    let p = inv.apply(&PauliString::hermitian(m, x, z, false));
                    (p.x_mask(), p.z_mask())
                }),
            )
        }
    }
}

fn check(inst: &Instance, trials: usize) -> Result<()> {
    check_size("Monte-Carlo soundness", inst.m(), SAMPLED_MAX_M)?;
    if trials < 2 {
        return Err(CryptoError::InvalidParams(format!("need at least 2 trials, got {trials}")));
    }
    Ok(())
}

fn summarize(values: Vec<(f64, f64)>) -> Estimate {
    let (lhs_v, acc_v): (Vec<f64>, Vec<f64>) = values.into_iter().unzip();
    let (lhs, stderr) = mean_stderr(&lhs_v);
    let (accept, _) = mean_stderr(&acc_v);
    Estimate { lhs, stderr, accept }
}

fn run(trials: usize, f: impl Fn(u64) -> (f64, f64) + Sync) -> Estimate {
    let chunks = chunk_map(trials, TRIAL_CHUNK, |range| range.map(|i| f(i as u64)).collect::<Vec<_>>());
    summarize(chunks.into_iter().flatten().collect())
}

fn data_image(layout: &Layout, psi: &[C64], x: u64, z: u64) -> Vec<C64> {
    PauliString::hermitian(layout.n(), layout.data_mask(x), layout.data_mask(z), false).apply_vec(psi)
}

/// One channel use: per trial, the value Pr(accept)·(1 − F) for one key and
/// one attack Pauli, which is either 0 or 1 − |⟨ψ|P̃_D|ψ⟩|².
pub(crate) fn single(family: KeyFamily, inst: &Instance, attack: &AttackSpec, trials: usize, seed: u64) -> Result<Estimate> {
    check(inst, trials)?;
    let sampler: PauliSampler = attack.sampler(inst.m())?;
    Ok(run(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let (layout, conj) = draw_key(family, inst.n, inst.t, &mut rng);
        let (x, z) = sampler.sample(&mut rng);
        let (px, pz) = conj(x, z);
        if px & layout.flag_mask != 0 {
            return (0.0, 0.0);
        }
        let img = data_image(&layout, &inst.psi, px, pz);
        (1.0 - inner(&inst.psi, &img).norm_sqr(), 1.0)
    }))
}

/// Two channel uses with independent keys and a shared flag layout.
pub(crate) fn double(
    family: KeyFamily,
    inst: &Instance,
    first: &AttackSpec,
    second: &AttackSpec,
    theta: f64,
    trials: usize,
    seed: u64,
) -> Result<Estimate> {
    check(inst, trials)?;
    let m = inst.m();
    let (s1, s2) = (first.sampler(m)?, second.sampler(m)?);
    let phi = phase_encode(&inst.psi, theta);
    Ok(run(trials, |i| {
        let mut rng = trial_rng(seed, i);
        let (layout, conj1) = draw_key(family, inst.n, inst.t, &mut rng);
        let conj2: Box<dyn Fn(u64, u64) -> (u64, u64)> = match family {
            KeyFamily::Trap => {
                let idx: Vec<usize> = (0..m).map(|_| rng.gen_range(0..24)).collect();
                Box::new(move |x, z| conjugate_local(&idx, x, z))
            }
            KeyFamily::Clifford => draw_key(family, inst.n, inst.t, &mut rng).1,
        };
        let (x1, z1) = s1.sample(&mut rng);
        let (x2, z2) = s2.sample(&mut rng);
        let (px, pz) = conj1(x1, z1);
        let (qx, qz) = conj2(x2, z2);
        if (px ^ qx) & layout.flag_mask != 0 {
            return (0.0, 0.0);
        }
        let mid = phase_encode(&data_image(&layout, &inst.psi, px, pz), theta);
        let out = data_image(&layout, &mid, qx, qz);
        (1.0 - inner(&phi, &out).norm_sqr(), 1.0)
    }))
}
