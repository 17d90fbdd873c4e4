//! Brute-force references for the closed forms.
//!
//! The amplitude oracle tracks the diagonal vector a_s = ⟨s|ρ|s⟩ and the
//! anti-diagonal vector b_s = ⟨s|ρ|s̄⟩ over the full register. Each interval
//! applies Kronecker powers of single-qubit propagators obtained from a
//! Taylor matrix exponential of the generators, followed by an explicit
//! correction matrix E. The density matrix is rebuilt from (a, b) and its
//! QFI taken spectrally with a finite-difference derivative in ω.
//!
//! The Lindblad oracle integrates the master equation directly on the
//! n-qubit density matrix.

use num_complex::Complex64 as C64;
use qmet_dense::matrix::{embed_1q, pauli_1q};
use qmet_dense::{evolve_lindblad_adaptive, evolve_lindblad_fixed, qfi_spectral, CMatrix, DensityMatrix, Jump, ThetaFamily};

use crate::sweep::Code;
use crate::{EccError, EccParams, Result};

/// Largest number of sensing qubits the amplitude oracle accepts.
pub const ORACLE_MAX_N: usize = 8;
/// Largest register the Lindblad oracle accepts.
pub const LINDBLAD_MAX_N: usize = 6;

type M2 = [[C64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// e^G for a 2x2 matrix by scaling and squaring with a Taylor series.
fn expm2(g: &M2) -> M2 {
    let norm: f64 = g.iter().flatten().map(|z| z.norm()).sum();
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.25 {
        scale *= 0.5;
        squarings += 1;
    }
    let gs = g.map(|row| row.map(|z| z * scale));
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut sum = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..=20 {
        term = m2_mul(&term, &gs).map(|row| row.map(|z| z / k as f64));
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = m2_mul(&sum, &sum);
    }
    sum
}

fn to_cmatrix(m: &M2) -> CMatrix {
    CMatrix::from_vec(2, vec![m[0][0], m[0][1], m[1][0], m[1][1]])
}

/// Diagonal and anti-diagonal amplitudes of the final state.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeOracleState {
    pub a_vec: Vec<f64>,
    pub b_vec: Vec<C64>,
    /// Whether the last qubit of the register is the ancilla.
    pub ancilla: bool,
}

impl AmplitudeOracleState {
    pub fn qubits(&self) -> usize {
        self.a_vec.len().trailing_zeros() as usize
    }

    /// ρ = Σ a_s|s⟩⟨s| + Σ b_s|s⟩⟨s̄|, with the anti-diagonal symmetrized.
    pub fn to_density(&self) -> DensityMatrix {
        let d = self.a_vec.len();
        let mask = d - 1;
        let mut m = CMatrix::zeros(d);
        let data = m.data_mut();
        for s in 0..d {
            data[s * d + s] = C64::new(self.a_vec[s], 0.0);
            let sb = s ^ mask;
            data[s * d + sb] = 0.5 * (self.b_vec[s] + self.b_vec[sb].conj());
        }
        DensityMatrix::new_unchecked(m)
    }
}

/// Correction matrix of the parity code on n sensing qubits plus a trailing
/// ancilla: each sensing bit is set equal to the ancilla bit with
/// probability 1 − p and to its complement with probability p.
fn parity_correction(n: usize, p: f64) -> CMatrix {
    let k0 = CMatrix::from_real(2, &[1.0 - p, 1.0 - p, p, p]);
    let k1 = CMatrix::from_real(2, &[p, p, 1.0 - p, 1.0 - p]);
    let p0 = CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]);
    let p1 = CMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]);
    &k0.kron_power(n).kron(&p0) + &k1.kron_power(n).kron(&p1)
}

/// Majority-vote correction of the bit-flip code.
fn bitflip_correction(n: usize) -> CMatrix {
    let d = 1usize << n;
    let mut e = CMatrix::zeros(d);
    let data = e.data_mut();
    for s in 0..d {
        let dst = if 2 * s.count_ones() as usize > n { d - 1 } else { 0 };
        data[dst * d + s] = C64::new(1.0, 0.0);
    }
    e
}

fn check_size(params: &EccParams, code: Code) -> Result<()> {
    params.validate()?;
    if params.n > ORACLE_MAX_N {
        return Err(EccError::TooLarge { what: "amplitude_oracle", n: params.n, max: ORACLE_MAX_N });
    }
    if code == Code::BitFlip && params.n.is_multiple_of(2) {
        return Err(EccError::EvenN(params.n));
    }
    Ok(())
}

/// Final (a, b) amplitudes for the given code.
pub fn amplitude_oracle_state(params: &EccParams, code: Code) -> Result<AmplitudeOracleState> {
    check_size(params, code)?;
    let (n, w, g, xi) = (params.n, params.omega, params.gamma, params.xi);
    let zero = C64::new(0.0, 0.0);
    let re = |x: f64| C64::new(x, 0.0);
    let gen_a = |rate: f64| [[re(-rate), re(rate)], [re(rate), re(-rate)]];
    let gen_b = [[C64::new(-g, -w), re(g)], [re(g), C64::new(-g, w)]];
    let scaled = |m: &M2, d: f64| m.map(|row| row.map(|z| z * d));

    let (rounds, d, ancilla) = match code {
        Code::None => (1, params.t, false),
        Code::Parity => (params.rounds()?, params.tau, true),
        Code::BitFlip => {
            if params.xi != 0.0 || params.p != 0.0 {
                return Err(EccError::WrongSpecialization("xi = 0 and p = 0"));
            }
            (params.rounds()?, params.tau, false)
        }
    };
    let mut prop_a = to_cmatrix(&expm2(&scaled(&gen_a(g), d))).kron_power(n);
    let mut prop_b = to_cmatrix(&expm2(&scaled(&gen_b, d))).kron_power(n);
    if ancilla {
        let anc = to_cmatrix(&expm2(&scaled(&gen_a(xi), d)));
        prop_a = prop_a.kron(&anc);
        prop_b = prop_b.kron(&anc);
    }
    let correction = match code {
        Code::None => None,
        Code::Parity => Some(parity_correction(n, params.p)),
        Code::BitFlip => Some(bitflip_correction(n)),
    };
    let dim = prop_a.dim();
    let mut a = vec![zero; dim];
    let mut b = vec![zero; dim];
    for v in [&mut a, &mut b] {
        v[0] = re(0.5);
        v[dim - 1] = re(0.5);
    }
    for _ in 0..rounds {
        a = prop_a.apply(&a);
        b = prop_b.apply(&b);
        if let Some(e) = &correction {
            a = e.apply(&a);
            b = e.apply(&b);
        }
    }
    Ok(AmplitudeOracleState { a_vec: a.iter().map(|z| z.re).collect(), b_vec: b, ancilla })
}

/// Finite-difference step in ω: 1e-5 · max(1/t, min(|ω|, 100/t)).
fn omega_step(params: &EccParams) -> f64 {
    let t = params.t.max(f64::MIN_POSITIVE);
    1e-5 * (1.0 / t).max(params.omega.abs().min(100.0 / t))
}

/// The final state as a family over ω.
pub fn amplitude_oracle(params: &EccParams, code: Code) -> Result<ThetaFamily<'static>> {
    amplitude_oracle_state(params, code)?;
    let base = *params;
    let h = omega_step(params);
    Ok(ThetaFamily::new(move |w| {
        amplitude_oracle_state(&base.with_omega(w), code).expect("parameters validated above").to_density()
    })
    .with_step(h))
}

pub fn amplitude_oracle_qfi(params: &EccParams, code: Code) -> Result<f64> {
    if params.t == 0.0 {
        return Ok(0.0);
    }
    let fam = amplitude_oracle(params, code)?;
    Ok(qfi_spectral(&fam, params.omega)?)
}

/// QFI of the uncorrected GHZ state from the master equation with
/// H = (ω/2)ΣZ and X jumps at rate γ on every qubit.
pub fn lindblad_oracle_no_ecc(n: usize, omega: f64, gamma: f64, t: f64) -> Result<f64> {
    if n == 0 || n > LINDBLAD_MAX_N {
        return Err(EccError::TooLarge { what: "lindblad_oracle_no_ecc", n, max: LINDBLAD_MAX_N });
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let d = 1usize << n;
    let mut psi = vec![C64::new(0.0, 0.0); d];
    psi[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    psi[d - 1] = psi[0];
    let rho0 = DensityMatrix::from_pure(&psi);
    let z_sum = (0..n).fold(CMatrix::zeros(d), |acc, k| &acc + &embed_1q(&pauli_1q(3), k, n).scale_re(0.5));
    let jumps: Vec<Jump> = (0..n).map(|k| Jump::new(gamma, embed_1q(&pauli_1q(1), k, n))).collect();
    let (_, steps) = evolve_lindblad_adaptive(&rho0, &z_sum.scale_re(omega), &jumps, t, 16)?;
    let params = EccParams::new(n, omega, gamma, t, t);
    let h = omega_step(&params);
    let fam = ThetaFamily::new(move |w| {
        let m = evolve_lindblad_fixed(rho0.matrix(), &z_sum.scale_re(w), &jumps, t, steps).expect("dimensions checked above");
        DensityMatrix::new_unchecked(m)
    })
    .with_step(h);
    Ok(qfi_spectral(&fam, omega)?)
}
