use num_complex::Complex64 as C64;

use crate::density::DensityMatrix;
use crate::matrix::CMatrix;
use crate::tolerances::{RK4_MAX_STEPS, RK4_TOL};
use crate::{DenseError, Result};

/// Jump operator `op` acting at `rate`.
#[derive(Debug, Clone)]
pub struct Jump {
    pub rate: f64,
    pub op: CMatrix,
}

impl Jump {
    pub fn new(rate: f64, op: CMatrix) -> Self {
        Self { rate, op }
    }
}

struct Generator<'a> {
    h: &'a CMatrix,
    jumps: Vec<(f64, &'a CMatrix, CMatrix, CMatrix)>,
}

impl<'a> Generator<'a> {
    fn new(h: &'a CMatrix, jumps: &'a [Jump]) -> Self {
        let jumps = jumps
            .iter()
            .filter(|j| j.rate != 0.0)
            .map(|j| {
                let dag = j.op.dagger();
                let ldl = dag.matmul(&j.op).scale_re(0.5);
                (j.rate, &j.op, dag, ldl)
            })
            .collect();
        Self { h, jumps }
    }

    /// -i[H, ρ] + Σ rate (L ρ L† - {L†L, ρ}/2)
    fn rhs(&self, rho: &CMatrix) -> CMatrix {
        let hr = self.h.matmul(rho);
        let rh = rho.matmul(self.h);
        let mut out = (&hr - &rh).scale(C64::new(0.0, -1.0));
        for (rate, l, ldag, half) in &self.jumps {
            let jump = l.matmul(rho).matmul(ldag);
            let anti = &half.matmul(rho) + &rho.matmul(half);
            out += &(&jump - &anti).scale_re(*rate);
        }
        out
    }

    fn rk4(&self, rho0: &CMatrix, t: f64, steps: usize) -> CMatrix {
        let dt = t / steps as f64;
        let mut rho = rho0.clone();
        for _ in 0..steps {
            let k1 = self.rhs(&rho);
            let k2 = self.rhs(&(&rho + &k1.scale_re(0.5 * dt)));
            let k3 = self.rhs(&(&rho + &k2.scale_re(0.5 * dt)));
            let k4 = self.rhs(&(&rho + &k3.scale_re(dt)));
            let mut incr = k1;
            incr += &k2.scale_re(2.0);
            incr += &k3.scale_re(2.0);
            incr += &k4;
            rho += &incr.scale_re(dt / 6.0);
        }
        rho
    }
}

fn check_dims(rho0: &CMatrix, h: &CMatrix, jumps: &[Jump]) -> Result<()> {
    if h.dim() != rho0.dim() {
        return Err(DenseError::DimMismatch(rho0.dim(), h.dim()));
    }
    for j in jumps {
        if j.op.dim() != rho0.dim() {
            return Err(DenseError::DimMismatch(rho0.dim(), j.op.dim()));
        }
        if !(j.rate >= 0.0) {
            return Err(DenseError::InvalidDensity(format!("negative jump rate {}", j.rate)));
        }
    }
    Ok(())
}

/// Smallest step count with rate·t/steps ≤ 0.05 for every jump and ‖H‖·t/steps ≤ 0.05.
fn minimum_steps(h: &CMatrix, jumps: &[Jump], t: f64) -> usize {
    let rate = jumps.iter().map(|j| j.rate * j.op.max_abs().powi(2)).fold(0.0, f64::max);
    // the largest absolute row sum bounds the spectral norm of a Hermitian H
    let d = h.dim();
    let h_norm = (0..d).map(|i| h.row(i).iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
    let scale = rate.max(h_norm);
    ((scale * t / 0.05).ceil() as usize).max(1)
}

/// Fixed-step RK4 with exactly `steps` steps. Works on any matrix, so it can
/// also be used on perturbed families without re-validating the state.
pub fn evolve_lindblad_fixed(
    rho0: &CMatrix,
    h: &CMatrix,
    jumps: &[Jump],
    t: f64,
    steps: usize,
) -> Result<CMatrix> {
    check_dims(rho0, h, jumps)?;
    Ok(Generator::new(h, jumps).rk4(rho0, t, steps.max(1)))
}

/// RK4 with step doubling until successive results agree to `RK4_TOL` in max
/// norm. Returns the state and the step count that was accepted.
pub fn evolve_lindblad_adaptive(
    rho0: &DensityMatrix,
    h: &CMatrix,
    jumps: &[Jump],
    t: f64,
    steps: usize,
) -> Result<(DensityMatrix, usize)> {
    check_dims(rho0.matrix(), h, jumps)?;
    let gen = Generator::new(h, jumps);
    let mut s = steps.max(minimum_steps(h, jumps, t));
    let mut prev = gen.rk4(rho0.matrix(), t, s);
    loop {
        let next_s = s * 2;
        if next_s > RK4_MAX_STEPS {
            return Err(DenseError::StepTooCoarse(RK4_MAX_STEPS));
        }
        let next = gen.rk4(rho0.matrix(), t, next_s);
        if next.max_diff(&prev) < RK4_TOL {
            return Ok((DensityMatrix::new_unchecked(next), next_s));
        }
        prev = next;
        s = next_s;
    }
}

/// Lindblad evolution for time `t` starting from `steps` RK4 steps and
/// refining as needed.
pub fn evolve_lindblad(
    rho0: &DensityMatrix,
    h: &CMatrix,
    jumps: &[Jump],
    t: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    evolve_lindblad_adaptive(rho0, h, jumps, t, steps).map(|(r, _)| r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::pauli_1q;

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn unitary_limit_keeps_purity() {
        let r = 0.5f64.sqrt();
        let plus = DensityMatrix::from_pure(&[c(r), c(r)]);
        let h = pauli_1q(3).scale_re(0.5 * 1.3);
        let out = evolve_lindblad(&plus, &h, &[], 2.0, 10).unwrap();
        assert!((out.purity() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn x_jump_fixes_plus_state() {
        let r = 0.5f64.sqrt();
        let plus = DensityMatrix::from_pure(&[c(r), c(r)]);
        let jumps = [Jump::new(0.7, pauli_1q(1))];
        let out = evolve_lindblad(&plus, &CMatrix::zeros(2), &jumps, 1.5, 10).unwrap();
        assert!(out.matrix().max_diff(plus.matrix()) < 1e-12);
    }

    #[test]
    fn x_jump_relaxes_population() {
        let zero = DensityMatrix::from_pure(&[c(1.0), c(0.0)]);
        let (g, t) = (0.4, 1.1);
        let out = evolve_lindblad(&zero, &CMatrix::zeros(2), &[Jump::new(g, pauli_1q(1))], t, 10).unwrap();
        let want = 0.5 * (1.0 + (-2.0 * g * t).exp());
        assert!((out.matrix()[(0, 0)].re - want).abs() < 1e-9);
    }
}
