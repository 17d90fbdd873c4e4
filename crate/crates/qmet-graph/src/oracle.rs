//! Dense reference computations on explicit state vectors and density matrices.

use num_complex::Complex64 as C64;
use qmet_dense::density::partial_trace_matrix;
use qmet_dense::matrix::pauli_1q;
use qmet_dense::{qfi_spectral, CMatrix, DensityMatrix, ThetaFamily};

use crate::graph::Graph;
use crate::{GraphError, Result};

pub const ORACLE_MAX_QUBITS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    X,
    Y,
    Z,
}

impl Encoding {
    fn pauli_index(self) -> usize {
        match self {
            Encoding::X => 1,
            Encoding::Y => 2,
            Encoding::Z => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Noise {
    None,
    /// Independent Z flips with probability p on every qubit.
    Dephasing(f64),
    /// Qubits traced out before encoding.
    Erasure(Vec<usize>),
}

/// CZ along every edge applied to |+>^n; qubit 0 is the most significant bit.
pub fn graph_state_vector(g: &Graph) -> Vec<C64> {
    let n = g.n();
    let amp = (0.5f64).powf(n as f64 / 2.0);
    let edges = g.edges();
    (0..1usize << n)
        .map(|k| {
            let bit = |q: usize| k >> (n - 1 - q) & 1 == 1;
            let odd = edges.iter().filter(|&&(u, v)| bit(u) && bit(v)).count() % 2 == 1;
            C64::new(if odd { -amp } else { amp }, 0.0)
        })
        .collect()
}

/// exp(-iθ P / 2) on one qubit.
pub fn rotation(enc: Encoding, theta: f64) -> CMatrix {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    &CMatrix::identity(2).scale_re(c) + &pauli_1q(enc.pauli_index()).scale(C64::new(0.0, -s))
}

/// Applies a single-qubit gate to every qubit of an n-qubit vector.
pub fn apply_all(v: &[C64], gate: &CMatrix) -> Vec<C64> {
    let n = v.len().trailing_zeros() as usize;
    let mut out = v.to_vec();
    for q in 0..n {
        let stride = 1usize << (n - 1 - q);
        for base in 0..v.len() {
            if base & stride != 0 {
                continue;
            }
            let (a, b) = (out[base], out[base | stride]);
            out[base] = gate[(0, 0)] * a + gate[(0, 1)] * b;
            out[base | stride] = gate[(1, 0)] * a + gate[(1, 1)] * b;
        }
    }
    out
}

/// Applies Z to every qubit in `mask` (bit q = qubit q).
fn apply_z_mask(v: &[C64], mask: u64, n: usize) -> Vec<C64> {
    v.iter()
        .enumerate()
        .map(|(k, a)| {
            let flips = (0..n).filter(|&q| mask >> q & 1 == 1 && k >> (n - 1 - q) & 1 == 1).count();
            if flips % 2 == 1 {
                -a
            } else {
                *a
            }
        })
        .collect()
}

/// Noisy graph state before encoding, on the surviving qubits.
pub fn noisy_graph_state(g: &Graph, noise: &Noise) -> Result<CMatrix> {
    let n = g.n();
    let psi = graph_state_vector(g);
    match noise {
        Noise::None => Ok(CMatrix::outer(&psi, &psi)),
        Noise::Dephasing(p) => {
            if !(0.0..=1.0).contains(p) {
                return Err(GraphError::BadProbability(*p));
            }
            let d = psi.len();
            let mut rho = CMatrix::zeros(d);
            for s in 0u64..(1u64 << n) {
                let w = s.count_ones() as i32;
                let weight = p.powi(w) * (1.0 - p).powi(n as i32 - w);
                if weight == 0.0 {
                    continue;
                }
                let v = apply_z_mask(&psi, s, n);
                rho += &CMatrix::outer(&v, &v).scale_re(weight);
            }
            Ok(rho)
        }
        Noise::Erasure(erased) => {
            for &x in erased {
                if x >= n {
                    return Err(GraphError::BadVertex(x));
                }
            }
            let keep: Vec<usize> = (0..n).filter(|q| !erased.contains(q)).collect();
            if keep.is_empty() {
                return Ok(CMatrix::identity(1));
            }
            Ok(partial_trace_matrix(&CMatrix::outer(&psi, &psi), &keep)?)
        }
    }
}

/// Spectral QFI of ρ_θ = U_θ ρ U_θ† with U_θ = exp(-iθ Σ_j P_j / 2) on the
/// surviving qubits, evaluated at θ = `theta`.
pub fn oracle_graph_qfi_at(g: &Graph, enc: Encoding, noise: &Noise, theta: f64) -> Result<f64> {
    if g.n() > ORACLE_MAX_QUBITS {
        return Err(GraphError::TooLarge { what: "dense graph oracle", n: g.n() });
    }
    let rho = noisy_graph_state(g, noise)?;
    if rho.dim() == 1 {
        return Ok(0.0);
    }
    let m = rho.dim().trailing_zeros() as usize;
    let fam = ThetaFamily::new(move |t| {
        let u = rotation(enc, t).kron_power(m);
        DensityMatrix::new_unchecked(u.sandwich(&rho))
    });
    Ok(qfi_spectral(&fam, theta)?)
}

/// Dense QFI at θ = 0.
pub fn oracle_graph_qfi(g: &Graph, enc: Encoding, noise: &Noise) -> Result<f64> {
    oracle_graph_qfi_at(g, enc, noise, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star4_noiseless() {
        let q = oracle_graph_qfi(&Graph::star(4), Encoding::X, &Noise::None).unwrap();
        assert!((q - 10.0).abs() < 1e-6, "{q}");
    }

    #[test]
    fn graph_state_is_normalized() {
        let v = graph_state_vector(&Graph::cycle(5));
        let n: f64 = v.iter().map(|a| a.norm_sqr()).sum();
        assert!((n - 1.0).abs() < 1e-14);
    }
}
