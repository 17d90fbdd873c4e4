use num_complex::Complex64 as C64;
use qmet_dense::CMatrix;

use crate::pauli::PauliString;
use crate::{PauliError, Result};

/// Coefficient below which a Pauli component is dropped.
const COEFF_CUT: f64 = 1e-14;

/// Kraus operators expanded in the Pauli basis: A_α = Σ_P a_{α,P} P.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliChannel {
    n: usize,
    /// terms[α] lists (a_{α,P}, P) with P Hermitian and sign +1.
    pub terms: Vec<Vec<(C64, PauliString)>>,
}

impl PauliChannel {
    pub fn n_qubits(&self) -> usize {
        self.n
    }

    /// Σ_{α,P} |a_{α,P}|², equal to 1 for a trace-preserving channel.
    pub fn completeness(&self) -> f64 {
        self.terms.iter().flatten().map(|(a, _)| a.norm_sqr()).sum()
    }

    /// Σ_P a_{α,P} P as a dense matrix.
    pub fn reconstruct(&self, alpha: usize) -> CMatrix {
        let mut out = CMatrix::zeros(1 << self.n);
        for (a, p) in &self.terms[alpha] {
            out += &p.to_matrix().scale(*a);
        }
        out
    }

    /// w_P = Σ_α |a_{α,P}|², keyed by the Pauli with sign +1.
    pub fn weights(&self) -> Vec<(PauliString, f64)> {
        let mut out: Vec<(PauliString, f64)> = Vec::new();
        for (a, p) in self.terms.iter().flatten() {
            match out.iter_mut().find(|(q, _)| q == p) {
                Some((_, w)) => *w += a.norm_sqr(),
                None => out.push((*p, a.norm_sqr())),
            }
        }
        out.sort_by_key(|(p, _)| (p.x_mask(), p.z_mask()));
        out
    }
}

/// a_{α,P} = 2^{-m} Tr(P A_α) for every Kraus operator and every Pauli.
pub fn channel_pauli_coeffs(kraus: &[CMatrix]) -> Result<PauliChannel> {
    let d = kraus.first().map(|k| k.dim()).ok_or(PauliError::NotTracePreserving(1.0))?;
    if !d.is_power_of_two() || d < 2 {
        return Err(PauliError::DimMismatch(d, d.next_power_of_two()));
    }
    if let Some(k) = kraus.iter().find(|k| k.dim() != d) {
        return Err(PauliError::DimMismatch(d, k.dim()));
    }
    let mut sum = CMatrix::zeros(d);
    for k in kraus {
        sum += &k.dagger().matmul(k);
    }
    let dev = sum.max_diff(&CMatrix::identity(d));
    if dev > 1e-9 {
        return Err(PauliError::NotTracePreserving(dev));
    }
    let n = d.trailing_zeros() as usize;
    let scale = 1.0 / d as f64;
    let terms = kraus
        .iter()
        .map(|a| {
            PauliString::all(n)
                .filter_map(|p| {
                    // Tr(P A) = Σ_k <k|P A|k> = Σ_k c_k A[k ⊕ x, k] with P|k⊕x> = c_k |k>
                    let mut tr = C64::new(0.0, 0.0);
                    for k in 0..d {
                        let (r, c) = p.action(k);
                        tr += c * a[(k, r)];
                    }
                    let coeff = tr * scale;
                    (coeff.norm() > COEFF_CUT).then_some((coeff, p))
                })
                .collect()
        })
        .collect();
    Ok(PauliChannel { n, terms })
}
