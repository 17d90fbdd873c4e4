use std::str::FromStr;

use qmet_dense::{CMatrix, DensityMatrix};

use crate::clifford::{enumerate_clifford, local_cliffords};
use crate::pauli::{commutes, PauliString};
use crate::{PauliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwirlKind {
    Pauli,
    Clifford,
    LocalClifford,
}

impl FromStr for TwirlKind {
    type Err = PauliError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pauli" => Ok(Self::Pauli),
            "clifford" => Ok(Self::Clifford),
            "local_clifford" => Ok(Self::LocalClifford),
            _ => Err(PauliError::Parse(s.to_string())),
        }
    }
}

/// Max-norm of Σ_G (G Q G†) ρ (G Q′ G†) over the chosen group.
///
/// The sum vanishes whenever Q and Q′ differ, so a correct implementation
/// returns a value at rounding level.
pub fn verify_twirl(kind: TwirlKind, q: &PauliString, q2: &PauliString, rho: &DensityMatrix) -> Result<f64> {
    let m = q.n_qubits();
    if q2.n_qubits() != m {
        return Err(PauliError::DimMismatch(m, q2.n_qubits()));
    }
    if rho.dim() != 1usize << m {
        return Err(PauliError::DimMismatch(m, rho.dim().trailing_zeros() as usize));
    }
    if q.same_letters(q2) {
        return Err(PauliError::EqualPaulis);
    }
    let limit = if kind == TwirlKind::Clifford { 2 } else { 3 };
    if m > limit {
        return Err(PauliError::TooLarge { what: "twirl verification", m });
    }
    let r = rho.matrix();
    let mut acc = CMatrix::zeros(r.dim());
    let mut add = |a: &PauliString, b: &PauliString| acc += &a.left_mul(&b.right_mul(r));
    match kind {
        TwirlKind::Pauli => {
            for g in PauliString::all(m) {
                let a = if commutes(&g, q)? { *q } else { q.negate() };
                let b = if commutes(&g, q2)? { *q2 } else { q2.negate() };
                add(&a, &b);
            }
        }
        TwirlKind::Clifford => {
            for c in enumerate_clifford(m)? {
                add(&c.apply(q), &c.apply(q2));
            }
        }
        TwirlKind::LocalClifford => {
            for c in local_cliffords(m)? {
                add(&c.apply(q), &c.apply(q2));
            }
        }
    }
    Ok(acc.max_abs())
}
