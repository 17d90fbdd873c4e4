use num_complex::Complex64 as C64;

use crate::eig::hermitian_eig;
use crate::matrix::CMatrix;
use crate::tolerances::{HERMITIAN_TOL, PSD_TOL, PURE_PURITY, TRACE_TOL};
use crate::{DenseError, Result};

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let dev = matrix.hermitian_deviation();
        if dev > HERMITIAN_TOL {
            return Err(DenseError::InvalidDensity(format!("hermitian deviation {dev:.3e}")));
        }
        let tr = matrix.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(DenseError::InvalidDensity(format!("trace {tr}")));
        }
        let spec = hermitian_eig(&matrix)?;
        if spec.values[0] < -PSD_TOL {
            return Err(DenseError::InvalidDensity(format!("eigenvalue {:.3e}", spec.values[0])));
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix the caller already knows to be a density matrix.
    pub fn new_unchecked(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    pub fn from_pure(psi: &[C64]) -> Self {
        Self { matrix: CMatrix::outer(psi, psi) }
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self { matrix: CMatrix::identity(dim).scale_re(1.0 / dim as f64) }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        let m = &self.matrix;
        let d = m.dim();
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += (m[(i, j)] * m[(j, i)]).re;
            }
        }
        s
    }

    pub fn is_pure(&self) -> bool {
        self.purity() > PURE_PURITY
    }

    pub fn expectation(&self, op: &CMatrix) -> C64 {
        self.matrix.matmul(op).trace()
    }

    /// Checks the three defining invariants at the documented tolerances.
    pub fn check(&self) -> Result<()> {
        Self::new(self.matrix.clone()).map(|_| ())
    }
}

fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    let s = hermitian_eig(m)?;
    let top = s.values.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-14 * top.max(f64::MIN_POSITIVE);
    Ok(s.map(|l| if l > cut { l.sqrt() } else { 0.0 }))
}

/// Uhlmann fidelity (Tr sqrt(sqrt(ρ) σ sqrt(ρ)))^2.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(DenseError::DimMismatch(rho.dim(), sigma.dim()));
    }
    if rho.is_pure() || sigma.is_pure() {
        let f = rho.matrix.matmul(&sigma.matrix).trace().re;
        return Ok(f.clamp(0.0, 1.0));
    }
    let sr = sqrt_psd(&rho.matrix)?;
    let inner = sr.matmul(&sigma.matrix).matmul(&sr);
    let s = hermitian_eig(&inner)?;
    let top = s.values.iter().cloned().fold(0.0, f64::max);
    let cut = 1e-14 * top.max(f64::MIN_POSITIVE);
    let root: f64 = s.values.iter().filter(|&&l| l > cut).map(|l| l.sqrt()).sum();
    Ok((root * root).clamp(0.0, 1.0))
}

/// Half the trace norm of ρ - σ.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(DenseError::DimMismatch(rho.dim(), sigma.dim()));
    }
    let diff = &rho.matrix - &sigma.matrix;
    let s = hermitian_eig(&diff)?;
    Ok((0.5 * s.values.iter().map(|l| l.abs()).sum::<f64>()).clamp(0.0, 1.0))
}

/// Number of qubits for a power-of-two dimension.
pub fn qubit_count(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Reduced state on the qubits in `keep`, listed in ascending order.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    Ok(DensityMatrix::new_unchecked(partial_trace_matrix(rho.matrix(), keep)?))
}

/// Partial trace on a raw matrix (used for derivatives, which are not states).
pub fn partial_trace_matrix(m: &CMatrix, keep: &[usize]) -> Result<CMatrix> {
    let nq = qubit_count(m.dim()).ok_or(DenseError::InvalidDensity("dimension is not 2^m".into()))?;
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&q| q >= nq) {
        return Err(DenseError::BadIndex(bad, nq));
    }
    let traced: Vec<usize> = (0..nq).filter(|q| !keep.contains(q)).collect();
    let k = keep.len();
    let dk = 1usize << k;
    let spread = |bits: usize, qubits: &[usize]| -> usize {
        let mut idx = 0;
        for (pos, &q) in qubits.iter().enumerate() {
            if bits >> (qubits.len() - 1 - pos) & 1 == 1 {
                idx |= 1 << (nq - 1 - q);
            }
        }
        idx
    };
    let mut out = CMatrix::zeros(dk);
    for e in 0..(1usize << traced.len()) {
        let off = spread(e, &traced);
        for i in 0..dk {
            let ii = spread(i, &keep) | off;
            for j in 0..dk {
                let jj = spread(j, &keep) | off;
                out[(i, j)] += m[(ii, jj)];
            }
        }
    }
    Ok(out)
}
