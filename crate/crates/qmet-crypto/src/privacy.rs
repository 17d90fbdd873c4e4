//! Privacy: averaged over keys, the encrypted register looks maximally mixed.

use qmet_dense::{CMatrix, DensityMatrix};
use qmet_pauli::{clifford_to_matrix, enumerate_clifford};

use crate::dense::local_conjugate;
use crate::instance::{combinations, Layout};
use crate::soundness::Protocol;
use crate::{check_size, Result, DENSE_CLIFFORD_MAX_M, DENSE_TRAP_MAX_M};

/// Max-norm of E_k[E_k(ρ_in)] − I/2^m, where ρ_in is `data` with t flags in |0>.
/// The delegated protocol encrypts exactly like the trap code.
pub fn privacy_deviation(protocol: Protocol, data: &DensityMatrix, t: usize) -> Result<f64> {
    let n = data.dim().trailing_zeros() as usize;
    let m = n + t;
    let d = 1usize << m;
    let avg = match protocol {
        Protocol::Trap | Protocol::Delegated => {
            check_size("trap-code privacy enumeration", m, DENSE_TRAP_MAX_M)?;
            let layouts = combinations(m, t);
            let keys = 24usize.pow(m as u32);
            let mut acc = CMatrix::zeros(d);
            for flags in &layouts {
                let rin = Layout::new(m, flags)?.embed(data.matrix());
                for k in 0..keys {
                    let mut idx = vec![0; m];
                    let mut r = k;
                    for slot in idx.iter_mut().rev() {
                        *slot = r % 24;
                        r /= 24;
                    }
                    acc += &local_conjugate(&rin, &idx, false);
                }
            }
            acc.scale_re(1.0 / (keys * layouts.len()) as f64)
        }
        Protocol::Clifford => {
            check_size("Clifford-code privacy enumeration", m, DENSE_CLIFFORD_MAX_M)?;
            let rin = Layout::trailing(n, t)?.embed(data.matrix());
            let group = enumerate_clifford(m)?;
            let mut acc = CMatrix::zeros(d);
            for c in group {
                acc += &clifford_to_matrix(c)?.sandwich(&rin);
            }
            acc.scale_re(1.0 / group.len() as f64)
        }
    };
    Ok(avg.max_diff(&CMatrix::identity(d).scale_re(1.0 / d as f64)))
}
