//! Problem instances and the placement of flag qubits inside the register.

use num_complex::Complex64 as C64;
use qmet_dense::{CMatrix, DensityMatrix};

use crate::{CryptoError, Result};

/// A pure n-qubit metrology state protected by t flag qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub n: usize,
    pub t: usize,
    /// Data state amplitudes, qubit 0 most significant.
    pub psi: Vec<C64>,
}

impl Instance {
    pub fn new(n: usize, t: usize, psi: Vec<C64>) -> Result<Self> {
        if n == 0 || t == 0 {
            return Err(CryptoError::InvalidParams(format!("need n >= 1 and t >= 1, got n = {n}, t = {t}")));
        }
        if n + t > 16 {
            return Err(CryptoError::TooLarge { what: "instance", m: n + t, max: 16 });
        }
        if psi.len() != 1 << n {
            return Err(CryptoError::InvalidParams(format!("state has {} amplitudes, expected {}", psi.len(), 1usize << n)));
        }
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(CryptoError::InvalidParams(format!("state norm² {norm}")));
        }
        Ok(Self { n, t, psi })
    }

    pub fn ghz(n: usize, t: usize) -> Result<Self> {
        Self::new(n, t, ghz(n))
    }

    /// GHZ state after the phase imprint exp(-iθ/2 Σ Z).
    pub fn ghz_encoded(n: usize, t: usize, theta: f64) -> Result<Self> {
        Self::new(n, t, phase_encode(&ghz(n), theta))
    }

    pub fn m(&self) -> usize {
        self.n + self.t
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_pure(&self.psi)
    }
}

pub fn ghz(n: usize) -> Vec<C64> {
    let d = 1usize << n;
    let mut psi = vec![C64::new(0.0, 0.0); d];
    let a = std::f64::consts::FRAC_1_SQRT_2;
    psi[0] = C64::new(a, 0.0);
    psi[d - 1] += C64::new(a, 0.0);
    if d == 1 {
        psi[0] = C64::new(1.0, 0.0);
    }
    psi
}

/// Applies ⊗_j exp(-iθ Z_j / 2) to an n-qubit vector.
pub fn phase_encode(psi: &[C64], theta: f64) -> Vec<C64> {
    let n = psi.len().trailing_zeros() as i32;
    psi.iter()
        .enumerate()
        .map(|(k, a)| {
            let zsum = n - 2 * k.count_ones() as i32;
            a * C64::from_polar(1.0, -0.5 * theta * zsum as f64)
        })
        .collect()
}

/// Diagonal of the phase imprint as a dense matrix on n qubits.
pub fn phase_unitary(n: usize, theta: f64) -> CMatrix {
    let ones = vec![C64::new(1.0, 0.0); 1 << n];
    CMatrix::diag(&phase_encode(&ones, theta))
}

/// Positions of flags and data qubits within an m-qubit register.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub m: usize,
    pub flags: Vec<usize>,
    pub data: Vec<usize>,
    /// Bit q set when qubit q is a flag.
    pub flag_mask: u64,
    /// Register basis index for each data basis index, with every flag in |0>.
    pub data_index: Vec<usize>,
}

impl Layout {
    pub fn new(m: usize, flags: &[usize]) -> Result<Self> {
        let mut sorted = flags.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != flags.len() {
            return Err(CryptoError::BadKey("flag positions repeat".into()));
        }
        if let Some(&q) = sorted.iter().find(|&&q| q >= m) {
            return Err(CryptoError::BadKey(format!("flag position {q} outside {m} qubits")));
        }
        if sorted.is_empty() || sorted.len() >= m {
            return Err(CryptoError::BadKey(format!("need 1 <= t < m, got t = {} with m = {m}", sorted.len())));
        }
        let flag_mask = sorted.iter().fold(0u64, |acc, &q| acc | 1 << q);
        let data: Vec<usize> = (0..m).filter(|q| flag_mask >> q & 1 == 0).collect();
        let n = data.len();
        let data_index = (0..1usize << n)
            .map(|k| {
                data.iter().enumerate().fold(0usize, |acc, (i, &q)| acc | ((k >> (n - 1 - i)) & 1) << (m - 1 - q))
            })
            .collect();
        Ok(Self { m, flags: sorted, data, flag_mask, data_index })
    }

    /// Flags on the trailing t qubits.
    pub fn trailing(n: usize, t: usize) -> Result<Self> {
        Self::new(n + t, &(n..n + t).collect::<Vec<_>>())
    }

    pub fn n(&self) -> usize {
        self.data.len()
    }

    /// Restricts a qubit-indexed mask to the data qubits (bit i = data qubit i).
    pub fn data_mask(&self, mask: u64) -> u64 {
        self.data.iter().enumerate().fold(0, |acc, (i, &q)| acc | ((mask >> q) & 1) << i)
    }

    /// ρ ⊗ |0..0><0..0| with the flags at their positions.
    pub fn embed(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(1 << self.m);
        for (i, &a) in self.data_index.iter().enumerate() {
            for (j, &b) in self.data_index.iter().enumerate() {
                out[(a, b)] = rho[(i, j)];
            }
        }
        out
    }

    /// Unnormalized data block with every flag projected on |0>.
    pub fn accepted_block(&self, rho: &CMatrix) -> CMatrix {
        let d = self.data_index.len();
        let mut out = CMatrix::zeros(d);
        for (i, &a) in self.data_index.iter().enumerate() {
            for (j, &b) in self.data_index.iter().enumerate() {
                out[(i, j)] = rho[(a, b)];
            }
        }
        out
    }
}

/// All t-subsets of 0..m in lexicographic order.
pub fn combinations(m: usize, t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(t);
    fn rec(start: usize, m: usize, t: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == t {
            out.push(cur.clone());
            return;
        }
        for q in start..m {
            if m - q < t - cur.len() {
                break;
            }
            cur.push(q);
            rec(q + 1, m, t, cur, out);
            cur.pop();
        }
    }
    rec(0, m, t, &mut cur, &mut out);
    out
}
