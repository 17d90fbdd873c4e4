//! Classical keys and the single-qubit Clifford lookup tables behind them.

use std::sync::OnceLock;

use qmet_dense::CMatrix;
use qmet_pauli::{clifford_to_matrix, enumerate_clifford, random_clifford, CliffordElement, PauliString};
use rand::seq::index::sample;
use rand::Rng;

use crate::instance::Layout;
use crate::{CryptoError, Result};

/// Letter codes: 0 = I, 1 = X, 2 = Y, 3 = Z.
pub(crate) fn letter_bits(l: u8) -> (u64, u64) {
    match l {
        0 => (0, 0),
        1 => (1, 0),
        2 => (1, 1),
        _ => (0, 1),
    }
}

pub(crate) fn bits_letter(x: u64, z: u64) -> u8 {
    match (x & 1, z & 1) {
        (0, 0) => 0,
        (1, 0) => 1,
        (1, 1) => 2,
        _ => 3,
    }
}

/// The 24 single-qubit Clifford tableaux with their unitaries and letter maps.
pub struct LocalTable {
    pub tableaux: &'static [CliffordElement],
    /// U with U P U† equal to the tableau image of P.
    pub unitaries: Vec<CMatrix>,
    pub unitaries_dag: Vec<CMatrix>,
    /// conj_inv[c][l] is the letter of C† L C.
    pub conj_inv: Vec<[u8; 4]>,
    /// image[c][l] is (letter, negative sign) of C L C†.
    pub image: Vec<[(u8, bool); 4]>,
}

pub fn local_table() -> &'static LocalTable {
    static TABLE: OnceLock<LocalTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let tableaux = enumerate_clifford(1).expect("single-qubit Clifford group");
        let unitaries: Vec<CMatrix> = tableaux.iter().map(|c| clifford_to_matrix(c).expect("1-qubit unitary")).collect();
        let unitaries_dag = unitaries.iter().map(|u| u.dagger()).collect();
        let letter = |c: &CliffordElement, l: u8| {
            let (x, z) = letter_bits(l);
            let p = c.apply(&PauliString::hermitian(1, x, z, false));
            (bits_letter(p.x_mask(), p.z_mask()), p.literal_phase() == 2)
        };
        let image = tableaux.iter().map(|c| [0u8, 1, 2, 3].map(|l| letter(c, l))).collect();
        let conj_inv = tableaux.iter().map(|c| [0u8, 1, 2, 3].map(|l| letter(&c.inverse(), l).0)).collect();
        LocalTable { tableaux, unitaries, unitaries_dag, conj_inv, image }
    })
}

/// Letters of C† P C for a local Clifford given by table indices.
/// Masks use bit q for qubit q.
pub(crate) fn conjugate_local(idx: &[usize], x: u64, z: u64) -> (u64, u64) {
    let table = local_table();
    let (mut ox, mut oz) = (0u64, 0u64);
    for (q, &c) in idx.iter().enumerate() {
        let l = bits_letter(x >> q, z >> q);
        let (bx, bz) = letter_bits(table.conj_inv[c][l as usize]);
        ox |= bx << q;
        oz |= bz << q;
    }
    (ox, oz)
}

/// Flag positions ℓ together with one single-qubit Clifford per qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct TrapKey {
    pub flag_positions: Vec<usize>,
    pub local_cliffords: Vec<CliffordElement>,
    idx: Vec<usize>,
}

impl TrapKey {
    pub fn new(flag_positions: Vec<usize>, local_cliffords: Vec<CliffordElement>) -> Result<Self> {
        let m = local_cliffords.len();
        Layout::new(m, &flag_positions)?;
        let table = local_table();
        let idx = local_cliffords
            .iter()
            .enumerate()
            .map(|(q, c)| {
                if c.n_qubits() != 1 || !c.is_symplectic() {
                    return Err(CryptoError::BadKey(format!("qubit {q} does not carry a single-qubit Clifford")));
                }
                table.tableaux.iter().position(|e| e == c).ok_or_else(|| CryptoError::BadKey(format!("qubit {q}: unknown tableau")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut flag_positions = flag_positions;
        flag_positions.sort_unstable();
        Ok(Self { flag_positions, local_cliffords, idx })
    }

    /// Key from flag positions and indices into the 24-element table.
    pub fn from_indices(flag_positions: Vec<usize>, idx: Vec<usize>) -> Result<Self> {
        let table = local_table();
        if let Some(&bad) = idx.iter().find(|&&i| i >= table.tableaux.len()) {
            return Err(CryptoError::BadKey(format!("Clifford index {bad} out of range")));
        }
        Self::new(flag_positions, idx.iter().map(|&i| table.tableaux[i].clone()).collect())
    }

    pub fn random<R: Rng + ?Sized>(m: usize, t: usize, rng: &mut R) -> Result<Self> {
        if t == 0 || t >= m {
            return Err(CryptoError::BadKey(format!("need 1 <= t < m, got t = {t} with m = {m}")));
        }
        let flags = sample(rng, m, t).into_vec();
        let idx = (0..m).map(|_| rng.gen_range(0..24)).collect();
        Self::from_indices(flags, idx)
    }

    pub fn m(&self) -> usize {
        self.local_cliffords.len()
    }

    pub fn t(&self) -> usize {
        self.flag_positions.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.idx
    }

    pub fn layout(&self) -> Layout {
        Layout::new(self.m(), &self.flag_positions).expect("validated at construction")
    }

    /// The m-qubit tableau ⊗_q C_q.
    pub fn tableau(&self) -> CliffordElement {
        let mut it = self.local_cliffords.iter();
        let first = it.next().expect("m >= 2").clone();
        it.fold(first, |acc, c| acc.tensor(c))
    }
}

/// A global Clifford on the whole register; flags sit on the trailing qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordKey {
    pub clifford: CliffordElement,
}

impl CliffordKey {
    pub fn new(clifford: CliffordElement) -> Result<Self> {
        if !clifford.is_symplectic() {
            return Err(CryptoError::BadKey("tableau violates the symplectic condition".into()));
        }
        Ok(Self { clifford })
    }

    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        Self { clifford: random_clifford(m, rng) }
    }
}
