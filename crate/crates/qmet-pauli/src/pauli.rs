use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C64;
use qmet_dense::CMatrix;

use crate::{PauliError, Result};

/// i^phase · ∏_j X_j^{x_j} Z_j^{z_j}, with X applied after Z on each qubit.
///
/// Bit `j` of the masks refers to qubit `j`. The letter Y is stored as
/// x = z = 1 with an extra factor i, since Y = iXZ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
    phase: u8,
}

fn mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub(crate) fn i_pow(k: u8) -> C64 {
    match k & 3 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Reverses the low `n` bits so that qubit 0 maps to the most significant
/// bit of a basis index.
fn to_index_mask(m: u64, n: usize) -> usize {
    if n == 0 {
        0
    } else {
        (m.reverse_bits() >> (64 - n)) as usize
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self::from_masks(n, 0, 0, 0)
    }

    /// Raw constructor; `phase` is the power of i multiplying X^x Z^z.
    pub fn from_masks(n: usize, x: u64, z: u64, phase: u8) -> Self {
        assert!((1..=64).contains(&n), "qubit count must be in 1..=64");
        assert!(x & !mask(n) == 0 && z & !mask(n) == 0, "mask exceeds qubit count");
        Self { n, x, z, phase: phase & 3 }
    }

    /// The Hermitian Pauli with the given masks and sign ±1.
    pub fn hermitian(n: usize, x: u64, z: u64, negative: bool) -> Self {
        let y = (x & z).count_ones() as u8;
        Self::from_masks(n, x, z, y + if negative { 2 } else { 0 })
    }

    /// Single-qubit letter (one of I, X, Y, Z) on `qubit`.
    pub fn single(n: usize, qubit: usize, letter: char) -> Self {
        assert!(qubit < n);
        let b = 1u64 << qubit;
        match letter {
            'I' => Self::identity(n),
            'X' => Self::hermitian(n, b, 0, false),
            'Y' => Self::hermitian(n, b, b, false),
            'Z' => Self::hermitian(n, 0, b, false),
            _ => panic!("unknown Pauli letter {letter}"),
        }
    }

    /// Every Hermitian Pauli with sign +1, ordered by (x, z) masks.
    pub fn all(n: usize) -> impl Iterator<Item = Self> {
        assert!(n <= 16, "enumerating 4^{n} Paulis");
        let size = 1u64 << n;
        (0..size).flat_map(move |x| (0..size).map(move |z| Self::hermitian(n, x, z, false)))
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    /// Power of i in front of X^x Z^z.
    pub fn phase(&self) -> u8 {
        self.phase
    }

    /// Overall scalar relative to the literal letters: i^(phase - #Y).
    pub fn literal_phase(&self) -> u8 {
        self.phase.wrapping_sub((self.x & self.z).count_ones() as u8) & 3
    }

    pub fn coefficient(&self) -> C64 {
        i_pow(self.literal_phase())
    }

    pub fn is_hermitian(&self) -> bool {
        self.literal_phase() & 1 == 0
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Same letters, possibly different phase.
    pub fn same_letters(&self, other: &Self) -> bool {
        self.n == other.n && self.x == other.x && self.z == other.z
    }

    pub fn support(&self) -> u64 {
        self.x | self.z
    }

    pub fn weight(&self) -> usize {
        self.support().count_ones() as usize
    }

    pub fn letter(&self, qubit: usize) -> char {
        let b = 1u64 << qubit;
        match (self.x & b != 0, self.z & b != 0) {
            (false, false) => 'I',
            (true, false) => 'X',
            (true, true) => 'Y',
            (false, true) => 'Z',
        }
    }

    pub fn with_phase(&self, phase: u8) -> Self {
        Self { phase: phase & 3, ..*self }
    }

    /// Multiplies by i^k.
    pub fn times_i(&self, k: u8) -> Self {
        self.with_phase(self.phase.wrapping_add(k))
    }

    pub fn negate(&self) -> Self {
        self.times_i(2)
    }

    pub fn dagger(&self) -> Self {
        // (X^x Z^z)† = Z^z X^x = (-1)^{|x&z|} X^x Z^z
        let flip = 2 * ((self.x & self.z).count_ones() as u8 & 1);
        self.with_phase(flip.wrapping_sub(self.phase))
    }

    /// Restriction to a single qubit as a 1-qubit Pauli carrying no phase.
    pub fn on_qubit(&self, qubit: usize) -> Self {
        Self::hermitian(1, (self.x >> qubit) & 1, (self.z >> qubit) & 1, false)
    }

    /// Masks with qubit 0 at the most significant bit of a basis index.
    pub fn index_masks(&self) -> (usize, usize) {
        (to_index_mask(self.x, self.n), to_index_mask(self.z, self.n))
    }

    /// P|k> = c |k ⊕ x>; returns (k ⊕ x, c).
    pub fn action(&self, k: usize) -> (usize, C64) {
        let (xi, zi) = self.index_masks();
        self.action_with(xi, zi, k)
    }

    #[inline]
    fn action_with(&self, xi: usize, zi: usize, k: usize) -> (usize, C64) {
        let sign = ((zi & k).count_ones() & 1) as u8 * 2;
        (k ^ xi, i_pow(self.phase.wrapping_add(sign)))
    }

    pub fn to_matrix(&self) -> CMatrix {
        let d = 1usize << self.n;
        let (xi, zi) = self.index_masks();
        let mut m = CMatrix::zeros(d);
        for k in 0..d {
            let (r, c) = self.action_with(xi, zi, k);
            m[(r, k)] = c;
        }
        m
    }

    pub fn apply_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), 1usize << self.n);
        let (xi, zi) = self.index_masks();
        let mut out = vec![C64::new(0.0, 0.0); v.len()];
        for (k, a) in v.iter().enumerate() {
            let (r, c) = self.action_with(xi, zi, k);
            out[r] = c * a;
        }
        out
    }

    /// P·M without forming P densely.
    pub fn left_mul(&self, m: &CMatrix) -> CMatrix {
        let d = m.dim();
        assert_eq!(d, 1usize << self.n);
        let (xi, zi) = self.index_masks();
        let mut out = CMatrix::zeros(d);
        for k in 0..d {
            let (r, c) = self.action_with(xi, zi, k);
            for j in 0..d {
                out[(r, j)] = c * m[(k, j)];
            }
        }
        out
    }

    /// M·P without forming P densely.
    pub fn right_mul(&self, m: &CMatrix) -> CMatrix {
        let d = m.dim();
        assert_eq!(d, 1usize << self.n);
        let (xi, zi) = self.index_masks();
        let mut out = CMatrix::zeros(d);
        for k in 0..d {
            let (r, c) = self.action_with(xi, zi, k);
            for i in 0..d {
                out[(i, k)] = m[(i, r)] * c;
            }
        }
        out
    }

    /// Tensor product self ⊗ other; `other` occupies the trailing qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        Self::from_masks(
            n,
            self.x | (other.x << self.n),
            self.z | (other.z << self.n),
            self.phase + other.phase,
        )
    }
}

/// Group law: the product P·Q.
pub fn pauli_mul(p: &PauliString, q: &PauliString) -> Result<PauliString> {
    if p.n != q.n {
        return Err(PauliError::DimMismatch(p.n, q.n));
    }
    // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
    let swap = 2 * ((p.z & q.x).count_ones() & 1) as u8;
    Ok(PauliString { n: p.n, x: p.x ^ q.x, z: p.z ^ q.z, phase: (p.phase + q.phase + swap) & 3 })
}

/// Even symplectic inner product.
pub fn commutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    if p.n != q.n {
        return Err(PauliError::DimMismatch(p.n, q.n));
    }
    Ok(((p.x & q.z).count_ones() + (p.z & q.x).count_ones()).is_multiple_of(2))
}

impl std::ops::Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        pauli_mul(&self, &rhs).expect("qubit count mismatch in Pauli product")
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = ["", "i", "-", "-i"][self.literal_phase() as usize];
        f.write_str(prefix)?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q))?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = PauliError;

    /// Accepts an optional `+`, `-`, `i`, `+i` or `-i` prefix followed by
    /// letters from {I, X, Y, Z}; qubit 0 is leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || PauliError::Parse(s.to_string());
        let t = s.trim();
        let (mut lit, body) = match t.as_bytes().first() {
            Some(b'-') => (2u8, &t[1..]),
            Some(b'+') => (0, &t[1..]),
            _ => (0, t),
        };
        let body = match body.strip_prefix('i') {
            Some(rest) => {
                lit += 1;
                rest
            }
            None => body,
        };
        let n = body.chars().count();
        if n == 0 || n > 64 {
            return Err(bad());
        }
        let (mut x, mut z) = (0u64, 0u64);
        for (q, ch) in body.chars().enumerate() {
            let b = 1u64 << q;
            match ch.to_ascii_uppercase() {
                'I' => {}
                'X' => x |= b,
                'Y' => {
                    x |= b;
                    z |= b;
                }
                'Z' => z |= b,
                _ => return Err(bad()),
            }
        }
        let y = (x & z).count_ones() as u8;
        Ok(Self::from_masks(n, x, z, lit.wrapping_add(y)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use qmet_dense::matrix::pauli_1q;

    fn p(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let r = pauli_mul(&p("X"), &p("Z")).unwrap();
        assert_eq!(r, p("-iY"));
        assert_eq!(r.to_string(), "-iY");
    }

    #[test]
    fn squares_are_identity() {
        for q in PauliString::all(2) {
            assert_eq!(q * q, PauliString::identity(2));
        }
    }

    #[test]
    fn disjoint_supports() {
        assert_eq!(p("XI") * p("IZ"), p("XZ"));
    }

    #[test]
    fn commutation_examples() {
        assert!(!commutes(&p("X"), &p("Z")).unwrap());
        assert!(commutes(&p("XX"), &p("ZZ")).unwrap());
        assert!(commutes(&p("XYZ"), &p("III")).unwrap());
        assert_eq!(commutes(&p("X"), &p("XX")), Err(PauliError::DimMismatch(1, 2)));
    }

    #[test]
    fn literal_round_trip() {
        for s in ["-XIZ", "YY", "iZ", "-iXY", "IIII"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("+XZ"), p("XZ"));
        assert!("XQ".parse::<PauliString>().is_err());
        assert!("".parse::<PauliString>().is_err());
    }

    #[test]
    fn matrices_match_letters() {
        for (k, s) in ["I", "X", "Y", "Z"].iter().enumerate() {
            assert!(p(s).to_matrix().max_diff(&pauli_1q(k)) < 1e-15);
        }
        let xz = p("XZ").to_matrix();
        assert!(xz.max_diff(&pauli_1q(1).kron(&pauli_1q(3))) < 1e-15);
    }

    #[test]
    fn dense_products_match_matrices() {
        let a = p("-YXZ");
        let b = p("ZZY");
        let prod = (a * b).to_matrix();
        assert!(prod.max_diff(&a.to_matrix().matmul(&b.to_matrix())) < 1e-14);
        assert!(a.left_mul(&b.to_matrix()).max_diff(&prod) < 1e-14);
        assert!(b.right_mul(&a.to_matrix()).max_diff(&prod) < 1e-14);
        assert!(a.dagger().to_matrix().max_diff(&a.to_matrix().dagger()) < 1e-14);
        assert!(p("iX").dagger() == p("-iX"));
    }
}
