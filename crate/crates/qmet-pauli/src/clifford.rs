use std::collections::{HashSet, VecDeque};
use std::sync::OnceLock;

use qmet_dense::matrix::norm;
use qmet_dense::CMatrix;
use rand::Rng;

use crate::pauli::{commutes, PauliString};
use crate::{PauliError, Result};

/// Clifford unitary C stored as the images C X_j C† and C Z_j C†.
///
/// Images are Hermitian Paulis with sign ±1; the global phase of C is not
/// represented.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CliffordElement {
    n: usize,
    /// images[2j] = C X_j C†, images[2j + 1] = C Z_j C†
    images: Vec<PauliString>,
}

impl CliffordElement {
    pub fn identity(n: usize) -> Self {
        let images = (0..n)
            .flat_map(|j| [PauliString::single(n, j, 'X'), PauliString::single(n, j, 'Z')])
            .collect();
        Self { n, images }
    }

    /// Validates Hermiticity and the symplectic condition.
    pub fn from_images(n: usize, images: Vec<PauliString>) -> Result<Self> {
        if images.len() != 2 * n {
            return Err(PauliError::DimMismatch(2 * n, images.len()));
        }
        if let Some(bad) = images.iter().find(|p| p.n_qubits() != n) {
            return Err(PauliError::DimMismatch(n, bad.n_qubits()));
        }
        let c = Self { n, images };
        if c.is_symplectic() {
            Ok(c)
        } else {
            Err(PauliError::NotSymplectic)
        }
    }

    pub fn hadamard(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images.swap(2 * q, 2 * q + 1);
        c
    }

    /// S = diag(1, i): X → Y, Z → Z.
    pub fn phase_gate(n: usize, q: usize) -> Self {
        let mut c = Self::identity(n);
        c.images[2 * q] = PauliString::single(n, q, 'Y');
        c
    }

    pub fn cz(n: usize, a: usize, b: usize) -> Self {
        assert!(a != b);
        let mut c = Self::identity(n);
        let za = PauliString::single(n, a, 'Z');
        let zb = PauliString::single(n, b, 'Z');
        c.images[2 * a] = PauliString::single(n, a, 'X') * zb;
        c.images[2 * b] = za * PauliString::single(n, b, 'X');
        c
    }

    /// The generating set {H_j, S_j, CZ_jk}.
    pub fn generators(n: usize) -> Vec<Self> {
        let mut g = Vec::new();
        for j in 0..n {
            g.push(Self::hadamard(n, j));
            g.push(Self::phase_gate(n, j));
        }
        for j in 0..n {
            for k in (j + 1)..n {
                g.push(Self::cz(n, j, k));
            }
        }
        g
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn images(&self) -> &[PauliString] {
        &self.images
    }

    pub fn image_x(&self, j: usize) -> &PauliString {
        &self.images[2 * j]
    }

    pub fn image_z(&self, j: usize) -> &PauliString {
        &self.images[2 * j + 1]
    }

    /// Images are Hermitian and satisfy the canonical commutation relations.
    pub fn is_symplectic(&self) -> bool {
        if self.images.iter().any(|p| !p.is_hermitian() || p.is_identity()) {
            return false;
        }
        for a in 0..2 * self.n {
            for b in (a + 1)..2 * self.n {
                let should_anti = a / 2 == b / 2;
                if commutes(&self.images[a], &self.images[b]).unwrap() == should_anti {
                    return false;
                }
            }
        }
        true
    }

    /// C P C†.
    pub fn apply(&self, p: &PauliString) -> PauliString {
        assert_eq!(p.n_qubits(), self.n, "qubit count mismatch");
        let mut xs = PauliString::identity(self.n);
        let mut zs = PauliString::identity(self.n);
        for j in 0..self.n {
            if p.x_mask() >> j & 1 == 1 {
                xs = xs * self.images[2 * j];
            }
            if p.z_mask() >> j & 1 == 1 {
                zs = zs * self.images[2 * j + 1];
            }
        }
        (xs * zs).times_i(p.phase())
    }

    /// The composite self·other, i.e. conjugation by `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "qubit count mismatch");
        Self { n: self.n, images: other.images.iter().map(|p| self.apply(p)).collect() }
    }

    pub fn inverse(&self) -> Self {
        // C† P C has the same commutation pattern against the images, so solve
        // for each generator by matching symplectic products.
        let n = self.n;
        let mut images = Vec::with_capacity(2 * n);
        for g in Self::identity(n).images {
            let mut x = 0u64;
            let mut z = 0u64;
            for j in 0..n {
                // coefficient of X_j is <g, C Z_j C†>, of Z_j is <g, C X_j C†>
                if !commutes(&g, &self.images[2 * j + 1]).unwrap() {
                    x |= 1 << j;
                }
                if !commutes(&g, &self.images[2 * j]).unwrap() {
                    z |= 1 << j;
                }
            }
            let cand = PauliString::hermitian(n, x, z, false);
            let back = self.apply(&cand);
            debug_assert!(back.same_letters(&g));
            images.push(if back == g { cand } else { cand.negate() });
        }
        Self { n, images }
    }

    /// self ⊗ other with `other` on the trailing qubits.
    pub fn tensor(&self, other: &Self) -> Self {
        let n = self.n + other.n;
        let pad_right = |p: &PauliString| p.tensor(&PauliString::identity(other.n));
        let pad_left = |p: &PauliString| PauliString::identity(self.n).tensor(p);
        let images = self.images.iter().map(pad_right).chain(other.images.iter().map(pad_left)).collect();
        Self { n, images }
    }
}

/// C P C†.
pub fn clifford_apply(c: &CliffordElement, p: &PauliString) -> Result<PauliString> {
    if c.n != p.n_qubits() {
        return Err(PauliError::DimMismatch(c.n, p.n_qubits()));
    }
    Ok(c.apply(p))
}

fn bfs(n: usize) -> Vec<CliffordElement> {
    let gens = CliffordElement::generators(n);
    let start = CliffordElement::identity(n);
    let mut seen = HashSet::from([start.clone()]);
    let mut order = vec![start.clone()];
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        for g in &gens {
            let next = g.compose(&c);
            if seen.insert(next.clone()) {
                order.push(next.clone());
                queue.push_back(next);
            }
        }
    }
    order
}

/// All Clifford tableaux on m ≤ 2 qubits (24 and 11520 elements), built once.
pub fn enumerate_clifford(m: usize) -> Result<&'static [CliffordElement]> {
    static ONE: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    static TWO: OnceLock<Vec<CliffordElement>> = OnceLock::new();
    match m {
        1 => Ok(ONE.get_or_init(|| bfs(1))),
        2 => Ok(TWO.get_or_init(|| bfs(2))),
        _ => Err(PauliError::TooLarge { what: "exact Clifford enumeration", m }),
    }
}

type Sym = (u64, u64);

fn sym_product(a: Sym, b: Sym) -> u32 {
    ((a.0 & b.1).count_ones() + (a.1 & b.0).count_ones()) & 1
}

fn sym_add(a: Sym, b: Sym) -> Sym {
    (a.0 ^ b.0, a.1 ^ b.1)
}

/// Projects `u` onto the symplectic complement of the hyperbolic pairs.
fn project(mut u: Sym, pairs: &[(Sym, Sym)]) -> Sym {
    let orig = u;
    for &(v, w) in pairs {
        if sym_product(orig, w) == 1 {
            u = sym_add(u, v);
        }
        if sym_product(orig, v) == 1 {
            u = sym_add(u, w);
        }
    }
    u
}

/// Uniformly random Clifford tableau on m qubits (m ≤ 64).
///
/// Builds hyperbolic pairs (v_k, w_k) one at a time: v_k uniform among nonzero
/// vectors of the complement of earlier pairs, w_k uniform among complement
/// vectors with <v_k, w_k> = 1. Each sign is drawn independently.
pub fn random_clifford<R: Rng + ?Sized>(m: usize, rng: &mut R) -> CliffordElement {
    assert!((1..=64).contains(&m), "qubit count must be in 1..=64");
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let draw = |rng: &mut R| -> Sym { (rng.gen::<u64>() & full, rng.gen::<u64>() & full) };
    let mut pairs: Vec<(Sym, Sym)> = Vec::with_capacity(m);
    for _ in 0..m {
        let v = loop {
            let c = project(draw(rng), &pairs);
            if c != (0, 0) {
                break c;
            }
        };
        let w = loop {
            let c = project(draw(rng), &pairs);
            if sym_product(v, c) == 1 {
                break c;
            }
        };
        pairs.push((v, w));
    }
    let images = pairs
        .iter()
        .flat_map(|&(v, w)| [v, w])
        .map(|(x, z)| PauliString::hermitian(m, x, z, rng.gen::<bool>()))
        .collect();
    CliffordElement { n: m, images }
}

/// Dense unitary U with U P U† = C P C† for every Pauli P (m ≤ 3).
///
/// Column 0 is the joint +1 eigenvector of the images of Z_j and column x is
/// C(X^x) applied to it. The global phase makes the first nonzero entry of
/// column 0 real and positive.
pub fn clifford_to_matrix(c: &CliffordElement) -> Result<CMatrix> {
    let m = c.n;
    if m > 3 {
        return Err(PauliError::TooLarge { what: "dense Clifford reconstruction", m });
    }
    let d = 1usize << m;
    let mut proj = CMatrix::identity(d);
    for j in 0..m {
        proj = (&proj + &c.image_z(j).left_mul(&proj)).scale_re(0.5);
    }
    let best = (0..d)
        .max_by(|&a, &b| norm(&proj.column(a)).total_cmp(&norm(&proj.column(b))))
        .unwrap();
    let mut psi0 = proj.column(best);
    let nrm = norm(&psi0);
    let lead = psi0.iter().find(|a| a.norm() > 1e-12).copied().unwrap();
    let fix = lead.conj() / (lead.norm() * nrm);
    for a in psi0.iter_mut() {
        *a *= fix;
    }
    let mut u = CMatrix::zeros(d);
    for col in 0..d {
        // basis index bit (m-1-j) is qubit j
        let mut xmask = 0u64;
        for j in 0..m {
            if col >> (m - 1 - j) & 1 == 1 {
                xmask |= 1 << j;
            }
        }
        let img = c.apply(&PauliString::from_masks(m, xmask, 0, 0));
        let v = img.apply_vec(&psi0);
        for (r, a) in v.into_iter().enumerate() {
            u[(r, col)] = a;
        }
    }
    Ok(u)
}

/// Single-qubit Clifford tableaux tensored into every local product on m qubits.
pub fn local_cliffords(m: usize) -> Result<Vec<CliffordElement>> {
    if m == 0 || m > 3 {
        return Err(PauliError::TooLarge { what: "local Clifford enumeration", m });
    }
    let one = enumerate_clifford(1)?;
    let mut out: Vec<CliffordElement> = one.to_vec();
    for _ in 1..m {
        out = out.iter().flat_map(|a| one.iter().map(move |b| a.tensor(b))).collect();
    }
    Ok(out)
}

/// Checks a tableau against a dense unitary on every Pauli; returns the
/// largest deviation of U P U† from the tableau image.
pub fn conjugation_residual(c: &CliffordElement, u: &CMatrix) -> f64 {
    let ud = u.dagger();
    let mut worst: f64 = 0.0;
    for p in PauliString::all(c.n) {
        let lhs = u.matmul(&p.to_matrix()).matmul(&ud);
        worst = worst.max(lhs.max_diff(&c.apply(&p).to_matrix()));
    }
    worst
}
