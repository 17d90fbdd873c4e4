use qmet_dense::fd::{default_step, derivative};
use qmet_dense::matrix::inner;
use qmet_pauli::PauliString;

use crate::graph::Graph;
use crate::oracle::{apply_all, graph_state_vector, rotation, Encoding};
use crate::{GraphError, Result};

/// Largest graph handled by the GF(2) stabilizer searches.
pub const SOLVER_MAX_QUBITS: usize = 24;
/// Largest graph for the dense measurement-variance evaluation.
pub const DENSE_MAX_QUBITS: usize = 10;

/// g_j = X_j ∏_{k ∈ N(j)} Z_k.
pub fn stabilizer_generators(g: &Graph) -> Vec<PauliString> {
    (0..g.n()).map(|j| PauliString::from_masks(g.n(), 1 << j, g.neighbors(j), 0)).collect()
}

/// ∏_j g_j^{a_j}, including the sign.
pub fn stabilizer_product(g: &Graph, a: u64) -> PauliString {
    let gens = stabilizer_generators(g);
    let mut p = PauliString::identity(g.n());
    for (j, gj) in gens.iter().enumerate() {
        if a >> j & 1 == 1 {
            p = p * *gj;
        }
    }
    p
}

/// z-mask of ∏ g_j^{a_j}: Σ_j a_j N(j) over GF(2).
fn z_of(g: &Graph, a: u64) -> u64 {
    (0..g.n()).filter(|j| a >> j & 1 == 1).fold(0, |acc, j| acc ^ g.neighbors(j))
}

/// ⟨G|P|G⟩ ∈ {-1, 0, +1}.
///
/// The only stabilizer element with x-mask a is ∏ g_j^{a_j}, so P is ± a
/// stabilizer iff its z-mask matches that product's.
pub fn expval_pauli(g: &Graph, p: &PauliString) -> Result<i8> {
    if p.n_qubits() != g.n() {
        return Err(GraphError::DimMismatch(g.n(), p.n_qubits()));
    }
    if !p.is_hermitian() {
        return Err(GraphError::NotHermitian);
    }
    let a = p.x_mask();
    if z_of(g, a) != p.z_mask() {
        return Ok(0);
    }
    let s = stabilizer_product(g, a);
    Ok(if s == *p { 1 } else { -1 })
}

/// Solves rows·a = rhs over GF(2), where bit i of `rhs` is the right-hand side
/// of row i, returning the lexicographically smallest solution (a_0 decided
/// first, 0 before 1).
fn solve_lex_min(rows: &[u64], rhs: u64, nvars: usize) -> Option<u64> {
    let consistent = |extra: &[(u64, bool)]| -> bool {
        // Gaussian elimination on augmented rows (coeffs, value)
        let mut sys: Vec<(u64, bool)> = rows.iter().enumerate().map(|(i, &r)| (r, rhs >> i & 1 == 1)).collect();
        sys.extend_from_slice(extra);
        let mut pivots: Vec<(u64, bool)> = Vec::new();
        for (mut r, mut v) in sys {
            for &(pr, pv) in &pivots {
                let lead = 63 - pr.leading_zeros();
                if r >> lead & 1 == 1 {
                    r ^= pr;
                    v ^= pv;
                }
            }
            if r == 0 {
                if v {
                    return false;
                }
                continue;
            }
            pivots.push((r, v));
            pivots.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        }
        true
    };
    if !consistent(&[]) {
        return None;
    }
    let mut fixed: Vec<(u64, bool)> = Vec::new();
    let mut a = 0u64;
    for j in 0..nvars {
        fixed.push((1 << j, false));
        if !consistent(&fixed) {
            fixed.pop();
            fixed.push((1 << j, true));
            a |= 1 << j;
        }
    }
    Some(a)
}

/// A stabilizer whose every factor is Y or Z, if one exists.
///
/// Every factor anticommutes with X exactly when the z-mask is all ones, i.e.
/// Σ_j a_j N(j) = 1 over GF(2). The lexicographically smallest exponent
/// vector a is returned.
pub fn find_yz_stabilizer(g: &Graph) -> Result<Option<PauliString>> {
    let n = g.n();
    if n > SOLVER_MAX_QUBITS {
        return Err(GraphError::TooLarge { what: "Y/Z stabilizer search", n });
    }
    // row i: Σ_j [i ∈ N(j)] a_j; the adjacency matrix is symmetric
    let rows: Vec<u64> = (0..n).map(|i| g.neighbors(i)).collect();
    let ones = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    Ok(solve_lex_min(&rows, ones, n).map(|a| stabilizer_product(g, a)))
}

fn extension_succeeds(g: &Graph, s: &PauliString) -> bool {
    let n = g.n();
    let ones = (1u64 << n) - 1;
    let t = ones & !s.z_mask();
    // the ancilla picks up Z from every X factor inside T
    t != 0 && (s.x_mask() & t).count_ones() % 2 == 1
}

/// Brute-force stabilizer with the most Y/Z factors.
///
/// Ties prefer candidates for which `extend_with_ancilla` succeeds, then the
/// smallest exponent vector.
pub fn best_partial_stabilizer(g: &Graph) -> Result<PauliString> {
    let n = g.n();
    if n > 20 {
        return Err(GraphError::TooLarge { what: "partial stabilizer search", n });
    }
    let mut best: Option<(u32, bool, u64)> = None;
    for a in 1u64..(1u64 << n) {
        let score = z_of(g, a).count_ones();
        let s = stabilizer_product(g, a);
        let ok = extension_succeeds(g, &s);
        let better = match best {
            None => true,
            Some((bs, bok, _)) => score > bs || (score == bs && ok && !bok),
        };
        if better {
            best = Some((score, ok, a));
        }
    }
    Ok(stabilizer_product(g, best.map(|b| b.2).unwrap_or(0)))
}

/// Adds an ancilla (index n) joined to every qubit where `partial` has no Y
/// or Z factor, so that g_anc · partial becomes Y/Z-only on the original qubits.
///
/// Fails with `ExtensionFailed` if the extended graph still has no Y/Z-only
/// stabilizer, which happens when `partial` has an even number of X factors.
pub fn extend_with_ancilla(g: &Graph, partial: &PauliString) -> Result<Graph> {
    let n = g.n();
    if n + 1 > SOLVER_MAX_QUBITS {
        return Err(GraphError::TooLarge { what: "ancilla extension", n });
    }
    if expval_pauli(g, partial)? == 0 {
        return Err(GraphError::NotAStabilizer);
    }
    let ones = (1u64 << n) - 1;
    let t = ones & !partial.z_mask();
    if t == 0 {
        return Err(GraphError::NotNeeded);
    }
    let mut out = Graph::empty(n + 1);
    for (u, v) in g.edges() {
        out.add_edge(u, v)?;
    }
    for j in 0..n {
        if t >> j & 1 == 1 {
            out.add_edge(j, n)?;
        }
    }
    match find_yz_stabilizer(&out)? {
        Some(_) => Ok(out),
        None => Err(GraphError::ExtensionFailed),
    }
}

/// Δ²S / |∂_θ⟨S⟩|² for the Y/Z-only stabilizer S measured on
/// exp(-iθ Σ X_j / 2)|G>, evaluated densely.
pub fn measurement_variance(g: &Graph, theta: f64) -> Result<f64> {
    let n = g.n();
    if n > DENSE_MAX_QUBITS {
        return Err(GraphError::TooLarge { what: "dense measurement variance", n });
    }
    let s = find_yz_stabilizer(g)?.ok_or(GraphError::NoYZStabilizer)?;
    let psi = graph_state_vector(g);
    let expect = |t: f64| {
        let v = apply_all(&psi, &rotation(Encoding::X, t));
        inner(&v, &s.apply_vec(&v)).re
    };
    let e = expect(theta);
    let slope = derivative(expect, theta, default_step(theta));
    if theta == 0.0 || slope.abs() <= 1e-12 {
        return Err(GraphError::DegenerateSlope);
    }
    Ok((1.0 - e * e).max(0.0) / (slope * slope))
}
