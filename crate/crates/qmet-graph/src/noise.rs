use std::collections::HashMap;

use rayon::prelude::*;

use crate::graph::Graph;
use crate::partition::{partition, qfi_x};
use crate::{GraphError, Result};

/// Cap on the number of erasure patterns averaged by `mean_qfi_erasure`.
pub const MAX_PATTERNS: u128 = 1_000_000;

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// ½ Σ_j C(m,j) (a_j - b_j)² / (a_j + b_j) with a_j = p^{m-j}(1-p)^j and
/// b_j = p^j (1-p)^{m-j}.
pub fn dephasing_g(m: u64, p: f64) -> f64 {
    let q = 1.0 - p;
    let mut s = 0.0;
    for j in 0..=m {
        let a = p.powi((m - j) as i32) * q.powi(j as i32);
        let b = p.powi(j as i32) * q.powi((m - j) as i32);
        if a + b > 0.0 {
            s += binomial(m, j) * (a - b).powi(2) / (a + b);
        }
    }
    0.5 * s
}

/// u²(1-2p)² + 4u p(1-p)
pub fn dephasing_f(u: u64, p: f64) -> f64 {
    let u = u as f64;
    u * u * (1.0 - 2.0 * p).powi(2) + 4.0 * u * p * (1.0 - p)
}

/// QFI of the graph state after i.i.d. Z flips with probability p on every
/// qubit, under X encoding: Σ_l f_l g_l over the neighbourhood classes.
pub fn qfi_dephasing(g: &Graph, p: f64) -> Result<f64> {
    g.require_no_isolated()?;
    if !(0.0..=1.0).contains(&p) {
        return Err(GraphError::BadProbability(p));
    }
    Ok(partition(g).classes.iter().map(|c| dephasing_f(c.u(), p) * dephasing_g(c.m(), p)).sum())
}

/// Lower bound (1-2p)² (1 - (2p(1-p) + 1/2)^m) Q(G), m = min_l m_l.
pub fn dephasing_lower_bound(g: &Graph, p: f64) -> Result<f64> {
    let q = qfi_x(g)? as f64;
    let m = partition(g).classes.iter().map(|c| c.m()).min().unwrap_or(0);
    Ok((1.0 - 2.0 * p).powi(2) * (1.0 - (2.0 * p * (1.0 - p) + 0.5).powi(m as i32)) * q)
}

/// Erased vertices and their light cone ∪_x ({x} ∪ N(x)).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ErasurePattern {
    pub erased: u64,
    pub light_cone: u64,
}

impl ErasurePattern {
    pub fn new(g: &Graph, erased: &[usize]) -> Result<Self> {
        let mut e = 0u64;
        for &x in erased {
            if x >= g.n() {
                return Err(GraphError::BadVertex(x));
            }
            e |= 1 << x;
        }
        Ok(Self::from_mask(g, e))
    }

    fn from_mask(g: &Graph, erased: u64) -> Self {
        let mut cone = erased;
        for x in bits(erased) {
            cone |= g.neighbors(x);
        }
        Self { erased, light_cone: cone }
    }
}

fn bits(mut m: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let b = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(b)
        }
    })
}

/// Reduced xor basis with distinct leading bits.
struct Gf2Span {
    basis: Vec<u64>,
}

impl Gf2Span {
    fn new(vectors: impl IntoIterator<Item = u64>) -> Self {
        let mut s = Self { basis: Vec::new() };
        for v in vectors {
            let r = s.reduce(v);
            if r != 0 {
                s.basis.push(r);
                s.basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        s
    }

    fn reduce(&self, mut v: u64) -> u64 {
        for &b in &self.basis {
            let lead = 63 - b.leading_zeros();
            if v >> lead & 1 == 1 {
                v ^= b;
            }
        }
        v
    }

    fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }
}

fn erasure_from_mask(g: &Graph, erased: u64) -> f64 {
    let all = if g.n() == 64 { u64::MAX } else { (1u64 << g.n()) - 1 };
    let rest = all & !erased;
    // Measuring an erased vertex x in the Z basis leaves Z^{N(x) ∩ R} on the
    // remaining graph G[R]; the reduced state is the uniform mixture over the
    // span W of these patterns.
    let w = Gf2Span::new(bits(erased).map(|x| g.neighbors(x) & rest));
    let mut classes: Vec<(u64, u64)> = Vec::new();
    let mut slot: HashMap<u64, usize> = HashMap::new();
    for v in bits(rest) {
        let m = g.neighbors(v) & rest;
        let i = *slot.entry(m).or_insert_with(|| {
            classes.push((m, 0));
            classes.len() - 1
        });
        classes[i].1 |= 1 << v;
    }
    let mut total = 0u64;
    for (m, members) in classes {
        if w.contains(m) {
            continue;
        }
        // ordered pairs (i, j) in the class on which every vector of W agrees
        let mut sig: HashMap<u64, u64> = HashMap::new();
        for v in bits(members) {
            let s = w.basis.iter().enumerate().fold(0u64, |acc, (k, b)| acc | ((b >> v & 1) << k));
            *sig.entry(s).or_default() += 1;
        }
        total += sig.values().map(|c| c * c).sum::<u64>();
    }
    total as f64
}

/// QFI under X encoding after the qubits in `erased` are traced out.
///
/// Let R be the surviving vertices and W the GF(2) span of the restricted
/// neighbourhoods N(x) ∩ R of erased x. Each class (U, M) of the induced
/// graph G[R] with M ∉ W contributes the number of ordered pairs in U on
/// which every vector of W takes equal values.
pub fn qfi_erasure(g: &Graph, erased: &[usize]) -> Result<f64> {
    g.require_no_isolated()?;
    let pat = ErasurePattern::new(g, erased)?;
    Ok(erasure_from_mask(g, pat.erased))
}

/// Light-cone case formula Σ_l h_l: u_l² if neither M_l nor U_l lies inside
/// the light cone, u_l if only U_l does, 0 otherwise.
///
/// This agrees with `qfi_erasure` on many graphs but not all; the 4-cycle
/// with one erased vertex gives 2 here against the true value 4.
pub fn qfi_erasure_light_cone(g: &Graph, erased: &[usize]) -> Result<f64> {
    g.require_no_isolated()?;
    let pat = ErasurePattern::new(g, erased)?;
    let l = pat.light_cone;
    Ok(partition(g)
        .classes
        .iter()
        .map(|c| {
            let m_in = c.neighborhood & !l == 0;
            let u_in = c.members & !l == 0;
            match (m_in, u_in) {
                (false, false) => (c.u() * c.u()) as f64,
                (false, true) => c.u() as f64,
                _ => 0.0,
            }
        })
        .sum())
}

fn combinations(n: usize, k: usize) -> Vec<u64> {
    let mut out = Vec::new();
    fn rec(start: usize, n: usize, left: usize, acc: u64, out: &mut Vec<u64>) {
        if left == 0 {
            out.push(acc);
            return;
        }
        for v in start..=(n - left) {
            rec(v + 1, n, left - 1, acc | (1 << v), out);
        }
    }
    rec(0, n, k, 0, &mut out);
    out
}

fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Mean of `qfi_erasure` over every e-subset of vertices.
///
/// Patterns are evaluated in parallel and summed by a fixed pairwise tree in
/// pattern order, so the result does not depend on the thread count.
pub fn mean_qfi_erasure(g: &Graph, e: usize) -> Result<f64> {
    g.require_no_isolated()?;
    let n = g.n();
    if e > n {
        return Err(GraphError::BadVertex(e));
    }
    let count = (0..e as u128).fold(1u128, |acc, j| acc * (n as u128 - j) / (j + 1));
    if count > MAX_PATTERNS {
        return Err(GraphError::TooManyPatterns(count));
    }
    let patterns = combinations(n, e);
    let values: Vec<f64> = patterns.par_iter().map(|&m| erasure_from_mask(g, m)).collect();
    Ok(pairwise_sum(&values) / values.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dephasing_limits() {
        let g = Graph::star(5);
        assert!((qfi_dephasing(&g, 0.0).unwrap() - 17.0).abs() < 1e-12);
        assert!(qfi_dephasing(&g, 0.5).unwrap().abs() < 1e-12);
        assert!(qfi_dephasing(&g, 1.2).is_err());
    }

    #[test]
    fn erasure_examples() {
        let star = Graph::star(5);
        assert_eq!(qfi_erasure(&star, &[]).unwrap(), 17.0);
        assert_eq!(qfi_erasure(&star, &[0]).unwrap(), 0.0);
        assert_eq!(qfi_erasure(&star, &[3]).unwrap(), 1.0);
        assert_eq!(qfi_erasure_light_cone(&star, &[0]).unwrap(), 0.0);
        assert_eq!(qfi_erasure_light_cone(&star, &[3]).unwrap(), 1.0);
        let c4 = Graph::cycle(4);
        assert_eq!(qfi_erasure(&c4, &[0]).unwrap(), 4.0);
        assert_eq!(qfi_erasure_light_cone(&c4, &[0]).unwrap(), 2.0);
        assert!(qfi_erasure(&star, &[7]).is_err());
    }

    #[test]
    fn mean_erasure_small_cases() {
        let g = Graph::cycle(6);
        assert_eq!(mean_qfi_erasure(&g, 0).unwrap(), 6.0);
        let direct: f64 = (0..6).map(|v| qfi_erasure(&g, &[v]).unwrap()).sum::<f64>() / 6.0;
        assert!((mean_qfi_erasure(&g, 1).unwrap() - direct).abs() < 1e-12);
        assert_eq!(combinations(5, 2).len(), 10);
    }
}
