use std::collections::HashSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::{GraphError, Result};

/// Simple undirected graph on vertices 0..n (n ≤ 64) stored as adjacency masks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    adj: Vec<u64>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 64, "at most 64 vertices");
        Self { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds the edge {u, v}; repeated edges are ignored, loops rejected.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        let n = self.n();
        if u >= n {
            return Err(GraphError::BadVertex(u));
        }
        if v >= n {
            return Err(GraphError::BadVertex(v));
        }
        if u == v {
            return Err(GraphError::BadVertex(u));
        }
        self.adj[u] |= 1 << v;
        self.adj[v] |= 1 << u;
        Ok(())
    }

    /// Star with centre 0.
    pub fn star(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 1..n {
            g.add_edge(0, v).unwrap();
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        let mut g = Self::empty(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n).unwrap();
        }
        g
    }

    pub fn path(n: usize) -> Self {
        let mut g = Self::empty(n);
        for v in 1..n {
            g.add_edge(v - 1, v).unwrap();
        }
        g
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in (u + 1)..n {
                g.add_edge(u, v).unwrap();
            }
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Open neighbourhood N(v) as a bit mask.
    pub fn neighbors(&self, v: usize) -> u64 {
        self.adj[v]
    }

    pub fn closed_neighbors(&self, v: usize) -> u64 {
        self.adj[v] | (1 << v)
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u] >> v & 1 == 1
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones() as usize
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e = Vec::new();
        for u in 0..self.n() {
            for v in (u + 1)..self.n() {
                if self.has_edge(u, v) {
                    e.push((u, v));
                }
            }
        }
        e
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(|a| a.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn isolated_vertex(&self) -> Option<usize> {
        self.adj.iter().position(|&a| a == 0)
    }

    pub fn require_no_isolated(&self) -> Result<()> {
        match self.isolated_vertex() {
            Some(v) => Err(GraphError::IsolatedVertex(v)),
            None => Ok(()),
        }
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let mut seen = 1u64;
        let mut frontier = 1u64;
        while frontier != 0 {
            let mut next = 0u64;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.adj[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize == n
    }

    /// Subgraph induced on the vertices of `keep`, relabelled in increasing order.
    pub fn induced(&self, keep: &[usize]) -> Self {
        let mut g = Self::empty(keep.len());
        for (a, &u) in keep.iter().enumerate() {
            for (b, &v) in keep.iter().enumerate().skip(a + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(a, b).unwrap();
                }
            }
        }
        g
    }

    pub fn relabel(&self, perm: &[usize]) -> Self {
        let mut g = Self::empty(self.n());
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]).unwrap();
        }
        g
    }

    /// Plain-text edge list: `n` on the first line, then `u v` per edge.
    pub fn to_edge_list(&self) -> String {
        let mut s = format!("{}\n", self.n());
        for (u, v) in self.edges() {
            writeln!(s, "{u} {v}").unwrap();
        }
        s
    }

    /// Every connected graph on n ≤ 6 vertices, one per isomorphism class,
    /// in a deterministic order.
    pub fn connected_up_to_isomorphism(n: usize) -> Vec<Self> {
        assert!((1..=6).contains(&n), "isomorphism enumeration limited to n ≤ 6");
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
        let perms = permutations(n);
        let mut seen: HashSet<u64> = HashSet::new();
        let mut out = Vec::new();
        for bits in 0u64..(1u64 << pairs.len()) {
            let edges: Vec<_> = pairs.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, e)| *e).collect();
            let g = Self::from_edges(n, &edges).unwrap();
            if !g.is_connected() {
                continue;
            }
            let canon = perms
                .iter()
                .map(|p| {
                    let h = g.relabel(p);
                    pairs.iter().enumerate().fold(0u64, |acc, (i, &(u, v))| acc | ((h.has_edge(u, v) as u64) << i))
                })
                .min()
                .unwrap();
            if seen.insert(canon) {
                out.push(g);
            }
        }
        out
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..n {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl FromStr for Graph {
    type Err = GraphError;

    /// First non-comment line holds n; each further line `u v` is an edge.
    /// Text after `#` is ignored.
    fn from_str(s: &str) -> Result<Self> {
        let mut graph: Option<Graph> = None;
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap().trim();
            if text.is_empty() {
                continue;
            }
            let fields: Vec<&str> = text.split_whitespace().collect();
            let parse = |t: &str| t.parse::<usize>().map_err(|_| GraphError::Parse { line, msg: format!("bad integer `{t}`") });
            match &mut graph {
                None => {
                    if fields.len() != 1 {
                        return Err(GraphError::Parse { line, msg: "expected the vertex count".into() });
                    }
                    let n = parse(fields[0])?;
                    if n == 0 || n > 64 {
                        return Err(GraphError::Parse { line, msg: format!("vertex count {n} outside 1..=64") });
                    }
                    graph = Some(Graph::empty(n));
                }
                Some(g) => {
                    if fields.len() != 2 {
                        return Err(GraphError::Parse { line, msg: "expected `u v`".into() });
                    }
                    let (u, v) = (parse(fields[0])?, parse(fields[1])?);
                    g.add_edge(u, v).map_err(|e| GraphError::Parse { line, msg: e.to_string() })?;
                }
            }
        }
        graph.ok_or(GraphError::Parse { line: 0, msg: "empty graph file".into() })
    }
}

/// Replaces vertex i by `sizes[i]` copies; copies of i and j are adjacent
/// iff i and j are. Copies of vertex i occupy a contiguous index range.
pub fn bundle(g: &Graph, sizes: &[usize]) -> Result<Graph> {
    g.require_no_isolated()?;
    if sizes.len() != g.n() {
        return Err(GraphError::SizeMismatch { expected: g.n(), got: sizes.len() });
    }
    if sizes.contains(&0) {
        return Err(GraphError::SizeMismatch { expected: g.n(), got: sizes.iter().filter(|&&s| s > 0).count() });
    }
    let total: usize = sizes.iter().sum();
    if total > 64 {
        return Err(GraphError::TooLarge { what: "bundled graph", n: total });
    }
    let offsets: Vec<usize> = sizes.iter().scan(0, |acc, &s| {
        let o = *acc;
        *acc += s;
        Some(o)
    }).collect();
    let mut out = Graph::empty(total);
    for (i, j) in g.edges() {
        for a in 0..sizes[i] {
            for b in 0..sizes[j] {
                out.add_edge(offsets[i] + a, offsets[j] + b)?;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let g: Graph = "# triangle\n3\n0 1\n1 2 # comment\n\n2 0\n".parse().unwrap();
        assert_eq!(g, Graph::cycle(3));
        assert_eq!(g.to_edge_list().parse::<Graph>().unwrap(), g);
        assert!("3\n0 3\n".parse::<Graph>().is_err());
        assert!("3\n1 1\n".parse::<Graph>().is_err());
        assert!("x\n".parse::<Graph>().is_err());
    }

    #[test]
    fn isomorphism_class_counts() {
        // connected graphs up to isomorphism: 1, 1, 2, 6, 21, 112
        let counts: Vec<usize> = (1..=5).map(|n| Graph::connected_up_to_isomorphism(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 6, 21]);
    }

    #[test]
    fn bundle_identity_and_size() {
        let tri = Graph::cycle(3);
        assert_eq!(bundle(&tri, &[1, 1, 1]).unwrap(), tri);
        let b = bundle(&tri, &[3, 4, 3]).unwrap();
        assert_eq!(b.n(), 10);
        assert_eq!(b.edge_count(), 12 + 12 + 9);
        assert!(matches!(bundle(&tri, &[1, 2]), Err(GraphError::SizeMismatch { .. })));
        assert!(matches!(bundle(&Graph::empty(2), &[1, 1]), Err(GraphError::IsolatedVertex(0))));
    }
}
