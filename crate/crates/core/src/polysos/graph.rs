use std::collections::BTreeSet;

use crate::affine::{AffineMap, RowBuilder};
use crate::cones::{BlockPoint, ConeSpec};
use crate::error::{Error, Result};
use crate::regsolver::LinearConicProblem;

/// Simple undirected graph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph {
            n,
            edges: BTreeSet::new(),
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Graph::new(n);
        for (i, j) in edges {
            g.add_edge(i, j)?;
        }
        Ok(g)
    }

    /// Adds `{i, j}`; returns `false` if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool> {
        if i >= self.n || j >= self.n {
            return Err(Error::Input(format!(
                "edge ({i}, {j}) out of range for {} vertices",
                self.n
            )));
        }
        if i == j {
            return Err(Error::Input(format!("self-loop at vertex {i}")));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn cycle(n: usize) -> Self {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).expect("valid cycle")
    }

    pub fn complete(n: usize) -> Self {
        Graph::from_edges(n, (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)))).expect("valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    fn adjacency_masks(&self) -> Vec<u64> {
        let mut adj = vec![0u64; self.n];
        for &(i, j) in &self.edges {
            adj[i] |= 1 << j;
            adj[j] |= 1 << i;
        }
        adj
    }

    fn check_small(&self, limit: usize) -> Result<()> {
        if self.n > limit {
            return Err(Error::SizeCap {
                what: "graph vertices for exhaustive search",
                size: self.n,
                cap: limit,
            });
        }
        Ok(())
    }

    /// Stability number `α(G)` by exhaustive search.
    pub fn stability_number(&self) -> Result<usize> {
        self.check_small(24)?;
        let adj = self.adjacency_masks();
        let mut best = 0;
        for set in 0u64..(1 << self.n) {
            let size = set.count_ones() as usize;
            if size <= best {
                continue;
            }
            if (0..self.n).all(|v| set & (1 << v) == 0 || adj[v] & set == 0) {
                best = size;
            }
        }
        Ok(best)
    }

    /// Clique cover number of `G`, i.e. the chromatic number of its
    /// complement, by dynamic programming over vertex subsets.
    pub fn clique_cover_number(&self) -> Result<usize> {
        self.check_small(16)?;
        let n = self.n;
        if n == 0 {
            return Ok(0);
        }
        let adj = self.adjacency_masks();
        let full = (1u64 << n) - 1;
        let is_clique: Vec<bool> = (0..=full)
            .map(|s| (0..n).all(|v| s & (1 << v) == 0 || (s & !(1 << v)) & !adj[v] == 0))
            .collect();
        let mut cover = vec![usize::MAX; (full + 1) as usize];
        cover[0] = 0;
        for s in 1..=full {
            // the lowest vertex of s goes into some clique inside s
            let low = s & s.wrapping_neg();
            let rest = s & !low;
            let mut sub = rest;
            loop {
                let c = sub | low;
                if is_clique[c as usize] {
                    let prev = cover[(s & !c) as usize];
                    if prev != usize::MAX {
                        cover[s as usize] = cover[s as usize].min(prev + 1);
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        Ok(cover[full as usize])
    }
}

/// Lovász theta SDP, written as a minimization:
///
/// ```text
/// min ⟨−J, X⟩  s.t.  trace X = 1,  X_ij = 0 for {i, j} ∈ E,  X ⪰ 0
/// ```
///
/// so `θ(G)` is minus the optimal value. Edge rows have a one at both
/// `(i, j)` and `(j, i)`.
pub fn build_theta(g: &Graph) -> Result<LinearConicProblem> {
    let n = g.num_vertices();
    if n == 0 {
        return Err(Error::Input("graph has no vertices".into()));
    }
    let cone = ConeSpec::psd(n);
    let mut a = AffineMap::new(cone.ambient_dim());
    let mut trace = RowBuilder::new(&cone);
    for i in 0..n {
        trace.push_sym(0, i, i, 1.0);
    }
    a.push_row(trace.build(), 1.0)?;
    for (i, j) in g.edges() {
        a.push_row(RowBuilder::new(&cone).sym(0, i, j, 1.0).build(), 0.0)?;
    }
    let c = BlockPoint {
        data: vec![-1.0; cone.ambient_dim()],
    };
    LinearConicProblem::new(c, a, cone)
}
