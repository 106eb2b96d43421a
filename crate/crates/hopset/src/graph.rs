//! Weighted undirected graphs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

/// Undirected graph with positive real weights on vertices `0..n`.
///
/// Edges are stored once with `u < v`, sorted by `(u, v)`, so two graphs
/// with the same edge set have identical edge indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    // (neighbor, edge index), sorted by neighbor
    adj: Vec<Vec<(usize, usize)>>,
}

impl Graph {
    /// Builds a graph, dropping self-loops and keeping the lightest of any
    /// parallel edges.
    pub fn new<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut list = Vec::new();
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) references a vertex outside 0..{n}"
                )));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({u},{v}) has non-positive or non-finite weight {w}"
                )));
            }
            if u == v {
                continue;
            }
            let (u, v) = if u < v { (u, v) } else { (v, u) };
            list.push(Edge { u, v, w });
        }
        list.sort_by(|a, b| (a.u, a.v).cmp(&(b.u, b.v)).then(a.w.total_cmp(&b.w)));
        list.dedup_by(|later, kept| later.u == kept.u && later.v == kept.v);

        let mut adj = vec![Vec::new(); n];
        for (i, e) in list.iter().enumerate() {
            adj[e.u].push((e.v, i));
            adj[e.v].push((e.u, i));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    /// Incident `(neighbor, edge index)` pairs sorted by neighbor.
    pub fn incident(&self, u: usize) -> &[(usize, usize)] {
        &self.adj[u]
    }

    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let a = &self.adj[u];
        a.binary_search_by(|&(x, _)| x.cmp(&v)).ok().map(|i| a[i].1)
    }

    pub fn min_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).min_by(f64::total_cmp)
    }

    pub fn max_weight(&self) -> Option<f64> {
        self.edges.iter().map(|e| e.w).max_by(f64::total_cmp)
    }

    /// SHA-256 over `n` and the canonical edge list, hex encoded.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n as u64).to_le_bytes());
        for e in &self.edges {
            h.update((e.u as u64).to_le_bytes());
            h.update((e.v as u64).to_le_bytes());
            h.update(e.w.to_bits().to_le_bytes());
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Connected component label per vertex (labels are the smallest vertex
    /// of each component).
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.n];
        let mut stack = Vec::new();
        for s in 0..self.n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = s;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &(v, _) in &self.adj[u] {
                    if label[v] == usize::MAX {
                        label[v] = s;
                        stack.push(v);
                    }
                }
            }
        }
        label
    }
}

/// Anything Bellman-Ford and Dijkstra can walk: a vertex count plus weighted
/// neighbor lists.
pub trait Adjacency: Sync {
    fn vertex_count(&self) -> usize;
    fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_;
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.adj[u].iter().map(move |&(v, e)| (v, self.edges[e].w))
    }
}

/// Number of bits in the padded ID space: `log2` of the smallest power of two
/// that is `>= n`, and at least 1.
pub fn log2_padded(n: usize) -> u32 {
    n.max(2).next_power_of_two().trailing_zeros()
}
