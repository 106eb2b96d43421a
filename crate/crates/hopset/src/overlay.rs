//! A graph together with extra (hopset) edges, merged by minimum weight.

use serde::{Deserialize, Serialize};

use crate::graph::{Adjacency, Graph};

/// Where an edge of a merged graph or a tree comes from.
///
/// The derived order is the tie preference when two sources offer the same
/// weight for a pair: graph edges first, then hopset layers by index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Link {
    /// Edge index in the base graph.
    Edge(usize),
    /// Edge `edge` of hopset layer `layer`.
    Hop { layer: usize, edge: usize },
    /// Star edge of the weight reduction.
    Star(usize),
    /// Contracted-graph edge of a reduction family (center to center).
    Super { family: usize, edge: usize },
}

impl Link {
    pub fn is_hop(&self) -> bool {
        matches!(self, Link::Hop { .. })
    }
}

/// Compressed adjacency over `E ∪ extra` where each unordered pair keeps its
/// lightest weight and the preferred link on ties.
#[derive(Clone, Debug)]
pub struct Overlay {
    n: usize,
    offsets: Vec<usize>,
    targets: Vec<usize>,
    weights: Vec<f64>,
    links: Vec<Link>,
}

impl Overlay {
    pub fn new(g: &Graph, extra: impl IntoIterator<Item = (usize, usize, f64, Link)>) -> Self {
        let mut all: Vec<(usize, usize, f64, Link)> = g
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| (e.u, e.v, e.w, Link::Edge(i)))
            .collect();
        for (u, v, w, l) in extra {
            if u != v {
                all.push((u.min(v), u.max(v), w, l));
            }
        }
        Self::from_pairs(g.n(), all)
    }

    fn from_pairs(n: usize, mut all: Vec<(usize, usize, f64, Link)>) -> Self {
        all.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(a.2.total_cmp(&b.2))
                .then(a.3.cmp(&b.3))
        });
        all.dedup_by(|later, kept| later.0 == kept.0 && later.1 == kept.1);
        let mut deg = vec![0usize; n + 1];
        for &(u, v, _, _) in &all {
            deg[u] += 1;
            deg[v] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + deg[i];
        }
        let total = offsets[n];
        let mut fill = offsets.clone();
        let mut targets = vec![0; total];
        let mut weights = vec![0.0; total];
        let mut links = vec![Link::Edge(0); total];
        for &(u, v, w, l) in &all {
            for (a, b) in [(u, v), (v, u)] {
                let at = fill[a];
                targets[at] = b;
                weights[at] = w;
                links[at] = l;
                fill[a] += 1;
            }
        }
        // (u, v) pairs were sorted, so each row is sorted for the smaller
        // endpoint but not the larger one
        for u in 0..n {
            let (s, e) = (offsets[u], offsets[u + 1]);
            let mut row: Vec<(usize, f64, Link)> =
                (s..e).map(|i| (targets[i], weights[i], links[i])).collect();
            row.sort_by_key(|r| r.0);
            for (k, (t, w, l)) in row.into_iter().enumerate() {
                targets[s + k] = t;
                weights[s + k] = w;
                links[s + k] = l;
            }
        }
        Overlay {
            n,
            offsets,
            targets,
            weights,
            links,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of undirected pairs.
    pub fn pair_count(&self) -> usize {
        self.targets.len() / 2
    }

    /// Weight and link of the pair `(u, v)` if present.
    pub fn link(&self, u: usize, v: usize) -> Option<(f64, Link)> {
        let (s, e) = (self.offsets[u], self.offsets[u + 1]);
        self.targets[s..e]
            .binary_search(&v)
            .ok()
            .map(|i| (self.weights[s + i], self.links[s + i]))
    }

    /// `(neighbor, weight, link)` triples of `u`, sorted by neighbor.
    pub fn row(&self, u: usize) -> impl Iterator<Item = (usize, f64, Link)> + '_ {
        (self.offsets[u]..self.offsets[u + 1]).map(move |i| (self.targets[i], self.weights[i], self.links[i]))
    }
}

impl Adjacency for Overlay {
    fn vertex_count(&self) -> usize {
        self.n
    }

    fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.offsets[u]..self.offsets[u + 1]).map(move |i| (self.targets[i], self.weights[i]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merged_weight_is_minimum_with_graph_preferred_on_ties() {
        let g = Graph::new(3, [(0, 1, 4.0), (1, 2, 2.0)]).unwrap();
        let h = vec![
            (1, 0, 3.0, Link::Hop { layer: 0, edge: 0 }),
            (2, 1, 2.0, Link::Hop { layer: 0, edge: 1 }),
            (0, 2, 9.0, Link::Hop { layer: 1, edge: 0 }),
            (0, 2, 9.0, Link::Hop { layer: 0, edge: 2 }),
        ];
        let o = Overlay::new(&g, h);
        assert_eq!(o.link(0, 1), Some((3.0, Link::Hop { layer: 0, edge: 0 })));
        assert_eq!(o.link(2, 1), Some((2.0, Link::Edge(1))));
        assert_eq!(o.link(2, 0), Some((9.0, Link::Hop { layer: 0, edge: 2 })));
        assert_eq!(o.pair_count(), 3);
        let row: Vec<usize> = o.row(2).map(|r| r.0).collect();
        assert_eq!(row, vec![0, 1]);
    }
}
