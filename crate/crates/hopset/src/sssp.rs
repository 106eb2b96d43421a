//! Hop-bounded Bellman-Ford, Dijkstra and the aspect ratio.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};

/// Distances from a source set together with the realizing paths.
///
/// `hops[v]` is the number of edges of the path that realizes `dist[v]` and
/// `parent[v]` is its last vertex before `v`. When a hop-bounded run stops
/// before converging, a parent may have improved in the final round, so only
/// `dist[v] >= dist[parent] + w` is guaranteed; after convergence it is an
/// equality.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceVector {
    pub sources: Vec<usize>,
    pub dist: Vec<f64>,
    pub hops: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    /// Synchronous rounds actually executed.
    pub rounds: u64,
    pub converged: bool,
    pub relaxations: u64,
    history: Option<Vec<Vec<(u32, u32)>>>,
}

impl DistanceVector {
    fn new(n: usize, sources: &[usize]) -> Self {
        let mut srcs: Vec<usize> = sources.to_vec();
        srcs.sort_unstable();
        srcs.dedup();
        let mut dist = vec![f64::INFINITY; n];
        for &s in &srcs {
            dist[s] = 0.0;
        }
        DistanceVector {
            sources: srcs,
            dist,
            hops: vec![0; n],
            parent: vec![None; n],
            rounds: 0,
            converged: false,
            relaxations: 0,
            history: None,
        }
    }

    /// Vertices of the path realizing `dist[v]`, source first. Requires a
    /// traced run; otherwise follows final parent pointers.
    pub fn realizing_path(&self, v: usize) -> Option<Vec<usize>> {
        if !self.dist[v].is_finite() {
            return None;
        }
        let mut path = vec![v];
        match &self.history {
            Some(hist) => {
                let mut cur = v;
                let mut round = u32::MAX;
                loop {
                    let entries = &hist[cur];
                    let pos = entries.partition_point(|&(r, _)| r <= round);
                    if pos == 0 {
                        break;
                    }
                    let (r, p) = entries[pos - 1];
                    cur = p as usize;
                    round = r - 1;
                    path.push(cur);
                }
            }
            None => {
                let mut cur = v;
                while let Some(p) = self.parent[cur] {
                    cur = p;
                    path.push(cur);
                    if path.len() > self.dist.len() {
                        return None;
                    }
                }
            }
        }
        path.reverse();
        Some(path)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BfOptions {
    pub hopbound: u64,
    pub cap: Option<f64>,
    /// Keep per-vertex change logs so `realizing_path` is exact even for
    /// truncated runs.
    pub trace: bool,
}

/// `d^(h)(S, v)`: minimum weight over paths from any source with at most
/// `hopbound` edges. Ties go to the smaller predecessor ID.
pub fn bounded_bellman_ford<A: Adjacency>(
    g: &A,
    sources: &[usize],
    hopbound: u64,
    cap: Option<f64>,
) -> DistanceVector {
    bellman_ford_with(
        g,
        sources,
        BfOptions {
            hopbound,
            cap,
            trace: false,
        },
    )
}

pub fn bellman_ford_with<A: Adjacency>(g: &A, sources: &[usize], opt: BfOptions) -> DistanceVector {
    let n = g.vertex_count();
    let mut dv = DistanceVector::new(n, sources);
    if opt.trace {
        dv.history = Some(vec![Vec::new(); n]);
    }
    let cap = opt.cap.unwrap_or(f64::INFINITY);
    let mut frontier = dv.sources.clone();
    // best candidate per vertex this round: (dist, parent, hops)
    let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; n];
    let mut touched = Vec::new();
    while dv.rounds < opt.hopbound && !frontier.is_empty() {
        dv.rounds += 1;
        for &u in &frontier {
            let du = dv.dist[u];
            let hu = dv.hops[u];
            for (v, w) in g.neighbors(u) {
                dv.relaxations += 1;
                let cand = du + w;
                if cand > cap {
                    continue;
                }
                let better_than_current = match dv.parent[v] {
                    _ if cand < dv.dist[v] => true,
                    Some(p) => cand == dv.dist[v] && u < p,
                    None => false,
                };
                if !better_than_current {
                    continue;
                }
                match &mut best[v] {
                    Some((bd, bp, bh)) => {
                        if cand < *bd || (cand == *bd && u < *bp) {
                            *bd = cand;
                            *bp = u;
                            *bh = hu + 1;
                        }
                    }
                    slot @ None => {
                        *slot = Some((cand, u, hu + 1));
                        touched.push(v);
                    }
                }
            }
        }
        touched.sort_unstable();
        frontier.clear();
        for &v in &touched {
            let (d, p, h) = best[v].take().expect("touched vertex has a candidate");
            dv.dist[v] = d;
            dv.parent[v] = Some(p);
            dv.hops[v] = h;
            if let Some(hist) = &mut dv.history {
                hist[v].push((dv.rounds as u32, p as u32));
            }
            frontier.push(v);
        }
        touched.clear();
    }
    dv.converged = frontier.is_empty();
    dv
}

#[derive(PartialEq)]
struct HeapItem(f64, usize);

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact single-source distances with a binary heap.
pub fn dijkstra<A: Adjacency>(g: &A, source: usize) -> DistanceVector {
    let n = g.vertex_count();
    let mut dv = DistanceVector::new(n, &[source]);
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    heap.push(HeapItem(0.0, source));
    while let Some(HeapItem(d, u)) = heap.pop() {
        if done[u] {
            continue;
        }
        done[u] = true;
        dv.rounds += 1;
        for (v, w) in g.neighbors(u) {
            dv.relaxations += 1;
            if done[v] {
                continue;
            }
            let cand = d + w;
            if cand < dv.dist[v] || (cand == dv.dist[v] && dv.parent[v].is_some_and(|p| u < p)) {
                let improved = cand < dv.dist[v];
                dv.dist[v] = cand;
                dv.parent[v] = Some(u);
                dv.hops[v] = dv.hops[u] + 1;
                if improved {
                    heap.push(HeapItem(cand, v));
                }
            }
        }
    }
    dv.converged = true;
    dv
}

/// Largest finite pairwise distance over the smallest positive one, taken
/// over all reachable pairs of the graph.
pub fn aspect_ratio(g: &Graph) -> Result<f64> {
    let (lo, hi) = (0..g.n())
        .into_par_iter()
        .map(|s| {
            let dv = dijkstra(g, s);
            dv.dist
                .iter()
                .filter(|d| d.is_finite() && **d > 0.0)
                .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)))
        })
        .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
    if lo.is_finite() {
        Ok(hi / lo)
    } else {
        Err(Error::Degenerate)
    }
}

/// Relative comparison used throughout the test suite.
pub fn within_rel(a: f64, b: f64, tol: f64) -> bool {
    if a == b {
        return true;
    }
    (a - b).abs() <= tol * a.abs().max(b.abs())
}
