//! Oracle checks of a hopset against exact Dijkstra distances.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::Hopset;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::query::HopsetIndex;
use crate::sssp::dijkstra;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairSelection {
    /// Every ordered pair, refused above `max_n` vertices.
    All { max_n: usize },
    /// `count` random pairs drawn with `seed`.
    Sampled { count: usize, seed: u64 },
}

/// Upper edges of the stretch histogram buckets.
pub const BUCKETS: [f64; 6] = [1.0 + 1e-9, 1.001, 1.01, 1.1, 1.5, 2.0];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub pairs: u64,
    pub max_stretch: f64,
    pub stretch_bound: f64,
    /// Pair counts per bucket of `BUCKETS`, plus one overflow bucket.
    pub histogram: Vec<u64>,
    /// Pairs whose hop-limited distance exceeds the bound.
    pub stretch_violations: u64,
    /// Pairs where `G ∪ H` is shorter than `G`.
    pub shortening_violations: u64,
    /// Pairs the query reports unreachable although they are connected.
    pub unreached: u64,
    pub max_hops: usize,
    pub hopbound: u64,
    /// Longest replayed memory path, if memory paths are stored.
    pub max_memory_hops: Option<usize>,
    pub passed: bool,
}

fn pairs_by_source(n: usize, sel: PairSelection) -> Result<BTreeMap<usize, Vec<usize>>> {
    let mut out: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    match sel {
        PairSelection::All { max_n } => {
            if n > max_n {
                return Err(Error::Config(format!(
                    "all-pairs validation refused for n = {n} > {max_n}"
                )));
            }
            for s in 0..n {
                out.insert(s, (0..n).filter(|&t| t != s).collect());
            }
        }
        PairSelection::Sampled { count, seed } => {
            if n < 2 {
                return Ok(out);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let s = rng.gen_range(0..n);
                let mut t = rng.gen_range(0..n - 1);
                if t >= s {
                    t += 1;
                }
                out.entry(s).or_default().push(t);
            }
        }
    }
    Ok(out)
}

/// Checks `d_G <= d^(β)_{G∪H} <= bound · d_G`, that unrestricted distances
/// in `G ∪ H` equal `d_G`, that every realizing path has at most `β` hops
/// and, if present, that memory paths replay.
pub fn validate_hopset(g: &Graph, h: &Hopset, sel: PairSelection, tol: f64) -> Result<ValidationReport> {
    let index = HopsetIndex::new(g, h)?;
    let bound = h.stretch_bound;
    let pairs = pairs_by_source(g.n(), sel)?;
    let sources: Vec<(&usize, &Vec<usize>)> = pairs.iter().collect();
    let parts: Vec<ValidationReport> = sources
        .par_iter()
        .map(|(&s, targets)| {
            let approx = index.sssd(&[s])?;
            let exact = dijkstra(g, s);
            let full = dijkstra(index.overlay(), s);
            let mut r = empty(g.n(), h);
            for &t in targets.iter() {
                let (a, e, f) = (approx.dist[t], exact.dist[t], full.dist[t]);
                r.pairs += 1;
                if !e.is_finite() {
                    if a.is_finite() || f.is_finite() {
                        r.shortening_violations += 1;
                    }
                    continue;
                }
                if !a.is_finite() {
                    r.unreached += 1;
                    continue;
                }
                if f < e * (1.0 - tol) || a < e * (1.0 - tol) {
                    r.shortening_violations += 1;
                }
                let st = a / e;
                r.max_stretch = r.max_stretch.max(st);
                if st > bound * (1.0 + tol) {
                    r.stretch_violations += 1;
                }
                let b = BUCKETS.iter().position(|&x| st <= x).unwrap_or(BUCKETS.len());
                r.histogram[b] += 1;
                r.max_hops = r.max_hops.max(approx.hops[t]);
            }
            Ok(r)
        })
        .collect::<Result<_>>()?;
    let mut r = empty(g.n(), h);
    for p in parts {
        r.pairs += p.pairs;
        r.max_stretch = r.max_stretch.max(p.max_stretch);
        for (a, b) in r.histogram.iter_mut().zip(&p.histogram) {
            *a += b;
        }
        r.stretch_violations += p.stretch_violations;
        r.shortening_violations += p.shortening_violations;
        r.unreached += p.unreached;
        r.max_hops = r.max_hops.max(p.max_hops);
    }
    if h.memory {
        r.max_memory_hops = Some(h.replay_memory(g, tol)?);
    }
    r.passed = r.stretch_violations == 0
        && r.shortening_violations == 0
        && r.unreached == 0
        && r.max_hops as u64 <= r.hopbound;
    Ok(r)
}

fn empty(n: usize, h: &Hopset) -> ValidationReport {
    ValidationReport {
        n,
        pairs: 0,
        max_stretch: 1.0,
        stretch_bound: h.stretch_bound,
        histogram: vec![0; BUCKETS.len() + 1],
        stretch_violations: 0,
        shortening_violations: 0,
        unreached: 0,
        max_hops: 0,
        hopbound: h.hopbound,
        max_memory_hops: None,
        passed: false,
    }
}
