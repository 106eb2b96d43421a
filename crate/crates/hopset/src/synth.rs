//! Seeded random graph families. Every generator returns a connected graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    /// Erdős–Rényi graph plus a random spanning path.
    Er,
    /// Points in the unit square joined within a radius, plus a spanning path.
    Geometric,
    /// Path with weights spread log-uniformly over the whole aspect range.
    PowerPath,
    /// Cycle with log-uniform weights.
    PowerCycle,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenSpec {
    pub family: Family,
    pub n: usize,
    /// Target edge density for the random families (average degree).
    pub degree: f64,
    /// Largest weight; the smallest is 1.
    pub max_weight: f64,
    pub seed: u64,
}

impl GenSpec {
    pub fn new(family: Family, n: usize, max_weight: f64, seed: u64) -> Self {
        GenSpec {
            family,
            n,
            degree: 4.0,
            max_weight,
            seed,
        }
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, max_weight: f64) -> f64 {
    if max_weight <= 1.0 {
        return 1.0;
    }
    max_weight.powf(rng.gen::<f64>())
}

pub fn generate(spec: &GenSpec) -> Result<Graph> {
    if spec.n == 0 {
        return Err(Error::Config("graph must have at least one vertex".into()));
    }
    if !(spec.max_weight >= 1.0 && spec.max_weight.is_finite()) {
        return Err(Error::Config(format!("invalid max weight {}", spec.max_weight)));
    }
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.gen_range(0..=i));
    }
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    match spec.family {
        Family::Er => {
            let p = (spec.degree / n as f64).min(1.0);
            for w in perm.windows(2) {
                edges.push((w[0], w[1], log_uniform(&mut rng, spec.max_weight)));
            }
            for u in 0..n {
                for v in u + 1..n {
                    if rng.gen::<f64>() < p {
                        edges.push((u, v, log_uniform(&mut rng, spec.max_weight)));
                    }
                }
            }
        }
        Family::Geometric => {
            let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
            let r = (spec.degree / (std::f64::consts::PI * n as f64)).sqrt();
            let scale = |d: f64| (1.0 + (spec.max_weight - 1.0) * d / std::f64::consts::SQRT_2).max(1.0);
            let dist = |a: usize, b: usize| ((pts[a].0 - pts[b].0).powi(2) + (pts[a].1 - pts[b].1).powi(2)).sqrt();
            for u in 0..n {
                for v in u + 1..n {
                    let d = dist(u, v);
                    if d <= r {
                        edges.push((u, v, scale(d)));
                    }
                }
            }
            for w in perm.windows(2) {
                edges.push((w[0], w[1], scale(dist(w[0], w[1]))));
            }
        }
        Family::PowerPath | Family::PowerCycle => {
            for w in perm.windows(2) {
                edges.push((w[0], w[1], log_uniform(&mut rng, spec.max_weight)));
            }
            if spec.family == Family::PowerCycle && n > 2 {
                edges.push((perm[n - 1], perm[0], log_uniform(&mut rng, spec.max_weight)));
            }
            // pin the range so the aspect ratio reaches the requested scale
            if edges.len() >= 2 {
                edges[0].2 = 1.0;
                edges[1].2 = spec.max_weight;
            }
        }
    }
    Graph::new(n, edges)
}
