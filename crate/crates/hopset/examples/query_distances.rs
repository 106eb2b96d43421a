//! Answer hop-limited distance queries from several sources at once and
//! compare with Dijkstra.
//!
//!     cargo run --release --example query_distances

use hopset::sssp::dijkstra;
use hopset::synth::{generate, Family, GenSpec};
use hopset::{build_hopset, EpsilonMode, HopsetIndex, HopsetParams};

fn main() -> hopset::Result<()> {
    let g = generate(&GenSpec::new(Family::Er, 200, 1e6, 7))?;
    let h = build_hopset(&g, HopsetParams::new(0.5, 2, 0.4, EpsilonMode::Internal))?;
    let index = HopsetIndex::new(&g, &h)?;
    let sources = [0, 17, 199];
    for (s, dv) in sources.iter().zip(index.mssd(&sources)?) {
        let exact = dijkstra(&g, *s);
        let worst = (0..g.n())
            .filter(|&v| v != *s)
            .map(|v| dv.dist[v] / exact.dist[v])
            .fold(1.0, f64::max);
        let hops = dv.hops.iter().max().copied().unwrap_or(0);
        println!("source {s:>3}: {} rounds, at most {hops} hops, worst ratio {worst:.4}", dv.rounds);
    }
    // the traced variant recovers the realizing path over G plus H
    let traced = index.sssd_traced(&[0])?;
    println!("path 0 -> 150: {:?}", traced.realizing_path(150).unwrap());
    Ok(())
}
