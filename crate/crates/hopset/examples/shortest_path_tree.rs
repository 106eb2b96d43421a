//! Turn a hop-limited query tree into an approximate shortest-path tree
//! that uses only edges of the graph.
//!
//!     cargo run --release --example shortest_path_tree

use hopset::spt::validate_tree;
use hopset::sssp::dijkstra;
use hopset::synth::{generate, Family, GenSpec};
use hopset::{build_hopset, extract_spt, EpsilonMode, HopsetParams};

fn main() -> hopset::Result<()> {
    let g = generate(&GenSpec::new(Family::PowerCycle, 150, 1e9, 3))?;
    let mut h = build_hopset(&g, HopsetParams::new(0.5, 2, 0.4, EpsilonMode::Internal))?;
    // a short hopbound forces the query tree through hopset edges, which
    // the extraction then unfolds
    h.hopbound = 8;
    let r = extract_spt(&g, &h, 0)?;
    for s in &r.steps {
        println!("{:<24} adopted {:>4}, non-graph links left {}", s.name, s.adopted, s.non_graph_links);
    }
    let report = validate_tree(&g, &r.tree)?;
    let exact = dijkstra(&g, 0);
    let worst = (1..g.n()).map(|v| r.tree.dist[v] / exact.dist[v]).fold(1.0, f64::max);
    println!(
        "{} tree edges, {} pointer-jumping rounds, worst stretch {worst:.4}",
        report.edges, report.jump_iterations
    );
    Ok(())
}
