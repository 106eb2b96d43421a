//! Weight reduction: hopsets whose size does not grow with the aspect
//! ratio, built from contracted scale graphs plus star edges.
//!
//!     cargo run --release --example reduced_hopset

use hopset::spt::validate_tree;
use hopset::synth::{generate, Family, GenSpec};
use hopset::validate::{validate_hopset, PairSelection};
use hopset::{build_hopset, build_reduced_hopset, extract_spt, BuildOptions, EpsilonMode, HopsetParams};

fn main() -> hopset::Result<()> {
    let g = generate(&GenSpec::new(Family::PowerPath, 128, 1e12, 5))?;
    let params = HopsetParams::new(0.5, 2, 0.4, EpsilonMode::Internal);
    let direct = build_hopset(&g, params)?;
    let h = build_reduced_hopset(&g, params, &BuildOptions::default())?;
    let meta = h.reduced.as_ref().expect("reduced build");
    println!(
        "direct: {} layers, {} edges; reduced: {} families, {} layers, {} edges ({} stars)",
        direct.layers.len(),
        direct.edge_count(),
        meta.families.len(),
        h.layers.len(),
        h.edge_count(),
        meta.stars.len()
    );
    println!("{} distinct nodes over all scales", meta.distinct_nodes);
    let r = validate_hopset(&g, &h, PairSelection::All { max_n: 128 }, 1e-9)?;
    println!("max stretch {:.4}, max hops {} of {}", r.max_stretch, r.max_hops, r.hopbound);
    let tree = extract_spt(&g, &h, 64)?;
    println!("tree from 64 has {} edges", validate_tree(&g, &tree.tree)?.edges);
    Ok(())
}
