//! Build a multi-scale hopset for a graph with a wide weight range and
//! check it against exact distances.
//!
//!     cargo run --release --example build_hopset

use hopset::synth::{generate, Family, GenSpec};
use hopset::validate::{validate_hopset, PairSelection};
use hopset::{build_hopset, EpsilonMode, HopsetParams};

fn main() -> hopset::Result<()> {
    let g = generate(&GenSpec::new(Family::PowerCycle, 128, 1e9, 1))?;
    // epsilon = 0.5 used directly inside the phases keeps beta small enough
    // for the hopset to matter at this size
    let params = HopsetParams::new(0.5, 2, 0.4, EpsilonMode::Internal);
    let h = build_hopset(&g, params)?;
    let s = h.schedule.as_ref().expect("direct build");
    println!("n = {}, m = {}, aspect ratio {:.3e}", g.n(), g.m(), s.aspect_ratio);
    println!("phases per scale {}, beta {}, scales {}..={}", s.ell + 1, s.beta, s.k0, s.lambda);
    for l in h.layers.iter().take(4) {
        println!("  scale {:>2}: {:>4} edges, {} rounds", l.scale, l.edges.len(), l.stats.rounds);
    }
    println!("  ... {} layers, {} edges in total", h.layers.len(), h.edge_count());
    let r = validate_hopset(&g, &h, PairSelection::All { max_n: 128 }, 1e-9)?;
    println!(
        "{} pairs: max stretch {:.4} (guaranteed {:.3e}), max hops {} of {}, passed {}",
        r.pairs, r.max_stretch, r.stretch_bound, r.max_hops, r.hopbound, r.passed
    );
    Ok(())
}
