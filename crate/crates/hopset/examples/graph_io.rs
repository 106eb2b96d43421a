//! Generate a seeded graph, write it as DIMACS and CSV, and read it back.
//!
//!     cargo run --example graph_io

use hopset::io::{parse_graph, write_graph, Format};
use hopset::sssp::aspect_ratio;
use hopset::synth::{generate, Family, GenSpec};

fn main() -> hopset::Result<()> {
    let g = generate(&GenSpec::new(Family::Er, 12, 100.0, 42))?;
    let dimacs = write_graph(&g, Format::Dimacs);
    print!("{dimacs}");
    let back = parse_graph(&dimacs, Format::Dimacs)?;
    assert_eq!(back, g);
    let csv = write_graph(&g, Format::Csv);
    assert_eq!(parse_graph(&csv, Format::Csv)?, g);
    println!("checksum {}", g.checksum());
    println!("aspect ratio {:.2}", aspect_ratio(&g)?);
    match parse_graph("p sp 2 1\na 1 2 0\n", Format::Dimacs) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
