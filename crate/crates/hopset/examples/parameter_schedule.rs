//! Inspect the derived constants of a build without building anything.
//!
//!     cargo run --example parameter_schedule

use hopset::{compute_schedule, EpsilonMode};

fn main() -> hopset::Result<()> {
    for (eps, kappa, rho, mode) in [
        (0.5, 4, 0.25, EpsilonMode::Internal),
        (0.5, 2, 0.4, EpsilonMode::Internal),
        (0.5, 4, 0.25, EpsilonMode::Rescaled),
    ] {
        let s = compute_schedule(1024, eps, kappa, rho, 1e6, mode)?;
        println!("eps {eps} kappa {kappa} rho {rho} {mode:?}");
        println!("  internal eps {:.3e}, phases {}, beta {}", s.internal_epsilon, s.ell + 1, s.beta);
        println!("  h = {:?}", s.h);
        println!("  deg = {:?}", s.deg_cap);
        if s.scales().is_empty() {
            println!("  no scale needs a hopset");
        } else {
            println!("  scales {}..={}, stretch bound {:.4e}", s.k0, s.lambda, s.stretch_bound());
        }
        for w in &s.warnings {
            println!("  warning: {w}");
        }
    }
    Ok(())
}
