//! Searches for the bellow design closest to an ideal linear spring with
//! the strain-softening prototype's force at 110 mm. Slow in debug builds;
//! run with `--release`.
use std::time::Instant;

use tmpjump::optimize::{optimize_linear_design, Algorithm, LinearFitSpec, MinimizeOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = LinearFitSpec::prototype_target()?;
    println!(
        "target {:.3} N at {:.0} mm",
        spec.target_f_max,
        spec.target_dy_max * 1e3
    );
    for algorithm in [Algorithm::Simplex, Algorithm::Powell] {
        let started = Instant::now();
        let r = optimize_linear_design(&spec, algorithm, &MinimizeOptions::default(), None)?;
        let d = r.best_design;
        println!(
            "{:>8}: N={} alpha={:.2} deg c={:.2} d={:.2} l={:.2} m={:.2} mm | error {:.2} N, residual {:+.4} N ({} evaluations, {:.1?})",
            algorithm.name(),
            d.n_cells,
            d.alpha.to_degrees(),
            d.c * 1e3,
            d.d * 1e3,
            d.l * 1e3,
            d.m * 1e3,
            r.error,
            r.constraint_residual,
            r.evaluations,
            started.elapsed()
        );
    }
    Ok(())
}
