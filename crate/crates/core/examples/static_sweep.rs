//! One-at-a-time static sweep. Usage: `static_sweep [N|d|l|m|c|alpha]`
//! (default alpha). Prints the sweep table as CSV.
use tmpjump::studies::{static_sweep, SweepSpec, SweepVariable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let variable: SweepVariable = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("alpha")
        .parse()?;
    let result = static_sweep(&SweepSpec::new(variable), None)?;
    print!("{}", result.to_csv());
    Ok(())
}
