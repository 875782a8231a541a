//! Jump sweep against an equivalent linear spring. Usage:
//! `dynamic_sweep [N|d|alpha] [eta]` (defaults N, 1.0).
use tmpjump::studies::{dynamic_sweep, DynamicsInputs, SweepSpec, SweepVariable};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let variable: SweepVariable = args.next().as_deref().unwrap_or("N").parse()?;
    let eta = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let spec = SweepSpec::new(variable).with_dynamics(DynamicsInputs {
        eta,
        ..Default::default()
    });
    print!("{}", dynamic_sweep(&spec, None)?.to_csv());
    Ok(())
}
