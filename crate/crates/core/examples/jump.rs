//! Analytical jumps of the two prototypes. An optional argument names a
//! file to receive the strain-softening jump's trace as CSV.
use tmpjump::dynamics::{cg_trajectory, simulate, JumperConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = [
        ("strain-softening", JumperConfig::nonlinear_prototype()),
        ("close-to-linear", JumperConfig::linear_prototype()),
    ];
    for (i, (name, config)) in runs.iter().enumerate() {
        let (trace, m) = simulate(config)?;
        let apex = cg_trajectory(&trace, config.m1, config.m2)
            .into_iter()
            .fold(f64::NEG_INFINITY, |a, (_, y)| a.max(y));
        println!("{name}:");
        println!(
            "  take-off  {:.4} s at {:.3} m/s (centre of mass)",
            m.t_takeoff, m.takeoff_velocity_cg
        );
        println!("  airtime   {:.4} s", m.airtime);
        println!("  clearance {:.1} mm", m.clearance * 1e3);
        println!(
            "  CG apex   {:.1} mm, released {:.4} J",
            apex * 1e3,
            m.energy_released
        );
        if i == 0 {
            if let Some(path) = std::env::args().nth(1) {
                std::fs::write(&path, trace.to_csv())?;
                println!("  trace -> {path}");
            }
        }
    }
    Ok(())
}
