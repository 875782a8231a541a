//! Reduces crease bending measurements to per-unit-length stiffness.
//! Reads `configs/crease_measurements.csv` unless a path is given, then
//! shows the trend flag on a synthetic series that stiffens as it closes.
use std::f64::consts::FRAC_PI_2;
use std::fs::File;

use tmpjump::paleo::{
    read_measurements_csv, reduce_measurements, stiffness_vs_angle_report, CreaseMeasurement,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/examples/configs/crease_measurements.csv"
        )
        .into()
    });
    let report = reduce_measurements(&read_measurements_csv(File::open(&path)?)?)?;
    for s in &report.specimens {
        for r in &s.records {
            println!(
                "{:>6}: k_theta {:.4} N m/rad, k_hat {:.4} N/rad",
                s.specimen.as_deref().unwrap_or("-"),
                r.k_theta,
                r.k_hat
            );
        }
    }

    let series: Vec<_> = [(0.004, 80.0), (0.012, 65.0), (0.030, 50.0), (0.070, 40.0)]
        .iter()
        .map(|&(f, deg): &(f64, f64)| {
            CreaseMeasurement::new(f, 0.05, FRAC_PI_2, deg.to_radians(), 0.06)
        })
        .collect();
    let r = stiffness_vs_angle_report(&series)?;
    println!(
        "\nloaded series: {:?}",
        r.trend.expect("two or more measurements")
    );
    for rec in &r.records {
        println!("  {:5.1} deg  {:.5} N m/rad", rec.theta_l_deg, rec.k_theta);
    }
    Ok(())
}
