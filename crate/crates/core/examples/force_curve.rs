//! Compression force curves of the two prototype bellows at 110 mm, with
//! their nonlinearity ratios. Pass `--csv` to dump the softening curve.
use tmpjump::kinematics::TmpDesign;
use tmpjump::stiffness::{force_curve, CurveMetrics, ForceModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dy_max = 0.110;
    let designs = [
        ("strain-softening", TmpDesign::nonlinear_prototype()),
        ("close-to-linear", TmpDesign::linear_prototype()),
    ];
    for (name, design) in designs {
        let curve = force_curve(&ForceModel::new(design)?, dy_max, 2001)?;
        if std::env::args().any(|a| a == "--csv") {
            print!("{}", curve.to_csv());
            return Ok(());
        }
        let m = CurveMetrics::of(&curve)?;
        println!(
            "{name:>17}: F_max {:.3} N, stored {:.4} J, R_n {:.4}, k_eq {:.2} N/m",
            m.f_max, m.stored_energy, m.nonlinearity_ratio, m.k_eq
        );
        for p in curve.points().iter().step_by(250) {
            println!("{:>21.1} mm {:8.3} N", p.dy * 1e3, p.force + 0.0);
        }
    }
    Ok(())
}
