//! Fold angles of a bellow as it is compressed from rest to a 75% folding
//! ratio.
use tmpjump::kinematics::{
    displacement_from_folding_ratio, fold_state_from_displacement, folding_ratio, TmpDesign,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let design = TmpDesign::baseline();
    let lengths = design.crease_lengths();
    println!("resting height {:.1} mm", design.resting_height() * 1e3);
    println!(
        "crease length per cell: main {:.1} mm, sub {:.1} mm",
        lengths.main * 1e3,
        lengths.sub * 1e3
    );

    let dy_max = displacement_from_folding_ratio(&design, 0.75)?;
    println!(
        "\n{:>8} {:>9} {:>9} {:>9} {:>6}",
        "dy_mm", "thM_deg", "thG_deg", "thS_deg", "RF"
    );
    for i in 0..=10 {
        let dy = dy_max * i as f64 / 10.0;
        let s = fold_state_from_displacement(&design, dy)?;
        println!(
            "{:8.2} {:9.3} {:9.3} {:9.3} {:6.3}",
            dy * 1e3,
            s.theta_m.to_degrees(),
            s.theta_g.to_degrees(),
            s.theta_s.to_degrees(),
            folding_ratio(s.theta_m)
        );
    }
    Ok(())
}
