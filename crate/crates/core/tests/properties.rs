mod common;

use proptest::prelude::*;
use tmpjump::dynamics::{simulate, JumperConfig};
use tmpjump::kinematics::{displacement_from_folding_ratio, TmpDesign};
use tmpjump::stiffness::{force_curve, nonlinearity_ratio, ForceModel};

use common::*;

fn design_strategy() -> impl Strategy<Value = TmpDesign> {
    (
        6u32..=10,
        30.0..70.0f64,
        20.0..40.0f64,
        20.0..40.0f64,
        20.0..40.0f64,
        20.0..40.0f64,
    )
        .prop_map(|(n, alpha, c, d, l, m)| {
            TmpDesign::from_mm_deg(n, alpha, c, d, l, m, 0.0186, 0.0946)
        })
}

proptest! {
    #[test]
    fn kinematic_round_trip(design in design_strategy(), theta_deg in 5.0..60.0f64) {
        prop_assert!(kinematic_round_trip_error(&design, theta_deg.to_radians()) < 1e-10);
    }

    #[test]
    fn vertex_closure(alpha_deg in 1.0..89.0f64, theta_deg in 0.0..90.0f64) {
        prop_assert!(closure_residual(alpha_deg.to_radians(), theta_deg.to_radians()) < 1e-12);
    }

    #[test]
    fn force_is_energy_gradient_on_plateau(dy in 0.005..0.025f64) {
        let err = virtual_work_error(&TmpDesign::baseline(), dy);
        prop_assert!(err < 1e-4, "dy {dy}: relative error {err}");
    }

    #[test]
    fn trapezoid_converges(design in design_strategy()) {
        let dy = displacement_from_folding_ratio(&design, 0.75).unwrap();
        prop_assert!(richardson_error(&design, dy, 2001) < 1e-6);
    }
}

#[test]
fn sub_folds_carry_the_nonlinearity() {
    let base = TmpDesign::baseline();
    let dy = displacement_from_folding_ratio(&base, 0.75).unwrap();
    let r_n = |k_main: f64, k_sub: f64| {
        let design = TmpDesign {
            k_main_hat: k_main,
            k_sub_hat: k_sub,
            ..base
        };
        nonlinearity_ratio(&force_curve(&ForceModel::new(design).unwrap(), dy, 2001).unwrap())
            .unwrap()
    };
    let sub_only = r_n(0.0, 0.005);
    let main_only = r_n(0.005, 0.0);
    assert!(
        sub_only > main_only,
        "sub-only {sub_only} vs main-only {main_only}"
    );
}

#[test]
fn undamped_jump_conserves_energy() {
    for config in [
        JumperConfig::nonlinear_prototype(),
        JumperConfig::linear_prototype(),
    ] {
        let drift = energy_drift(&undamped(config));
        assert!(drift < 1e-4, "drift {drift}");
    }
}

#[test]
fn flight_centre_of_mass_falls_freely() {
    for config in [
        JumperConfig::nonlinear_prototype(),
        JumperConfig::linear_prototype(),
    ] {
        let err = cg_acceleration_error(&undamped(config));
        assert!(err < 1e-3, "relative error {err}");
        // Internal damping does not act on the centre of mass either.
        assert!(cg_acceleration_error(&config) < 1e-3);
    }
}

#[test]
fn deeper_compression_jumps_higher() {
    let mut last = (0.0, 0.0);
    for dy0 in [0.070, 0.080, 0.090, 0.100, 0.110] {
        let config = JumperConfig {
            dy0,
            ..JumperConfig::nonlinear_prototype()
        };
        let (_, m) = simulate(&config).unwrap();
        assert!(
            m.airtime > last.0 && m.clearance > last.1,
            "dy0 {dy0}: {m:?}"
        );
        last = (m.airtime, m.clearance);
    }
}

#[test]
fn damping_lowers_the_jump() {
    let damped = JumperConfig::nonlinear_prototype();
    let (_, lossy) = simulate(&damped).unwrap();
    let (_, ideal) = simulate(&undamped(damped)).unwrap();
    assert!(lossy.clearance < ideal.clearance);
    assert!(lossy.energy_released <= ideal.energy_released + 1e-12);
}
