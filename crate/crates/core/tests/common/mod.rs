//! Measurements shared by the property tests and the acceptance report.
#![allow(dead_code)]

use tmpjump::dynamics::{cg_trajectory, simulate, JumperConfig};
use tmpjump::kinematics::{
    dependent_angles, displacement_from_folding_ratio, fold_state_from_displacement, folding_ratio,
    resting_state, TmpDesign,
};
use tmpjump::stiffness::{force_curve, stored_energy, CreaseProfile, ForceModel};

/// Strain energy of every crease as a quadratic spring at its base
/// stiffness: 32(N-1) main folds and 32N sub-folds.
pub fn crease_energy(design: &TmpDesign, profile: &CreaseProfile, dy: f64) -> f64 {
    let s = fold_state_from_displacement(design, dy).unwrap();
    let r = resting_state(design);
    let n = f64::from(design.n_cells);
    16.0 * (n - 1.0) * profile.k_main0 * (s.theta_m - r.theta_m).powi(2)
        + 16.0 * n * profile.k_sub0 * (s.theta_s - r.theta_s).powi(2)
}

/// Relative gap between the force law and a central difference of the
/// crease energy at `dy`.
pub fn virtual_work_error(design: &TmpDesign, dy: f64) -> f64 {
    let model = ForceModel::new(*design).unwrap();
    let h = 1e-6;
    let du = (crease_energy(design, &model.profile, dy + h)
        - crease_energy(design, &model.profile, dy - h))
        / (2.0 * h);
    let f = model.reaction_force(dy).unwrap();
    (f - du).abs() / f.abs()
}

/// Fold angle -> folding ratio -> displacement -> fold angle.
pub fn kinematic_round_trip_error(design: &TmpDesign, theta_m: f64) -> f64 {
    let dy = displacement_from_folding_ratio(design, folding_ratio(theta_m)).unwrap();
    (fold_state_from_displacement(design, dy).unwrap().theta_m - theta_m).abs()
}

/// Residual of the two vertex closure relations at `theta_m`.
pub fn closure_residual(alpha: f64, theta_m: f64) -> f64 {
    let (theta_g, theta_s) = dependent_angles(alpha, theta_m);
    let r1 = (0.5 * theta_g).tan() - alpha.tan() * theta_m.cos();
    let r2 = theta_s.cos() * alpha.sin() - (0.5 * theta_g).sin();
    r1.abs().max(r2.abs())
}

/// Relative difference between the trapezoid energy at `n` samples and
/// its Richardson extrapolation from `n` and `2n - 1` samples.
pub fn richardson_error(design: &TmpDesign, dy_max: f64, n: usize) -> f64 {
    let model = ForceModel::new(*design).unwrap();
    let coarse = stored_energy(&force_curve(&model, dy_max, n).unwrap());
    let fine = stored_energy(&force_curve(&model, dy_max, 2 * n - 1).unwrap());
    let extrapolated = (4.0 * fine - coarse) / 3.0;
    (coarse - extrapolated).abs() / extrapolated.abs()
}

/// Integral of the spring force from `a` to `b` by adaptive Simpson
/// quadrature, which resolves the steep rise near the fully unfolded end.
pub fn spring_work(model: &ForceModel, a: f64, b: f64) -> f64 {
    fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
        (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    }
    #[allow(clippy::too_many_arguments)]
    fn adapt(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
        let left = simpson(a, m, fa, lm, fm);
        let right = simpson(m, b, fm, rm, fb);
        if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
            return left + right + (left + right - whole) / 15.0;
        }
        adapt(f, a, m, fa, lm, fm, left, 0.5 * tol, depth - 1)
            + adapt(f, m, b, fm, rm, fb, right, 0.5 * tol, depth - 1)
    }
    let f = |x: f64| model.sample(x).force;
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    adapt(&f, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 1e-12, 20)
}

/// Largest relative drift of total mechanical energy over an undamped
/// jump, relative to the initial total. Spring energy is accumulated
/// along the trace.
pub fn energy_drift(config: &JumperConfig) -> f64 {
    assert_eq!(config.eta, 1.0);
    let (trace, _) = simulate(config).unwrap();
    let model = config.force_model().unwrap();
    let l0 = config.natural_length();
    let g = config.gravity;
    let compression = |p: &tmpjump::dynamics::TracePoint| l0 - (p.y2 - p.y1);
    let mut dy_prev = compression(&trace.points[0]);
    let mut u = spring_work(&model, 0.0, dy_prev);
    let mut e0 = None;
    let mut worst: f64 = 0.0;
    for p in &trace.points {
        let dy = compression(p);
        u += spring_work(&model, dy_prev, dy);
        dy_prev = dy;
        let total = 0.5 * config.m1 * p.v1 * p.v1
            + 0.5 * config.m2 * p.v2 * p.v2
            + g * (config.m1 * p.y1 + config.m2 * p.y2)
            + u;
        let e0 = *e0.get_or_insert(total);
        worst = worst.max(((total - e0) / e0).abs());
    }
    worst
}

/// Least-squares `y = a + b t + c t^2`; returns `(a, b, c)`.
pub fn quadratic_fit(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let t0 = points[0].0;
    let mut m = [[0.0; 4]; 3];
    for &(t, y) in points {
        let t = t - t0;
        let basis = [1.0, t, t * t];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += basis[i] * basis[j];
            }
            m[i][3] += basis[i] * y;
        }
    }
    for col in 0..3 {
        let pivot = (col..3)
            .max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        for row in 0..3 {
            if row != col {
                let k = m[row][col] / m[col][col];
                let pivot_row = m[col];
                for (v, p) in m[row].iter_mut().zip(pivot_row).skip(col) {
                    *v -= k * p;
                }
            }
        }
    }
    let c = m[2][3] / m[2][2];
    let b = m[1][3] / m[1][1];
    let a = m[0][3] / m[0][0];
    // Shift back to absolute time.
    (a - b * t0 + c * t0 * t0, b - 2.0 * c * t0, c)
}

/// Relative error of the fitted flight-phase CG acceleration against -g.
pub fn cg_acceleration_error(config: &JumperConfig) -> f64 {
    let (trace, _) = simulate(config).unwrap();
    let flight: Vec<(f64, f64)> = cg_trajectory(&trace, config.m1, config.m2)
        .into_iter()
        .filter(|&(t, _)| t > trace.t_takeoff && t < trace.t_land)
        .collect();
    let (_, _, c) = quadratic_fit(&flight);
    (2.0 * c + config.gravity).abs() / config.gravity
}

pub fn undamped(mut config: JumperConfig) -> JumperConfig {
    config.eta = 1.0;
    config
}
