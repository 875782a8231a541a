//! Nonlinear reaction force of the bellow and the energy metrics of sampled
//! force curves.
//!
//! The creases are torsional springs. Inside the band `[theta1, theta2]` each
//! fold has its base coefficient; outside it the coefficient is scaled by a
//! `sec^2` penalty that models facet contact (folded flat) and facet
//! stretching (extended flat).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{fold_state_at, resting_state, TmpDesign};
use crate::output::{sig15, CsvTable};

/// Default lower edge of the constant-stiffness band (38 degrees).
pub const DEFAULT_THETA_LOWER_DEG: f64 = 38.0;
/// Default upper edge of the constant-stiffness band (70 degrees).
pub const DEFAULT_THETA_UPPER_DEG: f64 = 70.0;
/// Default magnitude at which force evaluations are clamped, in newtons.
pub const DEFAULT_FORCE_CAP: f64 = 1e6;

/// Which family of creases a stiffness applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FoldKind {
    Main,
    Sub,
}

/// Fold-limit band and base torsional coefficients of one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CreaseProfile {
    /// Lower edge of the constant band, rad.
    pub theta_lower: f64,
    /// Upper edge of the constant band, rad.
    pub theta_upper: f64,
    /// Main-fold base coefficient, N m/rad.
    pub k_main0: f64,
    /// Sub-fold base coefficient, N m/rad.
    pub k_sub0: f64,
}

impl CreaseProfile {
    /// Default 38/70 degree band with base coefficients from the design's
    /// crease lengths.
    pub fn for_design(design: &TmpDesign) -> Self {
        Self::with_band(
            design,
            DEFAULT_THETA_LOWER_DEG.to_radians(),
            DEFAULT_THETA_UPPER_DEG.to_radians(),
        )
    }

    pub fn with_band(design: &TmpDesign, theta_lower: f64, theta_upper: f64) -> Self {
        let (k_main0, k_sub0) = design.crease_lengths().base_stiffness(design);
        Self {
            theta_lower,
            theta_upper,
            k_main0,
            k_sub0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.theta_lower
            && self.theta_lower < self.theta_upper
            && self.theta_upper < PI / 2.0)
        {
            return Err(Error::InvalidDesign(format!(
                "stiffness band [{}, {}] rad must satisfy 0 < lower < upper < pi/2",
                self.theta_lower, self.theta_upper
            )));
        }
        if !(self.k_main0 >= 0.0 && self.k_sub0 >= 0.0) {
            return Err(Error::InvalidDesign(
                "base crease stiffness must be non-negative".into(),
            ));
        }
        Ok(())
    }

    fn base(&self, which: FoldKind) -> f64 {
        match which {
            FoldKind::Main => self.k_main0,
            FoldKind::Sub => self.k_sub0,
        }
    }

    /// Multiplier applied to the base coefficient at angle `theta`.
    pub fn penalty_factor(&self, theta: f64) -> f64 {
        let (t1, t2) = (self.theta_lower, self.theta_upper);
        let arg = if theta < t1 {
            PI * (theta - t1) / (3.5 * t1)
        } else if theta > t2 {
            PI * (theta - t2) / (2.0 * PI - 3.5 * t2)
        } else {
            return 1.0;
        };
        let c = arg.cos();
        1.0 / (c * c)
    }
}

/// Torsional coefficient of a main or sub-fold at half angle `theta`.
pub fn effective_stiffness(profile: &CreaseProfile, theta: f64, which: FoldKind) -> Result<f64> {
    if !(theta > 0.0 && theta < PI) {
        return Err(Error::ThetaOutOfRange(theta));
    }
    Ok(profile.base(which) * profile.penalty_factor(theta))
}

/// Reaction force at compression `dy`, positive when resisting compression.
///
/// Accepts the whole rigid-folding range, extension included. Fails near the
/// flat-extended singularity (`cos theta_M -> 0`) and where the sub-fold
/// closes completely (`sin theta_S -> 0`).
pub fn reaction_force(design: &TmpDesign, profile: &CreaseProfile, dy: f64) -> Result<f64> {
    let state = fold_state_at(design, dy)?;
    let rest = resting_state(design);
    let cos_m = state.theta_m.cos();
    let sin_s = state.theta_s.sin();
    if cos_m.abs() < 1e-9 || sin_s.abs() < 1e-12 {
        return Err(Error::SingularConfiguration {
            theta_m: state.theta_m,
            theta_s: state.theta_s,
        });
    }
    let k_main = profile.k_main0 * profile.penalty_factor(state.theta_m);
    let k_sub = profile.k_sub0 * profile.penalty_factor(state.theta_s);

    let n = f64::from(design.n_cells);
    let main = k_main * (n - 1.0) / n * (state.theta_m - rest.theta_m);
    let lever =
        (0.5 * state.theta_g).cos().powi(3) * state.theta_m.sin() / (design.alpha.cos() * sin_s);
    let sub = k_sub * lever * (state.theta_s - rest.theta_s);
    Ok(-32.0 / (design.d * cos_m) * (main + sub))
}

/// A force evaluation that may have been clamped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSample {
    pub force: f64,
    /// Set when the raw value was singular, out of range or above the cap.
    pub clamped: bool,
}

/// Force law of one design with its clamping policy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceModel {
    pub design: TmpDesign,
    pub profile: CreaseProfile,
    /// Magnitude at which evaluations are clamped.
    pub force_cap: f64,
}

impl ForceModel {
    /// Model with the default stiffness band and force cap.
    pub fn new(design: TmpDesign) -> Result<Self> {
        Self::with_profile(design, CreaseProfile::for_design(&design))
    }

    pub fn with_profile(design: TmpDesign, profile: CreaseProfile) -> Result<Self> {
        design.validate()?;
        profile.validate()?;
        Ok(Self {
            design,
            profile,
            force_cap: DEFAULT_FORCE_CAP,
        })
    }

    pub fn reaction_force(&self, dy: f64) -> Result<f64> {
        reaction_force(&self.design, &self.profile, dy)
    }

    /// Evaluates the force, clamping to `±force_cap` instead of failing.
    ///
    /// Compression beyond flat-folded clamps to `+cap`, extension beyond
    /// flat-extended to `-cap`.
    pub fn sample(&self, dy: f64) -> ForceSample {
        let toward = if dy >= 0.0 { 1.0 } else { -1.0 };
        match self.reaction_force(dy) {
            Ok(f) if f.is_finite() && f.abs() <= self.force_cap => ForceSample {
                force: f,
                clamped: false,
            },
            Ok(f) if f.is_finite() => ForceSample {
                force: f.signum() * self.force_cap,
                clamped: true,
            },
            _ => ForceSample {
                force: toward * self.force_cap,
                clamped: true,
            },
        }
    }

    /// Whether `dy` lies inside the rigid-folding range.
    pub fn in_range(&self, dy: f64) -> bool {
        dy >= -self.design.max_extension() && dy <= self.design.max_compression()
    }

    /// Strain energy stored at displacement `dy` (either sign), integrated
    /// with the trapezoid rule on `n_samples` uniform points.
    pub fn strain_energy(&self, dy: f64, n_samples: usize) -> f64 {
        let n = n_samples.max(2);
        let h = dy / (n - 1) as f64;
        let forces = (0..n).map(|i| self.sample(h * i as f64).force);
        trapezoid_uniform(forces, h)
    }
}

fn trapezoid_uniform(values: impl Iterator<Item = f64>, h: f64) -> f64 {
    let mut sum = 0.0;
    let mut prev: Option<f64> = None;
    for v in values {
        if let Some(p) = prev {
            sum += 0.5 * (p + v) * h;
        }
        prev = Some(v);
    }
    sum
}

/// One sampled point of a force-displacement curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub dy: f64,
    pub force: f64,
    #[serde(default)]
    pub clamped: bool,
}

/// Sampled force-displacement curve starting at the unloaded rest point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceCurve {
    points: Vec<CurvePoint>,
}

impl ForceCurve {
    /// Validates ordering and the `(0, 0)` start.
    pub fn from_points(points: Vec<CurvePoint>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateCurve("need at least two samples".into()));
        }
        let first = points[0];
        if first.dy != 0.0 || first.force.abs() > 1e-9 {
            return Err(Error::DegenerateCurve(format!(
                "curve must start at (0, 0), got ({}, {})",
                first.dy, first.force
            )));
        }
        if points.windows(2).any(|w| !(w[1].dy > w[0].dy)) {
            return Err(Error::DegenerateCurve(
                "displacements must be strictly increasing".into(),
            ));
        }
        Ok(Self { points })
    }

    /// Curve from `(dy, F)` pairs with no clamped samples.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        Self::from_points(
            pairs
                .iter()
                .map(|&(dy, force)| CurvePoint {
                    dy,
                    force,
                    clamped: false,
                })
                .collect(),
        )
    }

    /// Ideal linear spring `F = k dy` on `n_samples` uniform points.
    pub fn linear(k: f64, dy_max: f64, n_samples: usize) -> Result<Self> {
        check_grid(dy_max, n_samples)?;
        Self::from_points(
            uniform_grid(dy_max, n_samples)
                .map(|dy| CurvePoint {
                    dy,
                    force: k * dy,
                    clamped: false,
                })
                .collect(),
        )
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dy_max(&self) -> f64 {
        self.points[self.points.len() - 1].dy
    }

    /// Force at the largest displacement.
    pub fn f_max(&self) -> f64 {
        self.points[self.points.len() - 1].force
    }

    pub fn any_clamped(&self) -> bool {
        self.points.iter().any(|p| p.clamped)
    }

    /// Copy with every force multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            points: self
                .points
                .iter()
                .map(|p| CurvePoint {
                    force: p.force * factor,
                    ..*p
                })
                .collect(),
        }
    }

    /// CSV text with header `dy_m,F_N`.
    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&["dy_m", "F_N"]);
        for p in &self.points {
            table.push_cells([sig15(p.dy), sig15(p.force)]);
        }
        table.into_string()
    }
}

fn check_grid(dy_max: f64, n_samples: usize) -> Result<()> {
    if n_samples < 2 {
        return Err(Error::DegenerateCurve(format!(
            "need at least two samples, got {n_samples}"
        )));
    }
    if !(dy_max.is_finite() && dy_max > 0.0) {
        return Err(Error::DegenerateCurve(format!(
            "maximum displacement {dy_max} must be positive"
        )));
    }
    Ok(())
}

/// `n` uniformly spaced points on `[0, dy_max]`, endpoints exact.
pub(crate) fn uniform_grid(dy_max: f64, n: usize) -> impl Iterator<Item = f64> {
    let last = n - 1;
    (0..n).map(move |i| {
        if i == last {
            dy_max
        } else {
            dy_max * i as f64 / last as f64
        }
    })
}

/// Samples the compression branch uniformly on `[0, dy_max]`.
pub fn force_curve(model: &ForceModel, dy_max: f64, n_samples: usize) -> Result<ForceCurve> {
    check_grid(dy_max, n_samples)?;
    let max = model.design.max_compression();
    if dy_max > max {
        return Err(Error::DisplacementOutOfRange { dy: dy_max, max });
    }
    let points = uniform_grid(dy_max, n_samples)
        .map(|dy| {
            let s = model.sample(dy);
            CurvePoint {
                dy,
                force: s.force,
                clamped: s.clamped,
            }
        })
        .collect();
    ForceCurve::from_points(points)
}

/// Default sample count for force curves.
pub const DEFAULT_SAMPLES: usize = 2001;

/// Area under the curve by the trapezoid rule, in joules.
pub fn stored_energy(curve: &ForceCurve) -> f64 {
    curve
        .points
        .windows(2)
        .map(|w| 0.5 * (w[0].force + w[1].force) * (w[1].dy - w[0].dy))
        .sum()
}

/// Stored energy over that of the linear spring reaching the same peak.
pub fn nonlinearity_ratio(curve: &ForceCurve) -> Result<f64> {
    let f_max = curve.f_max();
    if !(f_max > 0.0) {
        return Err(Error::DegenerateCurve(format!(
            "peak force {f_max} N must be positive"
        )));
    }
    Ok(stored_energy(curve) / (0.5 * f_max * curve.dy_max()))
}

/// Released over stored energy for a compression/release pair.
pub fn efficiency_ratio(compress: &ForceCurve, release: &ForceCurve) -> Result<f64> {
    if compress.len() != release.len()
        || compress
            .points
            .iter()
            .zip(&release.points)
            .any(|(a, b)| (a.dy - b.dy).abs() > 1e-12 * compress.dy_max())
    {
        return Err(Error::MismatchedCurves);
    }
    let stored = stored_energy(compress);
    if !(stored > 0.0) {
        return Err(Error::DegenerateCurve(format!(
            "stored energy {stored} J must be positive"
        )));
    }
    Ok(stored_energy(release) / stored)
}

/// Secant stiffness `F_max / dy_max` of the matching linear spring, N/m.
pub fn equivalent_linear_coefficient(curve: &ForceCurve) -> Result<f64> {
    let dy_max = curve.dy_max();
    if !(dy_max > 0.0) {
        return Err(Error::DegenerateCurve("zero displacement range".into()));
    }
    Ok(curve.f_max() / dy_max)
}

/// Summary of one compression curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveMetrics {
    #[serde(rename = "R_n")]
    pub nonlinearity_ratio: f64,
    #[serde(rename = "F_max_N")]
    pub f_max: f64,
    #[serde(rename = "dy_max_m")]
    pub dy_max: f64,
    #[serde(rename = "stored_energy_J")]
    pub stored_energy: f64,
    #[serde(rename = "k_eq_N_per_m")]
    pub k_eq: f64,
    pub clamped_samples: usize,
}

impl CurveMetrics {
    pub fn of(curve: &ForceCurve) -> Result<Self> {
        Ok(Self {
            nonlinearity_ratio: nonlinearity_ratio(curve)?,
            f_max: curve.f_max(),
            dy_max: curve.dy_max(),
            stored_energy: stored_energy(curve),
            k_eq: equivalent_linear_coefficient(curve)?,
            clamped_samples: curve.points.iter().filter(|p| p.clamped).count(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn baseline_profile() -> CreaseProfile {
        CreaseProfile::for_design(&TmpDesign::baseline())
    }

    #[test]
    fn plateau_and_band_edges() {
        let p = baseline_profile();
        let mid = 0.5 * (p.theta_lower + p.theta_upper);
        assert_eq!(
            effective_stiffness(&p, mid, FoldKind::Main).unwrap(),
            p.k_main0
        );
        assert_eq!(
            effective_stiffness(&p, p.theta_lower, FoldKind::Main).unwrap(),
            p.k_main0
        );
        assert_eq!(
            effective_stiffness(&p, p.theta_upper, FoldKind::Sub).unwrap(),
            p.k_sub0
        );
    }

    #[test]
    fn lower_branch_value() {
        // sec^2(pi * (30 - 38) / (3.5 * 38)) evaluated independently.
        let p = baseline_profile();
        let k = effective_stiffness(&p, 30f64.to_radians(), FoldKind::Main).unwrap();
        assert_relative_eq!(k / p.k_main0, 1.036_576_507_968_686_4, epsilon = 1e-12);
    }

    #[test]
    fn stiffness_angle_domain() {
        let p = baseline_profile();
        assert!(matches!(
            effective_stiffness(&p, 0.0, FoldKind::Main),
            Err(Error::ThetaOutOfRange(_))
        ));
        assert!(effective_stiffness(&p, PI, FoldKind::Sub).is_err());
    }

    #[test]
    fn stiffness_continuous_and_bounded_below() {
        let p = baseline_profile();
        for edge in [p.theta_lower, p.theta_upper] {
            let below = effective_stiffness(&p, edge - 1e-9, FoldKind::Sub).unwrap();
            let above = effective_stiffness(&p, edge + 1e-9, FoldKind::Sub).unwrap();
            assert_relative_eq!(below, above, max_relative = 1e-12);
        }
        for i in 1..180 {
            let theta = f64::from(i) * 0.5_f64.to_radians();
            let k = effective_stiffness(&p, theta, FoldKind::Main).unwrap();
            assert!(k >= p.k_main0);
            let inside = theta >= p.theta_lower && theta <= p.theta_upper;
            assert_eq!(k == p.k_main0, inside, "theta = {theta}");
        }
    }

    #[test]
    fn zero_force_at_rest() {
        for design in [
            TmpDesign::baseline(),
            TmpDesign::nonlinear_prototype(),
            TmpDesign::linear_prototype(),
        ] {
            let model = ForceModel::new(design).unwrap();
            assert!(model.reaction_force(0.0).unwrap().abs() < 1e-9);
        }
    }

    #[test]
    fn nonlinear_prototype_force_at_110mm() {
        // Independent scripted evaluation of the force law.
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        assert_relative_eq!(
            model.reaction_force(0.110).unwrap(),
            4.738_276_183_082_389,
            max_relative = 1e-10
        );
    }

    #[test]
    fn baseline_softens_over_mid_range() {
        let design = TmpDesign::baseline();
        let model = ForceModel::new(design).unwrap();
        let dy_max = crate::kinematics::displacement_from_folding_ratio(&design, 0.75).unwrap();
        let curve = force_curve(&model, dy_max, 201).unwrap();
        let pts = curve.points();
        let slopes: Vec<f64> = pts
            .windows(2)
            .map(|w| (w[1].force - w[0].force) / (w[1].dy - w[0].dy))
            .collect();
        // Tangent stiffness falls across the middle of the stroke.
        let a = slopes[20];
        let b = slopes[60];
        let c = slopes[100];
        assert!(a > b && b > c, "{a} {b} {c}");
        assert!(curve.points().iter().all(|p| p.force >= 0.0));
    }

    #[test]
    fn tension_branch_is_negative() {
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        assert!(model.reaction_force(-0.01).unwrap() < 0.0);
    }

    #[test]
    fn clamps_beyond_range() {
        let model = ForceModel::new(TmpDesign::baseline()).unwrap();
        let over = model.sample(model.design.max_compression() + 0.01);
        assert!(over.clamped);
        assert_eq!(over.force, model.force_cap);
        let under = model.sample(-model.design.max_extension() - 0.01);
        assert!(under.clamped);
        assert_eq!(under.force, -model.force_cap);
        assert!(matches!(
            model.reaction_force(-model.design.max_extension()),
            Err(Error::SingularConfiguration { .. })
        ));
    }

    #[test]
    fn two_sample_curve() {
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        let curve = force_curve(&model, 0.11, 2).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(curve.points()[0].dy, 0.0);
        assert_eq!(curve.dy_max(), 0.11);
        assert_eq!(curve.f_max(), model.reaction_force(0.11).unwrap());
        assert!(force_curve(&model, 0.11, 1).is_err());
        assert!(force_curve(&model, 10.0, 5).is_err());
    }

    #[test]
    fn nonlinear_curve_above_chord() {
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        let curve = force_curve(&model, 0.110, DEFAULT_SAMPLES).unwrap();
        let k = equivalent_linear_coefficient(&curve).unwrap();
        let n = curve.len();
        for p in &curve.points()[n / 5..4 * n / 5] {
            assert!(p.force > k * p.dy, "dy = {}", p.dy);
        }
        let e = stored_energy(&curve);
        assert!(e > 0.5 * curve.f_max() * curve.dy_max());
    }

    #[test]
    fn linear_curve_metrics() {
        let curve = ForceCurve::linear(37.0, 0.12, 11).unwrap();
        assert_relative_eq!(
            stored_energy(&curve),
            0.5 * 37.0 * 0.12 * 0.12,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            nonlinearity_ratio(&curve).unwrap(),
            1.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            equivalent_linear_coefficient(&curve).unwrap(),
            37.0,
            max_relative = 1e-12
        );
        let unit = ForceCurve::from_pairs(&[(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_eq!(equivalent_linear_coefficient(&unit).unwrap(), 1.0);
    }

    #[test]
    fn zero_curve() {
        let curve = ForceCurve::linear(0.0, 0.1, 5).unwrap();
        assert_eq!(stored_energy(&curve), 0.0);
        assert!(matches!(
            nonlinearity_ratio(&curve),
            Err(Error::DegenerateCurve(_))
        ));
    }

    #[test]
    fn efficiency() {
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        let compress = force_curve(&model, 0.11, 101).unwrap();
        assert_relative_eq!(efficiency_ratio(&compress, &compress).unwrap(), 1.0);
        let release = compress.scaled(0.89);
        assert_relative_eq!(
            efficiency_ratio(&compress, &release).unwrap(),
            0.89,
            max_relative = 1e-12
        );
        let other = force_curve(&model, 0.10, 101).unwrap();
        assert_eq!(
            efficiency_ratio(&compress, &other),
            Err(Error::MismatchedCurves)
        );
    }

    #[test]
    fn curve_validation() {
        assert!(ForceCurve::from_pairs(&[(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ForceCurve::from_pairs(&[(0.0, 0.0), (0.0, 2.0)]).is_err());
        assert!(ForceCurve::from_pairs(&[(0.0, 0.0)]).is_err());
    }

    #[test]
    fn csv_layout() {
        let curve = ForceCurve::from_pairs(&[(0.0, 0.0), (0.11, 4.5)]).unwrap();
        assert_eq!(
            curve.to_csv(),
            "dy_m,F_N\n0,0\n0.110000000000000,4.50000000000000\n"
        );
    }

    #[test]
    fn strain_energy_matches_curve_area() {
        let model = ForceModel::new(TmpDesign::nonlinear_prototype()).unwrap();
        let curve = force_curve(&model, 0.11, 2001).unwrap();
        assert_relative_eq!(
            model.strain_energy(0.11, 2001),
            stored_energy(&curve),
            max_relative = 1e-12
        );
        assert!(model.strain_energy(-0.02, 501) > 0.0);
    }
}
