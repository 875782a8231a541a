//! One-at-a-time design sweeps: static force curves and jump performance
//! as a single design variable moves between its limits.

use serde::{Deserialize, Serialize};

use crate::dynamics::{
    secant_stiffness, simulate_spring, JumpSetup, JumperConfig, LinearSpring, DEFAULT_GRAVITY,
};
use crate::error::{Error, Result};
use crate::kinematics::{displacement_from_folding_ratio, TmpDesign};
use crate::optimize::DesignBounds;
use crate::output::{sig15, CsvTable};
use crate::parallel::map_ordered;
use crate::stiffness::{force_curve, CurveMetrics, ForceCurve, ForceModel, DEFAULT_SAMPLES};

/// Design variable a sweep moves. Values are SI: metres, radians, or a
/// cell count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "d")]
    D,
    #[serde(rename = "l")]
    L,
    #[serde(rename = "m")]
    M,
    #[serde(rename = "c")]
    C,
    #[serde(rename = "alpha")]
    Alpha,
}

impl SweepVariable {
    pub const ALL: [SweepVariable; 6] = [Self::N, Self::D, Self::L, Self::M, Self::C, Self::Alpha];

    pub fn name(self) -> &'static str {
        match self {
            Self::N => "N",
            Self::D => "d",
            Self::L => "l",
            Self::M => "m",
            Self::C => "c",
            Self::Alpha => "alpha",
        }
    }

    /// Variables the jump sweep supports.
    pub fn is_dynamic(self) -> bool {
        matches!(self, Self::N | Self::D | Self::Alpha)
    }

    /// Study limits for this variable.
    pub fn limits(self) -> (f64, f64) {
        let b = DesignBounds::default();
        match self {
            Self::N => (f64::from(b.n_cells.0), f64::from(b.n_cells.1)),
            Self::D => b.d,
            Self::L => b.l,
            Self::M => b.m,
            Self::C => b.c,
            Self::Alpha => b.alpha,
        }
    }

    pub fn value(self, design: &TmpDesign) -> f64 {
        match self {
            Self::N => f64::from(design.n_cells),
            Self::D => design.d,
            Self::L => design.l,
            Self::M => design.m,
            Self::C => design.c,
            Self::Alpha => design.alpha,
        }
    }

    /// `design` with this variable set to `value`.
    pub fn apply(self, design: &TmpDesign, value: f64) -> TmpDesign {
        let mut out = *design;
        match self {
            Self::N => out.n_cells = value.round() as u32,
            Self::D => out.d = value,
            Self::L => out.l = value,
            Self::M => out.m = value,
            Self::C => out.c = value,
            Self::Alpha => out.alpha = value,
        }
        out
    }
}

impl std::str::FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown sweep variable {s:?}")))
    }
}

/// Mass and damping inputs for jump sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DynamicsInputs {
    pub m1: f64,
    pub m2: f64,
    pub eta: f64,
    pub gravity: f64,
}

impl Default for DynamicsInputs {
    /// Strain-softening prototype masses with no hysteresis loss.
    fn default() -> Self {
        Self {
            m1: 0.0177,
            m2: 0.0176,
            eta: 1.0,
            gravity: DEFAULT_GRAVITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub base_design: TmpDesign,
    pub variable: SweepVariable,
    pub range: (f64, f64),
    /// Grid size for continuous variables; cell-count sweeps visit every
    /// integer in the range.
    pub points: usize,
    pub rf_target: f64,
    pub n_samples: usize,
    pub dynamics: Option<DynamicsInputs>,
    /// Permit ranges beyond the study limits.
    pub allow_outside_limits: bool,
}

/// Default grid size for continuous variables.
pub const DEFAULT_SWEEP_POINTS: usize = 9;

impl SweepSpec {
    /// Full-range sweep of `variable` around the study base design.
    pub fn new(variable: SweepVariable) -> Self {
        Self {
            base_design: TmpDesign::study_base(),
            variable,
            range: variable.limits(),
            points: DEFAULT_SWEEP_POINTS,
            rf_target: 0.75,
            n_samples: DEFAULT_SAMPLES,
            dynamics: None,
            allow_outside_limits: false,
        }
    }

    pub fn with_dynamics(mut self, inputs: DynamicsInputs) -> Self {
        self.dynamics = Some(inputs);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpec(msg));
        self.base_design.validate()?;
        let (lo, hi) = self.range;
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return bad(format!("sweep range [{lo}, {hi}] is empty"));
        }
        if !self.allow_outside_limits {
            let (min, max) = self.variable.limits();
            let slack = 1e-9 * (max - min);
            if lo < min - slack || hi > max + slack {
                return bad(format!(
                    "range [{lo}, {hi}] for {} leaves the study limits [{min}, {max}]",
                    self.variable.name()
                ));
            }
        }
        if self.variable == SweepVariable::N {
            if lo < 1.0 || lo.ceil() > hi.floor() {
                return bad(format!("no cell counts in [{lo}, {hi}]"));
            }
        } else if self.points < 1 || (self.points == 1 && lo != hi) {
            return bad(format!(
                "{} grid points cannot cover [{lo}, {hi}]",
                self.points
            ));
        }
        if !(self.rf_target > 0.0 && self.rf_target < 1.0) {
            return bad(format!("folding ratio {} outside (0, 1)", self.rf_target));
        }
        if self.n_samples < 2 {
            return bad("force curves need at least two samples".into());
        }
        if let Some(dynamics) = &self.dynamics {
            if !(dynamics.m1 > 0.0 && dynamics.m2 > 0.0) {
                return bad("masses must be positive".into());
            }
            if !(dynamics.eta > 0.0 && dynamics.eta <= 1.0) {
                return bad(format!("efficiency ratio {} outside (0, 1]", dynamics.eta));
            }
            if !(dynamics.gravity > 0.0) {
                return bad("gravity must be positive".into());
            }
        }
        Ok(())
    }

    /// Grid values in sweep order.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = self.range;
        if self.variable == SweepVariable::N {
            return (lo.ceil() as u32..=hi.floor() as u32)
                .map(f64::from)
                .collect();
        }
        if self.points == 1 {
            return vec![lo];
        }
        let last = (self.points - 1) as f64;
        (0..self.points)
            .map(|i| {
                if i == self.points - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / last
                }
            })
            .collect()
    }
}

/// One grid point of a sweep. Fields stay `None` where the computation
/// failed; `error` says why.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepPoint {
    pub value: f64,
    pub dy_max: Option<f64>,
    pub f_max: Option<f64>,
    pub nonlinearity_ratio: Option<f64>,
    pub airtime: Option<f64>,
    pub clearance: Option<f64>,
    pub airtime_ratio: Option<f64>,
    pub clearance_ratio: Option<f64>,
    pub curve: Option<ForceCurve>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub variable: SweepVariable,
    pub dynamic: bool,
    pub points: Vec<SweepPoint>,
}

impl SweepResult {
    pub fn failures(&self) -> usize {
        self.points.iter().filter(|p| p.error.is_some()).count()
    }

    /// One row per grid point; empty cells where a value is missing.
    pub fn to_csv(&self) -> String {
        let mut header = vec!["variable_value", "dy_max_m", "F_max_N", "R_n"];
        if self.dynamic {
            header.extend([
                "airtime_s",
                "clearance_m",
                "airtime_ratio",
                "clearance_ratio",
            ]);
        }
        header.push("error");
        let mut table = CsvTable::new(&header);
        for p in &self.points {
            let mut cells: Vec<String> = [Some(p.value), p.dy_max, p.f_max, p.nonlinearity_ratio]
                .into_iter()
                .chain(
                    self.dynamic
                        .then_some([p.airtime, p.clearance, p.airtime_ratio, p.clearance_ratio])
                        .into_iter()
                        .flatten(),
                )
                .map(|v| v.map(sig15).unwrap_or_default())
                .collect();
            cells.push(p.error.as_deref().map(csv_safe).unwrap_or_default());
            table.push_cells(cells);
        }
        table.into_string()
    }

    /// Long-format force curves: `variable_value,dy_m,F_N`.
    pub fn curves_csv(&self) -> String {
        let mut table = CsvTable::new(&["variable_value", "dy_m", "F_N"]);
        for p in &self.points {
            for q in p.curve.iter().flat_map(|c| c.points()) {
                table.push_numbers(&[Some(p.value), Some(q.dy), Some(q.force)]);
            }
        }
        table.into_string()
    }
}

fn csv_safe(msg: &str) -> String {
    msg.chars()
        .map(|c| {
            if matches!(c, ',' | '"' | '\n' | '\r') {
                ';'
            } else {
                c
            }
        })
        .collect()
}

fn static_point(spec: &SweepSpec, design: &TmpDesign) -> Result<(f64, ForceModel, ForceCurve)> {
    let dy_max = displacement_from_folding_ratio(design, spec.rf_target)?;
    let model = ForceModel::new(*design)?;
    let curve = force_curve(&model, dy_max, spec.n_samples)?;
    Ok((dy_max, model, curve))
}

fn fill_static(point: &mut SweepPoint, dy_max: f64, curve: ForceCurve) -> Result<()> {
    let metrics = CurveMetrics::of(&curve)?;
    point.dy_max = Some(dy_max);
    point.f_max = Some(metrics.f_max);
    point.nonlinearity_ratio = Some(metrics.nonlinearity_ratio);
    point.curve = Some(curve);
    Ok(())
}

/// Force curve at `rf_target` compression for every grid value.
pub fn static_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    let grid = spec.grid();
    let points = map_ordered(&grid, jobs, |&value| {
        let design = spec.variable.apply(&spec.base_design, value);
        let mut point = SweepPoint {
            value,
            ..Default::default()
        };
        let outcome = static_point(spec, &design)
            .and_then(|(dy_max, _, curve)| fill_static(&mut point, dy_max, curve));
        if let Err(e) = outcome {
            point.error = Some(e.to_string());
        }
        point
    })?;
    Ok(SweepResult {
        variable: spec.variable,
        dynamic: false,
        points,
    })
}

/// Jump from `rf_target` compression for every grid value, next to an ideal
/// linear spring with the same force at that compression and the same
/// damping coefficient.
pub fn dynamic_sweep(spec: &SweepSpec, jobs: Option<usize>) -> Result<SweepResult> {
    spec.validate()?;
    if !spec.variable.is_dynamic() {
        return Err(Error::InvalidSpec(format!(
            "jump sweeps support N, d and alpha, not {}",
            spec.variable.name()
        )));
    }
    let inputs = spec.dynamics.unwrap_or_default();
    let grid = spec.grid();
    let points = map_ordered(&grid, jobs, |&value| {
        let design = spec.variable.apply(&spec.base_design, value);
        let mut point = SweepPoint {
            value,
            ..Default::default()
        };
        let outcome = static_point(spec, &design).and_then(|(dy_max, model, curve)| {
            fill_static(&mut point, dy_max, curve)?;
            let mut config = JumperConfig::new(design, inputs.m1, inputs.m2, dy_max, inputs.eta);
            config.gravity = inputs.gravity;
            config.validate()?;
            let setup = JumpSetup::from_config(&config, &model)?;
            let (_, jump) = simulate_spring(&model, &setup)?;
            point.airtime = Some(jump.airtime);
            point.clearance = Some(jump.clearance);
            let linear = LinearSpring {
                stiffness: secant_stiffness(&model, dy_max),
            };
            let (_, reference) = simulate_spring(&linear, &setup)?;
            point.airtime_ratio = Some(jump.airtime / reference.airtime);
            point.clearance_ratio = Some(jump.clearance / reference.clearance);
            Ok(())
        });
        if let Err(e) = outcome {
            point.error = Some(e.to_string());
        }
        point
    })?;
    Ok(SweepResult {
        variable: spec.variable,
        dynamic: true,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let spec = SweepSpec::new(SweepVariable::N);
        assert_eq!(spec.grid(), vec![6.0, 7.0, 8.0, 9.0, 10.0]);
        let spec = SweepSpec::new(SweepVariable::D);
        let g = spec.grid();
        assert_eq!(g.len(), 9);
        assert_eq!((g[0], g[8]), (0.020, 0.040));
        assert!((g[4] - 0.030).abs() < 1e-15);
    }

    #[test]
    fn limits_enforced_unless_overridden() {
        let mut spec = SweepSpec::new(SweepVariable::Alpha);
        spec.range = (20f64.to_radians(), 70f64.to_radians());
        assert!(spec.validate().is_err());
        spec.allow_outside_limits = true;
        assert!(spec.validate().is_ok());
        spec.rf_target = 1.0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn variable_names_round_trip() {
        for v in SweepVariable::ALL {
            assert_eq!(v.name().parse::<SweepVariable>().unwrap(), v);
            let base = TmpDesign::study_base();
            let x = v.value(&base);
            assert_eq!(v.apply(&base, x), base);
        }
        assert!("theta".parse::<SweepVariable>().is_err());
    }

    #[test]
    fn point_failures_are_recorded() {
        let mut spec = SweepSpec::new(SweepVariable::Alpha);
        spec.allow_outside_limits = true;
        spec.range = (30f64.to_radians(), 95f64.to_radians());
        spec.points = 3;
        let result = static_sweep(&spec, Some(1)).unwrap();
        assert_eq!(result.points.len(), 3);
        assert!(result.points[0].error.is_none());
        assert!(result.points[2].error.is_some());
        assert_eq!(result.failures(), 1);
        let csv = result.to_csv();
        assert_eq!(csv.lines().count(), 4);
        assert!(csv
            .lines()
            .last()
            .unwrap()
            .starts_with(&sig15(95f64.to_radians())));
    }

    #[test]
    fn dynamic_sweep_rejects_main_fold_lengths() {
        let spec = SweepSpec::new(SweepVariable::L).with_dynamics(DynamicsInputs::default());
        assert!(dynamic_sweep(&spec, None).is_err());
    }
}
