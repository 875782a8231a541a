//! Run configuration files.
//!
//! Configs are TOML with units spelled out in key names (`_mm`, `_deg`,
//! `_g`). Each command reads its own table; `resolve_*` validates it and
//! converts to SI once, producing the plain inputs the library takes.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dynamics::{JumperConfig, DEFAULT_GRAVITY};
use crate::error::{Error, Result};
use crate::kinematics::{displacement_from_folding_ratio, TmpDesign, DEFAULT_THETA_M0};
use crate::optimize::{Algorithm, DesignBounds, LinearFitSpec, MinimizeOptions};
use crate::stiffness::{
    CreaseProfile, DEFAULT_FORCE_CAP, DEFAULT_SAMPLES, DEFAULT_THETA_LOWER_DEG,
    DEFAULT_THETA_UPPER_DEG,
};
use crate::studies::{DynamicsInputs, SweepSpec, SweepVariable, DEFAULT_SWEEP_POINTS};

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidSpec(msg.into())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub design: Option<DesignConfig>,
    pub profile: Option<ProfileConfig>,
    pub force_curve: Option<ForceCurveConfig>,
    pub jump: Option<JumpConfig>,
    pub sweep: Option<SweepConfig>,
    pub optimize: Option<OptimizeConfig>,
    pub paleo: Option<PaleoConfig>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| invalid(format!("config: {}", e.message())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn section<'a, T>(section: &'a Option<T>, name: &str) -> Result<&'a T> {
        section
            .as_ref()
            .ok_or_else(|| invalid(format!("config has no [{name}] table")))
    }

    fn profile_for(&self, design: &TmpDesign) -> Result<(CreaseProfile, f64)> {
        self.profile.unwrap_or_default().resolve(design)
    }
}

/// Bellow geometry and crease stiffness.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub n_cells: u32,
    pub alpha_deg: f64,
    pub c_mm: f64,
    pub d_mm: f64,
    pub l_mm: f64,
    pub m_mm: f64,
    pub k_main_hat_n_per_rad: f64,
    pub k_sub_hat_n_per_rad: f64,
    pub theta_m0_deg: Option<f64>,
}

impl DesignConfig {
    pub fn resolve(&self) -> Result<TmpDesign> {
        let mut design = TmpDesign::from_mm_deg(
            self.n_cells,
            self.alpha_deg,
            self.c_mm,
            self.d_mm,
            self.l_mm,
            self.m_mm,
            self.k_main_hat_n_per_rad,
            self.k_sub_hat_n_per_rad,
        );
        design.theta_m0 = self.theta_m0_deg.map_or(DEFAULT_THETA_M0, f64::to_radians);
        design.validate()?;
        Ok(design)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileConfig {
    pub theta_lower_deg: f64,
    pub theta_upper_deg: f64,
    pub force_cap_n: f64,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        Self {
            theta_lower_deg: DEFAULT_THETA_LOWER_DEG,
            theta_upper_deg: DEFAULT_THETA_UPPER_DEG,
            force_cap_n: DEFAULT_FORCE_CAP,
        }
    }
}

impl ProfileConfig {
    fn resolve(&self, design: &TmpDesign) -> Result<(CreaseProfile, f64)> {
        let profile = CreaseProfile::with_band(
            design,
            self.theta_lower_deg.to_radians(),
            self.theta_upper_deg.to_radians(),
        );
        profile.validate()?;
        if !(self.force_cap_n > 0.0) {
            return Err(invalid("force_cap_n must be positive"));
        }
        Ok((profile, self.force_cap_n))
    }
}

/// Compression given either directly or as a folding ratio.
fn compression(design: &TmpDesign, mm: Option<f64>, ratio: Option<f64>, what: &str) -> Result<f64> {
    match (mm, ratio) {
        (Some(mm), None) => Ok(mm * 1e-3),
        (None, Some(rf)) => displacement_from_folding_ratio(design, rf),
        _ => Err(invalid(format!(
            "give exactly one of {what}_mm and {what}_folding_ratio"
        ))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForceCurveConfig {
    pub dy_max_mm: Option<f64>,
    pub dy_max_folding_ratio: Option<f64>,
    pub n_samples: Option<usize>,
}

/// SI inputs of the force-curve command.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForceCurveInputs {
    pub design: TmpDesign,
    pub profile: CreaseProfile,
    pub force_cap: f64,
    pub dy_max: f64,
    pub n_samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpConfig {
    pub m1_g: f64,
    pub m2_g: f64,
    pub dy0_mm: Option<f64>,
    pub dy0_folding_ratio: Option<f64>,
    pub eta: f64,
    pub gravity_mps2: Option<f64>,
    pub t_max_s: Option<f64>,
    pub flight_t_max_s: Option<f64>,
    pub clamp_out_of_range: Option<bool>,
}

/// Units for sweep ranges follow the variable: cells, mm, or degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub range_cells: Option<[u32; 2]>,
    pub range_mm: Option<[f64; 2]>,
    pub range_deg: Option<[f64; 2]>,
    pub points: Option<usize>,
    pub folding_ratio: Option<f64>,
    pub n_samples: Option<usize>,
    pub allow_outside_limits: Option<bool>,
    pub dynamics: Option<SweepDynamicsConfig>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepDynamicsConfig {
    pub m1_g: Option<f64>,
    pub m2_g: Option<f64>,
    pub eta: Option<f64>,
    pub gravity_mps2: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsConfig {
    pub n_cells: [u32; 2],
    pub alpha_deg: [f64; 2],
    pub c_mm: [f64; 2],
    pub d_mm: [f64; 2],
    pub l_mm: [f64; 2],
    pub m_mm: [f64; 2],
}

impl BoundsConfig {
    fn resolve(&self) -> DesignBounds {
        let mm = |p: [f64; 2]| (p[0] * 1e-3, p[1] * 1e-3);
        DesignBounds {
            n_cells: (self.n_cells[0], self.n_cells[1]),
            alpha: (
                self.alpha_deg[0].to_radians(),
                self.alpha_deg[1].to_radians(),
            ),
            c: mm(self.c_mm),
            d: mm(self.d_mm),
            l: mm(self.l_mm),
            m: mm(self.m_mm),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Design whose force at the target compression sets the goal; the
    /// strain-softening prototype when absent.
    pub reference: Option<DesignConfig>,
    pub target_dy_max_mm: Option<f64>,
    /// Overrides the force taken from the reference design.
    pub target_f_max_n: Option<f64>,
    pub algorithms: Option<Vec<Algorithm>>,
    pub n_samples: Option<usize>,
    pub k_main_hat_n_per_rad: Option<f64>,
    pub k_sub_hat_n_per_rad: Option<f64>,
    pub penalty_weight: Option<f64>,
    pub bounds: Option<BoundsConfig>,
    pub max_iterations: Option<usize>,
    pub x_tol: Option<f64>,
    pub f_tol: Option<f64>,
}

/// SI inputs of the optimize command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeInputs {
    pub spec: LinearFitSpec,
    pub algorithms: Vec<Algorithm>,
    pub max_iterations: usize,
    pub x_tol: f64,
    pub f_tol: f64,
}

impl OptimizeInputs {
    pub fn options(&self) -> MinimizeOptions {
        MinimizeOptions {
            max_iterations: self.max_iterations,
            x_tol: self.x_tol,
            f_tol: self.f_tol,
            ..MinimizeOptions::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PaleoConfig {
    /// Measurement CSV, relative to the config file.
    pub measurements: PathBuf,
}

impl RunConfig {
    pub fn resolve_force_curve(&self) -> Result<ForceCurveInputs> {
        let design = Self::section(&self.design, "design")?.resolve()?;
        let (profile, force_cap) = self.profile_for(&design)?;
        let fc = Self::section(&self.force_curve, "force_curve")?;
        let dy_max = compression(&design, fc.dy_max_mm, fc.dy_max_folding_ratio, "dy_max")?;
        let n_samples = fc.n_samples.unwrap_or(DEFAULT_SAMPLES);
        if n_samples < 2 {
            return Err(invalid("n_samples must be at least 2"));
        }
        if !(dy_max > 0.0 && dy_max <= design.max_compression()) {
            return Err(invalid(format!(
                "dy_max {dy_max} m outside (0, {}] m",
                design.max_compression()
            )));
        }
        Ok(ForceCurveInputs {
            design,
            profile,
            force_cap,
            dy_max,
            n_samples,
        })
    }

    pub fn resolve_jump(&self) -> Result<JumperConfig> {
        let design = Self::section(&self.design, "design")?.resolve()?;
        let (profile, force_cap) = self.profile_for(&design)?;
        let jump = Self::section(&self.jump, "jump")?;
        let dy0 = compression(&design, jump.dy0_mm, jump.dy0_folding_ratio, "dy0")?;
        let mut config =
            JumperConfig::new(design, jump.m1_g * 1e-3, jump.m2_g * 1e-3, dy0, jump.eta);
        config.profile = profile;
        config.force_cap = force_cap;
        config.gravity = jump.gravity_mps2.unwrap_or(DEFAULT_GRAVITY);
        if let Some(t) = jump.t_max_s {
            config.t_max = t;
        }
        if let Some(t) = jump.flight_t_max_s {
            config.flight_t_max = t;
        }
        if let Some(clamp) = jump.clamp_out_of_range {
            config.clamp_out_of_range = clamp;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn resolve_sweep(&self, dynamic: bool) -> Result<SweepSpec> {
        let sweep = Self::section(&self.sweep, "sweep")?;
        let mut spec = SweepSpec::new(sweep.variable);
        if let Some(design) = &self.design {
            spec.base_design = design.resolve()?;
        }
        if self.profile.is_some_and(|p| p != ProfileConfig::default()) {
            return Err(invalid(
                "sweeps use the default crease profile; remove [profile]",
            ));
        }
        let given = [
            sweep.range_cells.is_some(),
            sweep.range_mm.is_some(),
            sweep.range_deg.is_some(),
        ];
        let expected = match sweep.variable {
            SweepVariable::N => 0,
            SweepVariable::Alpha => 2,
            _ => 1,
        };
        if given.iter().enumerate().any(|(i, g)| *g && i != expected) {
            let key = ["range_cells", "range_mm", "range_deg"][expected];
            return Err(invalid(format!(
                "the {} sweep takes its range as {key}",
                sweep.variable.name()
            )));
        }
        if let Some([lo, hi]) = sweep.range_cells {
            spec.range = (f64::from(lo), f64::from(hi));
        }
        if let Some([lo, hi]) = sweep.range_mm {
            spec.range = (lo * 1e-3, hi * 1e-3);
        }
        if let Some([lo, hi]) = sweep.range_deg {
            spec.range = (lo.to_radians(), hi.to_radians());
        }
        spec.points = sweep.points.unwrap_or(DEFAULT_SWEEP_POINTS);
        spec.rf_target = sweep.folding_ratio.unwrap_or(spec.rf_target);
        spec.n_samples = sweep.n_samples.unwrap_or(spec.n_samples);
        spec.allow_outside_limits = sweep.allow_outside_limits.unwrap_or(false);
        if dynamic {
            let d = sweep.dynamics.unwrap_or(SweepDynamicsConfig {
                m1_g: None,
                m2_g: None,
                eta: None,
                gravity_mps2: None,
            });
            let defaults = DynamicsInputs::default();
            spec.dynamics = Some(DynamicsInputs {
                m1: d.m1_g.map_or(defaults.m1, |g| g * 1e-3),
                m2: d.m2_g.map_or(defaults.m2, |g| g * 1e-3),
                eta: d.eta.unwrap_or(defaults.eta),
                gravity: d.gravity_mps2.unwrap_or(defaults.gravity),
            });
            if !sweep.variable.is_dynamic() {
                return Err(invalid(format!(
                    "jump sweeps support N, d and alpha, not {}",
                    sweep.variable.name()
                )));
            }
        } else if sweep.dynamics.is_some() {
            return Err(invalid("[sweep.dynamics] only applies to sweep-dynamic"));
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn resolve_optimize(&self) -> Result<OptimizeInputs> {
        let opt = Self::section(&self.optimize, "optimize")?;
        let reference = match &opt.reference {
            Some(d) => d.resolve()?,
            None => TmpDesign::nonlinear_prototype(),
        };
        let dy_max = opt.target_dy_max_mm.map_or(0.110, |mm| mm * 1e-3);
        let mut spec = match opt.target_f_max_n {
            Some(f) => LinearFitSpec {
                target_f_max: f,
                target_dy_max: dy_max,
                ..LinearFitSpec::default()
            },
            None => LinearFitSpec::from_reference(&reference, dy_max)?,
        };
        if let Some(n) = opt.n_samples {
            spec.n_samples = n;
        }
        if let Some(k) = opt.k_main_hat_n_per_rad {
            spec.k_main_hat = k;
        }
        if let Some(k) = opt.k_sub_hat_n_per_rad {
            spec.k_sub_hat = k;
        }
        if let Some(w) = opt.penalty_weight {
            spec.penalty_weight = w;
        }
        if let Some(b) = &opt.bounds {
            spec.bounds = b.resolve();
        }
        spec.validate()?;
        let algorithms = opt
            .algorithms
            .clone()
            .unwrap_or_else(|| vec![Algorithm::Simplex, Algorithm::Powell]);
        if algorithms.is_empty() {
            return Err(invalid("algorithms must not be empty"));
        }
        let defaults = MinimizeOptions::default();
        let inputs = OptimizeInputs {
            spec,
            algorithms,
            max_iterations: opt.max_iterations.unwrap_or(defaults.max_iterations),
            x_tol: opt.x_tol.unwrap_or(defaults.x_tol),
            f_tol: opt.f_tol.unwrap_or(defaults.f_tol),
        };
        if inputs.max_iterations == 0 || !(inputs.x_tol > 0.0) || !(inputs.f_tol > 0.0) {
            return Err(invalid("max_iterations, x_tol and f_tol must be positive"));
        }
        Ok(inputs)
    }

    /// Measurement file path, resolved against the config's directory.
    pub fn resolve_paleo(&self, config_dir: &Path) -> Result<PathBuf> {
        let paleo = Self::section(&self.paleo, "paleo")?;
        Ok(config_dir.join(&paleo.measurements))
    }
}
