//! Two-mass jumper: a lower mass resting on the ground, an upper mass, and
//! the bellow acting between them as a nonlinear spring with equivalent
//! viscous damping.
//!
//! The jump has two phases. Before take-off the lower mass is held by the
//! ground and only the upper mass moves. Take-off happens the first time the
//! spring pulls on the lower mass harder than its weight. In flight both
//! masses move freely until the lower mass touches down again.

use std::cell::Cell;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::TmpDesign;
use crate::ode::{integrate, Direction, Event, IntegratorOptions};
use crate::output::{sig15, CsvTable};
use crate::stiffness::{CreaseProfile, ForceModel, ForceSample};

/// Standard gravity used unless a config overrides it.
pub const DEFAULT_GRAVITY: f64 = 9.81;

/// Force law between the two masses as a function of compression.
pub trait SpringLaw {
    fn sample(&self, dy: f64) -> ForceSample;

    /// Whether `dy` lies inside the range where the law is physical.
    fn in_range(&self, dy: f64) -> bool;

    /// Energy stored at compression `dy` (negative for extension).
    fn strain_energy(&self, dy: f64) -> f64;
}

/// Sample count used to integrate strain energy from a nonlinear law.
const ENERGY_SAMPLES: usize = 4001;

impl SpringLaw for ForceModel {
    fn sample(&self, dy: f64) -> ForceSample {
        ForceModel::sample(self, dy)
    }

    fn in_range(&self, dy: f64) -> bool {
        ForceModel::in_range(self, dy)
    }

    fn strain_energy(&self, dy: f64) -> f64 {
        ForceModel::strain_energy(self, dy, ENERGY_SAMPLES)
    }
}

/// Ideal linear spring `F = k dy`, valid in tension and compression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearSpring {
    pub stiffness: f64,
}

impl SpringLaw for LinearSpring {
    fn sample(&self, dy: f64) -> ForceSample {
        ForceSample {
            force: self.stiffness * dy,
            clamped: false,
        }
    }

    fn in_range(&self, _dy: f64) -> bool {
        true
    }

    fn strain_energy(&self, dy: f64) -> f64 {
        0.5 * self.stiffness * dy * dy
    }
}

/// Everything needed to simulate one jump of a bellow jumper.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumperConfig {
    pub design: TmpDesign,
    pub profile: CreaseProfile,
    /// Lower mass, kg.
    pub m1: f64,
    /// Upper mass, kg.
    pub m2: f64,
    /// Initial compression, m.
    pub dy0: f64,
    /// Efficiency ratio feeding the equivalent damping.
    pub eta: f64,
    pub gravity: f64,
    /// Give up waiting for take-off after this long, s.
    pub t_max: f64,
    /// Give up waiting for touchdown after this much flight, s.
    pub flight_t_max: f64,
    /// Clamp the force beyond the foldable range instead of failing.
    pub clamp_out_of_range: bool,
    pub force_cap: f64,
}

impl JumperConfig {
    pub fn new(design: TmpDesign, m1: f64, m2: f64, dy0: f64, eta: f64) -> Self {
        Self {
            design,
            profile: CreaseProfile::for_design(&design),
            m1,
            m2,
            dy0,
            eta,
            gravity: DEFAULT_GRAVITY,
            t_max: 5.0,
            flight_t_max: 10.0,
            clamp_out_of_range: true,
            force_cap: crate::stiffness::DEFAULT_FORCE_CAP,
        }
    }

    /// Strain-softening prototype: 17.7 g / 17.6 g, 110 mm, eta = 0.89.
    pub fn nonlinear_prototype() -> Self {
        Self::new(
            TmpDesign::nonlinear_prototype(),
            0.0177,
            0.0176,
            0.110,
            0.89,
        )
    }

    /// Close-to-linear prototype: 17.9 g / 17.9 g, 110 mm, eta = 0.85.
    pub fn linear_prototype() -> Self {
        Self::new(TmpDesign::linear_prototype(), 0.0179, 0.0179, 0.110, 0.85)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidJumper(msg));
        self.design.validate()?;
        self.profile.validate()?;
        if !(self.m1 > 0.0 && self.m2 > 0.0) {
            return bad(format!(
                "masses must be positive, got {} and {}",
                self.m1, self.m2
            ));
        }
        let max = self.design.max_compression();
        if !(self.dy0 >= 0.0 && self.dy0 < max) {
            return bad(format!(
                "initial compression {} m outside [0, {max}) m",
                self.dy0
            ));
        }
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return bad(format!("efficiency ratio {} outside (0, 1]", self.eta));
        }
        if !(self.gravity > 0.0 && self.t_max > 0.0 && self.flight_t_max > 0.0) {
            return bad("gravity and time limits must be positive".into());
        }
        if !(self.force_cap > 0.0) {
            return bad("force cap must be positive".into());
        }
        Ok(())
    }

    pub fn force_model(&self) -> Result<ForceModel> {
        let mut model = ForceModel::with_profile(self.design, self.profile)?;
        model.force_cap = self.force_cap;
        Ok(model)
    }

    /// Natural length of the spring, the resting height of the bellow.
    pub fn natural_length(&self) -> f64 {
        self.design.resting_height()
    }
}

/// Equivalent viscous damping ratio for an efficiency ratio.
pub fn damping_ratio(eta: f64) -> f64 {
    0.25 * (1.0 - eta) / PI
}

/// Viscous coefficient matching the hysteresis loss of one compression
/// cycle, N s/m.
pub fn equivalent_damping(config: &JumperConfig, k_eq: f64) -> Result<f64> {
    let zeta = damping_ratio(config.eta);
    if zeta == 0.0 {
        return Ok(0.0);
    }
    if !(k_eq > 0.0) {
        return Err(Error::InvalidJumper(format!(
            "equivalent stiffness {k_eq} N/m must be positive"
        )));
    }
    let (m1, m2) = (config.m1, config.m2);
    let omega = (k_eq * (m1 + m2) / (m1 * m2)).sqrt();
    Ok(2.0 * (m1 + m2) * zeta * omega)
}

/// Secant stiffness at the initial compression. At zero compression the
/// secant degenerates and a small-displacement secant is used instead.
pub fn secant_stiffness<S: SpringLaw + ?Sized>(spring: &S, dy0: f64) -> f64 {
    let dy = if dy0 > 0.0 { dy0 } else { 1e-6 };
    spring.sample(dy).force / dy
}

/// Masses, gravity and limits shared by any spring law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpSetup {
    pub m1: f64,
    pub m2: f64,
    pub dy0: f64,
    pub natural_length: f64,
    pub gravity: f64,
    pub damping: f64,
    pub t_max: f64,
    pub flight_t_max: f64,
    pub clamp_out_of_range: bool,
}

impl JumpSetup {
    /// Setup for a config, with damping from the secant stiffness at `dy0`.
    pub fn from_config(config: &JumperConfig, spring: &impl SpringLaw) -> Result<Self> {
        let k_eq = secant_stiffness(spring, config.dy0);
        Ok(Self {
            m1: config.m1,
            m2: config.m2,
            dy0: config.dy0,
            natural_length: config.natural_length(),
            gravity: config.gravity,
            damping: equivalent_damping(config, k_eq)?,
            t_max: config.t_max,
            flight_t_max: config.flight_t_max,
            clamp_out_of_range: config.clamp_out_of_range,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub y1: f64,
    pub y2: f64,
    pub v1: f64,
    pub v2: f64,
    /// Spring force, positive in compression.
    pub force: f64,
}

/// Time history of one jump, from release to touchdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JumpTrace {
    pub points: Vec<TracePoint>,
    pub t_takeoff: f64,
    pub t_land: f64,
    /// Set when any force evaluation left the foldable range and was clamped.
    pub clamped: bool,
}

impl JumpTrace {
    /// CSV text with header `t_s,y1_m,y2_m,v1_mps,v2_mps,F_N`.
    pub fn to_csv(&self) -> String {
        let mut table = CsvTable::new(&["t_s", "y1_m", "y2_m", "v1_mps", "v2_mps", "F_N"]);
        for p in &self.points {
            table.push_cells([p.t, p.y1, p.y2, p.v1, p.v2, p.force].map(sig15));
        }
        table.into_string()
    }

    /// Points after take-off, touchdown included.
    pub fn flight(&self) -> impl Iterator<Item = &TracePoint> {
        self.points.iter().filter(move |p| p.t >= self.t_takeoff)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpMetrics {
    #[serde(rename = "airtime_s")]
    pub airtime: f64,
    #[serde(rename = "clearance_m")]
    pub clearance: f64,
    #[serde(rename = "t_takeoff_s")]
    pub t_takeoff: f64,
    #[serde(rename = "t_land_s")]
    pub t_land: f64,
    #[serde(rename = "takeoff_velocity_cg_mps")]
    pub takeoff_velocity_cg: f64,
    #[serde(rename = "energy_released_J")]
    pub energy_released: f64,
}

/// Simulates one jump of the configured bellow jumper.
pub fn simulate(config: &JumperConfig) -> Result<(JumpTrace, JumpMetrics)> {
    config.validate()?;
    let model = config.force_model()?;
    let setup = JumpSetup::from_config(config, &model)?;
    simulate_spring(&model, &setup)
}

/// Integrator settings used for jumps.
pub fn jump_integrator() -> IntegratorOptions {
    IntegratorOptions {
        h_max: 1e-3,
        ..IntegratorOptions::default()
    }
}

/// Simulates a jump with an arbitrary spring law.
pub fn simulate_spring<S: SpringLaw>(
    spring: &S,
    setup: &JumpSetup,
) -> Result<(JumpTrace, JumpMetrics)> {
    let JumpSetup {
        m1,
        m2,
        dy0,
        natural_length: l0,
        gravity: g,
        damping: c,
        ..
    } = *setup;
    let opts = jump_integrator();
    let clamped = Cell::new(false);
    let force = |dy: f64| {
        let s = spring.sample(dy);
        if s.clamped {
            clamped.set(true);
        }
        s.force
    };

    // Pre-jump: state [y2, v2], lower mass pinned at y1 = 0.
    let ground = |_t: f64, s: &[f64; 2]| {
        let f = force(l0 - s[0]);
        [s[1], (f - m2 * g - c * s[1]) / m2]
    };
    let mut events = vec![Event::new(
        |_t, s: &[f64; 2]| -spring.sample(l0 - s[0]).force - m1 * g,
        Direction::Rising,
        true,
    )];
    if !setup.clamp_out_of_range {
        events.push(Event::new(
            |_t, s: &[f64; 2]| {
                if spring.in_range(l0 - s[0]) {
                    1.0
                } else {
                    -1.0
                }
            },
            Direction::Falling,
            true,
        ));
    }
    let pre = integrate(&ground, 0.0, [l0 - dy0, 0.0], setup.t_max, &events, &opts)?;
    let takeoff = match pre.terminal {
        Some(hit) if hit.index == 0 => hit,
        Some(hit) => {
            return Err(Error::KinematicRangeExceeded {
                t: hit.t,
                dy: l0 - hit.y[0],
            })
        }
        None => {
            let peak_tension = pre
                .y
                .iter()
                .map(|s| -spring.sample(l0 - s[0]).force)
                .fold(f64::NEG_INFINITY, f64::max);
            return Err(Error::NoTakeoff {
                t_max: setup.t_max,
                peak_tension,
                required: m1 * g,
            });
        }
    };

    let mut points: Vec<TracePoint> = pre
        .t
        .iter()
        .zip(&pre.y)
        .map(|(&t, s)| TracePoint {
            t,
            y1: 0.0,
            y2: s[0],
            v1: 0.0,
            v2: s[1],
            force: spring.sample(l0 - s[0]).force,
        })
        .collect();

    // Flight: state [y1, v1, y2, v2].
    let flight = |_t: f64, s: &[f64; 4]| {
        let f = force(l0 - (s[2] - s[0]));
        let damp = c * (s[3] - s[1]);
        [
            s[1],
            (-f - m1 * g + damp) / m1,
            s[3],
            (f - m2 * g - damp) / m2,
        ]
    };
    let mut events = vec![
        Event::new(|_t, s: &[f64; 4]| s[0], Direction::Falling, true),
        Event::new(|_t, s: &[f64; 4]| s[1], Direction::Falling, false),
    ];
    if !setup.clamp_out_of_range {
        events.push(Event::new(
            |_t, s: &[f64; 4]| {
                if spring.in_range(l0 - (s[2] - s[0])) {
                    1.0
                } else {
                    -1.0
                }
            },
            Direction::Falling,
            true,
        ));
    }
    let t_takeoff = takeoff.t;
    let start = [0.0, 0.0, takeoff.y[0], takeoff.y[1]];
    let air = integrate(
        &flight,
        t_takeoff,
        start,
        t_takeoff + setup.flight_t_max,
        &events,
        &opts,
    )?;
    let landing = match air.terminal {
        Some(hit) if hit.index == 0 => hit,
        Some(hit) => {
            return Err(Error::KinematicRangeExceeded {
                t: hit.t,
                dy: l0 - (hit.y[2] - hit.y[0]),
            })
        }
        None => {
            return Err(Error::NoLanding {
                t_max: setup.flight_t_max,
            })
        }
    };

    points.extend(air.t.iter().zip(&air.y).skip(1).map(|(&t, s)| TracePoint {
        t,
        y1: s[0],
        y2: s[2],
        v1: s[1],
        v2: s[3],
        force: spring.sample(l0 - (s[2] - s[0])).force,
    }));
    let clearance = air
        .y
        .iter()
        .map(|s| s[0])
        .chain(air.hits.iter().filter(|h| h.index == 1).map(|h| h.y[0]))
        .fold(0.0, f64::max);

    let metrics = JumpMetrics {
        airtime: landing.t - t_takeoff,
        clearance,
        t_takeoff,
        t_land: landing.t,
        takeoff_velocity_cg: m2 * takeoff.y[1] / (m1 + m2),
        energy_released: spring.strain_energy(dy0),
    };
    let trace = JumpTrace {
        points,
        t_takeoff,
        t_land: landing.t,
        clamped: clamped.get(),
    };
    Ok((trace, metrics))
}

/// Center-of-gravity height over time.
pub fn cg_trajectory(trace: &JumpTrace, m1: f64, m2: f64) -> Vec<(f64, f64)> {
    trace
        .points
        .iter()
        .map(|p| (p.t, (m1 * p.y1 + m2 * p.y2) / (m1 + m2)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn damping_values() {
        let mut config = JumperConfig::nonlinear_prototype();
        config.eta = 1.0;
        assert_eq!(equivalent_damping(&config, 40.0).unwrap(), 0.0);
        assert_relative_eq!(
            damping_ratio(0.89),
            0.008_753_521_870_054_244,
            max_relative = 1e-12
        );

        config.eta = 0.89;
        config.m1 = 0.02;
        config.m2 = 0.02;
        let c = equivalent_damping(&config, 40.0).unwrap();
        let omega = (2.0 * 40.0 / 0.02f64).sqrt();
        assert_relative_eq!(
            c,
            2.0 * 0.04 * damping_ratio(0.89) * omega,
            max_relative = 1e-12
        );
        assert!(equivalent_damping(&config, 0.0).is_err());
    }

    #[test]
    fn pinned_before_takeoff() {
        let (trace, metrics) = simulate(&JumperConfig::nonlinear_prototype()).unwrap();
        assert!(trace.t_takeoff > 0.0);
        for p in trace.points.iter().filter(|p| p.t < trace.t_takeoff) {
            assert_eq!(p.y1, 0.0);
            assert_eq!(p.v1, 0.0);
        }
        assert!(trace.points.windows(2).all(|w| w[1].t > w[0].t));
        let last = trace.points.last().unwrap();
        assert_eq!(last.t, metrics.t_land);
        assert!(last.y1.abs() < 1e-9);
        assert!(metrics.airtime > 0.0 && metrics.clearance > 0.0);
        assert!(!trace.clamped);
    }

    #[test]
    fn takeoff_at_weight_threshold() {
        let config = JumperConfig::nonlinear_prototype();
        let (trace, _) = simulate(&config).unwrap();
        let at = trace
            .points
            .iter()
            .find(|p| p.t == trace.t_takeoff)
            .unwrap();
        let tension = -at.force;
        assert!(
            (tension - config.m1 * config.gravity).abs() < 1e-6,
            "{tension}"
        );
    }

    #[test]
    fn zero_compression_never_takes_off() {
        let mut config = JumperConfig::nonlinear_prototype();
        config.dy0 = 0.0;
        config.t_max = 0.5;
        assert!(matches!(simulate(&config), Err(Error::NoTakeoff { .. })));
    }

    #[test]
    fn rejects_bad_config() {
        let mut config = JumperConfig::nonlinear_prototype();
        config.m1 = 0.0;
        assert!(matches!(simulate(&config), Err(Error::InvalidJumper(_))));
        let mut config = JumperConfig::nonlinear_prototype();
        config.eta = 1.2;
        assert!(simulate(&config).is_err());
        let mut config = JumperConfig::nonlinear_prototype();
        config.dy0 = 1.0;
        assert!(simulate(&config).is_err());
    }

    #[test]
    fn cg_of_equal_masses_is_midpoint() {
        let config = JumperConfig::linear_prototype();
        let (trace, _) = simulate(&config).unwrap();
        for (p, (t, y)) in trace.points.iter().zip(cg_trajectory(&trace, 1.0, 1.0)) {
            assert_eq!(p.t, t);
            assert_relative_eq!(y, 0.5 * (p.y1 + p.y2), max_relative = 1e-15);
        }
    }

    #[test]
    fn linear_spring_takeoff_energy() {
        // Undamped linear spring, pre-jump phase: closed-form oscillator
        // y2(t) = l0 - m2 g / k - (dy0 - m2 g / k) cos(w t).
        let (k, m1, m2, dy0, l0, g) = (40.0, 0.0177, 0.0176, 0.11, 0.24, 9.81);
        let setup = JumpSetup {
            m1,
            m2,
            dy0,
            natural_length: l0,
            gravity: g,
            damping: 0.0,
            t_max: 5.0,
            flight_t_max: 10.0,
            clamp_out_of_range: true,
        };
        let (_, metrics) = simulate_spring(&LinearSpring { stiffness: k }, &setup).unwrap();
        let w = (k / m2).sqrt();
        let offset = m2 * g / k;
        // Tension k (y2 - l0) reaches m1 g when the extension is m1 g / k.
        let ext = m1 * g / k;
        let cos_wt = -(ext + offset) / (dy0 - offset);
        let t_expected = cos_wt.acos() / w;
        let v2 = (dy0 - offset) * w * (w * t_expected).sin();
        assert_relative_eq!(metrics.t_takeoff, t_expected, max_relative = 1e-6);
        assert_relative_eq!(
            metrics.takeoff_velocity_cg,
            m2 * v2 / (m1 + m2),
            max_relative = 1e-6
        );
        // Energy budget at take-off.
        let budget = 0.5 * k * dy0 * dy0;
        let spent = 0.5 * m2 * v2 * v2 + m2 * g * (dy0 + ext) + 0.5 * k * ext * ext;
        assert!((spent - budget).abs() / budget < 5e-3);
        assert_relative_eq!(metrics.energy_released, budget, max_relative = 1e-12);
    }
}
