//! Rigid-folding kinematics of a Tachi-Miura polyhedron bellow.
//!
//! A bellow of `N` unit cells compresses along its axis while the main folds
//! stay parallel to the base. One scalar, the main-fold half angle, fixes the
//! whole configuration: the in-plane main-fold angle and the sub-fold half
//! angle follow from closed-form closure relations.
//!
//! Displacement `dy` is measured from the resting height and is positive in
//! compression. Negative `dy` (extension) is available through
//! [`fold_state_at`] for the tension branch used by the jump dynamics.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Crease geometry, cell count and crease stiffness of one bellow design.
///
/// Lengths are in meters, angles in radians, per-unit-length stiffness in
/// N/rad (torque per radian per meter of crease).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TmpDesign {
    /// Number of unit cells.
    pub n_cells: u32,
    /// Sub-fold angle relative to the main folds in the flat pattern.
    pub alpha: f64,
    pub c: f64,
    /// Unit cell height.
    pub d: f64,
    pub l: f64,
    pub m: f64,
    /// Main-fold torsional stiffness per unit length.
    pub k_main_hat: f64,
    /// Sub-fold torsional stiffness per unit length.
    pub k_sub_hat: f64,
    /// Resting main-fold half angle.
    pub theta_m0: f64,
}

/// Default resting main-fold half angle (60 degrees).
pub const DEFAULT_THETA_M0: f64 = std::f64::consts::FRAC_PI_3;

impl TmpDesign {
    /// Builds a design from millimeters and degrees, the units crease
    /// patterns are usually drawn in. The resting angle defaults to 60 degrees.
    #[allow(clippy::too_many_arguments)]
    pub fn from_mm_deg(
        n_cells: u32,
        alpha_deg: f64,
        c_mm: f64,
        d_mm: f64,
        l_mm: f64,
        m_mm: f64,
        k_main_hat: f64,
        k_sub_hat: f64,
    ) -> Self {
        Self {
            n_cells,
            alpha: alpha_deg.to_radians(),
            c: c_mm * 1e-3,
            d: d_mm * 1e-3,
            l: l_mm * 1e-3,
            m: m_mm * 1e-3,
            k_main_hat,
            k_sub_hat,
            theta_m0: DEFAULT_THETA_M0,
        }
    }

    /// 8 cells, alpha = 40 deg, all lengths 30 mm, 0.005 N/rad on every crease.
    pub fn baseline() -> Self {
        Self::from_mm_deg(8, 40.0, 30.0, 30.0, 30.0, 30.0, 0.005, 0.005)
    }

    /// Strain-softening prototype: soft main folds, stiff sub-folds.
    pub fn nonlinear_prototype() -> Self {
        Self::from_mm_deg(8, 30.0, 21.1, 34.2, 39.9, 23.2, 0.0186, 0.0946)
    }

    /// Close-to-linear prototype: stiff main folds, soft sub-folds.
    pub fn linear_prototype() -> Self {
        Self::from_mm_deg(8, 50.0, 34.0, 21.6, 31.7, 39.1, 0.0946, 0.0186)
    }

    /// Base values used by the one-at-a-time design studies
    /// (alpha = 50 deg, 30 mm lengths, soft main / stiff sub creases).
    pub fn study_base() -> Self {
        Self::from_mm_deg(8, 50.0, 30.0, 30.0, 30.0, 30.0, 0.0186, 0.0946)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDesign(msg));
        if self.n_cells < 1 {
            return bad("cell count must be at least 1".into());
        }
        for (name, v) in [("c", self.c), ("d", self.d), ("l", self.l), ("m", self.m)] {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("length {name} = {v} must be positive"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < FRAC_PI_2) {
            return bad(format!("alpha = {} rad must lie in (0, pi/2)", self.alpha));
        }
        if !(self.theta_m0 > 0.0 && self.theta_m0 < FRAC_PI_2) {
            return bad(format!(
                "resting angle {} rad must lie in (0, pi/2)",
                self.theta_m0
            ));
        }
        if !(self.k_main_hat >= 0.0 && self.k_sub_hat >= 0.0) {
            return bad("crease stiffness must be non-negative".into());
        }
        Ok(())
    }

    /// Total height of the stacked cells per unit of `sin(theta_M)`.
    fn stack_height(&self) -> f64 {
        f64::from(self.n_cells) * self.d
    }

    /// Resting height `N d sin(theta_M0)`.
    pub fn resting_height(&self) -> f64 {
        self.stack_height() * self.theta_m0.sin()
    }

    /// Largest compression: the bellow folded flat (`theta_M = 0`).
    pub fn max_compression(&self) -> f64 {
        self.resting_height()
    }

    /// Largest extension: the bellow stretched flat (`theta_M = 90 deg`).
    pub fn max_extension(&self) -> f64 {
        self.stack_height() * (1.0 - self.theta_m0.sin())
    }

    /// Total crease lengths entering the main and sub-fold stiffness.
    pub fn crease_lengths(&self) -> CreaseLengths {
        crease_lengths(self)
    }
}

/// One folded configuration of the bellow.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FoldState {
    /// Main-fold half dihedral angle.
    pub theta_m: f64,
    /// Angle between the x-axis and the main fold.
    pub theta_g: f64,
    /// Sub-fold half dihedral angle.
    pub theta_s: f64,
    /// Compression from the resting height (compression positive).
    pub dy: f64,
}

/// In-plane main-fold angle and sub-fold half angle for a main-fold angle.
pub fn dependent_angles(alpha: f64, theta_m: f64) -> (f64, f64) {
    let theta_g = 2.0 * (alpha.tan() * theta_m.cos()).atan();
    let ratio = ((0.5 * theta_g).sin() / alpha.sin()).clamp(-1.0, 1.0);
    (theta_g, ratio.acos())
}

fn state_from_theta_m(design: &TmpDesign, theta_m: f64, dy: f64) -> FoldState {
    let (theta_g, theta_s) = dependent_angles(design.alpha, theta_m);
    FoldState {
        theta_m,
        theta_g,
        theta_s,
        dy,
    }
}

/// The unloaded configuration at `theta_M0`.
pub fn resting_state(design: &TmpDesign) -> FoldState {
    state_from_theta_m(design, design.theta_m0, 0.0)
}

/// Fold state for a compression `dy` in `[0, N d sin(theta_M0)]`.
pub fn fold_state_from_displacement(design: &TmpDesign, dy: f64) -> Result<FoldState> {
    let max = design.max_compression();
    if !(0.0..=max).contains(&dy) {
        return Err(Error::DisplacementOutOfRange { dy, max });
    }
    fold_state_at(design, dy)
}

/// Fold state for any displacement between flat-extended (negative `dy`) and
/// flat-folded. Outside that band the bellow has no rigid-folding configuration.
pub fn fold_state_at(design: &TmpDesign, dy: f64) -> Result<FoldState> {
    let s = design.theta_m0.sin() - dy / design.stack_height();
    if !(0.0..=1.0).contains(&s) || dy.is_nan() {
        return Err(Error::DisplacementOutOfRange {
            dy,
            max: design.max_compression(),
        });
    }
    Ok(state_from_theta_m(design, s.asin(), dy))
}

/// Main-fold angle reached at a folding ratio: `(1 - R_F) * 90 deg`.
pub fn final_main_angle(ratio: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(Error::FoldingRatioOutOfRange(ratio));
    }
    Ok((1.0 - ratio) * FRAC_PI_2)
}

/// Folding ratio of a main-fold angle, the inverse of [`final_main_angle`].
pub fn folding_ratio(theta_m: f64) -> f64 {
    (FRAC_PI_2 - theta_m) / FRAC_PI_2
}

/// Compression that brings the main folds to the angle set by `ratio`.
///
/// Ratios whose final angle lies above the resting angle would need the
/// bellow to extend and are rejected.
pub fn displacement_from_folding_ratio(design: &TmpDesign, ratio: f64) -> Result<f64> {
    let theta_final = final_main_angle(ratio)?;
    if theta_final > design.theta_m0 {
        return Err(Error::InfeasibleRatio {
            ratio,
            theta_final,
            theta_rest: design.theta_m0,
        });
    }
    Ok(design.stack_height() * (design.theta_m0.sin() - theta_final.sin()))
}

/// Crease lengths that scale the per-unit-length stiffness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreaseLengths {
    /// `l + m + c`
    pub main: f64,
    /// `d / sin(alpha)`
    pub sub: f64,
}

impl CreaseLengths {
    /// Base torsional coefficients `(k_M0, k_S0)` in N m/rad.
    pub fn base_stiffness(&self, design: &TmpDesign) -> (f64, f64) {
        (design.k_main_hat * self.main, design.k_sub_hat * self.sub)
    }
}

pub fn crease_lengths(design: &TmpDesign) -> CreaseLengths {
    CreaseLengths {
        main: design.l + design.m + design.c,
        sub: design.d / design.alpha.sin(),
    }
}
