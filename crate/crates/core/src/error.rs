use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one failure mode of a
/// model operation; the CLI maps them onto process exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("displacement {dy} m outside [0, {max}] m")]
    DisplacementOutOfRange { dy: f64, max: f64 },

    #[error("folding ratio {0} outside [0, 1]")]
    FoldingRatioOutOfRange(f64),

    #[error("folding ratio {ratio} needs main-fold angle {theta_final} rad above the resting angle {theta_rest} rad")]
    InfeasibleRatio {
        ratio: f64,
        theta_final: f64,
        theta_rest: f64,
    },

    #[error("fold angle {0} rad outside (0, pi)")]
    ThetaOutOfRange(f64),

    #[error("singular configuration at theta_M = {theta_m} rad, theta_S = {theta_s} rad")]
    SingularConfiguration { theta_m: f64, theta_s: f64 },

    #[error("degenerate force curve: {0}")]
    DegenerateCurve(String),

    #[error("curves do not share the same displacement grid")]
    MismatchedCurves,

    #[error("invalid jumper configuration: {0}")]
    InvalidJumper(String),

    #[error("no take-off within {t_max} s (peak tension {peak_tension} N, needed {required} N)")]
    NoTakeoff {
        t_max: f64,
        peak_tension: f64,
        required: f64,
    },

    #[error("lower mass still airborne after {t_max} s of flight")]
    NoLanding { t_max: f64 },

    #[error("relative displacement {dy} m left the foldable range during flight at t = {t} s")]
    KinematicRangeExceeded { t: f64, dy: f64 },

    #[error("integrator step size underflow at t = {0} s")]
    StepSizeUnderflow(f64),

    #[error("invalid optimization setup: {0}")]
    InvalidSpec(String),

    #[error("no candidate design evaluated feasibly")]
    AllInfeasible,

    #[error("deflection {0} rad too small to reduce a stiffness")]
    DegenerateDeflection(f64),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
