//! Derivative-free box-constrained minimization and the linear-design fit
//! built on it.
//!
//! Both minimizers work in coordinates scaled to the unit box, so tolerances
//! are relative to the bounds and every variable has a comparable step size.

mod linear_fit;
mod nelder_mead;
mod powell;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use linear_fit::{
    fit_error, ideal_linear_target, optimize_linear_design, start_points, DesignBounds, FitError,
    LinearFitSpec, OptResult, RunSummary, INFEASIBLE_ERROR,
};
pub use nelder_mead::nelder_mead_minimize;
pub use powell::powell_minimize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Simplex,
    Powell,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Simplex => "simplex",
            Algorithm::Powell => "powell",
        }
    }
}

/// Closed box `[lower, upper]` per coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::InvalidSpec(
                "bounds need matching, non-empty lower and upper vectors".into(),
            ));
        }
        if lower
            .iter()
            .zip(&upper)
            .any(|(lo, hi)| !(lo.is_finite() && hi.is_finite() && lo < hi))
        {
            return Err(Error::InvalidSpec("every bound needs lower < upper".into()));
        }
        Ok(Self { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    fn box_to_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
            .collect()
    }

    fn unit_to_box(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(s, (lo, hi))| (lo + s * (hi - lo)).clamp(*lo, *hi))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Simplex diameter (or Powell step length) in unit-box coordinates.
    pub x_tol: f64,
    /// Spread of objective values across the simplex (or per Powell sweep).
    pub f_tol: f64,
    /// Bracket width at which a Powell line search stops.
    pub line_tol: f64,
    /// Initial simplex edge / first line-search step, unit-box coordinates.
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 5000,
            x_tol: 1e-6,
            f_tol: 1e-9,
            line_tol: 1e-8,
            initial_step: 0.1,
        }
    }
}

/// Best point found by a minimizer.
#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub f: f64,
    pub iterations: usize,
    pub evaluations: usize,
    /// False when the iteration cap stopped the search first.
    pub converged: bool,
    /// Best objective value after each iteration.
    pub history: Vec<f64>,
}

fn check_start(bounds: &Bounds, x0: &[f64]) -> Result<()> {
    if !bounds.contains(x0) {
        return Err(Error::InvalidSpec(format!(
            "start point {x0:?} outside the bounds"
        )));
    }
    Ok(())
}

/// Objective wrapper counting evaluations in unit-box coordinates.
struct Scaled<'a, F> {
    objective: F,
    bounds: &'a Bounds,
    evaluations: usize,
}

impl<F: FnMut(&[f64]) -> f64> Scaled<'_, F> {
    fn eval(&mut self, u: &[f64]) -> f64 {
        self.evaluations += 1;
        let v = (self.objective)(&self.bounds.unit_to_box(u));
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(super) fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }

    #[test]
    fn bounds_validation() {
        assert!(Bounds::new(vec![0.0], vec![0.0]).is_err());
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
        let b = Bounds::new(vec![-1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(b.contains(&[0.0, 2.0]));
        assert!(!b.contains(&[0.0, 2.1]));
        let u = b.box_to_unit(&[0.5, 1.0]);
        assert_eq!(u, vec![0.75, 0.5]);
        assert_eq!(b.unit_to_box(&u), vec![0.5, 1.0]);
    }

    type Minimizer =
        fn(&mut dyn FnMut(&[f64]) -> f64, &Bounds, &[f64], &MinimizeOptions) -> Result<Minimum>;

    fn check_all(minimize: Minimizer) {
        let opts = MinimizeOptions::default();

        let bounds = Bounds::new(vec![-10.0], vec![10.0]).unwrap();
        let m = minimize(
            &mut |x: &[f64]| (x[0] - 3.0).powi(2),
            &bounds,
            &[0.0],
            &opts,
        )
        .unwrap();
        assert!((m.x[0] - 3.0).abs() < 1e-5, "{:?}", m.x);
        assert!(m.converged);

        let bounds = Bounds::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let m = minimize(&mut |x: &[f64]| rosenbrock(x), &bounds, &[-1.2, 1.0], &opts).unwrap();
        assert!(
            (m.x[0] - 1.0).abs() < 1e-3 && (m.x[1] - 1.0).abs() < 1e-3,
            "{:?} f={}",
            m.x,
            m.f
        );
        assert!(m.history.windows(2).all(|w| w[1] <= w[0]));

        let again = minimize(&mut |x: &[f64]| rosenbrock(x), &bounds, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(m, again);

        // Minimum outside the box lands on the boundary.
        let bounds = Bounds::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let m = minimize(
            &mut |x: &[f64]| (x[0] - 2.0).powi(2) + (x[1] - 0.3).powi(2),
            &bounds,
            &[0.5, 0.5],
            &opts,
        )
        .unwrap();
        assert!(
            (m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 0.3).abs() < 1e-4,
            "{:?}",
            m.x
        );

        let err = minimize(&mut |x: &[f64]| x[0], &bounds, &[2.0, 0.0], &opts);
        assert!(err.is_err());
    }

    #[test]
    fn nelder_mead_contract() {
        check_all(|f, b, x, o| nelder_mead_minimize(f, b, x, o));
    }

    #[test]
    fn powell_contract() {
        check_all(|f, b, x, o| powell_minimize(f, b, x, o));
    }

    #[test]
    fn iteration_cap_flags_result() {
        let bounds = Bounds::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let opts = MinimizeOptions {
            max_iterations: 3,
            ..Default::default()
        };
        for m in [
            nelder_mead_minimize(&mut |x: &[f64]| rosenbrock(x), &bounds, &[-1.2, 1.0], &opts)
                .unwrap(),
            powell_minimize(&mut |x: &[f64]| rosenbrock(x), &bounds, &[-1.2, 1.0], &opts).unwrap(),
        ] {
            assert!(!m.converged);
            assert_eq!(m.iterations, 3);
            assert!(m.f <= rosenbrock(&[-1.2, 1.0]));
        }
    }
}
