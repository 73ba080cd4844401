//! Derivative-free minimizers used for merit-based weight selection:
//! particle swarm optimization, the Nelder-Mead simplex, and Powell's
//! direction-set method. All three work on a plain objective closure and
//! report a common [`OptimResult`] with a per-iteration trace.

mod nelder_mead;
mod powell;
mod pso;

pub use nelder_mead::{minimize_nelder_mead, NelderMeadParams};
pub use powell::{minimize_powell, PowellParams, LINE_SEARCH_EVAL_CAP};
pub use pso::{minimize_pso, PsoParams};

use crate::error::{Error, Result};

/// Box constraints for PSO.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::BadBounds(format!(
                "lower has {} entries, upper has {}",
                lower.len(),
                upper.len()
            )));
        }
        for (i, (lo, hi)) in lower.iter().zip(&upper).enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(Error::BadBounds(format!(
                    "dimension {i}: [{lo}, {hi}] is not a valid interval"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The unit box `[0, 1]^n`.
    pub fn unit(n: usize) -> Result<Self> {
        Self::new(vec![0.0; n], vec![1.0; n])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for (xi, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *xi = xi.clamp(*lo, *hi);
        }
    }
}

/// One row of the optimizer trace: state after an iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub iteration: usize,
    pub best_f: f64,
    pub evaluations: usize,
}

/// Outcome of a minimization run. `best_f` is always the objective value at
/// `best_x`, and the trace's `best_f` column is nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimResult {
    pub best_x: Vec<f64>,
    pub best_f: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

impl OptimResult {
    /// Renders the per-iteration trace as CSV rows
    /// `iteration,best_f,evaluations`.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,best_f,evaluations\n");
        for point in &self.trace {
            out.push_str(&format!(
                "{},{},{}\n",
                point.iteration, point.best_f, point.evaluations
            ));
        }
        out
    }
}

/// Treats NaN as worse than any number so a poisoned objective value can
/// never become the incumbent.
pub(crate) fn improves(candidate: f64, incumbent: f64) -> bool {
    candidate < incumbent
}

#[cfg(test)]
pub(crate) mod test_functions {
    pub fn sphere(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }

    pub fn rosenbrock(x: &[f64]) -> f64 {
        (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_bounds_rejected() {
        assert!(Bounds::new(vec![0.0], vec![-1.0]).is_err());
        assert!(Bounds::new(vec![], vec![]).is_err());
        assert!(Bounds::new(vec![0.0, 0.0], vec![1.0]).is_err());
        assert!(Bounds::new(vec![f64::NAN], vec![1.0]).is_err());
    }

    #[test]
    fn unit_box_clamps() {
        let bounds = Bounds::unit(2).unwrap();
        let mut x = vec![-0.5, 1.5];
        bounds.clamp(&mut x);
        assert_eq!(x, vec![0.0, 1.0]);
    }

    #[test]
    fn trace_csv_has_header() {
        let result = OptimResult {
            best_x: vec![0.0],
            best_f: 1.0,
            evaluations: 3,
            iterations: 1,
            converged: false,
            trace: vec![TracePoint {
                iteration: 1,
                best_f: 1.0,
                evaluations: 3,
            }],
        };
        let csv = result.trace_csv();
        assert!(csv.starts_with("iteration,best_f,evaluations\n"));
        assert!(csv.contains("1,1,3"));
    }
}
