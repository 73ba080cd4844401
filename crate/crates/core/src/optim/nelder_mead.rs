//! Nelder-Mead simplex minimization with the standard move coefficients.

use super::{improves, OptimResult, TracePoint};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NelderMeadParams {
    /// Offset of the n extra initial vertices along each axis.
    pub init_step: f64,
    /// Stop when the simplex f-spread falls below this.
    pub f_tol: f64,
    /// Stop when the simplex diameter falls below this.
    pub x_tol: f64,
    pub max_iters: usize,
}

impl Default for NelderMeadParams {
    fn default() -> Self {
        Self {
            init_step: 0.05,
            f_tol: 1e-10,
            x_tol: 1e-10,
            max_iters: 2000,
        }
    }
}

const REFLECTION: f64 = 1.0;
const EXPANSION: f64 = 2.0;
const CONTRACTION: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` from `x0`. The initial simplex is `x0` plus one vertex
/// offset by `init_step` along each axis. The best vertex never worsens;
/// termination is f-spread < f_tol, diameter < x_tol, or budget exhaustion.
pub fn minimize_nelder_mead<F>(
    f: F,
    x0: &[f64],
    params: &NelderMeadParams,
) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let f0 = f(x0);
    if !f0.is_finite() {
        return Err(Error::NonFiniteStart);
    }
    let mut evaluations = 1usize;

    if params.max_iters == 0 {
        return Ok(OptimResult {
            best_x: x0.to_vec(),
            best_f: f0,
            evaluations,
            iterations: 0,
            converged: false,
            trace: Vec::new(),
        });
    }

    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    simplex.push(x0.to_vec());
    values.push(f0);
    for i in 0..n {
        let mut vertex = x0.to_vec();
        vertex[i] += params.init_step;
        values.push(f(&vertex));
        evaluations += 1;
        simplex.push(vertex);
    }

    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut converged = false;

    for iter in 1..=params.max_iters {
        iterations = iter;
        sort_simplex(&mut simplex, &mut values);

        // Both the value spread and the simplex extent must collapse; the
        // f-spread alone can hit zero while vertices still straddle the
        // minimum symmetrically.
        let spread = values[n] - values[0];
        let diameter = simplex[1..]
            .iter()
            .map(|v| distance(v, &simplex[0]))
            .fold(0.0f64, f64::max);
        if spread < params.f_tol && diameter < params.x_tol {
            converged = true;
            break;
        }

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; n];
        for vertex in &simplex[..n] {
            for (c, v) in centroid.iter_mut().zip(vertex) {
                *c += v;
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let reflected = blend(&centroid, &simplex[n], 1.0 + REFLECTION, -REFLECTION);
        let f_reflected = f(&reflected);
        evaluations += 1;

        if improves(f_reflected, values[0]) {
            let expanded = blend(&centroid, &reflected, 1.0 - EXPANSION, EXPANSION);
            let f_expanded = f(&expanded);
            evaluations += 1;
            if improves(f_expanded, f_reflected) {
                simplex[n] = expanded;
                values[n] = f_expanded;
            } else {
                simplex[n] = reflected;
                values[n] = f_reflected;
            }
        } else if improves(f_reflected, values[n - 1]) {
            simplex[n] = reflected;
            values[n] = f_reflected;
        } else {
            let (contracted, f_contracted) = if improves(f_reflected, values[n]) {
                let point = blend(&centroid, &reflected, 1.0 - CONTRACTION, CONTRACTION);
                let value = f(&point);
                (point, value)
            } else {
                let point = blend(&centroid, &simplex[n], 1.0 - CONTRACTION, CONTRACTION);
                let value = f(&point);
                (point, value)
            };
            evaluations += 1;
            if improves(f_contracted, values[n].min(f_reflected)) {
                simplex[n] = contracted;
                values[n] = f_contracted;
            } else {
                for i in 1..=n {
                    let shrunk = blend(&simplex[0], &simplex[i], 1.0 - SHRINK, SHRINK);
                    values[i] = f(&shrunk);
                    evaluations += 1;
                    simplex[i] = shrunk;
                }
            }
        }

        let best = values
            .iter()
            .cloned()
            .fold(f64::INFINITY, |acc, v| if v < acc { v } else { acc });
        trace.push(TracePoint {
            iteration: iter,
            best_f: best,
            evaluations,
        });
    }

    sort_simplex(&mut simplex, &mut values);
    Ok(OptimResult {
        best_x: simplex[0].clone(),
        best_f: values[0],
        evaluations,
        iterations,
        converged,
        trace,
    })
}

fn sort_simplex(simplex: &mut [Vec<f64>], values: &mut [f64]) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap_or(std::cmp::Ordering::Equal));
    let sorted_simplex: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
    let sorted_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
    for (dst, src) in simplex.iter_mut().zip(sorted_simplex) {
        *dst = src;
    }
    values.copy_from_slice(&sorted_values);
}

fn blend(a: &[f64], b: &[f64], wa: f64, wb: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| wa * x + wb * y).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
