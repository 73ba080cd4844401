//! Particle swarm optimization over a box-constrained search space.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{improves, Bounds, OptimResult, TracePoint};
use crate::error::{Error, Result};

/// Swarm hyperparameters. The defaults are constriction-style constants.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoParams {
    pub swarm_size: usize,
    pub inertia: f64,
    pub c_personal: f64,
    pub c_global: f64,
    pub max_iters: usize,
    pub seed: u64,
}

impl Default for PsoParams {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            inertia: 0.72,
            c_personal: 1.49,
            c_global: 1.49,
            max_iters: 100,
            seed: 0,
        }
    }
}

/// Stop early once the global best has not improved by more than
/// `STALL_TOL` for `STALL_ITERS` consecutive iterations.
const STALL_ITERS: usize = 25;
const STALL_TOL: f64 = 1e-12;

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best_position: Vec<f64>,
    best_value: f64,
}

/// Minimizes `f` over `bounds`. Positions are clamped to the box after each
/// velocity update, zeroing the velocity on any clamped coordinate, so every
/// reported point lies inside the bounds. Identical seeds yield identical
/// trajectories.
pub fn minimize_pso<F>(f: F, bounds: &Bounds, params: &PsoParams) -> Result<OptimResult>
where
    F: Fn(&[f64]) -> f64,
{
    if params.swarm_size < 2 {
        return Err(Error::BadSwarmSize(params.swarm_size));
    }
    let dim = bounds.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut evaluations = 0usize;

    let mut swarm: Vec<Particle> = (0..params.swarm_size)
        .map(|_| {
            let position: Vec<f64> = (0..dim)
                .map(|d| rng.gen_range(bounds.lower[d]..=bounds.upper[d]))
                .collect();
            Particle {
                best_position: position.clone(),
                position,
                velocity: vec![0.0; dim],
                best_value: f64::INFINITY,
            }
        })
        .collect();

    let mut best_x = swarm[0].position.clone();
    let mut best_f = f64::INFINITY;
    for particle in &mut swarm {
        let value = f(&particle.position);
        evaluations += 1;
        particle.best_value = value;
        if improves(value, best_f) {
            best_f = value;
            best_x = particle.position.clone();
        }
    }

    let mut trace = Vec::with_capacity(params.max_iters);
    let mut iterations = 0;
    let mut stall = 0usize;
    let mut converged = false;

    for iter in 1..=params.max_iters {
        iterations = iter;
        let before = best_f;
        for p in 0..swarm.len() {
            for d in 0..dim {
                let r1: f64 = rng.gen();
                let r2: f64 = rng.gen();
                let particle = &mut swarm[p];
                particle.velocity[d] = params.inertia * particle.velocity[d]
                    + params.c_personal * r1 * (particle.best_position[d] - particle.position[d])
                    + params.c_global * r2 * (best_x[d] - particle.position[d]);
                particle.position[d] += particle.velocity[d];
                if particle.position[d] < bounds.lower[d] {
                    particle.position[d] = bounds.lower[d];
                    particle.velocity[d] = 0.0;
                } else if particle.position[d] > bounds.upper[d] {
                    particle.position[d] = bounds.upper[d];
                    particle.velocity[d] = 0.0;
                }
            }
            let value = f(&swarm[p].position);
            evaluations += 1;
            let particle = &mut swarm[p];
            if improves(value, particle.best_value) {
                particle.best_value = value;
                particle.best_position = particle.position.clone();
                if improves(value, best_f) {
                    best_f = value;
                    best_x = particle.position.clone();
                }
            }
        }
        trace.push(TracePoint {
            iteration: iter,
            best_f,
            evaluations,
        });
        if before - best_f <= STALL_TOL {
            stall += 1;
            if stall >= STALL_ITERS {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }

    Ok(OptimResult {
        best_x,
        best_f,
        evaluations,
        iterations,
        converged,
        trace,
    })
}
