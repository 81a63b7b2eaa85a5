use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{gradient_raw, hessian_raw, require_undirected, EquilibriumReport};
use crate::circle::{check_sizes, wrap_raw, CircleSwarm, CouplingProfile};
use crate::graph::WeightedDigraph;
use crate::Result;

/// Acceptance threshold on `|grad V|`.
pub const GRADIENT_TOL: f64 = 1e-10;

const MAX_ITERATIONS: usize = 500;

/// Result of a search from one seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SeedOutcome {
    Converged {
        seed_index: usize,
        iterations: usize,
        report: EquilibriumReport,
    },
    Failed {
        seed_index: usize,
        gradient_norm: f64,
    },
}

impl SeedOutcome {
    pub fn report(&self) -> Option<&EquilibriumReport> {
        match self {
            SeedOutcome::Converged { report, .. } => Some(report),
            SeedOutcome::Failed { .. } => None,
        }
    }
}

/// Levenberg–Marquardt on `grad V = 0` from every seed. Seeds are processed
/// in parallel; each outcome depends on its seed alone and the output keeps
/// seed order.
pub fn critical_point_search(
    g: &WeightedDigraph,
    profile: &CouplingProfile,
    seeds: &[CircleSwarm],
) -> Result<Vec<SeedOutcome>> {
    require_undirected(g)?;
    for s in seeds {
        check_sizes(s.n(), g)?;
    }
    seeds
        .par_iter()
        .enumerate()
        .map(|(i, s)| search_one(g, profile, s, i))
        .collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn search_one(g: &WeightedDigraph, profile: &CouplingProfile, seed: &CircleSwarm, seed_index: usize) -> Result<SeedOutcome> {
    let n = seed.n();
    let mut th = seed.angles().to_vec();
    let mut grad = gradient_raw(&th, g, profile);
    let mut gn = norm(&grad);
    let mut lambda = 1e-3;
    let mut iterations = 0;
    while gn >= GRADIENT_TOL && iterations < MAX_ITERATIONS {
        iterations += 1;
        let h = hessian_raw(&th, g, profile);
        let f = DVector::from_column_slice(&grad);
        let jtj = &h * &h;
        let rhs = -(&h * &f);
        let mut improved = false;
        for _ in 0..30 {
            let a = &jtj + DMatrix::identity(n, n) * lambda;
            let Some(step) = a.cholesky().map(|c| c.solve(&rhs)) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = th.iter().zip(step.iter()).map(|(t, d)| t + d).collect();
            let tg = gradient_raw(&trial, g, profile);
            let tn = norm(&tg);
            if tn < gn {
                th = trial;
                grad = tg;
                gn = tn;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    if gn >= GRADIENT_TOL {
        return Ok(SeedOutcome::Failed {
            seed_index,
            gradient_norm: gn,
        });
    }
    let state = CircleSwarm::new(th.into_iter().map(wrap_raw).collect())?;
    Ok(SeedOutcome::Converged {
        seed_index,
        iterations,
        report: EquilibriumReport::at(state, g, profile)?,
    })
}
