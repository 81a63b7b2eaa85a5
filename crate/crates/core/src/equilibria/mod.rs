//! Critical points of the disagreement potential and their stability.

mod lyapunov;
mod ring;
mod search;
mod stabilize;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::circle::{check_sizes, CircleSwarm, CouplingProfile};
use crate::graph::WeightedDigraph;
use crate::{Error, Result};

pub use lyapunov::{async_decrement, beta_bound, detect_recurrence, ScheduleKind, UpdateSchedule};
pub use ring::{enumerate_ring_mixed_states, enumerate_ring_splay_states, SplayState};
pub use search::{critical_point_search, SeedOutcome, GRADIENT_TOL};
pub use stabilize::{linearization, linearization_eigenvalues, stabilizing_weights, StabilizedState};

/// Local nature of a critical point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    /// Positive definite apart from the single rotation mode.
    Stable,
    /// At least one clearly negative eigenvalue.
    Unstable,
    /// Neither: extra zero modes, semidefinite.
    Marginal,
}

/// A critical point with its Hessian spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub state: CircleSwarm,
    pub gradient_norm: f64,
    /// Ascending.
    pub hessian_eigenvalues: Vec<f64>,
    pub classification: Stability,
}

impl EquilibriumReport {
    /// Evaluates gradient and Hessian of the profile potential at `state`.
    pub fn at(state: CircleSwarm, g: &WeightedDigraph, profile: &CouplingProfile) -> Result<Self> {
        let gradient_norm = gradient(&state, g, profile)?.iter().map(|x| x * x).sum::<f64>().sqrt();
        let hessian_eigenvalues = sorted_eigenvalues(hessian(&state, g, profile)?);
        let classification = classify(&hessian_eigenvalues);
        Ok(Self {
            state,
            gradient_norm,
            hessian_eigenvalues,
            classification,
        })
    }
}

fn require_undirected(g: &WeightedDigraph) -> Result<()> {
    if !g.is_undirected() {
        return Err(Error::invalid("this operation needs an undirected graph"));
    }
    Ok(())
}

/// Gradient of `V = 1/2 sum_k sum_j a_jk P(theta_j - theta_k)`.
pub fn gradient(s: &CircleSwarm, g: &WeightedDigraph, profile: &CouplingProfile) -> Result<Vec<f64>> {
    check_sizes(s.n(), g)?;
    Ok(gradient_raw(s.angles(), g, profile))
}

pub(crate) fn gradient_raw(th: &[f64], g: &WeightedDigraph, profile: &CouplingProfile) -> Vec<f64> {
    let mut grad = vec![0.0; th.len()];
    for (j, k, a) in g.edges() {
        let f = 0.5 * a * profile.force(th[j] - th[k]);
        grad[k] -= f;
        grad[j] += f;
    }
    grad
}

/// Hessian of the profile potential. Requires an undirected graph.
pub fn hessian(s: &CircleSwarm, g: &WeightedDigraph, profile: &CouplingProfile) -> Result<DMatrix<f64>> {
    check_sizes(s.n(), g)?;
    require_undirected(g)?;
    Ok(hessian_raw(s.angles(), g, profile))
}

pub(crate) fn hessian_raw(th: &[f64], g: &WeightedDigraph, profile: &CouplingProfile) -> DMatrix<f64> {
    let n = th.len();
    let mut h = DMatrix::zeros(n, n);
    for (j, k, a) in g.edges() {
        let c = 0.5 * a * profile.force_slope(th[j] - th[k]);
        h[(k, k)] += c;
        h[(j, j)] += c;
        h[(k, j)] -= c;
        h[(j, k)] -= c;
    }
    h
}

/// Hessian of `v_circ`: diagonal `sum_j (a_jk + a_kj) cos(theta_j - theta_k)`,
/// off-diagonal `-(a_jk + a_kj) cos(theta_j - theta_k)`.
pub fn hessian_v_circ(s: &CircleSwarm, g: &WeightedDigraph) -> Result<DMatrix<f64>> {
    hessian(s, g, &CouplingProfile::Sine)
}

pub(crate) fn sorted_eigenvalues(h: DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Zero-mode tolerance `1e-8 (1 + max |lambda|)`.
pub fn zero_mode_tolerance(eigenvalues: &[f64]) -> f64 {
    1e-8 * (1.0 + eigenvalues.iter().fold(0.0f64, |m, x| m.max(x.abs())))
}

/// Applies the one-zero-mode rule to a Hessian spectrum.
pub fn classify(eigenvalues: &[f64]) -> Stability {
    let tol = zero_mode_tolerance(eigenvalues);
    if eigenvalues.iter().any(|&l| l < -tol) {
        return Stability::Unstable;
    }
    let zeros = eigenvalues.iter().filter(|l| l.abs() <= tol).count();
    if zeros == 1 {
        Stability::Stable
    } else {
        Stability::Marginal
    }
}
