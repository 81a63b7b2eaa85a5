use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::require_undirected;
use crate::circle::{check_sizes, dt_step, CircleSwarm};
use crate::graph::WeightedDigraph;
use crate::{Error, Result};

/// Synchronous `beta` guaranteeing that `dt_step` never increases `v_circ`
/// on an unweighted undirected graph: `d_max (2 / M + 1)` where `M > 0`
/// solves `(e^M - 1) / M = 1 + d_max / d_sum`.
pub fn beta_bound(g: &WeightedDigraph) -> Result<f64> {
    require_undirected(g)?;
    if !g.is_unweighted() {
        return Err(Error::invalid("the beta bound is defined for unweighted graphs only"));
    }
    let degrees = g.in_degrees();
    let d_max = degrees.iter().copied().fold(0.0, f64::max);
    if d_max == 0.0 {
        return Err(Error::invalid("the beta bound needs at least one edge"));
    }
    let d_sum: f64 = degrees.iter().sum();
    let target = 1.0 + d_max / d_sum;
    let h = |m: f64| m.exp_m1() / m - target;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while h(hi) < 0.0 {
        hi *= 2.0;
    }
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if h(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let m = 0.5 * (lo + hi);
    Ok(d_max * (2.0 / m + 1.0))
}

/// Change of `v_circ` when the independent set `sigma` updates with
/// `dt_step`: `-4 sum_{k in sigma} (rho_k + beta) sin^2(u_k / 2)` where
/// `sum_j a_jk e^{i (theta_j - theta_k)} + beta = rho_k e^{i u_k}`.
pub fn async_decrement(s: &CircleSwarm, g: &WeightedDigraph, beta: f64, sigma: &[usize]) -> Result<f64> {
    check_sizes(s.n(), g)?;
    require_undirected(g)?;
    if sigma.iter().any(|&k| k >= s.n()) {
        return Err(Error::invalid("update set contains an out-of-range vertex"));
    }
    if !g.is_independent_set(sigma) {
        return Err(Error::invalid("update set is not an independent set of the graph"));
    }
    let th = s.angles();
    Ok(sigma
        .iter()
        .map(|&k| {
            let p: Complex64 = g
                .in_neighbors(k)
                .iter()
                .map(|&(j, a)| a * Complex64::from_polar(1.0, th[j] - th[k]))
                .sum::<Complex64>()
                + beta;
            let half = 0.5 * p.arg();
            -4.0 * (p.norm() + beta) * half.sin().powi(2)
        })
        .sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScheduleKind {
    Synchronous,
    LocallyAsynchronous,
}

/// A periodic sequence of update sets `sigma(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateSchedule {
    subsets: Vec<Vec<usize>>,
    kind: ScheduleKind,
    horizon: usize,
}

impl UpdateSchedule {
    /// Every agent at every step.
    pub fn synchronous(n: usize) -> Self {
        Self {
            subsets: vec![(0..n).collect()],
            kind: ScheduleKind::Synchronous,
            horizon: 1,
        }
    }

    /// Validates that every subset is independent in `g` and that every
    /// vertex updates at least once in each window of `horizon` steps of the
    /// periodically repeated sequence.
    pub fn locally_asynchronous(subsets: Vec<Vec<usize>>, horizon: usize, g: &WeightedDigraph) -> Result<Self> {
        if subsets.is_empty() || horizon == 0 {
            return Err(Error::invalid("a schedule needs at least one subset and a positive horizon"));
        }
        let n = g.n();
        for (t, set) in subsets.iter().enumerate() {
            if set.iter().any(|&k| k >= n) {
                return Err(Error::invalid(format!("update set {t} contains an out-of-range vertex")));
            }
            if !g.is_independent_set(set) {
                return Err(Error::invalid(format!("update set {t} is not an independent set")));
            }
        }
        let len = subsets.len();
        for start in 0..len {
            let mut seen = vec![false; n];
            for t in start..start + horizon {
                for &k in &subsets[t % len] {
                    seen[k] = true;
                }
            }
            if let Some(k) = seen.iter().position(|s| !s) {
                return Err(Error::invalid(format!(
                    "vertex {k} does not update within the window starting at step {start}"
                )));
            }
        }
        Ok(Self {
            subsets,
            kind: ScheduleKind::LocallyAsynchronous,
            horizon,
        })
    }

    pub fn kind(&self) -> ScheduleKind {
        self.kind
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn subset_at(&self, t: usize) -> &[usize] {
        &self.subsets[t % self.subsets.len()]
    }

    /// Runs `steps` discrete updates, returning every state including `s0`.
    pub fn run(&self, s0: &CircleSwarm, g: &WeightedDigraph, beta: f64, steps: usize) -> Result<Vec<CircleSwarm>> {
        let mut out = Vec::with_capacity(steps + 1);
        out.push(s0.clone());
        for t in 0..steps {
            let next = dt_step(&out[t], g, beta, Some(self.subset_at(t)))?;
            out.push(next);
        }
        Ok(out)
    }
}

/// First recurrence `states[j] ~ states[i]` with `i < j` (agent-wise arc
/// distance below `tol`), returned as `(i, j)`; `j - i` is the period.
pub fn detect_recurrence(states: &[CircleSwarm], tol: f64) -> Option<(usize, usize)> {
    (1..states.len()).find_map(|j| (0..j).find(|&i| states[i].distance_to(&states[j]) < tol).map(|i| (i, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::v_circ;
    use crate::graph::{make_standard, StandardKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    /// Independent bisection on the transcendental equation.
    fn oracle(d_max: f64, d_sum: f64) -> f64 {
        let target = 1.0 + d_max / d_sum;
        let (mut lo, mut hi) = (1e-9f64, 50.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (mid.exp() - 1.0) / mid < target {
                lo = mid
            } else {
                hi = mid
            }
        }
        d_max * (2.0 / lo + 1.0)
    }

    #[test]
    fn bound_examples() {
        let k2 = make_standard(StandardKind::Complete, 2).unwrap();
        let b2 = beta_bound(&k2).unwrap();
        assert!((b2 - oracle(1.0, 2.0)).abs() < 1e-9);
        assert!((b2 - 3.6223).abs() < 1e-3);
        let k3 = make_standard(StandardKind::Complete, 3).unwrap();
        let b3 = beta_bound(&k3).unwrap();
        assert!((b3 - oracle(2.0, 6.0)).abs() < 1e-9);
        assert!((b3 - 9.2701).abs() < 1e-3);
        assert!(b3 > 2.0);
    }

    #[test]
    fn bound_rejects_weighted_directed_and_empty() {
        assert!(beta_bound(&WeightedDigraph::empty(3).unwrap()).is_err());
        assert!(beta_bound(&make_standard(StandardKind::RingDirected, 3).unwrap()).is_err());
        assert!(beta_bound(&WeightedDigraph::from_undirected_edges(2, &[(0, 1, 2.0)]).unwrap()).is_err());
    }

    #[test]
    fn decrement_matches_direct_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let g = make_standard(StandardKind::RingUndirected, 6).unwrap();
        for _ in 0..200 {
            let s = CircleSwarm::new((0..6).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap();
            let beta = rng.gen_range(0.1..3.0);
            let sigma = [0usize, 2, 4];
            let d = async_decrement(&s, &g, beta, &sigma).unwrap();
            let after = dt_step(&s, &g, beta, Some(&sigma)).unwrap();
            assert!((d - (v_circ(&after, &g) - v_circ(&s, &g))).abs() < 1e-9);
            assert!(d <= 0.0);
        }
        let s = CircleSwarm::synchronized(6, 1.0).unwrap();
        assert_eq!(async_decrement(&s, &g, 1.0, &[1, 3]).unwrap(), 0.0);
        assert_eq!(async_decrement(&s, &g, 1.0, &[]).unwrap(), 0.0);
        assert!(async_decrement(&s, &g, 1.0, &[0, 1]).is_err());
    }

    #[test]
    fn schedules_validate() {
        let g = make_standard(StandardKind::RingUndirected, 4).unwrap();
        assert!(UpdateSchedule::locally_asynchronous(vec![vec![0, 2], vec![1, 3]], 2, &g).is_ok());
        assert!(UpdateSchedule::locally_asynchronous(vec![vec![0, 1]], 1, &g).is_err());
        assert!(UpdateSchedule::locally_asynchronous(vec![vec![0, 2], vec![1, 3]], 1, &g).is_err());
    }

    #[test]
    fn recurrence_finds_period_two() {
        let g = make_standard(StandardKind::Complete, 2).unwrap();
        let s0 = CircleSwarm::new(vec![0.0, 1.0]).unwrap();
        let states = UpdateSchedule::synchronous(2).run(&s0, &g, 1e-12, 6).unwrap();
        let hit = detect_recurrence(&states, 1e-9);
        assert_eq!(hit.map(|(i, j)| j - i), Some(2));
    }
}
