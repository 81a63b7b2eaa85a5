//! Linear consensus on `R^n`.
//!
//! Agent `k` moves along `u_k = alpha * sum_j a_jk (x_j - x_k)`, either as a
//! velocity (continuous time) or as a displacement per step (discrete time).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::graph::{GraphSequence, WeightedDigraph};
use crate::ode::{Rk4, StepGrid};
use crate::stats::{log_linear_tail_fit, LinearFit};
use crate::{fmt_f64, Error, Result};

/// `N` points of `R^dim`, stored agent-major.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSwarm {
    dim: usize,
    coords: Vec<f64>,
}

impl VectorSwarm {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if coords.is_empty() || coords.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("coordinates must be finite"));
        }
        Ok(Self { dim, coords })
    }

    pub fn from_points(points: &[Vec<f64>]) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if points.iter().any(|p| p.len() != dim) {
            return Err(Error::invalid("all points must share their dimension"));
        }
        Self::new(dim, points.concat())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn point(&self, k: usize) -> &[f64] {
        &self.coords[k * self.dim..(k + 1) * self.dim]
    }

    /// Flat agent-major coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Adds `offset` to every agent.
    pub fn translated(&self, offset: &[f64]) -> Result<Self> {
        if offset.len() != self.dim {
            return Err(Error::invalid("offset dimension mismatch"));
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(i, c)| c + offset[i % self.dim])
            .collect();
        Ok(Self {
            dim: self.dim,
            coords,
        })
    }

    pub fn mean(&self) -> Vec<f64> {
        let n = self.n() as f64;
        (0..self.dim)
            .map(|d| (0..self.n()).map(|k| self.point(k)[d]).sum::<f64>() / n)
            .collect()
    }

    pub fn max_pairwise_distance(&self) -> f64 {
        let n = self.n();
        let mut best = 0.0f64;
        for j in 0..n {
            for k in j + 1..n {
                let d2: f64 = self
                    .point(j)
                    .iter()
                    .zip(self.point(k))
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                best = best.max(d2.sqrt());
            }
        }
        best
    }
}

/// Gain `alpha` and the discrete-time contraction bound `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConsensusParams {
    pub alpha: f64,
    pub b: f64,
}

impl ConsensusParams {
    pub fn new(alpha: f64, b: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
        }
        if !(b > 0.0 && b < 1.0) {
            return Err(Error::invalid(format!("b must lie in (0, 1), got {b}")));
        }
        Ok(Self { alpha, b })
    }
}

impl Default for ConsensusParams {
    fn default() -> Self {
        Self { alpha: 1.0, b: 0.9 }
    }
}

fn check_sizes(s: &VectorSwarm, g: &WeightedDigraph) -> Result<()> {
    if g.n() != s.n() {
        return Err(Error::invalid(format!(
            "graph has {} vertices but the swarm has {} agents",
            g.n(),
            s.n()
        )));
    }
    Ok(())
}

/// Writes `alpha * sum_j a_jk (x_j - x_k)` for every agent into `out`.
pub(crate) fn consensus_field(coords: &[f64], dim: usize, g: &WeightedDigraph, alpha: f64, out: &mut [f64]) {
    for k in 0..g.n() {
        let xk = &coords[k * dim..(k + 1) * dim];
        let uk = &mut out[k * dim..(k + 1) * dim];
        uk.iter_mut().for_each(|u| *u = 0.0);
        for &(j, a) in g.in_neighbors(k) {
            let xj = &coords[j * dim..(j + 1) * dim];
            for d in 0..dim {
                uk[d] += a * (xj[d] - xk[d]);
            }
        }
        uk.iter_mut().for_each(|u| *u *= alpha);
    }
}

/// Continuous-time velocities, agent-major.
pub fn ct_rhs(s: &VectorSwarm, g: &WeightedDigraph, p: &ConsensusParams) -> Result<Vec<f64>> {
    check_sizes(s, g)?;
    let mut out = vec![0.0; s.coords.len()];
    consensus_field(&s.coords, s.dim, g, p.alpha, &mut out);
    Ok(out)
}

/// Checks `alpha * d_k <= b` at every vertex.
pub fn check_gain(g: &WeightedDigraph, p: &ConsensusParams) -> Result<()> {
    for (k, d) in g.in_degrees().into_iter().enumerate() {
        if p.alpha * d > p.b {
            return Err(Error::precondition(
                Some(k),
                format!(
                    "vertex {k}: alpha * in-degree = {} exceeds b = {}",
                    p.alpha * d,
                    p.b
                ),
            ));
        }
    }
    Ok(())
}

/// One discrete-time step `x_k <- x_k + u_k`.
///
/// Each new point is the convex combination of `x_k` (weight
/// `1 - alpha d_k`) and its in-neighbors (weights `alpha a_jk`).
pub fn dt_step(s: &VectorSwarm, g: &WeightedDigraph, p: &ConsensusParams) -> Result<VectorSwarm> {
    check_sizes(s, g)?;
    check_gain(g, p)?;
    let mut u = vec![0.0; s.coords.len()];
    consensus_field(&s.coords, s.dim, g, p.alpha, &mut u);
    let coords = s.coords.iter().zip(&u).map(|(x, d)| x + d).collect();
    Ok(VectorSwarm { dim: s.dim, coords })
}

/// Disagreement cost `1/2 sum_k sum_j a_jk |x_j - x_k|^2`.
///
/// Meaningful as a descent function for undirected graphs only.
pub fn disagreement_cost(s: &VectorSwarm, g: &WeightedDigraph) -> f64 {
    let mut v = 0.0;
    for k in 0..s.n().min(g.n()) {
        for &(j, a) in g.in_neighbors(k) {
            let d2: f64 = s
                .point(j)
                .iter()
                .zip(s.point(k))
                .map(|(x, y)| (x - y) * (x - y))
                .sum();
            v += a * d2;
        }
    }
    0.5 * v
}

/// How [`simulate`] advances time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Integration {
    /// Fixed-step RK4 with step `h` until `t_end`.
    Continuous { h: f64, t_end: f64 },
    /// `steps` applications of [`dt_step`].
    Discrete { steps: usize },
}

/// Samples of a vector-space run.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorTrajectory {
    pub dim: usize,
    pub times: Vec<f64>,
    pub states: Vec<VectorSwarm>,
}

impl VectorTrajectory {
    pub fn final_state(&self) -> &VectorSwarm {
        self.states.last().expect("trajectories hold at least the initial sample")
    }

    pub fn max_pairwise_distances(&self) -> Vec<f64> {
        self.states.iter().map(VectorSwarm::max_pairwise_distance).collect()
    }

    /// Largest deviation of the swarm mean from its initial value.
    pub fn mean_drift(&self) -> f64 {
        let m0 = self.states[0].mean();
        self.states
            .iter()
            .map(|s| {
                s.mean()
                    .iter()
                    .zip(&m0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    /// Log-linear fit of the maximal pairwise distance over the second half
    /// of the run.
    pub fn decay_fit(&self) -> Option<LinearFit> {
        log_linear_tail_fit(&self.times, &self.max_pairwise_distances())
    }

    /// CSV with header `t,x_1_1,...,x_N_n`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.states[0].n();
        let mut header = vec!["t".to_string()];
        for k in 1..=n {
            for d in 1..=self.dim {
                header.push(format!("x_{k}_{d}"));
            }
        }
        writeln!(w, "{}", header.join(","))?;
        for (t, s) in self.times.iter().zip(&self.states) {
            let row: Vec<String> = std::iter::once(*t).chain(s.coords.iter().copied()).map(fmt_f64).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Runs linear consensus from `s0` under `schedule`, keeping every
/// `sample_every`-th state (the first and last states are always kept).
pub fn simulate(
    s0: &VectorSwarm,
    schedule: &GraphSequence,
    p: &ConsensusParams,
    integration: Integration,
    sample_every: usize,
) -> Result<VectorTrajectory> {
    if schedule.n() != s0.n() {
        return Err(Error::invalid(format!(
            "schedule has {} vertices but the swarm has {} agents",
            schedule.n(),
            s0.n()
        )));
    }
    let every = sample_every.max(1);
    let dim = s0.dim;
    let mut times = vec![0.0];
    let mut states = vec![s0.clone()];
    match integration {
        Integration::Continuous { h, t_end } => {
            let grid = StepGrid::new(h, t_end)?;
            let mut y = s0.coords.clone();
            let mut rk = Rk4::new(y.len());
            let alpha = p.alpha;
            let mut field = |t: f64, x: &[f64], out: &mut [f64]| {
                consensus_field(x, dim, schedule.graph_at_time(t), alpha, out)
            };
            for i in 0..grid.steps {
                rk.step(&mut field, grid.time(i), grid.step_len(i), &mut y);
                if (i + 1) % every == 0 || i + 1 == grid.steps {
                    times.push(grid.time(i + 1));
                    states.push(VectorSwarm { dim, coords: y.clone() });
                }
            }
        }
        Integration::Discrete { steps } => {
            let mut cur = s0.clone();
            for t in 0..steps {
                cur = dt_step(&cur, schedule.graph_at_step(t), p)?;
                if (t + 1) % every == 0 || t + 1 == steps {
                    times.push((t + 1) as f64);
                    states.push(cur.clone());
                }
            }
        }
    }
    Ok(VectorTrajectory { dim, times, states })
}
