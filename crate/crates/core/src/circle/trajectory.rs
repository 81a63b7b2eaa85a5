use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::angle::{wrap_raw, CircleSwarm};
use super::dynamics::ct_rhs_into;
use super::profile::CouplingProfile;
use crate::fmt_f64;
use crate::graph::GraphSequence;
use crate::{Error, Result};

/// Provenance attached to a trajectory.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub algorithm: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub graph: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<CouplingProfile>,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl TrajectoryMeta {
    pub fn new(algorithm: impl Into<String>) -> Self {
        Self {
            algorithm: algorithm.into(),
            ..Self::default()
        }
    }
}

/// Time-ordered samples of a swarm on the circle.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<CircleSwarm>,
    pub meta: TrajectoryMeta,
}

impl Trajectory {
    /// Fails unless there is at least one sample, times strictly increase and
    /// every state has the same size.
    pub fn new(times: Vec<f64>, states: Vec<CircleSwarm>, meta: TrajectoryMeta) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(Error::invalid("a trajectory needs one state per sample time"));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("sample times must be strictly increasing"));
        }
        let n = states[0].n();
        if states.iter().any(|s| s.n() != n) {
            return Err(Error::invalid("all samples must have the same number of agents"));
        }
        Ok(Self { times, states, meta })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[CircleSwarm] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn n(&self) -> usize {
        self.states[0].n()
    }

    pub fn final_state(&self) -> &CircleSwarm {
        self.states.last().expect("trajectories are non-empty")
    }

    pub fn spreads(&self) -> Vec<f64> {
        self.states.iter().map(CircleSwarm::spread).collect()
    }

    /// Instantaneous velocities `d theta_k / dt` at every sample.
    pub fn velocities(&self, schedule: &GraphSequence, alpha: f64, profile: &CouplingProfile) -> Vec<Vec<f64>> {
        self.times
            .iter()
            .zip(&self.states)
            .map(|(&t, s)| {
                let mut v = vec![0.0; s.n()];
                ct_rhs_into(s.angles(), schedule.graph_at_time(t), alpha, profile, &mut v);
                v
            })
            .collect()
    }

    /// Velocities estimated by forward differences of consecutive samples,
    /// unwrapping each increment.
    pub fn finite_difference_velocities(&self) -> Vec<Vec<f64>> {
        self.times
            .windows(2)
            .zip(self.states.windows(2))
            .map(|(t, s)| {
                let dt = t[1] - t[0];
                s[0].angles()
                    .iter()
                    .zip(s[1].angles())
                    .map(|(a, b)| wrap_raw(b - a) / dt)
                    .collect()
            })
            .collect()
    }

    /// CSV with header `t,theta_1,...,theta_N`.
    pub fn write_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let rows: Vec<&[f64]> = self.states.iter().map(CircleSwarm::angles).collect();
        write_columns_csv(w, "theta", &self.times, &rows)
    }

    /// CSV of `sin(theta_k)` with header `t,sin_theta_1,...`.
    pub fn write_sin_csv<W: Write>(&self, w: W) -> std::io::Result<()> {
        let rows: Vec<Vec<f64>> = self
            .states
            .iter()
            .map(|s| s.angles().iter().map(|t| t.sin()).collect())
            .collect();
        write_columns_csv(w, "sin_theta", &self.times, &rows)
    }

    /// CSV of `d theta_k / dt` with header `t,dtheta_1,...`.
    pub fn write_velocity_csv<W: Write>(
        &self,
        w: W,
        schedule: &GraphSequence,
        alpha: f64,
        profile: &CouplingProfile,
    ) -> std::io::Result<()> {
        write_columns_csv(w, "dtheta", &self.times, &self.velocities(schedule, alpha, profile))
    }
}

/// Writes `t,<prefix>_1,...,<prefix>_N` followed by one row per time.
pub fn write_columns_csv<W: Write, R: AsRef<[f64]>>(mut w: W, prefix: &str, times: &[f64], rows: &[R]) -> std::io::Result<()> {
    let width = rows.first().map_or(0, |r| r.as_ref().len());
    let mut line = String::from("t");
    for k in 1..=width {
        line.push_str(&format!(",{prefix}_{k}"));
    }
    writeln!(w, "{line}")?;
    for (t, row) in times.iter().zip(rows) {
        line.clear();
        line.push_str(&fmt_f64(*t));
        for x in row.as_ref() {
            line.push(',');
            line.push_str(&fmt_f64(*x));
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}
