//! Synchronization through auxiliary planar variables.
//!
//! Each agent carries `w_k in R^2`. The auxiliary variables run linear
//! consensus; each angle tracks the direction of its own auxiliary variable
//! with `d theta_k / dt = K sin(arg w_k - theta_k)`.

use std::io::Write;

use crate::circle::{check_sizes, wrap_raw, CircleSwarm, IntegrateSettings};
use crate::fmt_f64;
use crate::graph::{GraphSequence, WeightedDigraph};
use crate::ode::{Rk4, StepGrid};
use crate::vector_consensus::consensus_field;
use crate::{Error, Result};

/// Below this norm an auxiliary variable has no usable direction.
pub const DEGENERATE_NORM: f64 = 1e-9;

/// Default tracking gain relative to the consensus gain.
pub fn default_gain(alpha: f64) -> f64 {
    5.0 * alpha
}

/// Angles, auxiliary variables and tracking gain.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentedState {
    pub angles: CircleSwarm,
    pub aux: Vec<[f64; 2]>,
    pub gain: f64,
}

impl AugmentedState {
    pub fn new(angles: CircleSwarm, aux: Vec<[f64; 2]>, gain: f64) -> Result<Self> {
        if aux.len() != angles.n() {
            return Err(Error::invalid("one auxiliary variable per agent is required"));
        }
        if aux.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::invalid("auxiliary variables must be finite"));
        }
        if !(gain.is_finite() && gain > 0.0) {
            return Err(Error::invalid(format!("tracking gain must be positive, got {gain}")));
        }
        Ok(Self { angles, aux, gain })
    }

    /// `w_k = e^{i theta_k}`.
    pub fn from_angles(angles: CircleSwarm, gain: f64) -> Result<Self> {
        let aux = angles.angles().iter().map(|t| [t.cos(), t.sin()]).collect();
        Self::new(angles, aux, gain)
    }

    /// Agents whose auxiliary variable is too short to define a direction.
    pub fn degenerate_agents(&self) -> Vec<usize> {
        (0..self.aux.len()).filter(|&k| is_degenerate(self.aux[k])).collect()
    }
}

fn is_degenerate(w: [f64; 2]) -> bool {
    w[0].hypot(w[1]) < DEGENERATE_NORM
}

/// Time derivatives of an [`AugmentedState`].
#[derive(Debug, Clone, PartialEq)]
pub struct AuxVelocities {
    pub aux: Vec<[f64; 2]>,
    pub angles: Vec<f64>,
    /// Agents whose angle velocity was zeroed for lack of direction.
    pub degenerate: Vec<usize>,
}

/// Writes the full derivative of the flat state `[w_1x, w_1y, ..., theta_1, ...]`
/// and returns whether any agent was degenerate.
fn field(y: &[f64], g: &WeightedDigraph, alpha: f64, gain: f64, out: &mut [f64]) -> bool {
    let n = g.n();
    let (w, th) = y.split_at(2 * n);
    let (dw, dth) = out.split_at_mut(2 * n);
    consensus_field(w, 2, g, alpha, dw);
    let mut degenerate = false;
    for k in 0..n {
        let wk = [w[2 * k], w[2 * k + 1]];
        dth[k] = if is_degenerate(wk) {
            degenerate = true;
            0.0
        } else {
            gain * (wk[1].atan2(wk[0]) - th[k]).sin()
        };
    }
    degenerate
}

fn flatten(s: &AugmentedState, angles: &[f64]) -> Vec<f64> {
    s.aux.iter().flatten().copied().chain(angles.iter().copied()).collect()
}

pub fn aux_rhs(s: &AugmentedState, g: &WeightedDigraph, alpha: f64) -> Result<AuxVelocities> {
    check_sizes(s.angles.n(), g)?;
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let n = g.n();
    let y = flatten(s, s.angles.angles());
    let mut out = vec![0.0; 3 * n];
    field(&y, g, alpha, s.gain, &mut out);
    Ok(AuxVelocities {
        aux: (0..n).map(|k| [out[2 * k], out[2 * k + 1]]).collect(),
        angles: out[2 * n..].to_vec(),
        degenerate: s.degenerate_agents(),
    })
}

/// Samples of angles and auxiliary variables.
#[derive(Debug, Clone, PartialEq)]
pub struct AuxTrajectory {
    pub times: Vec<f64>,
    pub angles: Vec<CircleSwarm>,
    pub aux: Vec<Vec<[f64; 2]>>,
    /// Some vector-field evaluation met a degenerate auxiliary variable.
    pub degenerate: bool,
}

impl AuxTrajectory {
    pub fn final_angles(&self) -> &CircleSwarm {
        self.angles.last().expect("trajectories are non-empty")
    }

    /// CSV with header `t,theta_1,...,theta_N,w_1_x,w_1_y,...,w_N_y`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let n = self.angles[0].n();
        let mut header = vec!["t".to_string()];
        header.extend((1..=n).map(|k| format!("theta_{k}")));
        for k in 1..=n {
            header.push(format!("w_{k}_x"));
            header.push(format!("w_{k}_y"));
        }
        writeln!(w, "{}", header.join(","))?;
        for ((t, th), aux) in self.times.iter().zip(&self.angles).zip(&self.aux) {
            let row: Vec<String> = std::iter::once(*t)
                .chain(th.angles().iter().copied())
                .chain(aux.iter().flatten().copied())
                .map(fmt_f64)
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Fixed-step RK4 of the coupled system. The auxiliary part uses the same
/// field and integrator as vector consensus, so it reproduces
/// [`crate::vector_consensus::simulate`] exactly.
pub fn simulate_aux(
    s0: &AugmentedState,
    schedule: &GraphSequence,
    alpha: f64,
    settings: IntegrateSettings,
) -> Result<AuxTrajectory> {
    let n = s0.angles.n();
    if schedule.n() != n {
        return Err(Error::invalid(format!(
            "schedule has {} vertices but the swarm has {n} agents",
            schedule.n()
        )));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::invalid(format!("alpha must be positive, got {alpha}")));
    }
    let grid = StepGrid::new(settings.h, settings.t_end)?;
    let every = settings.sample_every.max(1);
    let gain = s0.gain;
    let mut y = flatten(s0, s0.angles.angles());
    let mut rk = Rk4::new(y.len());
    let mut degenerate = false;
    let mut f = |t: f64, x: &[f64], out: &mut [f64]| {
        degenerate |= field(x, schedule.graph_at_time(t), alpha, gain, out);
    };
    let split = |y: &[f64]| -> Result<(CircleSwarm, Vec<[f64; 2]>)> {
        let aux = (0..n).map(|k| [y[2 * k], y[2 * k + 1]]).collect();
        let angles = CircleSwarm::new(y[2 * n..].iter().map(|&t| wrap_raw(t)).collect())?;
        Ok((angles, aux))
    };
    let (a0, w0) = split(&y)?;
    let mut times = vec![0.0];
    let mut angles = vec![a0];
    let mut aux = vec![w0];
    for i in 0..grid.steps {
        rk.step(&mut f, grid.time(i), grid.step_len(i), &mut y);
        if (i + 1) % every == 0 || i + 1 == grid.steps {
            let (a, w) = split(&y)?;
            times.push(grid.time(i + 1));
            angles.push(a);
            aux.push(w);
        }
    }
    Ok(AuxTrajectory {
        times,
        angles,
        aux,
        degenerate,
    })
}
