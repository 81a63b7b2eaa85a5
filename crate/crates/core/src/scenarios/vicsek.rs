use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::circle::{dt_step, CircleSwarm};
use crate::graph::WeightedDigraph;
use crate::{Error, Result};

/// Particles in the plane moving with unit speed along their headings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VicsekState {
    pub positions: Vec<[f64; 2]>,
    pub headings: CircleSwarm,
    /// Sensing radius.
    pub radius: f64,
}

impl VicsekState {
    pub fn new(positions: Vec<[f64; 2]>, headings: CircleSwarm, radius: f64) -> Result<Self> {
        if positions.len() != headings.n() {
            return Err(Error::invalid("one position per heading is required"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::invalid(format!("sensing radius must be positive, got {radius}")));
        }
        Ok(Self {
            positions,
            headings,
            radius,
        })
    }

    /// Unit-weight undirected graph joining particles within the radius.
    pub fn proximity_graph(&self) -> WeightedDigraph {
        let n = self.positions.len();
        let mut edges = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                let [xj, yj] = self.positions[j];
                let [xk, yk] = self.positions[k];
                if (xk - xj).hypot(yk - yj) <= self.radius {
                    edges.push((j, k, 1.0));
                }
            }
        }
        WeightedDigraph::from_undirected_edges(n, &edges).expect("proximity edges are valid")
    }
}

/// One step: headings take the discrete-time update with `beta = 1` on the
/// current proximity graph, then positions advance one unit along the old
/// headings.
pub fn vicsek_step(s: &VicsekState) -> Result<VicsekState> {
    let g = s.proximity_graph();
    let headings = dt_step(&s.headings, &g, 1.0, None)?;
    let positions = s
        .positions
        .iter()
        .zip(s.headings.angles())
        .map(|(&[x, y], &t)| [x + t.cos(), y + t.sin()])
        .collect();
    Ok(VicsekState {
        positions,
        headings,
        radius: s.radius,
    })
}

/// Ring radii `(lo, hi]` for which each of `n` regularly spaced particles
/// senses exactly its two ring neighbors.
pub fn feasible_ring_radius(n: usize, sensing_radius: f64) -> (f64, f64) {
    let lo = sensing_radius / (2.0 * (TAU / n as f64).sin());
    let hi = sensing_radius / (2.0 * (PI / n as f64).sin());
    (lo, hi)
}

/// The smallest feasible ring radius whose neighbor links break half-way
/// between two steps of the outward motion, so that small position
/// perturbations do not change the step at which they break.
pub fn default_ring_radius(n: usize, sensing_radius: f64) -> Result<f64> {
    let (lo, hi) = feasible_ring_radius(n, sensing_radius);
    let top = hi - 0.5;
    if top <= lo {
        return Err(Error::invalid(format!("no half-step ring radius fits in ({lo}, {hi}]")));
    }
    let back = (top - lo).ceil() - 1.0;
    Ok(top - back)
}

/// `n >= 5` particles on a circle of radius `ring_radius`, each heading
/// radially outwards and sensing only its two ring neighbors.
pub fn vicsek_divergence_setup(n: usize, ring_radius: f64, sensing_radius: f64) -> Result<VicsekState> {
    if n < 5 {
        return Err(Error::invalid(format!("a stable spread ring needs n >= 5, got {n}")));
    }
    let (lo, hi) = feasible_ring_radius(n, sensing_radius);
    if !(ring_radius > lo && ring_radius <= hi) {
        return Err(Error::invalid(format!(
            "ring radius {ring_radius} outside the feasible interval ({lo}, {hi}]"
        )));
    }
    let angles: Vec<f64> = (0..n).map(|k| TAU * k as f64 / n as f64).collect();
    let positions = angles.iter().map(|t| [ring_radius * t.cos(), ring_radius * t.sin()]).collect();
    let state = VicsekState::new(positions, CircleSwarm::new(angles)?, sensing_radius)?;
    if state.proximity_graph().edge_count() != 2 * n {
        return Err(Error::invalid(format!(
            "ring radius {ring_radius} is too close to the edge of ({lo}, {hi}] for exact neighbor sensing"
        )));
    }
    Ok(state)
}

/// What happened to the links of a divergence run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceOutcome {
    /// First step after which the proximity graph is empty.
    pub drop_step: Option<usize>,
    /// The graph went from all initial links to none in a single step.
    pub simultaneous: bool,
    /// Headings never changed after the drop.
    pub headings_frozen: bool,
    /// The graph stayed empty until the end of the run.
    pub stayed_empty: bool,
    /// Headings never changed while linked (the ring is an equilibrium).
    pub headings_constant_before: bool,
}

/// Runs `steps` Vicsek steps and classifies the link evolution.
pub fn run_divergence(s0: &VicsekState, steps: usize) -> Result<DivergenceOutcome> {
    let initial_edges = s0.proximity_graph().edge_count();
    let mut s = s0.clone();
    let mut edge_counts = vec![initial_edges];
    let mut headings = vec![s.headings.clone()];
    for _ in 0..steps {
        s = vicsek_step(&s)?;
        edge_counts.push(s.proximity_graph().edge_count());
        headings.push(s.headings.clone());
    }
    let drop_step = edge_counts.iter().position(|&c| c == 0);
    let Some(d) = drop_step else {
        return Ok(DivergenceOutcome {
            drop_step: None,
            simultaneous: false,
            headings_frozen: false,
            stayed_empty: false,
            headings_constant_before: false,
        });
    };
    let simultaneous = d > 0 && edge_counts[..d].iter().all(|&c| c == initial_edges);
    let tol = 1e-12;
    Ok(DivergenceOutcome {
        drop_step,
        simultaneous,
        headings_frozen: headings[d..].windows(2).all(|w| w[0] == w[1]),
        stayed_empty: edge_counts[d..].iter().all(|&c| c == 0),
        headings_constant_before: headings[..=d].iter().all(|h| h.distance_to(&headings[0]) < tol),
    })
}
