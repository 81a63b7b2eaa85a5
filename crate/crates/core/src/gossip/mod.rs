//! The directed Gossip Algorithm: every agent either stays or adopts the
//! position of one randomly selected in-neighbor.
//!
//! # Random stream
//!
//! Trial `i` of a run with master seed `s` uses
//! `ChaCha8Rng::seed_from_u64(s)` switched to stream `i`
//! (`set_stream(i)`). At step `t` agent `k` consumes exactly one uniform
//! `f64` from that stream, in increasing `k`, so its draw is the
//! `(t * N + k)`-th `f64` of the stream (word position `2 (t N + k)`).
//! Replays are therefore bit-identical on every platform and under any
//! parallel schedule of trials.

mod chain;
mod monte_carlo;

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{check_sizes, CircleSwarm};
use crate::graph::{GraphSequence, WeightedDigraph};
use crate::{Error, Result};

pub use chain::{expected_sync_time, AbsorbingChain, MAX_CHAIN_STATES};
pub use monte_carlo::{monte_carlo_sync_time, HistogramBin, MonteCarloReport};

/// What an agent does with the position of the neighbor it selected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Variant {
    /// `theta_k <- theta_j`.
    Jump,
    /// `theta_k <- arg(alpha e^{i theta_k} + e^{i theta_j})`.
    Moderate { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GossipConfig {
    /// Weight of selecting no neighbor.
    pub beta: f64,
    pub variant: Variant,
    pub seed: u64,
    pub max_steps: usize,
    /// Spread below which the moderate variant counts as synchronized.
    pub sync_tol: f64,
}

impl GossipConfig {
    pub fn jump(beta: f64, seed: u64, max_steps: usize) -> Self {
        Self {
            beta,
            variant: Variant::Jump,
            seed,
            max_steps,
            sync_tol: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::invalid(format!("beta must be positive, got {}", self.beta)));
        }
        if let Variant::Moderate { alpha } = self.variant {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::invalid(format!("moderate alpha must be positive, got {alpha}")));
            }
        }
        if !(self.sync_tol.is_finite() && self.sync_tol > 0.0) {
            return Err(Error::invalid("sync_tol must be positive"));
        }
        Ok(())
    }

    /// The random stream of trial `trial`.
    pub fn trial_rng(&self, trial: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(trial);
        rng
    }
}

/// Probabilities for agent `k`: `(stay, [(j, p_j)])` with
/// `p_j = a_jk / (beta + d_k)` and `stay = beta / (beta + d_k)`.
pub fn selection_probabilities(g: &WeightedDigraph, k: usize, beta: f64) -> (f64, Vec<(usize, f64)>) {
    let total = beta + g.in_neighbors(k).iter().map(|&(_, a)| a).sum::<f64>();
    (
        beta / total,
        g.in_neighbors(k).iter().map(|&(j, a)| (j, a / total)).collect(),
    )
}

/// Maps a uniform draw `u in [0, 1)` to a selected neighbor, or `None` for
/// staying. Neighbors occupy consecutive sub-intervals in increasing index,
/// followed by the stay interval.
#[inline]
fn select(g: &WeightedDigraph, k: usize, beta: f64, u: f64) -> Option<usize> {
    let nbrs = g.in_neighbors(k);
    let total = beta + nbrs.iter().map(|&(_, a)| a).sum::<f64>();
    let x = u * total;
    let mut acc = 0.0;
    for &(j, a) in nbrs {
        acc += a;
        if x < acc {
            return Some(j);
        }
    }
    None
}

/// Positions the gossip dynamics can act on.
pub trait GossipState: Clone + Send + Sync {
    fn n(&self) -> usize;

    /// The state after every agent applied its choice, all choices reading
    /// the current positions.
    fn apply(&self, choices: &[Option<usize>], variant: Variant) -> Result<Self>;

    /// Number of distinct occupied positions.
    fn occupied(&self) -> usize;

    fn is_synchronized(&self, variant: Variant, tol: f64) -> bool;
}

/// Abstract positions: agent `k` sits on symbol `assignment[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SymbolState {
    pub assignment: Vec<usize>,
}

impl SymbolState {
    /// Every agent on its own symbol.
    pub fn distinct(n: usize) -> Self {
        Self {
            assignment: (0..n).collect(),
        }
    }

    /// The same state with symbol `s` renamed to `perm[s]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        Self {
            assignment: self.assignment.iter().map(|&s| perm[s]).collect(),
        }
    }
}

impl GossipState for SymbolState {
    fn n(&self) -> usize {
        self.assignment.len()
    }

    fn apply(&self, choices: &[Option<usize>], variant: Variant) -> Result<Self> {
        if variant != Variant::Jump {
            return Err(Error::invalid("symbol states support the jump variant only"));
        }
        Ok(Self {
            assignment: choices
                .iter()
                .enumerate()
                .map(|(k, c)| self.assignment[c.unwrap_or(k)])
                .collect(),
        })
    }

    fn occupied(&self) -> usize {
        let mut v = self.assignment.clone();
        v.sort_unstable();
        v.dedup();
        v.len()
    }

    fn is_synchronized(&self, _: Variant, _: f64) -> bool {
        self.assignment.windows(2).all(|w| w[0] == w[1])
    }
}

impl GossipState for CircleSwarm {
    fn n(&self) -> usize {
        CircleSwarm::n(self)
    }

    fn apply(&self, choices: &[Option<usize>], variant: Variant) -> Result<Self> {
        let th = self.angles();
        let next = choices
            .iter()
            .enumerate()
            .map(|(k, c)| match (c, variant) {
                (None, _) => th[k],
                (Some(j), Variant::Jump) => th[*j],
                (Some(j), Variant::Moderate { alpha }) => {
                    let p = alpha * Complex64::from_polar(1.0, th[k]) + Complex64::from_polar(1.0, th[*j]);
                    if p.norm() <= 1e-12 * (1.0 + alpha) {
                        th[k]
                    } else {
                        p.arg()
                    }
                }
            })
            .collect();
        CircleSwarm::new(next)
    }

    fn occupied(&self) -> usize {
        let mut v = self.angles().to_vec();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    }

    fn is_synchronized(&self, variant: Variant, tol: f64) -> bool {
        match variant {
            Variant::Jump => self.occupied() == 1,
            Variant::Moderate { .. } => self.spread() < tol,
        }
    }
}

/// One simultaneous gossip update under `g`.
pub fn gossip_step<S: GossipState, R: Rng>(s: &S, g: &WeightedDigraph, cfg: &GossipConfig, rng: &mut R) -> Result<S> {
    check_sizes(s.n(), g)?;
    let choices: Vec<Option<usize>> = (0..s.n()).map(|k| select(g, k, cfg.beta, rng.gen::<f64>())).collect();
    s.apply(&choices, cfg.variant)
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome<S> {
    /// Steps until synchronization, `None` on timeout.
    pub steps: Option<usize>,
    pub final_state: S,
    /// Steps whose resulting state occupied exactly two positions.
    pub two_position_steps: usize,
    /// Steps actually executed.
    pub executed: usize,
}

impl<S> RunOutcome<S> {
    /// More than half of the run was spent on exactly two positions.
    pub fn stalled(&self) -> bool {
        self.executed > 0 && 2 * self.two_position_steps > self.executed
    }
}

/// Runs trial `trial` of `cfg` from `s0` until synchronization or
/// `cfg.max_steps`.
pub fn run_until_sync<S: GossipState>(s0: &S, schedule: &GraphSequence, cfg: &GossipConfig, trial: u64) -> Result<RunOutcome<S>> {
    cfg.validate()?;
    if schedule.n() != s0.n() {
        return Err(Error::invalid(format!(
            "schedule has {} vertices but the swarm has {} agents",
            schedule.n(),
            s0.n()
        )));
    }
    let mut rng = cfg.trial_rng(trial);
    let mut s = s0.clone();
    let mut two = 0;
    for t in 0..cfg.max_steps {
        if s.is_synchronized(cfg.variant, cfg.sync_tol) {
            return Ok(RunOutcome {
                steps: Some(t),
                final_state: s,
                two_position_steps: two,
                executed: t,
            });
        }
        s = gossip_step(&s, schedule.graph_at_step(t), cfg, &mut rng)?;
        if s.occupied() == 2 {
            two += 1;
        }
    }
    let done = s.is_synchronized(cfg.variant, cfg.sync_tol);
    Ok(RunOutcome {
        steps: done.then_some(cfg.max_steps),
        final_state: s,
        two_position_steps: two,
        executed: cfg.max_steps,
    })
}
