use std::collections::{HashMap, VecDeque};

use nalgebra::{DMatrix, DVector};

use super::{selection_probabilities, GossipConfig, Variant};
use crate::graph::WeightedDigraph;
use crate::{Error, Result};

/// Largest state space `n_symbols^N` the exact computation accepts.
pub const MAX_CHAIN_STATES: usize = 1_000_000;

const DENSE_LIMIT: usize = 2000;

/// The jump variant on a fixed graph as a Markov chain over assignments
/// `vertex -> symbol` reachable from the start assignment.
#[derive(Debug, Clone)]
pub struct AbsorbingChain {
    /// `states[0]` is the start assignment.
    pub states: Vec<Vec<usize>>,
    /// Sparse rows `(target, probability)`.
    pub transitions: Vec<Vec<(usize, f64)>>,
    /// Single-symbol assignments.
    pub absorbing: Vec<bool>,
}

impl AbsorbingChain {
    /// Builds the chain from agent `k` on symbol `k mod n_symbols`.
    pub fn build(g: &WeightedDigraph, beta: f64, n_symbols: usize) -> Result<Self> {
        let n = g.n();
        if n_symbols == 0 || n_symbols > n {
            return Err(Error::invalid(format!("n_symbols must lie in 1..={n}, got {n_symbols}")));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(format!("beta must be positive, got {beta}")));
        }
        let capacity = (n_symbols as f64).powi(n as i32);
        if capacity > MAX_CHAIN_STATES as f64 {
            return Err(Error::Capacity(format!(
                "{n_symbols}^{n} assignments exceed {MAX_CHAIN_STATES}; use Monte Carlo instead"
            )));
        }
        let probs: Vec<(f64, Vec<(usize, f64)>)> = (0..n).map(|k| selection_probabilities(g, k, beta)).collect();
        let start: Vec<usize> = (0..n).map(|k| k % n_symbols).collect();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut states = vec![start.clone()];
        index.insert(start, 0);
        let mut transitions = Vec::new();
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let s = states[i].clone();
            let row = successors(&s, &probs);
            let mut out = Vec::with_capacity(row.len());
            for (next, p) in row {
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = states.len();
                        index.insert(next.clone(), j);
                        states.push(next);
                        queue.push_back(j);
                        j
                    }
                };
                out.push((j, p));
            }
            out.sort_by_key(|e| e.0);
            if transitions.len() <= i {
                transitions.resize(i + 1, Vec::new());
            }
            transitions[i] = out;
        }
        transitions.resize(states.len(), Vec::new());
        let absorbing = states.iter().map(|s| s.windows(2).all(|w| w[0] == w[1])).collect();
        Ok(Self {
            states,
            transitions,
            absorbing,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Largest deviation of a row sum from 1.
    pub fn max_row_error(&self) -> f64 {
        self.transitions
            .iter()
            .map(|r| (r.iter().map(|e| e.1).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Expected number of steps until absorption from the start state,
    /// solving `(I - Q) t = 1` on the transient states.
    pub fn expected_absorption_time(&self) -> Result<f64> {
        if self.absorbing[0] {
            return Ok(0.0);
        }
        let transient: Vec<usize> = (0..self.len()).filter(|&i| !self.absorbing[i]).collect();
        let mut pos = vec![usize::MAX; self.len()];
        for (p, &i) in transient.iter().enumerate() {
            pos[i] = p;
        }
        self.check_absorption_certain()?;
        let m = transient.len();
        let t = if m <= DENSE_LIMIT {
            let mut a = DMatrix::<f64>::identity(m, m);
            for (p, &i) in transient.iter().enumerate() {
                for &(j, w) in &self.transitions[i] {
                    if !self.absorbing[j] {
                        a[(p, pos[j])] -= w;
                    }
                }
            }
            let sol = a
                .lu()
                .solve(&DVector::from_element(m, 1.0))
                .ok_or_else(|| Error::precondition(None, "the absorption system is singular"))?;
            sol.iter().copied().collect::<Vec<_>>()
        } else {
            self.gauss_seidel(&transient, &pos)
        };
        Ok(t[pos[0]])
    }

    fn gauss_seidel(&self, transient: &[usize], pos: &[usize]) -> Vec<f64> {
        let mut t = vec![0.0; transient.len()];
        for _ in 0..1_000_000 {
            let mut change = 0.0f64;
            for (p, &i) in transient.iter().enumerate() {
                let mut self_w = 0.0;
                let mut acc = 1.0;
                for &(j, w) in &self.transitions[i] {
                    if j == i {
                        self_w += w;
                    } else if !self.absorbing[j] {
                        acc += w * t[pos[j]];
                    }
                }
                let next = acc / (1.0 - self_w);
                change = change.max((next - t[p]).abs() / next.max(1.0));
                t[p] = next;
            }
            if change < 1e-14 {
                break;
            }
        }
        t
    }

    /// Every reachable transient state must be able to reach absorption.
    fn check_absorption_certain(&self) -> Result<()> {
        let mut reverse = vec![Vec::new(); self.len()];
        for (i, row) in self.transitions.iter().enumerate() {
            for &(j, _) in row {
                reverse[j].push(i);
            }
        }
        let mut ok = self.absorbing.clone();
        let mut queue: VecDeque<usize> = (0..self.len()).filter(|&i| ok[i]).collect();
        while let Some(j) = queue.pop_front() {
            for &i in &reverse[j] {
                if !ok[i] {
                    ok[i] = true;
                    queue.push_back(i);
                }
            }
        }
        if ok.iter().all(|&x| x) {
            Ok(())
        } else {
            Err(Error::precondition(
                None,
                "synchronization is not reached with probability 1 on this graph",
            ))
        }
    }
}

/// Distribution of the next assignment, merged by outcome.
fn successors(s: &[usize], probs: &[(f64, Vec<(usize, f64)>)]) -> Vec<(Vec<usize>, f64)> {
    let per_agent: Vec<Vec<(usize, f64)>> = probs
        .iter()
        .enumerate()
        .map(|(k, (stay, nbrs))| {
            let mut d: Vec<(usize, f64)> = vec![(s[k], *stay)];
            for &(j, p) in nbrs {
                match d.iter_mut().find(|e| e.0 == s[j]) {
                    Some(e) => e.1 += p,
                    None => d.push((s[j], p)),
                }
            }
            d
        })
        .collect();
    let mut out: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut current = vec![0usize; s.len()];
    fn walk(k: usize, p: f64, per_agent: &[Vec<(usize, f64)>], current: &mut Vec<usize>, out: &mut HashMap<Vec<usize>, f64>) {
        if k == per_agent.len() {
            *out.entry(current.clone()).or_insert(0.0) += p;
            return;
        }
        for &(sym, q) in &per_agent[k] {
            current[k] = sym;
            walk(k + 1, p * q, per_agent, current, out);
        }
    }
    walk(0, 1.0, &per_agent, &mut current, &mut out);
    let mut v: Vec<_> = out.into_iter().collect();
    v.sort_by(|a, b| a.0.cmp(&b.0));
    v
}

/// Expected synchronization time of the jump variant on a fixed graph,
/// starting from `n_symbols` distinct positions (agent `k` on symbol
/// `k mod n_symbols`).
pub fn expected_sync_time(g: &WeightedDigraph, cfg: &GossipConfig, n_symbols: usize) -> Result<f64> {
    cfg.validate()?;
    if cfg.variant != Variant::Jump {
        return Err(Error::invalid("the exact expected time is available for the jump variant only"));
    }
    if g.n() == 1 {
        return Ok(0.0);
    }
    AbsorbingChain::build(g, cfg.beta, n_symbols)?.expected_absorption_time()
}
