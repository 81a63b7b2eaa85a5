use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circle::check_sizes;
use crate::graph::WeightedDigraph;
use crate::{Error, Result};

/// Binary neurons `x_k in {-1, +1}` with firing thresholds `xi_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinState {
    spins: Vec<i8>,
    thresholds: Vec<f64>,
}

impl SpinState {
    pub fn new(spins: Vec<i8>, thresholds: Vec<f64>) -> Result<Self> {
        if spins.len() != thresholds.len() {
            return Err(Error::invalid("one threshold per spin is required"));
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::invalid("spins must be +1 or -1"));
        }
        Ok(Self { spins, thresholds })
    }

    /// Zero thresholds.
    pub fn unbiased(spins: Vec<i8>) -> Result<Self> {
        let n = spins.len();
        Self::new(spins, vec![0.0; n])
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn n(&self) -> usize {
        self.spins.len()
    }
}

/// `x_k <- sign(sum_j a_jk x_j + xi_k)` for `k` in `subset` (all when
/// `None`), reading time-`t` spins; a zero field keeps the current spin.
pub fn hopfield_step(s: &SpinState, g: &WeightedDigraph, subset: Option<&[usize]>) -> Result<SpinState> {
    check_sizes(s.n(), g)?;
    let mut update = vec![subset.is_none(); s.n()];
    for &k in subset.unwrap_or(&[]) {
        if k >= s.n() {
            return Err(Error::invalid(format!("vertex {k} out of range")));
        }
        update[k] = true;
    }
    let spins = (0..s.n())
        .map(|k| {
            if !update[k] {
                return s.spins[k];
            }
            let field: f64 = g.in_neighbors(k).iter().map(|&(j, a)| a * s.spins[j] as f64).sum::<f64>() + s.thresholds[k];
            if field > 0.0 {
                1
            } else if field < 0.0 {
                -1
            } else {
                s.spins[k]
            }
        })
        .collect();
    Ok(SpinState {
        spins,
        thresholds: s.thresholds.clone(),
    })
}

/// `V_H = -1/2 sum_k sum_j a_jk x_j x_k - sum_k x_k xi_k` on an undirected graph.
pub fn hopfield_energy(s: &SpinState, g: &WeightedDigraph) -> Result<f64> {
    check_sizes(s.n(), g)?;
    if !g.is_undirected() {
        return Err(Error::invalid("the Hopfield energy needs an undirected graph"));
    }
    let mut pair = 0.0;
    for (j, k, a) in g.edges() {
        pair += a * (s.spins[j] * s.spins[k]) as f64;
    }
    let bias: f64 = s.spins.iter().zip(&s.thresholds).map(|(&x, xi)| x as f64 * xi).sum();
    Ok(-0.5 * pair - bias)
}

/// `+1 -> 0`, `-1 -> pi`.
pub fn spin_to_angle(x: i8) -> f64 {
    if x > 0 {
        0.0
    } else {
        PI
    }
}

/// Sign of `cos(theta)`; angles on the imaginary axis map to `+1`.
pub fn angle_to_spin(theta: f64) -> i8 {
    if theta.cos() >= 0.0 {
        1
    } else {
        -1
    }
}
