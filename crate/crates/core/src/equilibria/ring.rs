use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use super::EquilibriumReport;
use crate::circle::{wrap_raw, CircleSwarm, CouplingProfile};
use crate::graph::{make_standard, StandardKind};
use crate::{Error, Result};

/// A uniformly spaced ring configuration `theta_k = k theta0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplayState {
    /// Winding index, `theta0 = 2 a pi / N`.
    pub a: usize,
    /// Spacing, wrapped to `(-pi, pi]`.
    pub theta0: f64,
    pub state: CircleSwarm,
    /// `|theta0| < pi/2`.
    pub stable: bool,
}

/// All splay states of the undirected ring on `n >= 2` vertices, including
/// synchronization (`a = 0`).
pub fn enumerate_ring_splay_states(n: usize) -> Result<Vec<SplayState>> {
    if n < 2 {
        return Err(Error::invalid("rings need n >= 2"));
    }
    (0..n)
        .map(|a| {
            let theta0 = wrap_raw(TAU * a as f64 / n as f64);
            Ok(SplayState {
                a,
                theta0,
                state: CircleSwarm::splay(n, theta0, 0.0)?,
                stable: theta0.abs() < FRAC_PI_2 - 1e-12,
            })
        })
        .collect()
}

/// Ring critical points whose consecutive gaps mix `phi` and `pi - phi`,
/// for `3 <= n <= 8`, classified numerically.
///
/// With `m` gaps equal to `pi - phi` the closing condition gives
/// `phi = (2a - m) pi / (n - 2m)`. Patterns with `n = 2m` form continuous
/// families and are skipped. Results are deduplicated up to rotation.
pub fn enumerate_ring_mixed_states(n: usize) -> Result<Vec<EquilibriumReport>> {
    if !(3..=8).contains(&n) {
        return Err(Error::invalid(format!("mixed ring states are enumerated for 3 <= n <= 8, got {n}")));
    }
    let g = make_standard(StandardKind::RingUndirected, n)?;
    let mut found: Vec<CircleSwarm> = Vec::new();
    for mask in 1u32..(1 << n) - 1 {
        let m = mask.count_ones() as i64;
        let denom = n as i64 - 2 * m;
        if denom == 0 {
            continue;
        }
        for a in 0..denom.abs() {
            let phi = (2 * a - m) as f64 * PI / denom as f64;
            let mut angles = Vec::with_capacity(n);
            let mut theta = 0.0;
            for k in 0..n {
                angles.push(theta);
                theta += if mask >> k & 1 == 1 { PI - phi } else { phi };
            }
            let s = CircleSwarm::new(angles)?;
            if !found.iter().any(|f| f.configuration_distance(&s) < 1e-9) {
                found.push(s);
            }
        }
    }
    found
        .into_iter()
        .map(|s| EquilibriumReport::at(s, &g, &CouplingProfile::Sine))
        .collect()
}
