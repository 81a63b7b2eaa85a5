use std::f64::consts::FRAC_PI_2;

use nalgebra::{Complex, DMatrix};

use crate::circle::{check_sizes, wrap_raw, CircleSwarm};
use crate::graph::{ConnectivityClass, WeightedDigraph};
use crate::{Error, Result};

/// A graph under which a given state is an equilibrium of the sine law.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizedState {
    pub graph: WeightedDigraph,
    /// Smallest positive weight of `graph`.
    pub delta: f64,
}

/// Builds weights making `s` an equilibrium of the continuous-time sine law.
///
/// Agent `k` listens to every agent within `pi/2` of it, with weight 1,
/// except that one neighbor on the side opposite to the net pull gets the
/// weight that cancels the tangential component of `sum_j a_jk e^{i theta_j}`.
pub fn stabilizing_weights(s: &CircleSwarm) -> Result<StabilizedState> {
    let n = s.n();
    if n < 5 {
        return Err(Error::precondition(None, format!("a spread equilibrium needs N >= 5 agents, got {n}")));
    }
    let th = s.angles();
    let mut edges = Vec::new();
    for k in 0..n {
        let near: Vec<(usize, f64)> = (0..n)
            .filter(|&j| j != k)
            .map(|j| (j, wrap_raw(th[j] - th[k])))
            .filter(|&(_, d)| d.abs() < FRAC_PI_2 && d != 0.0)
            .collect();
        let ahead = near.iter().filter(|(_, d)| *d > 0.0).max_by(|a, b| a.1.sin().total_cmp(&b.1.sin()));
        let behind = near.iter().filter(|(_, d)| *d < 0.0).max_by(|a, b| (-a.1).sin().total_cmp(&(-b.1).sin()));
        let (Some(&ahead), Some(&behind)) = (ahead, behind) else {
            return Err(Error::precondition(
                Some(k),
                format!("agent {k} needs another agent strictly within pi/2 on each side"),
            ));
        };
        let pull: f64 = near.iter().map(|&(_, d)| d.sin()).sum();
        let adjust = if pull > 0.0 { behind } else { ahead };
        for &(j, d) in &near {
            let w = if j == adjust.0 {
                1.0 + pull.abs() / d.sin().abs()
            } else {
                1.0
            };
            edges.push((j, k, w));
        }
    }
    let graph = WeightedDigraph::from_edges(n, &edges)?;
    if graph.classify_connectivity() != ConnectivityClass::StronglyConnected {
        return Err(Error::precondition(None, "the constructed graph is not strongly connected"));
    }
    let delta = graph.min_positive_weight().unwrap_or(0.0);
    Ok(StabilizedState { graph, delta })
}

/// Jacobian of the sine law at `s`: `J_kj = 2 alpha a_jk cos(theta_j - theta_k)`
/// for `j != k`, with rows summing to zero.
pub fn linearization(s: &CircleSwarm, g: &WeightedDigraph, alpha: f64) -> Result<DMatrix<f64>> {
    check_sizes(s.n(), g)?;
    let th = s.angles();
    let n = s.n();
    let mut j = DMatrix::zeros(n, n);
    for (src, k, a) in g.edges() {
        let c = 2.0 * alpha * a * (th[src] - th[k]).cos();
        j[(k, src)] += c;
        j[(k, k)] -= c;
    }
    Ok(j)
}

pub fn linearization_eigenvalues(s: &CircleSwarm, g: &WeightedDigraph, alpha: f64) -> Result<Vec<Complex<f64>>> {
    let j = linearization(s, g, alpha)?;
    Ok(j.complex_eigenvalues().iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{ct_rhs, CouplingProfile};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    fn check_equilibrium(s: &CircleSwarm) {
        let st = stabilizing_weights(s).unwrap();
        let v = ct_rhs(s, &st.graph, 1.0, &CouplingProfile::Sine).unwrap();
        assert!(v.iter().all(|x| x.abs() < 1e-10), "{v:?}");
        assert!(st.delta >= 1.0);
        let ev = linearization_eigenvalues(s, &st.graph, 1.0).unwrap();
        let scale = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let near_zero = ev.iter().filter(|z| z.norm() < 1e-8 * (1.0 + scale)).count();
        assert_eq!(near_zero, 1);
        assert!(ev.iter().all(|z| z.re < 1e-8 * (1.0 + scale)));
    }

    #[test]
    fn splay_five() {
        check_equilibrium(&CircleSwarm::splay(5, TAU / 5.0, 0.2).unwrap());
    }

    #[test]
    fn random_spread_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..50 {
            let gaps: Vec<f64> = (0..8).map(|_| rng.gen_range(0.7..1.3)).collect();
            let total: f64 = gaps.iter().sum();
            let mut theta = rng.gen_range(-3.0..3.0);
            let mut angles = Vec::new();
            for g in gaps {
                angles.push(theta);
                theta += g * TAU / total;
            }
            check_equilibrium(&CircleSwarm::new(angles).unwrap());
        }
    }

    #[test]
    fn preconditions() {
        let four = CircleSwarm::splay(4, TAU / 4.0, 0.0).unwrap();
        assert!(matches!(stabilizing_weights(&four), Err(Error::Precondition { vertex: None, .. })));
        let clumped = CircleSwarm::new(vec![0.0, 0.1, 0.2, 0.3, 3.0]).unwrap();
        assert!(matches!(stabilizing_weights(&clumped), Err(Error::Precondition { vertex: Some(_), .. })));
    }
}
