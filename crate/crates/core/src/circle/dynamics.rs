use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::angle::{wrap_raw, CircleSwarm};
use super::profile::CouplingProfile;
use super::trajectory::{Trajectory, TrajectoryMeta};
use crate::graph::{GraphSequence, WeightedDigraph};
use crate::ode::{Rk4, StepGrid};
use crate::{Error, Result};

pub(crate) fn check_sizes(n: usize, g: &WeightedDigraph) -> Result<()> {
    if g.n() != n {
        return Err(Error::invalid(format!(
            "graph has {} vertices but the swarm has {n} agents",
            g.n()
        )));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::invalid(format!("{name} must be positive, got {x}")));
    }
    Ok(())
}

/// Disagreement potential `1/2 sum_k sum_j a_jk (2 sin((theta_j - theta_k)/2))^2`.
pub fn v_circ(s: &CircleSwarm, g: &WeightedDigraph) -> f64 {
    potential_energy(s.angles(), g, &CouplingProfile::Sine)
}

/// `1/2 sum_k sum_j a_jk P(theta_j - theta_k)` for the profile's potential `P`.
pub fn potential_energy(angles: &[f64], g: &WeightedDigraph, profile: &CouplingProfile) -> f64 {
    let mut v = 0.0;
    for k in 0..g.n() {
        for &(j, a) in g.in_neighbors(k) {
            v += a * profile.potential(angles[j] - angles[k]);
        }
    }
    0.5 * v
}

/// Writes `alpha * sum_j a_jk force(theta_j - theta_k)` into `out`.
pub fn ct_rhs_into(angles: &[f64], g: &WeightedDigraph, alpha: f64, profile: &CouplingProfile, out: &mut [f64]) {
    for (k, o) in out.iter_mut().enumerate() {
        let tk = angles[k];
        let mut acc = 0.0;
        for &(j, a) in g.in_neighbors(k) {
            acc += a * profile.force(angles[j] - tk);
        }
        *o = alpha * acc;
    }
}

/// Continuous-time angular velocities.
pub fn ct_rhs(s: &CircleSwarm, g: &WeightedDigraph, alpha: f64, profile: &CouplingProfile) -> Result<Vec<f64>> {
    check_sizes(s.n(), g)?;
    check_positive("alpha", alpha)?;
    let mut out = vec![0.0; s.n()];
    ct_rhs_into(s.angles(), g, alpha, profile, &mut out);
    Ok(out)
}

/// The sine law written in the plane: `2 alpha Proj_{x_k}(sum_j a_jk (x_j - x_k))`
/// with `x_k = e^{i theta_k}`, returned as tangent vectors `[x, y]`.
pub fn ct_rhs_projection_form(s: &CircleSwarm, g: &WeightedDigraph, alpha: f64) -> Result<Vec<[f64; 2]>> {
    check_sizes(s.n(), g)?;
    check_positive("alpha", alpha)?;
    let x = s.phasors();
    Ok((0..s.n())
        .map(|k| {
            let r: Complex64 = g.in_neighbors(k).iter().map(|&(j, a)| a * (x[j] - x[k])).sum();
            let radial = x[k] * (x[k].re * r.re + x[k].im * r.im);
            let p = 2.0 * alpha * (r - radial);
            [p.re, p.im]
        })
        .collect())
}

fn updated_mask(n: usize, subset: Option<&[usize]>) -> Result<Vec<bool>> {
    match subset {
        None => Ok(vec![true; n]),
        Some(set) => {
            let mut mask = vec![false; n];
            for &k in set {
                if k >= n {
                    return Err(Error::invalid(format!("vertex {k} out of range for {n} agents")));
                }
                mask[k] = true;
            }
            Ok(mask)
        }
    }
}

/// A sum of unit phasors is treated as zero when it cancels to rounding
/// level relative to its total weight.
fn vanishes(p: Complex64, g: &WeightedDigraph, k: usize, beta: f64) -> bool {
    let total: f64 = beta + g.in_neighbors(k).iter().map(|&(_, a)| a).sum::<f64>();
    p.norm() <= ZERO_SUM_TOL * total
}

pub(crate) const ZERO_SUM_TOL: f64 = 1e-12;

/// Discrete-time update `theta_k <- arg(sum_j a_jk e^{i theta_j} + beta e^{i theta_k})`
/// for every `k` in `subset` (all agents when `None`), using time-`t`
/// positions throughout. A vanishing sum (relative size below `1e-12`) leaves `theta_k` unchanged.
pub fn dt_step(s: &CircleSwarm, g: &WeightedDigraph, beta: f64, subset: Option<&[usize]>) -> Result<CircleSwarm> {
    check_sizes(s.n(), g)?;
    check_positive("beta", beta)?;
    let mask = updated_mask(s.n(), subset)?;
    let x = s.phasors();
    let angles = (0..s.n())
        .map(|k| {
            // An agent without in-neighbors stays exactly where it is.
            if !mask[k] || g.in_neighbors(k).is_empty() {
                return s.angles()[k];
            }
            let p: Complex64 = g.in_neighbors(k).iter().map(|&(j, a)| a * x[j]).sum::<Complex64>() + beta * x[k];
            if vanishes(p, g, k, beta) {
                s.angles()[k]
            } else {
                p.arg()
            }
        })
        .collect();
    CircleSwarm::new(angles)
}

/// The same update written relative to the agent's own position:
/// `theta_k + arg(sum_j a_jk e^{i (theta_j - theta_k)} + beta)`.
pub fn dt_step_relative(s: &CircleSwarm, g: &WeightedDigraph, beta: f64, subset: Option<&[usize]>) -> Result<CircleSwarm> {
    check_sizes(s.n(), g)?;
    check_positive("beta", beta)?;
    let mask = updated_mask(s.n(), subset)?;
    let th = s.angles();
    let angles = (0..s.n())
        .map(|k| {
            if !mask[k] {
                return th[k];
            }
            let p: Complex64 = g
                .in_neighbors(k)
                .iter()
                .map(|&(j, a)| a * Complex64::from_polar(1.0, th[j] - th[k]))
                .sum::<Complex64>()
                + beta;
            if vanishes(p, g, k, beta) {
                th[k]
            } else {
                th[k] + p.arg()
            }
        })
        .collect();
    CircleSwarm::new(angles)
}

/// Step size, horizon and sampling stride for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrateSettings {
    pub h: f64,
    pub t_end: f64,
    /// Keep every `sample_every`-th step; the final state is always kept.
    pub sample_every: usize,
}

impl IntegrateSettings {
    pub fn new(h: f64, t_end: f64) -> Self {
        Self { h, t_end, sample_every: 1 }
    }

    pub fn sampled(mut self, every: usize) -> Self {
        self.sample_every = every.max(1);
        self
    }
}

/// Fixed-step RK4 on the continuous-time law.
///
/// The state is integrated as unwrapped real lifts; angles are wrapped only
/// when a sample is emitted.
pub fn integrate(
    s0: &CircleSwarm,
    schedule: &GraphSequence,
    alpha: f64,
    profile: &CouplingProfile,
    settings: IntegrateSettings,
) -> Result<Trajectory> {
    let (times, lifts) = integrate_lifts(s0.angles(), schedule, alpha, profile, settings)?;
    let states = lifts
        .into_iter()
        .map(|y| CircleSwarm::new(y.into_iter().map(wrap_raw).collect()))
        .collect::<Result<Vec<_>>>()?;
    let mut meta = TrajectoryMeta::new("circle_ct");
    meta.profile = Some(*profile);
    meta.params.insert("alpha".into(), alpha);
    meta.params.insert("h".into(), settings.h);
    meta.params.insert("t_end".into(), settings.t_end);
    Trajectory::new(times, states, meta)
}

/// Like [`integrate`] but returns the unwrapped lifts.
pub(crate) fn integrate_lifts(
    y0: &[f64],
    schedule: &GraphSequence,
    alpha: f64,
    profile: &CouplingProfile,
    settings: IntegrateSettings,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if schedule.n() != y0.len() {
        return Err(Error::invalid(format!(
            "schedule has {} vertices but the swarm has {} agents",
            schedule.n(),
            y0.len()
        )));
    }
    check_positive("alpha", alpha)?;
    let grid = StepGrid::new(settings.h, settings.t_end)?;
    let every = settings.sample_every.max(1);
    let mut y = y0.to_vec();
    let mut rk = Rk4::new(y.len());
    let mut field = |t: f64, x: &[f64], out: &mut [f64]| {
        ct_rhs_into(x, schedule.graph_at_time(t), alpha, profile, out)
    };
    let mut times = vec![0.0];
    let mut lifts = vec![y.clone()];
    for i in 0..grid.steps {
        rk.step(&mut field, grid.time(i), grid.step_len(i), &mut y);
        if (i + 1) % every == 0 || i + 1 == grid.steps {
            times.push(grid.time(i + 1));
            lifts.push(y.clone());
        }
    }
    Ok((times, lifts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{make_standard, StandardKind};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn random_swarm(rng: &mut ChaCha8Rng, n: usize) -> CircleSwarm {
        CircleSwarm::new((0..n).map(|_| rng.gen_range(-PI..PI)).collect()).unwrap()
    }

    fn random_undirected(rng: &mut ChaCha8Rng, n: usize) -> WeightedDigraph {
        let mut edges = Vec::new();
        for j in 0..n {
            for k in j + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push((j, k, rng.gen_range(0.2..2.0)));
                }
            }
        }
        WeightedDigraph::from_undirected_edges(n, &edges).unwrap()
    }

    #[test]
    fn v_circ_examples() {
        let k2 = make_standard(StandardKind::Complete, 2).unwrap();
        let s = CircleSwarm::new(vec![0.0, PI]).unwrap();
        assert!((v_circ(&s, &k2) - 4.0).abs() < 1e-12);
        assert_eq!(v_circ(&CircleSwarm::synchronized(3, 0.4).unwrap(), &k2_like(3)), 0.0);
    }

    fn k2_like(n: usize) -> WeightedDigraph {
        make_standard(StandardKind::Complete, n).unwrap()
    }

    #[test]
    fn v_circ_complete_graph_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in 1..8 {
            let g = k2_like(n);
            let s = random_swarm(&mut rng, n);
            let sum: Complex64 = s.phasors().iter().sum();
            let alt = (n * n) as f64 - sum.norm_sqr();
            assert!((v_circ(&s, &g) - alt).abs() < 1e-9);
        }
    }

    #[test]
    fn cyclic_pursuit_velocities() {
        for (n, v) in [(6usize, 3f64.sqrt()), (12, 1.0)] {
            let g = make_standard(StandardKind::RingDirected, n).unwrap();
            let s = CircleSwarm::splay(n, -TAU / n as f64, 0.0).unwrap();
            for w in ct_rhs(&s, &g, 1.0, &CouplingProfile::Sine).unwrap() {
                assert!((w - v).abs() < 1e-12, "n={n}: {w}");
            }
        }
    }

    #[test]
    fn synchronized_is_fixed() {
        let g = k2_like(4);
        let s = CircleSwarm::synchronized(4, 2.0).unwrap();
        assert!(ct_rhs(&s, &g, 1.0, &CouplingProfile::Sine).unwrap().iter().all(|&w| w == 0.0));
        assert_eq!(dt_step(&s, &g, 1.0, None).unwrap(), s);
        assert!(ct_rhs_projection_form(&s, &g, 1.0).unwrap().iter().all(|p| p[0].abs() < 1e-15 && p[1].abs() < 1e-15));
    }

    #[test]
    fn projection_form_matches_sine_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..50 {
            let n = rng.gen_range(2..8);
            let g = random_undirected(&mut rng, n);
            let s = random_swarm(&mut rng, n);
            let alpha = rng.gen_range(0.1..3.0);
            let v = ct_rhs(&s, &g, alpha, &CouplingProfile::Sine).unwrap();
            let p = ct_rhs_projection_form(&s, &g, alpha).unwrap();
            for k in 0..n {
                let tangent = [-s.angles()[k].sin(), s.angles()[k].cos()];
                let along = p[k][0] * tangent[0] + p[k][1] * tangent[1];
                assert!((along - v[k]).abs() < 1e-12);
                let radial = p[k][0] * tangent[1] - p[k][1] * tangent[0];
                assert!(radial.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn antipodal_pair_projection_vanishes() {
        let g = k2_like(2);
        let s = CircleSwarm::new(vec![0.3, 0.3 + PI]).unwrap();
        for p in ct_rhs_projection_form(&s, &g, 1.0).unwrap() {
            assert!(p[0].abs() < 1e-12 && p[1].abs() < 1e-12);
        }
    }

    #[test]
    fn symmetric_form_is_twice_directed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_undirected(&mut rng, 6);
        let s = random_swarm(&mut rng, 6);
        let v = ct_rhs(&s, &g, 1.0, &CouplingProfile::Sine).unwrap();
        for k in 0..6 {
            let sym: f64 = (0..6)
                .map(|j| (g.weight(j, k) + g.weight(k, j)) * (s.angles()[j] - s.angles()[k]).sin())
                .sum();
            assert!((v[k] - sym).abs() < 1e-12);
        }
    }

    #[test]
    fn figure_one_update() {
        let g = WeightedDigraph::from_edges(3, &[(0, 2, 1.0), (1, 2, 1.0)]).unwrap();
        let s = CircleSwarm::new(vec![0.2, 1.4, -2.5]).unwrap();
        let out = dt_step(&s, &g, 1.5, Some(&[2])).unwrap();
        let p = 1.5 * Complex64::from_polar(1.0, -2.5) + Complex64::from_polar(1.0, 0.2) + Complex64::from_polar(1.0, 1.4);
        assert!((out.angles()[2] - p.arg()).abs() < 1e-15);
        assert_eq!(&out.angles()[..2], &s.angles()[..2]);
    }

    #[test]
    fn zero_sum_keeps_angle() {
        let g = WeightedDigraph::from_edges(2, &[(0, 1, 1.0)]).unwrap();
        let s = CircleSwarm::new(vec![0.0, PI]).unwrap();
        assert_eq!(dt_step(&s, &g, 1.0, None).unwrap(), s);
    }

    #[test]
    fn large_beta_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let g = random_undirected(&mut rng, 5);
        let s = random_swarm(&mut rng, 5);
        let beta = 1e6;
        let out = dt_step(&s, &g, beta, None).unwrap();
        let v = ct_rhs(&s, &g, 0.5, &CouplingProfile::Sine).unwrap();
        for k in 0..5 {
            let predicted = s.angles()[k] + v[k] / beta;
            assert!(wrap_raw(out.angles()[k] - predicted).abs() < 1e-9);
        }
    }

    #[test]
    fn relative_form_agrees() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let g = random_undirected(&mut rng, 5);
            let s = random_swarm(&mut rng, 5);
            let beta = rng.gen_range(0.1..5.0);
            let a = dt_step(&s, &g, beta, None).unwrap();
            let b = dt_step_relative(&s, &g, beta, None).unwrap();
            assert!(a.distance_to(&b) < 1e-12);
        }
    }

    #[test]
    fn gradient_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let g = random_undirected(&mut rng, 5);
            let s = random_swarm(&mut rng, 5);
            let v = ct_rhs(&s, &g, 1.3, &CouplingProfile::Sine).unwrap();
            for k in 0..5 {
                let mut plus = s.angles().to_vec();
                let mut minus = plus.clone();
                plus[k] += 1e-5;
                minus[k] -= 1e-5;
                let fd = (potential_energy(&plus, &g, &CouplingProfile::Sine)
                    - potential_energy(&minus, &g, &CouplingProfile::Sine))
                    / 2e-5;
                assert!((v[k] + 1.3 * fd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn pursuit_is_a_rigid_rotation() {
        let g = make_standard(StandardKind::RingDirected, 6).unwrap();
        let s0 = CircleSwarm::splay(6, -TAU / 6.0, 0.1).unwrap();
        let t_end = 10.0;
        let traj = integrate(&s0, &GraphSequence::constant(g), 1.0, &CouplingProfile::Sine, IntegrateSettings::new(0.01, t_end)).unwrap();
        let expected = s0.rotated(3f64.sqrt() * t_end);
        assert!(traj.final_state().distance_to(&expected) < 1e-6);
    }

    #[test]
    fn rk4_error_ratio() {
        let g = make_standard(StandardKind::RingUndirected, 5).unwrap();
        let seq = GraphSequence::constant(g);
        let s0 = CircleSwarm::new(vec![0.0, 1.0, 2.5, -2.0, -0.7]).unwrap();
        let run = |h: f64| {
            let (_, lifts) = integrate_lifts(s0.angles(), &seq, 1.0, &CouplingProfile::Sine, IntegrateSettings::new(h, 2.0).sampled(1 << 20)).unwrap();
            lifts.last().unwrap().clone()
        };
        let reference = run(0.1 / 4.0 / 4.0);
        let err = |y: &[f64]| y.iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let ratio = err(&run(0.1)) / err(&run(0.05));
        assert!((ratio - 16.0).abs() < 0.3 * 16.0, "ratio {ratio}");
    }
}
