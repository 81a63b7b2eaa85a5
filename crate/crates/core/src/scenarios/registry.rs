use std::f64::consts::{PI, TAU};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::circle::{wrap_raw, CircleSwarm, CouplingProfile};
use crate::graph::{make_standard, GraphSequence, StandardKind, WeightedDigraph};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    SplayRing,
    CyclicPursuit,
    TwoRingPeriodic,
    QuasiperiodicThreeSets,
    DisorderlyAgent,
    DirectionReversal,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 6] = [
        ScenarioKind::SplayRing,
        ScenarioKind::CyclicPursuit,
        ScenarioKind::TwoRingPeriodic,
        ScenarioKind::QuasiperiodicThreeSets,
        ScenarioKind::DisorderlyAgent,
        ScenarioKind::DirectionReversal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::SplayRing => "splay_ring",
            ScenarioKind::CyclicPursuit => "cyclic_pursuit",
            ScenarioKind::TwoRingPeriodic => "two_ring_periodic",
            ScenarioKind::QuasiperiodicThreeSets => "quasiperiodic_three_sets",
            ScenarioKind::DisorderlyAgent => "disorderly_agent",
            ScenarioKind::DirectionReversal => "direction_reversal",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == name)
            .ok_or_else(|| Error::invalid(format!("unknown scenario `{name}`")))
    }
}

/// Default weight of the cross edges between the two rings. Unit weights
/// make the regular configuration unstable at rate about `sqrt(n1 n2)`.
pub const DEFAULT_CROSS_WEIGHT: f64 = 0.01;

/// Optional parameters; unset fields take per-scenario defaults.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioParams {
    /// Ring size (`splay_ring`, `cyclic_pursuit`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Winding index of a splay ring, spacing `2 a pi / n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<usize>,
    /// First and second ring sizes of `two_ring_periodic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n2: Option<usize>,
    /// Weight of every cross edge of `two_ring_periodic`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_weight: Option<f64>,
    /// Size of the static splay set of the three-set scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<usize>,
}

/// A ready-to-integrate setup.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub schedule: GraphSequence,
    pub initial: CircleSwarm,
    pub profile: CouplingProfile,
    pub alpha: f64,
    /// Horizon that shows the scenario's behavior.
    pub t_end: f64,
    /// Named agent groups (rings, sets, extra agents).
    pub groups: Vec<(String, Range<usize>)>,
}

impl Scenario {
    pub fn graph(&self) -> &WeightedDigraph {
        self.schedule.graph_at_time(0.0)
    }
}

/// Builder over a growing vertex set.
struct Layout {
    angles: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
    groups: Vec<(String, Range<usize>)>,
}

impl Layout {
    fn new() -> Self {
        Self {
            angles: Vec::new(),
            edges: Vec::new(),
            groups: Vec::new(),
        }
    }

    /// Adds a ring of `n` agents at `offset + k * spacing` with the edges of
    /// `kind`, returning its index range.
    fn ring(&mut self, name: &str, kind: StandardKind, n: usize, spacing: f64, offset: f64) -> Result<Range<usize>> {
        let base = self.angles.len();
        let g = make_standard(kind, n)?;
        self.angles.extend((0..n).map(|k| offset + k as f64 * spacing));
        self.edges.extend(g.edges().into_iter().map(|(j, k, w)| (base + j, base + k, w)));
        let range = base..base + n;
        self.groups.push((name.to_string(), range.clone()));
        Ok(range)
    }

    fn build(self, kind: ScenarioKind, alpha: f64, t_end: f64) -> Result<Scenario> {
        let n = self.angles.len();
        Ok(Scenario {
            kind,
            schedule: GraphSequence::constant(WeightedDigraph::from_edges(n, &self.edges)?),
            initial: CircleSwarm::new(self.angles)?,
            profile: CouplingProfile::Sine,
            alpha,
            t_end,
            groups: self.groups,
        })
    }
}

fn at_least(name: &str, v: usize, min: usize) -> Result<usize> {
    if v < min {
        return Err(Error::invalid(format!("{name} must be at least {min}, got {v}")));
    }
    Ok(v)
}

/// Pursuit ring: agent `k + 1` follows agent `k` from `2 pi / n` behind,
/// so every agent moves at `2 alpha sin(2 pi / n)`.
fn pursuit(layout: &mut Layout, name: &str, n: usize) -> Result<Range<usize>> {
    layout.ring(name, StandardKind::RingDirected, n, -TAU / n as f64, 0.0)
}

fn three_sets(layout: &mut Layout, x: usize) -> Result<[Range<usize>; 3]> {
    Ok([
        layout.ring("splay", StandardKind::RingUndirected, x, TAU / x as f64, 0.0)?,
        pursuit(layout, "pursuit_6", 6)?,
        pursuit(layout, "pursuit_12", 12)?,
    ])
}

/// Index in `set` of the agent whose offset from `from` is `target`.
fn by_offset(angles: &[f64], set: Range<usize>, from: usize, target: f64) -> Result<usize> {
    set.clone()
        .find(|&j| wrap_raw(angles[j] - angles[from] - target).abs() < 1e-9)
        .ok_or_else(|| Error::invalid(format!("no agent at offset {target} from agent {from}")))
}

pub fn make_scenario(kind: ScenarioKind, params: &ScenarioParams) -> Result<Scenario> {
    let mut layout = Layout::new();
    match kind {
        ScenarioKind::SplayRing => {
            let n = at_least("n", params.n.unwrap_or(5), 2)?;
            let a = params.a.unwrap_or(1);
            layout.ring("ring", StandardKind::RingUndirected, n, TAU * a as f64 / n as f64, 0.0)?;
            layout.build(kind, 1.0, 50.0)
        }
        ScenarioKind::CyclicPursuit => {
            let n = at_least("n", params.n.unwrap_or(6), 2)?;
            pursuit(&mut layout, "ring", n)?;
            layout.build(kind, 1.0, 20.0)
        }
        ScenarioKind::TwoRingPeriodic => {
            let n1 = at_least("n1", params.n1.unwrap_or(6), 3)?;
            let n2 = at_least("n2", params.n2.unwrap_or(12), 3)?;
            if n1 == n2 {
                return Err(Error::invalid("the two rings must differ in size"));
            }
            let w = params.cross_weight.unwrap_or(DEFAULT_CROSS_WEIGHT);
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::invalid(format!("cross_weight must be positive, got {w}")));
            }
            let a = pursuit(&mut layout, "ring_1", n1)?;
            let b = layout.ring("ring_2", StandardKind::RingDirected, n2, -TAU / n2 as f64, 0.0)?;
            for j in a.clone() {
                for k in b.clone() {
                    layout.edges.extend([(j, k, w), (k, j, w)]);
                }
            }
            let v1 = 2.0 * (TAU / n1 as f64).sin();
            let v2 = 2.0 * (TAU / n2 as f64).sin();
            layout.build(kind, 1.0, 3.0 * TAU / (v1 - v2).abs())
        }
        ScenarioKind::QuasiperiodicThreeSets => {
            let x = at_least("x", params.x.unwrap_or(5), 5)?;
            three_sets(&mut layout, x)?;
            layout.build(kind, 1.0, 500.0)
        }
        ScenarioKind::DisorderlyAgent => {
            let x = at_least("x", params.x.unwrap_or(5), 5)?;
            let sets = three_sets(&mut layout, x)?;
            let extra = layout.angles.len();
            layout.angles.push(PI / 3.0);
            for set in &sets {
                layout.edges.push((set.start, extra, 0.5));
            }
            layout.groups.push(("driven".into(), extra..extra + 1));
            layout.build(kind, 1.0, 200.0)
        }
        ScenarioKind::DirectionReversal => {
            let spacing = TAU / 9.0;
            let a = layout.ring("set_a", StandardKind::Path, 9, spacing, 0.0)?;
            let b = layout.ring("set_b", StandardKind::Path, 9, spacing, -PI / 18.0)?;
            layout.edges.clear();
            let angles = layout.angles.clone();
            for k in a.clone() {
                layout.edges.push((by_offset(&angles, a.clone(), k, -spacing)?, k, 0.04));
                layout.edges.push((by_offset(&angles, b.clone(), k, 7.0 * PI / 18.0)?, k, 0.05));
            }
            for k in b.clone() {
                layout.edges.push((by_offset(&angles, b.clone(), k, spacing)?, k, 0.07));
                layout.edges.push((by_offset(&angles, a.clone(), k, 5.0 * PI / 18.0)?, k, 0.05));
            }
            layout.build(kind, 0.5, 300.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::ct_rhs;

    #[test]
    fn names_round_trip() {
        for k in ScenarioKind::ALL {
            assert_eq!(ScenarioKind::from_name(k.name()).unwrap(), k);
            let json = serde_json::to_string(&k).unwrap();
            assert_eq!(json, format!("\"{}\"", k.name()));
        }
        assert!(ScenarioKind::from_name("nope").is_err());
    }

    fn velocities(s: &Scenario) -> Vec<f64> {
        ct_rhs(&s.initial, s.graph(), s.alpha, &s.profile).unwrap()
    }

    #[test]
    fn pursuit_velocity() {
        let s = make_scenario(ScenarioKind::CyclicPursuit, &ScenarioParams::default()).unwrap();
        assert!(velocities(&s).iter().all(|v| (v - 3f64.sqrt()).abs() < 1e-12));
        let s = make_scenario(ScenarioKind::CyclicPursuit, &ScenarioParams { n: Some(12), ..Default::default() }).unwrap();
        assert!(velocities(&s).iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn cross_coupling_is_invisible() {
        let s = make_scenario(ScenarioKind::TwoRingPeriodic, &ScenarioParams::default()).unwrap();
        let v = velocities(&s);
        assert!(v[..6].iter().all(|x| (x - 3f64.sqrt()).abs() < 1e-12));
        assert!(v[6..].iter().all(|x| (x - 1.0).abs() < 1e-12));
    }

    #[test]
    fn three_set_velocities() {
        let s = make_scenario(ScenarioKind::DisorderlyAgent, &ScenarioParams::default()).unwrap();
        assert_eq!(s.initial.n(), 5 + 6 + 12 + 1);
        let v = velocities(&s);
        assert!(v[..5].iter().all(|x| x.abs() < 1e-12));
        assert!(v[5..11].iter().all(|x| (x - 3f64.sqrt()).abs() < 1e-12));
        assert!(v[11..23].iter().all(|x| (x - 1.0).abs() < 1e-12));
        let th = s.initial.angles();
        let expected: f64 = [0, 5, 11].iter().map(|&j| (th[j] - th[23]).sin()).sum();
        assert!((v[23] - expected).abs() < 1e-12);
    }

    #[test]
    fn reversal_wiring_matches_offsets() {
        let s = make_scenario(ScenarioKind::DirectionReversal, &ScenarioParams::default()).unwrap();
        let g = s.graph();
        assert_eq!(g.edge_count(), 36);
        let th = s.initial.angles();
        for k in 0..9 {
            let v: f64 = g.in_neighbors(k).iter().map(|&(j, a)| a * (th[j] - th[k]).sin()).sum();
            let want = 0.04 * (-TAU / 9.0).sin() + 0.05 * (7.0 * PI / 18.0).sin();
            assert!((v - want).abs() < 1e-12);
        }
        let v = velocities(&s);
        for k in 9..18 {
            let want = 0.07 * (TAU / 9.0).sin() + 0.05 * (5.0 * PI / 18.0).sin();
            assert!((v[k] - want).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_params() {
        assert!(make_scenario(ScenarioKind::TwoRingPeriodic, &ScenarioParams { n1: Some(6), n2: Some(6), ..Default::default() }).is_err());
        assert!(make_scenario(ScenarioKind::TwoRingPeriodic, &ScenarioParams { cross_weight: Some(0.0), ..Default::default() }).is_err());
        assert!(make_scenario(ScenarioKind::QuasiperiodicThreeSets, &ScenarioParams { x: Some(3), ..Default::default() }).is_err());
        assert!(make_scenario(ScenarioKind::CyclicPursuit, &ScenarioParams { n: Some(1), ..Default::default() }).is_err());
    }
}
