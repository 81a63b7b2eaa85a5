use serde::{Deserialize, Serialize};

use super::WeightedDigraph;
use crate::{Error, Result};

/// Whether a schedule is indexed by integer steps or by continuous time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDomain {
    Discrete,
    Continuous,
}

/// A time-varying graph `G(t)` over a fixed vertex set.
///
/// Discrete schedules hold graph `i` during step `i`. Continuous schedules are
/// piecewise constant: graph `i` is active for `dwell[i]` time units. After
/// the last piece the schedule either wraps around (`periodic`) or keeps the
/// last graph forever.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSequence {
    graphs: Vec<WeightedDigraph>,
    dwell: Vec<f64>,
    starts: Vec<f64>,
    domain: TimeDomain,
    periodic: bool,
    delta: f64,
    upper: f64,
}

impl GraphSequence {
    /// A single graph held for all time. Usable in both time domains.
    pub fn constant(graph: WeightedDigraph) -> Self {
        Self::build(vec![graph], vec![1.0], TimeDomain::Discrete, true)
            .expect("a single graph is always a valid schedule")
    }

    pub fn discrete(graphs: Vec<WeightedDigraph>, periodic: bool) -> Result<Self> {
        let dwell = vec![1.0; graphs.len()];
        Self::build(graphs, dwell, TimeDomain::Discrete, periodic)
    }

    pub fn piecewise_constant(
        graphs: Vec<WeightedDigraph>,
        dwell: Vec<f64>,
        periodic: bool,
    ) -> Result<Self> {
        Self::build(graphs, dwell, TimeDomain::Continuous, periodic)
    }

    fn build(
        graphs: Vec<WeightedDigraph>,
        dwell: Vec<f64>,
        domain: TimeDomain,
        periodic: bool,
    ) -> Result<Self> {
        let first = graphs
            .first()
            .ok_or_else(|| Error::invalid("a graph sequence needs at least one graph"))?;
        let n = first.n();
        if graphs.iter().any(|g| g.n() != n) {
            return Err(Error::invalid("all graphs of a sequence must share n"));
        }
        if dwell.len() != graphs.len() {
            return Err(Error::invalid(format!(
                "{} dwell times for {} graphs",
                dwell.len(),
                graphs.len()
            )));
        }
        if dwell.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::invalid("dwell times must be positive"));
        }
        let mut starts = Vec::with_capacity(dwell.len());
        let mut acc = 0.0;
        for d in &dwell {
            starts.push(acc);
            acc += d;
        }
        let delta = graphs
            .iter()
            .filter_map(WeightedDigraph::min_positive_weight)
            .reduce(f64::min)
            .unwrap_or(1.0);
        let upper = graphs.iter().map(WeightedDigraph::max_weight).fold(delta, f64::max);
        Ok(Self {
            graphs,
            dwell,
            starts,
            domain,
            periodic,
            delta,
            upper,
        })
    }

    /// Declares an explicit weight threshold and bound; every positive weight
    /// must lie in `[delta, upper]`.
    pub fn with_bounds(mut self, delta: f64, upper: f64) -> Result<Self> {
        if !(delta > 0.0 && upper >= delta && upper.is_finite()) {
            return Err(Error::invalid(format!(
                "need 0 < delta <= upper, got delta={delta}, upper={upper}"
            )));
        }
        for (i, g) in self.graphs.iter().enumerate() {
            for (j, k, w) in g.edges() {
                if w < delta || w > upper {
                    return Err(Error::invalid(format!(
                        "graph {i}: weight of edge ({j},{k}) = {w} outside [{delta}, {upper}]"
                    )));
                }
            }
        }
        self.delta = delta;
        self.upper = upper;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.graphs[0].n()
    }

    pub fn graphs(&self) -> &[WeightedDigraph] {
        &self.graphs
    }

    pub fn dwell(&self) -> &[f64] {
        &self.dwell
    }

    pub fn domain(&self) -> TimeDomain {
        self.domain
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn upper_bound(&self) -> f64 {
        self.upper
    }

    /// A single graph for all times.
    pub fn is_fixed(&self) -> bool {
        self.graphs.len() == 1
    }

    /// Sum of dwell times of one pass through the schedule.
    pub fn period(&self) -> f64 {
        self.dwell.iter().sum()
    }

    /// Graph active during discrete step `t`.
    pub fn graph_at_step(&self, t: usize) -> &WeightedDigraph {
        let m = self.graphs.len();
        if self.periodic {
            &self.graphs[t % m]
        } else {
            &self.graphs[t.min(m - 1)]
        }
    }

    fn index_at_time(&self, t: f64) -> usize {
        let m = self.graphs.len();
        if m == 1 {
            return 0;
        }
        let period = self.period();
        let local = if self.periodic {
            t.rem_euclid(period)
        } else if t >= period {
            return m - 1;
        } else {
            t.max(0.0)
        };
        match self.starts.binary_search_by(|s| s.total_cmp(&local)) {
            Ok(i) => i,
            Err(i) => i - 1,
        }
    }

    /// Graph active at continuous time `t` (right-continuous at switches).
    pub fn graph_at_time(&self, t: f64) -> &WeightedDigraph {
        &self.graphs[self.index_at_time(t)]
    }

    /// Every member graph is balanced.
    pub fn is_balanced(&self) -> bool {
        self.graphs.iter().all(WeightedDigraph::is_balanced)
    }

    /// Uniform connectivity over `horizon`: some vertex roots the aggregate
    /// graph of every window `[t, t + horizon]`.
    ///
    /// Discrete schedules sum the graphs of steps `t..=t + horizon` (the
    /// horizon must be an integer). Continuous schedules integrate the weights
    /// over the window and drop aggregate weights below `delta`. Windows are
    /// examined over one period (periodic schedules) or up to the end of the
    /// stored schedule, after which the last graph holds.
    pub fn is_uniformly_connected(&self, horizon: f64) -> Result<bool> {
        if !(horizon.is_finite() && horizon > 0.0) {
            return Err(Error::invalid(format!("horizon must be positive, got {horizon}")));
        }
        match self.domain {
            TimeDomain::Discrete => {
                if horizon.fract() != 0.0 {
                    return Err(Error::invalid(format!(
                        "discrete horizon must be an integer, got {horizon}"
                    )));
                }
                let span = horizon as usize;
                let mut candidates = vec![true; self.n()];
                for t in 0..self.graphs.len() {
                    let mut agg = self.graph_at_step(t).clone();
                    for s in t + 1..=t + span {
                        agg = agg.add(self.graph_at_step(s))?;
                    }
                    intersect_roots(&mut candidates, &agg);
                }
                Ok(candidates.iter().any(|&c| c))
            }
            TimeDomain::Continuous => self.continuous_uniform_connectivity(horizon),
        }
    }

    /// Cumulative weight `int_0^x a_jk` for every pair.
    fn cumulative(&self, x: f64) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let period = self.period();
        let mut acc = nalgebra::DMatrix::zeros(n, n);
        let (whole, rem) = if self.periodic {
            let q = (x / period).floor();
            (q, x - q * period)
        } else if x >= period {
            let last = self.graphs.last().unwrap();
            let full = self.cumulative_partial(period);
            return full + last.weights() * (x - period);
        } else {
            (0.0, x)
        };
        if whole != 0.0 {
            acc += self.cumulative_partial(period) * whole;
        }
        acc + self.cumulative_partial(rem)
    }

    fn cumulative_partial(&self, x: f64) -> nalgebra::DMatrix<f64> {
        let n = self.n();
        let mut acc = nalgebra::DMatrix::zeros(n, n);
        for (g, (&start, &d)) in self.graphs.iter().zip(self.starts.iter().zip(&self.dwell)) {
            if x <= start {
                break;
            }
            acc += g.weights() * (x - start).min(d);
        }
        acc
    }

    fn continuous_uniform_connectivity(&self, horizon: f64) -> Result<bool> {
        let period = self.period();
        let end = period;
        // Breakpoints of the window integrals as functions of the window start.
        let mut points = vec![0.0, end];
        let reps = if self.periodic {
            (horizon / period).ceil() as i64 + 2
        } else {
            1
        };
        for r in -1..=reps {
            for &s in self.starts.iter().chain(std::iter::once(&period)) {
                let s = s + r as f64 * period;
                for cand in [s, s - horizon] {
                    if (0.0..=end).contains(&cand) {
                        points.push(cand);
                    }
                }
            }
        }
        points.sort_by(f64::total_cmp);
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let window = |t: f64| self.cumulative(t + horizon) - self.cumulative(t);
        // Inside each breakpoint interval every integral is affine, so its
        // threshold crossing can be located exactly.
        let mut eval_points = points.clone();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let (ia, ib) = (window(a), window(b));
            for (va, vb) in ia.iter().zip(ib.iter()) {
                let (da, db) = (va - self.delta, vb - self.delta);
                if da * db < 0.0 {
                    eval_points.push(a + (b - a) * da / (da - db));
                }
            }
        }
        eval_points.sort_by(f64::total_cmp);
        eval_points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let mids: Vec<f64> = eval_points.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        eval_points.extend(mids);

        let mut candidates = vec![true; self.n()];
        for t in eval_points {
            let mut agg = window(t);
            agg.iter_mut().for_each(|w| {
                if *w < self.delta {
                    *w = 0.0
                }
            });
            let g = WeightedDigraph::from_matrix(agg)?;
            intersect_roots(&mut candidates, &g);
            if !candidates.iter().any(|&c| c) {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

fn intersect_roots(candidates: &mut [bool], g: &WeightedDigraph) {
    for (r, c) in candidates.iter_mut().enumerate() {
        if *c && !g.reachable_from(r).iter().all(|&b| b) {
            *c = false;
        }
    }
}
