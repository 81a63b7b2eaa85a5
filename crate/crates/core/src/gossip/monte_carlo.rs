use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_until_sync, GossipConfig, GossipState};
use crate::graph::GraphSequence;
use crate::stats::mean_stderr;
use crate::{Error, Result};

const MAX_BINS: usize = 32;

/// Half-open bin `[lo, hi)` of step counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: usize,
    pub hi: usize,
    pub count: usize,
}

/// Statistics of many independent runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloReport {
    pub trials: usize,
    pub synchronized: usize,
    pub timeouts: usize,
    /// Mean steps over synchronized trials.
    pub mean: f64,
    pub stderr: f64,
    pub histogram: Vec<HistogramBin>,
    /// Fraction of trials that spent more than half their steps on exactly
    /// two occupied positions.
    pub stall_fraction: f64,
    /// Per-trial step counts in trial order, `None` on timeout.
    #[serde(skip)]
    pub steps: Vec<Option<usize>>,
}

impl MonteCarloReport {
    pub fn sync_fraction(&self) -> f64 {
        self.synchronized as f64 / self.trials as f64
    }

    /// CSV `trial,steps`; timeouts are written as `timeout`.
    pub fn write_trials_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "trial,steps")?;
        for (i, s) in self.steps.iter().enumerate() {
            match s {
                Some(s) => writeln!(w, "{i},{s}")?,
                None => writeln!(w, "{i},timeout")?,
            }
        }
        Ok(())
    }
}

fn histogram(values: &[usize]) -> Vec<HistogramBin> {
    let Some(&max) = values.iter().max() else {
        return Vec::new();
    };
    let bins = MAX_BINS.min(max + 1);
    let width = (max + 1).div_ceil(bins);
    let mut out: Vec<HistogramBin> = (0..bins)
        .map(|b| HistogramBin {
            lo: b * width,
            hi: (b + 1) * width,
            count: 0,
        })
        .collect();
    for &v in values {
        out[v / width].count += 1;
    }
    out
}

/// Runs trials `0..trials` from `s0`, in parallel, merging by trial index.
pub fn monte_carlo_sync_time<S: GossipState>(
    s0: &S,
    schedule: &GraphSequence,
    cfg: &GossipConfig,
    trials: usize,
) -> Result<MonteCarloReport> {
    if trials == 0 {
        return Err(Error::invalid("at least one trial is required"));
    }
    let outcomes: Vec<(Option<usize>, bool)> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_until_sync(s0, schedule, cfg, i).map(|o| (o.steps, o.stalled())))
        .collect::<Result<_>>()?;
    let steps: Vec<Option<usize>> = outcomes.iter().map(|o| o.0).collect();
    let done: Vec<usize> = steps.iter().flatten().copied().collect();
    let as_f64: Vec<f64> = done.iter().map(|&s| s as f64).collect();
    let (mean, stderr) = if as_f64.is_empty() {
        (f64::NAN, f64::NAN)
    } else {
        mean_stderr(&as_f64)
    };
    let stalls = outcomes.iter().filter(|o| o.1).count();
    Ok(MonteCarloReport {
        trials,
        synchronized: done.len(),
        timeouts: trials - done.len(),
        mean,
        stderr,
        histogram: histogram(&done),
        stall_fraction: stalls as f64 / trials as f64,
        steps,
    })
}
