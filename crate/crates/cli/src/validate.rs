//! Static checks of a configuration before anything is simulated.

use std::fmt;

use circsync::equilibria::beta_bound;
use circsync::gossip::{Variant, MAX_CHAIN_STATES};
use circsync::scenarios::make_scenario;

use crate::config::{Command, InitialSpec, Model, RunConfig, TimeMode};
use crate::run;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{tag}: {}", self.message)
    }
}

#[derive(Default)]
struct Report(Vec<Diagnostic>);

impl Report {
    fn error(&mut self, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Error,
            message: message.into(),
        });
    }

    fn warn(&mut self, message: impl Into<String>) {
        self.0.push(Diagnostic {
            severity: Severity::Warning,
            message: message.into(),
        });
    }

    fn positive(&mut self, name: &str, x: f64) {
        if !(x.is_finite() && x > 0.0) {
            self.error(format!("`{name}` must be positive, got {x}"));
        }
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(|d| d.severity == Severity::Error)
}

fn draws_random_numbers(cfg: &RunConfig, command: Command) -> bool {
    let uniform = cfg.initial == Some(InitialSpec::Uniform);
    match command {
        Command::Gossip | Command::Equilibria => true,
        Command::Scenario => false,
        Command::Vicsek => cfg.vicsek.perturbation > 0.0,
        Command::Simulate | Command::Aux => uniform,
    }
}

/// Diagnostics of a resolved configuration.
pub fn validate(cfg: &RunConfig) -> Vec<Diagnostic> {
    let mut r = Report::default();
    let command = cfg.command.unwrap_or(Command::Simulate);

    if draws_random_numbers(cfg, command) && cfg.seed.is_none() {
        r.error(format!("`{}` draws random numbers and needs `seed`", command.name()));
    }
    r.positive("alpha", cfg.alpha);
    r.positive("beta", cfg.beta);
    r.positive("h", cfg.h);
    r.positive("sync_tol", cfg.sync_tol);
    if let Some(t) = cfg.t_end {
        r.positive("t_end", t);
    }
    if cfg.sample_every == 0 {
        r.error("`sample_every` must be at least 1");
    }
    if cfg.n == Some(0) {
        r.error("`n` must be at least 1");
    }

    match command {
        Command::Scenario => scenario_checks(cfg, &mut r),
        Command::Vicsek => {
            r.positive("vicsek.sensing_radius", cfg.vicsek.sensing_radius);
            if !(cfg.vicsek.perturbation >= 0.0 && cfg.vicsek.perturbation < 1.0) {
                r.error(format!("`vicsek.perturbation` must lie in [0, 1), got {}", cfg.vicsek.perturbation));
            }
            if cfg.graph.is_some() || cfg.schedule.is_some() {
                r.warn("vicsek builds its own proximity graphs; `graph` and `schedule` are ignored");
            }
            if let Err(e) = run::vicsek_setup(&RunConfig { seed: cfg.seed.or(Some(0)), ..cfg.clone() }) {
                r.error(e.to_string());
            }
        }
        _ => graph_checks(cfg, command, &mut r),
    }
    r.0
}

fn scenario_checks(cfg: &RunConfig, r: &mut Report) {
    match cfg.scenario.name {
        None => r.error("the scenario command needs a scenario name"),
        Some(kind) => {
            if let Err(e) = make_scenario(kind, &cfg.scenario.params) {
                r.error(e.to_string());
            }
        }
    }
    for (set, name) in [
        (cfg.graph.is_some(), "graph"),
        (cfg.schedule.is_some(), "schedule"),
        (cfg.initial.is_some(), "initial"),
    ] {
        if set {
            r.warn(format!("scenarios define their own `{name}`; the configured one is ignored"));
        }
    }
}

fn graph_checks(cfg: &RunConfig, command: Command, r: &mut Report) {
    let seq = match run::build_schedule(cfg) {
        Ok(seq) => seq,
        Err(e) => {
            r.error(e.to_string());
            return;
        }
    };
    let n = seq.n();
    let with_seed = RunConfig {
        seed: cfg.seed.or(Some(0)),
        ..cfg.clone()
    };
    let vector = command == Command::Simulate && cfg.model == Model::Vector;
    let init = if vector {
        run::initial_points(&with_seed).map(|_| ())
    } else {
        run::initial_angles(&with_seed).map(|_| ())
    };
    if let Err(e) = init {
        r.error(e.to_string());
    }
    if !vector && matches!(command, Command::Simulate | Command::Equilibria) && cfg.time == TimeMode::Continuous {
        if let Err(e) = run::profile(cfg, n) {
            r.error(e.to_string());
        }
    }
    let sets = match run::update_schedule(cfg, &seq) {
        Ok(s) => s,
        Err(e) => {
            r.error(e.to_string());
            None
        }
    };
    if sets.is_some() && !(command == Command::Simulate && cfg.time == TimeMode::Discrete && !vector) {
        r.warn("`update_sets` only affect discrete-time circle simulations");
    }

    match command {
        Command::Simulate if vector => {
            if !(cfg.b > 0.0 && cfg.b < 1.0) {
                r.error(format!("`b` must lie in (0, 1), got {}", cfg.b));
            }
            if cfg.time == TimeMode::Discrete {
                for (i, g) in seq.graphs().iter().enumerate() {
                    for (k, d) in g.in_degrees().into_iter().enumerate() {
                        let load = cfg.alpha * d;
                        if load > cfg.b {
                            r.error(format!(
                                "graph {}: alpha * in-degree of vertex {} is {load} > b = {}; \
                                 the update is not a convex combination",
                                i + 1,
                                k + 1,
                                cfg.b
                            ));
                        }
                    }
                }
            }
        }
        Command::Simulate if cfg.time == TimeMode::Discrete && sets.is_none() => {
            for (i, g) in seq.graphs().iter().enumerate() {
                if !(g.is_undirected() && g.is_unweighted()) {
                    continue;
                }
                if let Ok(bound) = beta_bound(g) {
                    if cfg.beta < bound {
                        r.warn(format!(
                            "graph {}: beta = {} is below the synchronous descent bound {bound:.4}; \
                             synchronous updates may fail to decrease the disagreement",
                            i + 1,
                            cfg.beta
                        ));
                    }
                }
            }
        }
        Command::Equilibria => {
            if !seq.is_fixed() || !seq.graphs()[0].is_undirected() {
                r.error("equilibria need a single undirected graph");
            }
            if cfg.equilibria.seeds == 0 {
                r.warn("`equilibria.seeds` = 0: no critical point search");
            }
        }
        Command::Gossip => {
            if cfg.gossip.trials == 0 {
                r.error("`gossip.trials` must be at least 1");
            }
            if let Variant::Moderate { alpha } = cfg.gossip.variant {
                r.positive("gossip.variant.alpha", alpha);
            }
            if cfg.gossip.exact {
                let symbols = cfg.gossip.n_symbols.unwrap_or(n);
                if !seq.is_fixed() {
                    r.error("the exact chain needs a single graph");
                }
                if cfg.gossip.variant != Variant::Jump {
                    r.error("the exact chain models the jump variant only");
                }
                let states = (symbols as f64).powi(n as i32);
                if symbols == 0 || states > MAX_CHAIN_STATES as f64 {
                    r.error(format!(
                        "the exact chain would have {symbols}^{n} states (limit {MAX_CHAIN_STATES})"
                    ));
                }
            }
        }
        Command::Aux => {
            if cfg.time == TimeMode::Discrete {
                r.warn("aux runs in continuous time; `time` is ignored");
            }
            if let Some(g) = cfg.aux.gain {
                r.positive("aux.gain", g);
            }
        }
        _ => {}
    }
}
