//! Builds the objects a configuration describes and runs its command.

use std::f64::consts::{PI, TAU};

use circsync::aux_consensus::{simulate_aux, AugmentedState};
use circsync::circle::{
    dt_step, integrate, make_profile, order_parameter, CircleSwarm, CouplingProfile, IntegrateSettings, Trajectory,
    TrajectoryMeta,
};
use circsync::equilibria::{beta_bound, critical_point_search, enumerate_ring_splay_states, UpdateSchedule};
use circsync::gossip::{expected_sync_time, monte_carlo_sync_time, GossipConfig};
use circsync::graph::io::{GraphLiteral, LiteralKind};
use circsync::graph::{GraphSequence, WeightedDigraph};
use circsync::scenarios::{default_ring_radius, make_scenario, run_divergence, vicsek_divergence_setup, vicsek_step, VicsekState};
use circsync::vector_consensus::{simulate, ConsensusParams, Integration, VectorSwarm};
use circsync::fmt_f64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{Command, InitialSpec, Model, RunConfig, TimeMode, DEFAULT_T_END};
use crate::error::CliError;

/// A file produced by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Output {
    fn csv(name: &str, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Self {
        let mut bytes = Vec::new();
        write(&mut bytes).expect("writing to memory cannot fail");
        Self {
            name: name.into(),
            bytes,
        }
    }

    fn json(name: &str, value: &Value) -> Self {
        let mut bytes = serde_json::to_vec_pretty(value).expect("JSON values serialize");
        bytes.push(b'\n');
        Self {
            name: name.into(),
            bytes,
        }
    }
}

/// Files of a finished run, and the error to report once they are written.
#[derive(Debug)]
pub struct RunResult {
    pub outputs: Vec<Output>,
    pub failure: Option<CliError>,
}

impl From<Vec<Output>> for RunResult {
    fn from(outputs: Vec<Output>) -> Self {
        Self { outputs, failure: None }
    }
}

/// Stream of the generator used for the initial state; other random inputs
/// take later streams so that they do not shift it.
const INITIAL_STREAM: u64 = 0;
const SEARCH_STREAM: u64 = 1;
const PERTURBATION_STREAM: u64 = 2;

pub fn rng(cfg: &RunConfig, stream: u64) -> Result<ChaCha8Rng, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("this run draws random numbers and needs `seed`".into()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    Ok(rng)
}

fn config_err(e: circsync::Error) -> CliError {
    CliError::Config(e.to_string())
}

/// The graph schedule of a non-scenario run.
pub fn build_schedule(cfg: &RunConfig) -> Result<GraphSequence, CliError> {
    let command = cfg.command.unwrap_or(Command::Simulate);
    let n = cfg.agent_count();
    let stepped = command == Command::Gossip || cfg.time == TimeMode::Discrete;
    let seq = match (&cfg.graph, &cfg.schedule) {
        (Some(_), Some(_)) => return Err(CliError::Config("give either `graph` or `schedule`, not both".into())),
        (Some(lit), None) => GraphSequence::constant(lit.build().map_err(config_err)?),
        (None, Some(spec)) => {
            let graphs = spec
                .graphs
                .iter()
                .map(GraphLiteral::build)
                .collect::<Result<Vec<_>, _>>()
                .map_err(config_err)?;
            match (&spec.dwell, stepped) {
                (Some(_), true) => {
                    return Err(CliError::Config("`schedule.dwell` applies to continuous time only".into()))
                }
                (Some(dwell), false) => GraphSequence::piecewise_constant(graphs, dwell.clone(), spec.periodic),
                (None, true) => GraphSequence::discrete(graphs, spec.periodic),
                (None, false) => {
                    let dwell = vec![1.0; graphs.len()];
                    GraphSequence::piecewise_constant(graphs, dwell, spec.periodic)
                }
            }
            .map_err(config_err)?
        }
        (None, None) => {
            let kind = match command {
                Command::Gossip => LiteralKind::Complete,
                _ => LiteralKind::RingUndirected,
            };
            GraphSequence::constant(GraphLiteral::standard(kind, n).build().map_err(config_err)?)
        }
    };
    if seq.n() != n {
        return Err(CliError::Config(format!("the graph has {} vertices but n = {n}", seq.n())));
    }
    Ok(seq)
}

pub fn initial_angles(cfg: &RunConfig) -> Result<CircleSwarm, CliError> {
    let n = cfg.agent_count();
    let spec = cfg.initial.clone().unwrap_or(InitialSpec::Uniform);
    let s = match spec {
        InitialSpec::Uniform => {
            let mut rng = rng(cfg, INITIAL_STREAM)?;
            CircleSwarm::new((0..n).map(|_| rng.gen_range(-PI..PI)).collect())
        }
        InitialSpec::Angles { values } => {
            if values.len() != n {
                return Err(CliError::Config(format!("{} initial angles for n = {n}", values.len())));
            }
            CircleSwarm::new(values)
        }
        InitialSpec::Splay { spacing, offset } => CircleSwarm::splay(n, spacing.unwrap_or(TAU / n as f64), offset),
        InitialSpec::Synchronized { at } => CircleSwarm::synchronized(n, at),
        InitialSpec::Points { .. } => {
            return Err(CliError::Config("`points` initial states belong to the vector model".into()))
        }
    };
    s.map_err(config_err)
}

pub fn initial_points(cfg: &RunConfig) -> Result<VectorSwarm, CliError> {
    let n = cfg.agent_count();
    let dim = cfg.dim;
    let s = match cfg.initial.clone().unwrap_or(InitialSpec::Uniform) {
        InitialSpec::Uniform => {
            let mut rng = rng(cfg, INITIAL_STREAM)?;
            VectorSwarm::new(dim, (0..n * dim).map(|_| rng.gen_range(-1.0..=1.0)).collect())
        }
        InitialSpec::Points { values } => {
            if values.len() != n {
                return Err(CliError::Config(format!("{} initial points for n = {n}", values.len())));
            }
            if values.iter().any(|p| p.len() != dim) {
                return Err(CliError::Config(format!("every initial point needs dim = {dim} coordinates")));
            }
            VectorSwarm::from_points(&values)
        }
        _ => {
            return Err(CliError::Config(
                "the vector model takes `uniform` or `points` initial states".into(),
            ))
        }
    };
    s.map_err(config_err)
}

pub fn profile(cfg: &RunConfig, n: usize) -> Result<CouplingProfile, CliError> {
    make_profile(cfg.profile.kind, cfg.profile.a, n, cfg.profile.smoothing).map_err(config_err)
}

fn t_end(cfg: &RunConfig) -> f64 {
    cfg.t_end.unwrap_or(DEFAULT_T_END)
}

fn settings(cfg: &RunConfig, t_end: f64) -> IntegrateSettings {
    IntegrateSettings::new(cfg.h, t_end).sampled(cfg.sample_every)
}

/// Update sets converted to 0-indexed vertices.
pub fn update_sets(cfg: &RunConfig) -> Result<Option<Vec<Vec<usize>>>, CliError> {
    let Some(sets) = &cfg.update_sets else {
        return Ok(None);
    };
    sets.iter()
        .map(|set| {
            set.iter()
                .map(|&k| {
                    k.checked_sub(1)
                        .ok_or_else(|| CliError::Config("update set vertices are 1-indexed".into()))
                })
                .collect()
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

/// Checks the update sets against every graph of the schedule.
pub fn update_schedule(cfg: &RunConfig, seq: &GraphSequence) -> Result<Option<UpdateSchedule>, CliError> {
    let Some(sets) = update_sets(cfg)? else {
        return Ok(None);
    };
    let horizon = cfg.horizon.unwrap_or(sets.len());
    let mut out = None;
    for g in seq.graphs() {
        out = Some(UpdateSchedule::locally_asynchronous(sets.clone(), horizon, g).map_err(config_err)?);
    }
    Ok(out)
}

pub fn execute(cfg: &RunConfig) -> Result<RunResult, CliError> {
    match cfg.command.unwrap_or(Command::Simulate) {
        Command::Simulate => match cfg.model {
            Model::Circle => simulate_circle(cfg),
            Model::Vector => simulate_vector(cfg),
        },
        Command::Equilibria => equilibria(cfg),
        Command::Gossip => gossip(cfg),
        Command::Scenario => scenario(cfg),
        Command::Vicsek => vicsek(cfg),
        Command::Aux => aux(cfg),
    }
}

fn circle_summary(traj: &Trajectory, sync_tol: f64) -> Value {
    let last = traj.final_state();
    json!({
        "n": traj.n(),
        "samples": traj.len(),
        "t_final": traj.times().last(),
        "final_spread": last.spread(),
        "final_order_parameter": order_parameter(last),
        "synchronized": last.spread() < sync_tol,
    })
}

fn simulate_circle(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let seq = build_schedule(cfg)?;
    let s0 = initial_angles(cfg)?;
    match cfg.time {
        TimeMode::Continuous => {
            let profile = profile(cfg, s0.n())?;
            let traj = integrate(&s0, &seq, cfg.alpha, &profile, settings(cfg, t_end(cfg)))?;
            Ok(vec![
                Output::csv("trajectory.csv", |w| traj.write_csv(w)),
                Output::csv("velocity.csv", |w| traj.write_velocity_csv(w, &seq, cfg.alpha, &profile)),
                Output::json("summary.json", &circle_summary(&traj, cfg.sync_tol)),
            ]
            .into())
        }
        TimeMode::Discrete => {
            let sched = update_schedule(cfg, &seq)?;
            let every = cfg.sample_every.max(1);
            let mut s = s0.clone();
            let mut times = vec![0.0];
            let mut states = vec![s0];
            for t in 0..cfg.steps {
                let subset = sched.as_ref().map(|u| u.subset_at(t));
                s = dt_step(&s, seq.graph_at_step(t), cfg.beta, subset)?;
                if (t + 1) % every == 0 || t + 1 == cfg.steps {
                    times.push((t + 1) as f64);
                    states.push(s.clone());
                }
            }
            let mut meta = TrajectoryMeta::new("circle_dt");
            meta.params.insert("beta".into(), cfg.beta);
            meta.seed = cfg.seed;
            let traj = Trajectory::new(times, states, meta)?;
            Ok(vec![
                Output::csv("trajectory.csv", |w| traj.write_csv(w)),
                Output::json("summary.json", &circle_summary(&traj, cfg.sync_tol)),
            ]
            .into())
        }
    }
}

fn simulate_vector(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let seq = build_schedule(cfg)?;
    let s0 = initial_points(cfg)?;
    let params = ConsensusParams::new(cfg.alpha, cfg.b).map_err(config_err)?;
    let integration = match cfg.time {
        TimeMode::Continuous => Integration::Continuous {
            h: cfg.h,
            t_end: t_end(cfg),
        },
        TimeMode::Discrete => Integration::Discrete { steps: cfg.steps },
    };
    let traj = simulate(&s0, &seq, &params, integration, cfg.sample_every)?;
    let fit = traj.decay_fit();
    let summary = json!({
        "n": s0.n(),
        "dim": s0.dim(),
        "samples": traj.times.len(),
        "final_max_pairwise_distance": traj.final_state().max_pairwise_distance(),
        "mean_drift": traj.mean_drift(),
        "decay_slope": fit.as_ref().map(|f| f.slope),
        "decay_r_squared": fit.as_ref().map(|f| f.r_squared),
    });
    Ok(vec![
        Output::csv("trajectory.csv", |w| traj.write_csv(w)),
        Output::json("summary.json", &summary),
    ]
    .into())
}

fn random_swarms(cfg: &RunConfig, n: usize, count: usize) -> Result<Vec<CircleSwarm>, CliError> {
    let mut rng = rng(cfg, SEARCH_STREAM)?;
    (0..count)
        .map(|_| CircleSwarm::new((0..n).map(|_| rng.gen_range(-PI..PI)).collect()).map_err(CliError::from))
        .collect()
}

fn equilibria(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let seq = build_schedule(cfg)?;
    if !seq.is_fixed() {
        return Err(CliError::Config("equilibria need a single graph".into()));
    }
    let g = seq.graphs()[0].clone();
    let n = g.n();
    let profile = profile(cfg, n)?;
    let seeds = random_swarms(cfg, n, cfg.equilibria.seeds)?;
    let outcomes = critical_point_search(&g, &profile, &seeds)?;
    let splay = if is_undirected_ring(&g) {
        Some(enumerate_ring_splay_states(n)?)
    } else {
        None
    };
    let bound = if g.is_undirected() && g.is_unweighted() {
        beta_bound(&g).ok()
    } else {
        None
    };
    let converged = outcomes.iter().filter(|o| o.report().is_some()).count();
    let value = json!({
        "n": n,
        "profile": profile,
        "beta_bound": bound,
        "converged": converged,
        "search": outcomes,
        "ring_splay_states": splay,
    });
    Ok(vec![Output::json("equilibria.json", &value)].into())
}

fn is_undirected_ring(g: &WeightedDigraph) -> bool {
    g.n() >= 3
        && GraphLiteral::standard(LiteralKind::RingUndirected, g.n())
            .build()
            .is_ok_and(|r| &r == g)
}

pub fn gossip_config(cfg: &RunConfig) -> Result<GossipConfig, CliError> {
    let seed = cfg
        .seed
        .ok_or_else(|| CliError::Config("gossip runs draw random numbers and need `seed`".into()))?;
    let gc = GossipConfig {
        beta: cfg.beta,
        variant: cfg.gossip.variant,
        seed,
        max_steps: cfg.gossip.max_steps,
        sync_tol: cfg.sync_tol,
    };
    gc.validate().map_err(config_err)?;
    Ok(gc)
}

fn gossip(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let seq = build_schedule(cfg)?;
    let s0 = initial_angles(cfg)?;
    let gc = gossip_config(cfg)?;
    let exact = if cfg.gossip.exact {
        if !seq.is_fixed() {
            return Err(CliError::Config("the exact chain needs a single graph".into()));
        }
        let symbols = cfg.gossip.n_symbols.unwrap_or(s0.n());
        Some(expected_sync_time(&seq.graphs()[0], &gc, symbols)?)
    } else {
        None
    };
    let report = monte_carlo_sync_time(&s0, &seq, &gc, cfg.gossip.trials)?;
    let value = json!({
        "config": gc,
        "report": report,
        "sync_fraction": report.sync_fraction(),
        "exact_expected_steps": exact,
    });
    let failure = (report.timeouts > 0).then_some(CliError::GossipTimeout {
        timeouts: report.timeouts,
        trials: report.trials,
    });
    Ok(RunResult {
        outputs: vec![
            Output::json("report.json", &value),
            Output::csv("trials.csv", |w| report.write_trials_csv(w)),
        ],
        failure,
    })
}

fn scenario(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let kind = cfg
        .scenario
        .name
        .ok_or_else(|| CliError::Config("the scenario command needs a scenario name".into()))?;
    let sc = make_scenario(kind, &cfg.scenario.params).map_err(config_err)?;
    let t_end = cfg.t_end.unwrap_or(sc.t_end);
    let traj = integrate(&sc.initial, &sc.schedule, sc.alpha, &sc.profile, settings(cfg, t_end))?;
    let groups: Vec<Value> = sc
        .groups
        .iter()
        .map(|(name, r)| json!({ "name": name, "first": r.start + 1, "last": r.end }))
        .collect();
    let value = json!({
        "scenario": kind,
        "n": sc.initial.n(),
        "alpha": sc.alpha,
        "t_end": t_end,
        "profile": sc.profile,
        "groups": groups,
        "graph": GraphLiteral::from_graph(sc.graph()),
        "initial": sc.initial,
        "summary": circle_summary(&traj, cfg.sync_tol),
    });
    Ok(vec![
        Output::csv("trajectory.csv", |w| traj.write_csv(w)),
        Output::csv("sin.csv", |w| traj.write_sin_csv(w)),
        Output::csv("velocity.csv", |w| traj.write_velocity_csv(w, &sc.schedule, sc.alpha, &sc.profile)),
        Output::json("scenario.json", &value),
    ]
    .into())
}

pub fn vicsek_setup(cfg: &RunConfig) -> Result<(VicsekState, f64), CliError> {
    let n = cfg.agent_count();
    let r = cfg.vicsek.sensing_radius;
    let rho = match cfg.vicsek.ring_radius {
        Some(rho) => rho,
        None => default_ring_radius(n, r).map_err(config_err)?,
    };
    let mut s = vicsek_divergence_setup(n, rho, r).map_err(config_err)?;
    let p = cfg.vicsek.perturbation;
    if p > 0.0 {
        let mut rng = rng(cfg, PERTURBATION_STREAM)?;
        for pos in &mut s.positions {
            for c in pos.iter_mut() {
                *c += rng.gen_range(-p..=p) * r;
            }
        }
    }
    Ok((s, rho))
}

fn vicsek(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let (s0, rho) = vicsek_setup(cfg)?;
    let steps = cfg.vicsek.steps;
    let n = s0.positions.len();
    let mut csv = String::from("t");
    for k in 1..=n {
        csv.push_str(&format!(",x_{k},y_{k},theta_{k}"));
    }
    csv.push_str(",links\n");
    let mut s = s0.clone();
    for t in 0..=steps {
        if t > 0 {
            s = vicsek_step(&s)?;
        }
        csv.push_str(&fmt_f64(t as f64));
        for (p, th) in s.positions.iter().zip(s.headings.angles()) {
            csv.push_str(&format!(",{},{},{}", fmt_f64(p[0]), fmt_f64(p[1]), fmt_f64(*th)));
        }
        csv.push_str(&format!(",{}\n", s.proximity_graph().edge_count() / 2));
    }
    let outcome = run_divergence(&s0, steps)?;
    let value = json!({
        "n": n,
        "sensing_radius": s0.radius,
        "ring_radius": rho,
        "steps": steps,
        "outcome": outcome,
    });
    Ok(vec![
        Output {
            name: "trajectory.csv".into(),
            bytes: csv.into_bytes(),
        },
        Output::json("outcome.json", &value),
    ]
    .into())
}

fn aux(cfg: &RunConfig) -> Result<RunResult, CliError> {
    let seq = build_schedule(cfg)?;
    let angles = initial_angles(cfg)?;
    let gain = cfg
        .aux
        .gain
        .unwrap_or_else(|| circsync::aux_consensus::default_gain(cfg.alpha));
    let s0 = AugmentedState::from_angles(angles, gain).map_err(config_err)?;
    let traj = simulate_aux(&s0, &seq, cfg.alpha, settings(cfg, t_end(cfg)))?;
    let last = traj.final_angles();
    let summary = json!({
        "n": last.n(),
        "gain": gain,
        "samples": traj.times.len(),
        "final_spread": last.spread(),
        "final_order_parameter": order_parameter(last),
        "synchronized": last.spread() < cfg.sync_tol,
        "degenerate": traj.degenerate,
    });
    Ok(vec![
        Output::csv("trajectory.csv", |w| traj.write_csv(w)),
        Output::json("summary.json", &summary),
    ]
    .into())
}
