//! Run configuration: JSON file, `key=value` overrides and per-command defaults.

use std::path::Path;

use circsync::circle::ProfileKind;
use circsync::gossip::Variant;
use circsync::graph::io::GraphLiteral;
use circsync::scenarios::{ScenarioKind, ScenarioParams};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Equilibria,
    Gossip,
    Scenario,
    Vicsek,
    Aux,
}

impl Command {
    pub const ALL: [Command; 6] = [
        Command::Simulate,
        Command::Equilibria,
        Command::Gossip,
        Command::Scenario,
        Command::Vicsek,
        Command::Aux,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Equilibria => "equilibria",
            Command::Gossip => "gossip",
            Command::Scenario => "scenario",
            Command::Vicsek => "vicsek",
            Command::Aux => "aux",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Model {
    #[default]
    Circle,
    Vector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeMode {
    #[default]
    Continuous,
    Discrete,
}

/// Initial positions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Independent uniform draws from the seeded generator: angles on the
    /// circle, or coordinates in `[-1, 1]` for the vector model.
    Uniform,
    Angles { values: Vec<f64> },
    /// Agent `k` at `offset + k * spacing`; spacing defaults to `2 pi / n`.
    Splay {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        spacing: Option<f64>,
        #[serde(default)]
        offset: f64,
    },
    Synchronized {
        #[serde(default)]
        at: f64,
    },
    /// Explicit points of the vector model, one inner list per agent.
    Points { values: Vec<Vec<f64>> },
}

/// A switching graph sequence. With `dwell` it is piecewise constant in
/// continuous time, otherwise one graph per discrete step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    pub graphs: Vec<GraphLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dwell: Option<Vec<f64>>,
    #[serde(default = "yes")]
    pub periodic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    #[serde(default = "sine")]
    pub kind: ProfileKind,
    /// Slope parameter of the g-profile.
    #[serde(default = "one")]
    pub a: f64,
    /// Blend half-width of the g-profile; default `pi / (20 n)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
}

impl Default for ProfileSpec {
    fn default() -> Self {
        Self {
            kind: ProfileKind::Sine,
            a: 1.0,
            smoothing: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GossipSection {
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_max_steps")]
    pub max_steps: usize,
    #[serde(default = "jump")]
    pub variant: Variant,
    /// Also solve the absorbing chain (fixed graphs only).
    #[serde(default)]
    pub exact: bool,
    /// Symbols of the exact chain's start; default one per agent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_symbols: Option<usize>,
}

impl Default for GossipSection {
    fn default() -> Self {
        Self {
            trials: default_trials(),
            max_steps: default_max_steps(),
            variant: Variant::Jump,
            exact: false,
            n_symbols: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<ScenarioKind>,
    #[serde(default)]
    pub params: ScenarioParams,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VicsekSection {
    #[serde(default = "default_sensing_radius")]
    pub sensing_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ring_radius: Option<f64>,
    #[serde(default = "default_vicsek_steps")]
    pub steps: usize,
    /// Largest random position offset, as a fraction of the sensing radius.
    #[serde(default)]
    pub perturbation: f64,
}

impl Default for VicsekSection {
    fn default() -> Self {
        Self {
            sensing_radius: default_sensing_radius(),
            ring_radius: None,
            steps: default_vicsek_steps(),
            perturbation: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuxSection {
    /// Tracking gain; default `5 alpha`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gain: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquilibriaSection {
    /// Random seeds for the critical point search.
    #[serde(default = "default_search_seeds")]
    pub seeds: usize,
}

impl Default for EquilibriaSection {
    fn default() -> Self {
        Self {
            seeds: default_search_seeds(),
        }
    }
}

/// Everything a run needs. Unset optional fields are filled by
/// [`RunConfig::resolved`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    /// Number of agents.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphLiteral>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<ScheduleSpec>,
    /// Default: uniform draws, or the splay state for gossip.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial: Option<InitialSpec>,
    #[serde(default)]
    pub model: Model,
    #[serde(default)]
    pub time: TimeMode,
    #[serde(default = "one")]
    pub alpha: f64,
    #[serde(default = "one")]
    pub beta: f64,
    /// Convexity bound of discrete vector consensus.
    #[serde(default = "default_b")]
    pub b: f64,
    /// Dimension of the vector model.
    #[serde(default = "default_dim")]
    pub dim: usize,
    #[serde(default)]
    pub profile: ProfileSpec,
    #[serde(default = "default_h")]
    pub h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    /// Discrete-time steps.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
    /// Locally asynchronous update sets (1-indexed vertices), used cyclically.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub update_sets: Option<Vec<Vec<usize>>>,
    /// Window in which every vertex must update; default the number of sets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_sync_tol")]
    pub sync_tol: f64,
    #[serde(default)]
    pub gossip: GossipSection,
    #[serde(default)]
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub vicsek: VicsekSection,
    #[serde(default)]
    pub aux: AuxSection,
    #[serde(default)]
    pub equilibria: EquilibriaSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        serde_json::from_value(Value::Object(Map::new())).expect("every field has a default")
    }
}

fn yes() -> bool {
    true
}
fn one() -> f64 {
    1.0
}
fn sine() -> ProfileKind {
    ProfileKind::Sine
}
fn jump() -> Variant {
    Variant::Jump
}
fn default_b() -> f64 {
    0.9
}
fn default_dim() -> usize {
    2
}
fn default_h() -> f64 {
    0.01
}
fn default_steps() -> usize {
    100
}
fn default_sample_every() -> usize {
    1
}
fn default_sync_tol() -> f64 {
    1e-6
}
fn default_trials() -> usize {
    1000
}
fn default_max_steps() -> usize {
    100_000
}
fn default_sensing_radius() -> f64 {
    10.0
}
fn default_vicsek_steps() -> usize {
    100
}
fn default_search_seeds() -> usize {
    20
}

pub const DEFAULT_N: usize = 5;
pub const DEFAULT_VICSEK_N: usize = 8;
pub const DEFAULT_T_END: f64 = 50.0;

impl RunConfig {
    /// Agent count: explicit `n`, else the size implied by the graph or the
    /// initial state, else the command default.
    pub fn agent_count(&self) -> usize {
        if let Some(n) = self.n {
            return n;
        }
        if let Some(Ok(g)) = self.graph.as_ref().map(GraphLiteral::build) {
            return g.n();
        }
        if let Some(Ok(g)) = self.schedule.as_ref().and_then(|s| s.graphs.first()).map(GraphLiteral::build) {
            return g.n();
        }
        match &self.initial {
            Some(InitialSpec::Angles { values }) => return values.len(),
            Some(InitialSpec::Points { values }) => return values.len(),
            _ => {}
        }
        match (self.command, self.scenario.params.n) {
            (Some(Command::Vicsek), _) => DEFAULT_VICSEK_N,
            (Some(Command::Scenario), Some(n)) => n,
            _ => DEFAULT_N,
        }
    }

    /// The configuration with every default that affects the run written
    /// out, so that it reproduces the run on its own.
    pub fn resolved(&self) -> RunConfig {
        let mut c = self.clone();
        let command = c.command.unwrap_or(Command::Simulate);
        c.command = Some(command);
        if command == Command::Scenario {
            if let Some(n) = c.n.take() {
                c.scenario.params.n.get_or_insert(n);
            }
        } else {
            c.n = Some(self.agent_count());
            if c.initial.is_none() {
                c.initial = Some(match command {
                    Command::Gossip => InitialSpec::Splay {
                        spacing: None,
                        offset: 0.0,
                    },
                    _ => InitialSpec::Uniform,
                });
            }
        }
        if c.t_end.is_none() && command != Command::Scenario {
            c.t_end = Some(DEFAULT_T_END);
        }
        if command == Command::Aux && c.aux.gain.is_none() {
            c.aux.gain = Some(circsync::aux_consensus::default_gain(c.alpha));
        }
        if c.update_sets.is_some() && c.horizon.is_none() {
            c.horizon = c.update_sets.as_ref().map(Vec::len);
        }
        c
    }
}

/// Turns a `key=value` argument into a JSON path and value. `N` and a few
/// section keys have short aliases; dotted keys address nested fields.
pub fn parse_override(arg: &str) -> Result<(Vec<String>, Value), CliError> {
    let (key, raw) = arg
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("expected key=value, got `{arg}`")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(CliError::Config(format!("empty key in `{arg}`")));
    }
    let path: Vec<String> = match key {
        "N" => vec!["n".into()],
        "trials" | "max_steps" | "variant" | "exact" | "n_symbols" => vec!["gossip".into(), key.into()],
        "n1" | "n2" | "x" | "a" | "cross_weight" => vec!["scenario".into(), "params".into(), key.into()],
        "sensing_radius" | "ring_radius" | "perturbation" => vec!["vicsek".into(), key.into()],
        "gain" => vec!["aux".into(), key.into()],
        "seeds" => vec!["equilibria".into(), key.into()],
        _ => key.split('.').map(str::to_string).collect(),
    };
    let value = match serde_json::from_str::<Value>(raw) {
        Ok(v) => v,
        Err(_) => Value::String(raw.to_string()),
    };
    // `variant=jump` and `variant=moderate` are shorthand for the tagged
    // objects; the moderate variant defaults to `alpha = 1`.
    let value = match (path.last().map(String::as_str), &value) {
        (Some("variant"), Value::String(s)) if s == "moderate" => serde_json::json!({ "variant": s, "alpha": 1.0 }),
        (Some("variant"), Value::String(s)) => serde_json::json!({ "variant": s }),
        _ => value,
    };
    Ok((path, value))
}

/// Sets `value` at `path`, creating intermediate objects.
pub fn apply_override(root: &mut Value, path: &[String], value: Value) -> Result<(), CliError> {
    let mut cur = root;
    for (i, part) in path.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| CliError::Config(format!("`{}` is not an object", path[..i].join("."))))?;
        if i + 1 == path.len() {
            obj.insert(part.clone(), value);
            return Ok(());
        }
        cur = obj.entry(part.clone()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

/// Parses configuration text. A run manifest is accepted too: its `config`
/// member is the resolved configuration of the run it describes.
pub fn parse_config_text(text: &str, overrides: &[(Vec<String>, Value)]) -> Result<RunConfig, CliError> {
    let mut value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    let manifest = value.get("config").is_some() && value.get("outputs").is_some();
    if !manifest && overrides.is_empty() {
        return deserialize_located(text);
    }
    if manifest {
        value = value["config"].take();
    }
    for (path, v) in overrides {
        apply_override(&mut value, path, v.clone())?;
    }
    from_value(value)
}

fn deserialize_located(text: &str) -> Result<RunConfig, CliError> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Config(format!(
            "line {}, column {}, field `{field}`: {inner}",
            inner.line(),
            inner.column()
        ))
    })
}

pub fn from_value(value: Value) -> Result<RunConfig, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let field = e.path().to_string();
        CliError::Config(format!("field `{field}`: {}", e.into_inner()))
    })
}

pub fn load_config(path: &Path, overrides: &[(Vec<String>, Value)]) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_text(&text, overrides)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_gives_defaults() {
        let c = parse_config_text("{}", &[]).unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.alpha, 1.0);
        assert_eq!(c.gossip.trials, 1000);
        assert_eq!(c.initial, None);
    }

    #[test]
    fn unknown_field_is_located() {
        let err = parse_config_text("{\n  \"alpha\": 1.0,\n  \"gamma\": 2\n}", &[]).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
        assert!(msg.contains("gamma"), "{msg}");
    }

    #[test]
    fn nested_type_error_names_the_field() {
        let err = parse_config_text("{\"gossip\": {\"trials\": \"many\"}}", &[]).unwrap_err();
        assert!(err.to_string().contains("gossip.trials"), "{err}");
    }

    #[test]
    fn overrides_and_aliases() {
        let ov: Vec<_> = ["N=6", "trials=10", "beta=0.5", "variant=jump", "profile.kind=g_profile"]
            .iter()
            .map(|a| parse_override(a).unwrap())
            .collect();
        let c = parse_config_text("{}", &ov).unwrap();
        assert_eq!(c.n, Some(6));
        assert_eq!(c.gossip.trials, 10);
        assert_eq!(c.beta, 0.5);
        assert_eq!(c.profile.kind, ProfileKind::GProfile);
        assert!(parse_override("novalue").is_err());
        let bad = parse_override("trials=-1").unwrap();
        assert!(parse_config_text("{}", &[bad]).is_err());
    }

    #[test]
    fn manifest_is_accepted_as_config() {
        let c = RunConfig {
            alpha: 0.3,
            ..RunConfig::default()
        }
        .resolved();
        let manifest = serde_json::json!({ "config": c, "outputs": ["trajectory.csv"] });
        let back = parse_config_text(&manifest.to_string(), &[]).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn resolution_fills_defaults() {
        let c = RunConfig {
            command: Some(Command::Vicsek),
            ..RunConfig::default()
        }
        .resolved();
        assert_eq!(c.n, Some(DEFAULT_VICSEK_N));
        let g: RunConfig = serde_json::from_str(r#"{"graph": {"kind": "complete", "params": {"n": 4}}}"#).unwrap();
        assert_eq!(g.resolved().n, Some(4));
        assert_eq!(g.resolved().t_end, Some(DEFAULT_T_END));
    }
}
