//! Command-line front end: `circsync [OPTIONS] <COMMAND> [SCENARIO] [KEY=VALUE...]`.

pub mod config;
pub mod error;
pub mod output;
pub mod run;
pub mod validate;

use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

use config::{parse_config_text, parse_override, Command};
pub use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "circsync",
    version,
    about = "Consensus and synchronization on vector spaces and the circle",
    after_help = "COMMANDS: simulate, equilibria, gossip, scenario <NAME>, vicsek, aux, validate [COMMAND]\n\
                  Settings are given as KEY=VALUE (values parse as JSON, else as strings), \
                  e.g. `circsync scenario cyclic_pursuit N=6` or `circsync gossip N=2 beta=1 trials=100000 seed=7`."
)]
pub struct Cli {
    /// JSON configuration file, or the manifest of an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Random seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Print nothing but errors.
    #[arg(long, short)]
    pub quiet: bool,
    /// Command, scenario name and KEY=VALUE settings.
    pub args: Vec<String>,
}

struct Invocation {
    validate_only: bool,
    overrides: Vec<(Vec<String>, Value)>,
}

fn key(path: &str) -> Vec<String> {
    path.split('.').map(str::to_string).collect()
}

fn parse_args(cli: &Cli) -> Result<Invocation, CliError> {
    let mut rest = cli.args.iter().map(String::as_str).peekable();
    let mut overrides = Vec::new();
    let validate_only = rest.next_if(|a| *a == "validate").is_some();
    if let Some(name) = rest.next_if(|a| !a.contains('=')) {
        let command = Command::from_name(name).ok_or_else(|| {
            CliError::Config(format!(
                "unknown command `{name}`; expected one of simulate, equilibria, gossip, scenario, vicsek, aux, validate"
            ))
        })?;
        overrides.push((key("command"), Value::String(name.into())));
        if command == Command::Scenario {
            if let Some(scenario) = rest.next_if(|a| !a.contains('=')) {
                overrides.push((key("scenario.name"), Value::String(scenario.into())));
            }
        }
    }
    if let Some(seed) = cli.seed {
        overrides.push((key("seed"), Value::from(seed)));
    }
    for arg in rest {
        overrides.push(parse_override(arg)?);
    }
    Ok(Invocation {
        validate_only,
        overrides,
    })
}

/// Runs the program and returns its exit status.
pub fn run_cli(cli: &Cli) -> Result<(), CliError> {
    let inv = parse_args(cli)?;
    let cfg = match &cli.config {
        Some(path) => config::load_config(path, &inv.overrides)?,
        None => parse_config_text("{}", &inv.overrides)?,
    }
    .resolved();
    let diags = validate::validate(&cfg);
    for d in &diags {
        if d.severity == validate::Severity::Error || !cli.quiet {
            eprintln!("{d}");
        }
    }
    let errors = diags.iter().filter(|d| d.severity == validate::Severity::Error).count();
    if inv.validate_only {
        if !cli.quiet && errors == 0 {
            println!("configuration ok ({} warning(s))", diags.len());
        }
        return if errors > 0 { Err(CliError::Invalid(errors)) } else { Ok(()) };
    }
    if errors > 0 {
        return Err(CliError::Invalid(errors));
    }
    let result = run::execute(&cfg)?;
    output::write_run(&cli.out, &cfg, &result.outputs)?;
    if !cli.quiet {
        for o in &result.outputs {
            println!("{}", cli.out.join(&o.name).display());
        }
        println!("{}", cli.out.join(output::MANIFEST).display());
    }
    match result.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
