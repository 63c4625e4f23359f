mod commands;
mod out;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "semineutral", version, about = "Local dynamics of semi-indifferent germs of (C^2, 0)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Classify the fixed point of a two-dimensional germ.
    Classify(commands::ClassifyArgs),
    /// Continued fraction data of a rotation number.
    Cf(commands::CfArgs),
    /// Center and strong stable manifold jets.
    Manifolds(commands::ManifoldArgs),
    /// Grid approximation of the hedgehog.
    Hedgehog(commands::HedgehogArgs),
    /// Petals and Fatou coordinates of a semi-parabolic germ.
    Petals(commands::PetalArgs),
    /// Polynomial normal forms of one-variable and skew-product germs.
    NormalForm(commands::NormalFormArgs),
    /// Cocycle linearization or the cohomology equation.
    Linearize(commands::LinearizeArgs),
    /// Beltrami coefficient diagnostics on a perturbed model.
    Beltrami(commands::BeltramiArgs),
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct Common {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the JSON report here instead of standard output.
    #[arg(long)]
    pub out_json: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum LeadArg {
    One,
    Lambda,
}

pub enum Failure {
    Usage(String),
    Domain(semineutral::Error),
    Io(String),
}

impl From<semineutral::Error> for Failure {
    fn from(e: semineutral::Error) -> Self {
        Failure::Domain(e)
    }
}

/// Splices the flags of a `--config` JSON object in right after the
/// subcommand, so that later explicit flags override them.
fn expand_config(argv: Vec<String>) -> Result<Vec<String>, String> {
    let mut rest = Vec::with_capacity(argv.len());
    let mut path = None;
    let mut it = argv.into_iter();
    while let Some(a) = it.next() {
        if a == "--config" {
            path = Some(it.next().ok_or("--config needs a value")?);
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        } else {
            rest.push(a);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let text = out::read(path.as_ref())?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("config {path}: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path}: expected a JSON object"));
    };
    let mut flags = Vec::new();
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        match v {
            Value::Bool(true) => flags.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => flags.extend([flag, s]),
            Value::Number(n) => flags.extend([flag, n.to_string()]),
            Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|i| match i {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                flags.extend([flag, parts.join(",")]);
            }
            Value::Object(_) => return Err(format!("config key {key}: nested objects are not flags")),
        }
    }
    let at = 2.min(rest.len());
    rest.splice(at..at, flags);
    Ok(rest)
}

fn common(cmd: &Command) -> &Common {
    match cmd {
        Command::Classify(a) => &a.common,
        Command::Cf(a) => &a.common,
        Command::Manifolds(a) => &a.common,
        Command::Hedgehog(a) => &a.common,
        Command::Petals(a) => &a.common,
        Command::NormalForm(a) => &a.common,
        Command::Linearize(a) => &a.common,
        Command::Beltrami(a) => &a.common,
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let c = common(&cli.command).clone();
    if let Some(n) = c.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    let outputs = commands::output_paths(&cli.command);
    for p in outputs.iter().chain(&c.out_json) {
        out::check_writable(p).map_err(Failure::Io)?;
    }
    let (report, mut artifacts) = match &cli.command {
        Command::Classify(a) => commands::classify(a)?,
        Command::Cf(a) => commands::cf(a)?,
        Command::Manifolds(a) => commands::manifolds(a)?,
        Command::Hedgehog(a) => commands::hedgehog(a)?,
        Command::Petals(a) => commands::petals(a)?,
        Command::NormalForm(a) => commands::normal_form(a)?,
        Command::Linearize(a) => commands::linearize(a)?,
        Command::Beltrami(a) => commands::beltrami(a)?,
    };
    let text = match report {
        commands::Report::Json(v) => {
            serde_json::to_string_pretty(&v).map_err(|e| Failure::Io(e.to_string()))? + "\n"
        }
        commands::Report::Text(t) => t,
    };
    match &c.out_json {
        Some(p) => artifacts.push(out::Artifact { path: p.clone(), bytes: text.into_bytes() }),
        None => print!("{text}"),
    }
    out::commit(artifacts).map_err(Failure::Io)
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Domain(e)) => {
            eprintln!("{}", json!({ "kind": e.kind(), "message": e.to_string() }));
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("{}", json!({ "kind": "io", "message": msg }));
            ExitCode::from(1)
        }
    }
}
