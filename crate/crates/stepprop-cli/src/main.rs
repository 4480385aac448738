//! `stepprop` command-line frontend.

mod commands;
mod recipes;
mod table;

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use stepprop::{Family, StepModel};
use table::Table;

#[derive(Parser, Debug)]
#[command(name = "stepprop", version, about = "Propagators, classical saddles and action spectroscopy for step potentials")]
struct Cli {
    /// JSON model file with keys family, m, V0, alpha, hbar
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_parser = parse_family)]
    family: Option<Family>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    m: Option<f64>,
    #[arg(long = "V0", alias = "v0", global = true, allow_hyphen_values = true)]
    v0: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    alpha: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    hbar: Option<f64>,
    /// output file (stdout when absent); metadata goes to <out>.meta.json
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// worker threads for grid sweeps (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// re-run the command recorded in a metadata file
    #[arg(long)]
    replay: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand, Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum Command {
    /// |R|² and |T|² over a momentum grid above the step
    Rates(commands::RatesArgs),
    /// G(x1, x0; T) on a grid of end points
    Propagate(commands::PropagateArgs),
    /// K(x1, x0; E) over an energy grid
    Energy(commands::EnergyArgs),
    /// classical and complex saddles of a boundary value problem
    Classical(commands::ClassicalArgs),
    /// caustic points or cusps at fixed T
    Caustics(commands::CausticsArgs),
    /// Stokes line points on an (x0, x1) grid
    Stokes(commands::StokesArgs),
    /// WKB propagator over x1, optionally next to the exact one
    Wkb(commands::WkbArgs),
    /// Fourier or Laplace spectrum in ω = 1/ℏ
    Spectrum(commands::SpectrumArgs),
    /// Crank-Nicolson evolution of a Gaussian packet
    Oracle(commands::OracleArgs),
    /// data for a figure recipe (fig1 ... fig18)
    Reproduce(recipes::ReproduceArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Rates(_) => "rates",
            Command::Propagate(_) => "propagate",
            Command::Energy(_) => "energy",
            Command::Classical(_) => "classical",
            Command::Caustics(_) => "caustics",
            Command::Stokes(_) => "stokes",
            Command::Wkb(_) => "wkb",
            Command::Spectrum(_) => "spectrum",
            Command::Oracle(_) => "oracle",
            Command::Reproduce(_) => "reproduce",
        }
    }
}

/// Failure classes and their exit codes.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numerical { kind: String, message: String },
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical { .. } => 3,
            Failure::Io(_) => 1,
        }
    }

    fn record(&self, command: &str) -> Value {
        let (kind, message) = match self {
            Failure::Validation(m) => ("validation".to_string(), m.clone()),
            Failure::Numerical { kind, message } => (kind.clone(), message.clone()),
            Failure::Io(m) => ("io".to_string(), m.clone()),
        };
        json!({ "status": "error", "exit_code": self.code(), "command": command, "kind": kind, "message": message })
    }
}

impl From<stepprop::Error> for Failure {
    fn from(e: stepprop::Error) -> Self {
        if e.is_numerical() {
            let dbg = format!("{e:?}");
            let kind = dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("numerical").to_string();
            Failure::Numerical { kind, message: e.to_string() }
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Replay {
    model: StepModel,
    command: Command,
    #[allow(dead_code)]
    version: Option<String>,
}

fn parse_family(s: &str) -> std::result::Result<Family, String> {
    serde_json::from_value(json!(s)).map_err(|_| format!("unknown family {s:?} (woodssaxon or heaviside)"))
}

fn read_model(cli: &Cli) -> Outcome<StepModel> {
    let mut model = StepModel::woods_saxon(1.0, 1.0, 1.0, 1.0);
    if let Some(path) = &cli.config {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
        model = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
    }
    if let Some(f) = cli.family {
        model.family = f;
    }
    if let Some(m) = cli.m {
        model.m = m;
    }
    if let Some(v) = cli.v0 {
        model.v0 = v;
    }
    if let Some(a) = cli.alpha {
        model.alpha = a;
    }
    if let Some(h) = cli.hbar {
        model.hbar = h;
    }
    if model.family == Family::Heaviside {
        model.alpha = 0.0;
    }
    model.validate()?;
    Ok(model)
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    std::fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn meta_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

fn emit(table: &Table, meta: &Value, out: Option<&Path>, format: Format) -> Outcome<()> {
    let body = match format {
        Format::Csv => table.to_csv(),
        Format::Json => serde_json::to_string_pretty(&table.to_json(meta)).expect("serialisable") + "\n",
    };
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => {
            write_file(path, &body)?;
            if format == Format::Csv {
                write_file(&meta_path(path), &(serde_json::to_string_pretty(meta).expect("serialisable") + "\n"))?;
            }
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Outcome<()> {
    let (model, command) = match (&cli.replay, &cli.command) {
        (Some(path), None) => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
            let r: Replay = serde_json::from_str(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))?;
            r.model.validate()?;
            (r.model, r.command)
        }
        (None, Some(c)) => (read_model(cli)?, c.clone()),
        (Some(_), Some(_)) => return Err(Failure::Validation("--replay takes no subcommand".into())),
        (None, None) => return Err(Failure::Validation("a subcommand or --replay is required".into())),
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Validation("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::Io(e.to_string()))?;
    }
    let meta = json!({ "version": env!("CARGO_PKG_VERSION"), "model": model, "command": command });
    if let Command::Reproduce(args) = &command {
        return recipes::reproduce(args, &meta, cli.out.as_deref());
    }
    let table = commands::run(&model, &command)?;
    emit(&table, &meta, cli.out.as_deref(), cli.format)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let name = cli.command.as_ref().map_or("replay", Command::name);
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.record(name));
            ExitCode::from(f.code())
        }
    }
}
