//! Command-line parsing: subcommand, flags, optional flat JSON config
//! file, with flags taking precedence over file values.

use std::fmt;
use std::path::PathBuf;

use loctime_core::montecarlo::{ExperimentConfig, ExperimentMode};

/// The five supported subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    VerifyIdentities,
    Clt,
    ExpectationScan,
    ConjectureProbe,
    TauClt,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyIdentities => "verify-identities",
            Command::Clt => "clt",
            Command::ExpectationScan => "expectation-scan",
            Command::ConjectureProbe => "conjecture-probe",
            Command::TauClt => "tau-clt",
        }
    }

    fn mode(self) -> ExperimentMode {
        match self {
            Command::TauClt => ExperimentMode::Tau,
            _ => ExperimentMode::FixedTime,
        }
    }
}

/// Requested output serialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn wants_csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }
    pub fn wants_json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

/// Everything one invocation will do.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub config: ExperimentConfig,
    pub output_dir: PathBuf,
    pub format: OutputFormat,
}

/// A bad invocation; printed together with the usage text, exit code 1.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for UsageError {}

pub const USAGE: &str = "\
loctime — limit-theorem experiments for Brownian local-time increments

USAGE:
  loctime <COMMAND> [FLAGS]

COMMANDS:
  verify-identities   Run the exact identity suites (fast gate; exit 2 on failure)
  clt                 Fixed-time distributional experiment for T_q(h)
  tau-clt             Stopping-time (BESQ0 field) experiment
  expectation-scan    Monte Carlo scan of E[S_2(h)] against 4th (q=2 only)
  conjecture-probe    Compensator fluctuation probe for q >= 4

FLAGS (experiment commands):
  --q N               Moment order (>= 2; default 2, conjecture-probe default 4)
  --r N               Weight power in Y = L^r (default 0)
  --t X               Time horizon, fixed-time modes (default 1)
  --a X               BESQ0 start level, tau-clt only (default 1)
  --dt X              Simulation time step (default 1e-4)
  --bin X             Spatial bin width (default 0.01)
  --h L1,L2,...       Decreasing lags, multiples of --bin (default 0.4,0.2,0.1,0.05)
  --paths N           Replicated paths (default 4000)
  --seed N            Master seed (default 1)
  --max-extent X      Spatial truncation of the BESQ0 field (default 100)
  --workers N         Max parallelism (default: automatic; LOCTIME_WORKERS caps it)
  --config PATH       Flat JSON config file; flags override file values
  --out DIR           Output directory (default runs/<command>)
  --format F          csv | json | both (default both)
  --help              Show this help

EXIT CODES:
  0 success, 1 usage error, 2 failed verification suite
";

#[derive(Debug, Default)]
struct Overrides {
    q: Option<u32>,
    r: Option<u32>,
    t: Option<f64>,
    a: Option<f64>,
    dt: Option<f64>,
    bin: Option<f64>,
    h: Option<Vec<f64>>,
    paths: Option<usize>,
    seed: Option<u64>,
    max_extent: Option<f64>,
    workers: Option<usize>,
    config_path: Option<PathBuf>,
    out: Option<PathBuf>,
    format: Option<OutputFormat>,
    help: bool,
}

fn parse_value<T: std::str::FromStr>(flag: &str, value: &str) -> Result<T, UsageError> {
    value
        .parse::<T>()
        .map_err(|_| UsageError(format!("invalid value '{value}' for {flag}")))
}

fn parse_h_list(flag: &str, value: &str) -> Result<Vec<f64>, UsageError> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| UsageError(format!("invalid lag '{part}' in {flag}")))
        })
        .collect()
}

fn parse_format(value: &str) -> Result<OutputFormat, UsageError> {
    match value {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        "both" => Ok(OutputFormat::Both),
        other => Err(UsageError(format!(
            "invalid value '{other}' for --format (expected csv | json | both)"
        ))),
    }
}

fn collect_overrides<I: Iterator<Item = String>>(mut it: I) -> Result<Overrides, UsageError> {
    let mut o = Overrides::default();
    while let Some(arg) = it.next() {
        let (flag, inline) = match arg.split_once('=') {
            Some((f, v)) => (f.to_string(), Some(v.to_string())),
            None => (arg, None),
        };
        if flag == "--help" || flag == "-h" {
            o.help = true;
            continue;
        }
        let mut value = |o: &str| -> Result<String, UsageError> {
            inline
                .clone()
                .or_else(|| it.next())
                .ok_or_else(|| UsageError(format!("missing value for {o}")))
        };
        match flag.as_str() {
            "--q" => o.q = Some(parse_value(&flag, &value("--q")?)?),
            "--r" => o.r = Some(parse_value(&flag, &value("--r")?)?),
            "--t" => o.t = Some(parse_value(&flag, &value("--t")?)?),
            "--a" => o.a = Some(parse_value(&flag, &value("--a")?)?),
            "--dt" => o.dt = Some(parse_value(&flag, &value("--dt")?)?),
            "--bin" => o.bin = Some(parse_value(&flag, &value("--bin")?)?),
            "--h" => o.h = Some(parse_h_list(&flag, &value("--h")?)?),
            "--paths" => o.paths = Some(parse_value(&flag, &value("--paths")?)?),
            "--seed" => o.seed = Some(parse_value(&flag, &value("--seed")?)?),
            "--max-extent" => o.max_extent = Some(parse_value(&flag, &value("--max-extent")?)?),
            "--workers" => o.workers = Some(parse_value(&flag, &value("--workers")?)?),
            "--config" => o.config_path = Some(PathBuf::from(value("--config")?)),
            "--out" => o.out = Some(PathBuf::from(value("--out")?)),
            "--format" => o.format = Some(parse_format(&value("--format")?)?),
            other => return Err(UsageError(format!("unknown flag: {other}"))),
        }
    }
    Ok(o)
}

fn load_config_file(path: &PathBuf, mode: ExperimentMode) -> Result<ExperimentConfig, UsageError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| UsageError(format!("cannot read config file {}: {e}", path.display())))?;
    // check for an explicit mode key conflicting with the subcommand
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        UsageError(format!(
            "config file {} is not valid JSON: {e}",
            path.display()
        ))
    })?;
    let config: ExperimentConfig = serde_json::from_value(raw.clone())
        .map_err(|e| UsageError(format!("config file {}: {e}", path.display())))?;
    if raw.get("mode").is_some() && config.mode != mode {
        return Err(UsageError(format!(
            "config file sets mode '{}', conflicting with the subcommand",
            if config.mode == ExperimentMode::Tau {
                "tau"
            } else {
                "fixed-time"
            }
        )));
    }
    Ok(config)
}

/// Parse an argument vector (without the program name) into a manifest.
///
/// Precedence: built-in defaults < config file < flags. `Err` carries a
/// message naming the offending flag; the caller prints it with the usage
/// text and exits 1.
pub fn parse_args<I>(argv: I) -> Result<RunManifest, UsageError>
where
    I: IntoIterator<Item = String>,
{
    let mut it = argv.into_iter();
    let command = match it.next().as_deref() {
        Some("verify-identities") => Command::VerifyIdentities,
        Some("clt") => Command::Clt,
        Some("expectation-scan") => Command::ExpectationScan,
        Some("conjecture-probe") => Command::ConjectureProbe,
        Some("tau-clt") => Command::TauClt,
        Some("--help") | Some("-h") => return Err(UsageError("help requested".into())),
        Some(other) => return Err(UsageError(format!("unknown command: {other}"))),
        None => return Err(UsageError("missing command".into())),
    };
    let o = collect_overrides(it)?;
    if o.help {
        return Err(UsageError("help requested".into()));
    }

    let mode = command.mode();
    let mut config = match &o.config_path {
        Some(path) => load_config_file(path, mode)?,
        None => ExperimentConfig::default(),
    };
    config.mode = mode;

    // mode-conflicting flags
    if mode == ExperimentMode::Tau && o.t.is_some() {
        return Err(UsageError(
            "--t conflicts with tau mode (use --a for the BESQ0 start level)".into(),
        ));
    }
    if mode == ExperimentMode::FixedTime && o.a.is_some() {
        return Err(UsageError(format!(
            "--a applies to tau-clt only, not {}",
            command.name()
        )));
    }

    if let Some(q) = o.q {
        config.q = q;
    }
    if let Some(r) = o.r {
        config.r = r;
    }
    if let Some(t) = o.t {
        config.t = t;
    }
    if let Some(a) = o.a {
        config.besq_start = a;
    }
    if let Some(dt) = o.dt {
        config.dt = dt;
    }
    if let Some(bin) = o.bin {
        config.bin_width = bin;
    }
    if let Some(h) = o.h {
        config.h_list = h;
    }
    if let Some(p) = o.paths {
        config.n_paths = p;
    }
    if let Some(s) = o.seed {
        config.master_seed = s;
    }
    if let Some(m) = o.max_extent {
        config.max_extent = m;
    }
    if let Some(w) = o.workers {
        config.workers = w;
    }

    match command {
        Command::ExpectationScan => {
            if config.q != 2 || config.r != 0 {
                return Err(UsageError(
                    "expectation-scan requires q = 2 and r = 0".into(),
                ));
            }
        }
        Command::ConjectureProbe => {
            if o.q.is_none() && config.q < 4 {
                config.q = 4;
            }
            if config.q < 4 {
                return Err(UsageError("conjecture-probe requires --q >= 4".into()));
            }
        }
        _ => {}
    }

    if command != Command::VerifyIdentities {
        config.validate().map_err(|e| UsageError(e.to_string()))?;
    }

    let output_dir = o
        .out
        .unwrap_or_else(|| PathBuf::from("runs").join(command.name()));
    Ok(RunManifest {
        command,
        config,
        output_dir,
        format: o.format.unwrap_or(OutputFormat::Both),
    })
}

/// Apply the `LOCTIME_WORKERS` cap to a parsed configuration.
pub fn apply_worker_cap(config: &mut ExperimentConfig, cap: Option<usize>) {
    if let Some(cap) = cap {
        if cap > 0 {
            config.workers = if config.workers == 0 {
                cap
            } else {
                config.workers.min(cap)
            };
        }
    }
}
