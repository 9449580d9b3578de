//! The `xc` command: `run`, `check` and `validate-trace`.
//!
//! Exit status is 0 on success, 1 when a program or trace has diagnostics,
//! and 2 for configuration, usage and I/O errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use log::{debug, info};
use rayon::prelude::*;
use xc_lang::{Diagnostic, SourceProgram};
use xc_netsim::{validate, KeyValues, TraceFile};
use xc_oracles::oracle_denotational;
use xc_scenarios::{export_csv, Kind, Scenario, ScenarioError, ScenarioRun, TimeSeries};

/// Written next to every trace; `validate-trace` reruns it.
pub const SIDECAR: &str = "run.cfg";
pub const METRICS: &str = "metrics.csv";
pub const MEAN_METRICS: &str = "metrics_mean.csv";
pub const TRACE: &str = "trace.txt";
/// Copy of a custom program, referenced from the sidecar.
pub const PROGRAM: &str = "program.xc";

#[derive(Debug, Parser)]
#[command(
    name = "xc",
    version,
    about = "Run exchange calculus scenarios on a simulated network"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write metrics.csv and trace.txt.
    Run(RunSpec),
    /// Parse and check a program.
    Check { file: PathBuf },
    /// Check a trace's structure and, given its run.cfg, its results.
    ValidateTrace { file: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct RunSpec {
    /// `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Overrides the `scenario` key.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Overrides the `seed` key, which defaults to 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Runs seeds `seed..seed+repeat` and also writes the mean series.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    /// Program for the custom scenario.
    #[arg(long)]
    pub program: Option<PathBuf>,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Diagnostics(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Diagnostics(_) => 1,
            CliError::Config(_) => 2,
        }
    }
}

fn io_err(what: &str, path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("cannot {what} {}: {e}", path.display()))
}

fn render_all(diags: &[Diagnostic], file: &str) -> String {
    diags
        .iter()
        .map(|d| d.render(file))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn init_logging() {
    let env = env_logger::Env::new().filter("XC_LOG");
    let _ = env_logger::Builder::from_env(env).try_init();
}

/// Entry point of the binary.
pub fn main() -> i32 {
    init_logging();
    let mut out = io::stdout().lock();
    let mut err = io::stderr().lock();
    run_cli(std::env::args_os(), &mut out, &mut err)
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let help = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            if help {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    let result = match &cli.command {
        Command::Run(spec) => run(spec).map(|written| {
            written
                .iter()
                .map(|p| format!("wrote {}", p.display()))
                .collect::<Vec<_>>()
                .join("\n")
        }),
        Command::Check { file } => check(file),
        Command::ValidateTrace { file } => validate_trace(file),
    };
    match result {
        Ok(report) => {
            let _ = writeln!(out, "{report}");
            0
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.code()
        }
    }
}

/// Configuration pairs and program text of a run, with the flags applied.
pub fn load(spec: &RunSpec) -> Result<(KeyValues, Option<String>), CliError> {
    let mut kv = match &spec.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| io_err("read config", path, e))?;
            KeyValues::parse(&text)
                .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        }
        None => KeyValues::default(),
    };
    if let Some(seed) = spec.seed {
        kv.set("seed", seed);
    }
    if let Some(name) = &spec.scenario {
        kv.set("scenario", name);
    }
    let program_path = match (&spec.program, kv.get("program")) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(p)) => {
            let base = spec
                .config
                .as_deref()
                .and_then(Path::parent)
                .unwrap_or(Path::new(""));
            Some(base.join(p))
        }
        (None, None) => None,
    };
    let program = match program_path {
        Some(p) => Some(fs::read_to_string(&p).map_err(|e| io_err("read program", &p, e))?),
        None => None,
    };
    if program.is_some() && kv.get("scenario").is_none() {
        kv.set("scenario", Kind::Custom);
    }
    Ok((kv, program))
}

/// Builds the scenario described by `kv`.
pub fn scenario(kv: &KeyValues, program: Option<&str>) -> Result<Scenario, CliError> {
    let mut s = Scenario::from_config(kv, None).map_err(|e| CliError::Config(e.to_string()))?;
    if program.is_some() && s.kind != Kind::Custom {
        return Err(CliError::Config(format!(
            "a program is only used by the custom scenario, not `{}`",
            s.kind
        )));
    }
    s.program = program.map(String::from);
    Ok(s)
}

fn run_scenario(s: &Scenario) -> Result<ScenarioRun, CliError> {
    s.run().map_err(|e| match e {
        ScenarioError::Program(d) => CliError::Diagnostics(render_all(&d, "program")),
        other => CliError::Config(other.to_string()),
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| io_err("write", path, e))
}

fn write_series(path: &Path, series: &[(String, TimeSeries)]) -> Result<(), CliError> {
    let cols: Vec<(&str, &TimeSeries)> = series.iter().map(|(n, s)| (n.as_str(), s)).collect();
    export_csv(&cols, path).map_err(|e| io_err("write", path, e))
}

/// Runs the scenario once per seed and writes its files. The base seed goes
/// to `out`, the others to `out/seed-N`. Returns the written paths.
pub fn run(spec: &RunSpec) -> Result<Vec<PathBuf>, CliError> {
    let (kv, program) = load(spec)?;
    let base = scenario(&kv, program.as_deref())?;
    let seed = base.sim.seed;
    let seeds: Vec<u64> = (0..spec.repeat as u64).map(|i| seed + i).collect();
    info!("running {} for seeds {:?}", base.kind, seeds);
    let runs = seeds
        .par_iter()
        .map(|&s| {
            let mut kv = kv.clone();
            kv.set("seed", s);
            let sc = scenario(&kv, program.as_deref())?;
            debug!("seed {s}: {} devices", sc.sim.devices);
            let r = run_scenario(&sc)?;
            debug!("seed {s}: {} events", r.trace.events().len());
            Ok((kv, r))
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut written = Vec::new();
    for (i, (kv, r)) in runs.iter().enumerate() {
        let dir = if i == 0 {
            spec.out.clone()
        } else {
            spec.out.join(format!("seed-{}", seeds[i]))
        };
        fs::create_dir_all(&dir).map_err(|e| io_err("create", &dir, e))?;
        let mut sidecar = kv.clone();
        sidecar.set("scenario", base.kind);
        if let Some(text) = &program {
            sidecar.set("program", PROGRAM);
            write(&dir.join(PROGRAM), text)?;
        }
        write(&dir.join(SIDECAR), &sidecar.render())?;
        write(&dir.join(TRACE), &r.trace.export())?;
        write_series(&dir.join(METRICS), &r.series)?;
        written.push(dir.join(METRICS));
        written.push(dir.join(TRACE));
    }
    if runs.len() > 1 {
        let mean: Vec<(String, TimeSeries)> = runs[0]
            .1
            .series
            .iter()
            .enumerate()
            .map(|(c, (name, _))| {
                let all: Vec<TimeSeries> =
                    runs.iter().map(|(_, r)| r.series[c].1.clone()).collect();
                (
                    name.clone(),
                    TimeSeries::mean(&all).expect("at least one run"),
                )
            })
            .collect();
        let path = spec.out.join(MEAN_METRICS);
        write_series(&path, &mean)?;
        written.push(path);
    }
    Ok(written)
}

/// Parses and checks a program; library names count as bound.
pub fn check(file: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(file).map_err(|e| io_err("read", file, e))?;
    let src = SourceProgram::with_globals(&text, &xc_stdlib::names());
    let name = file.display().to_string();
    let report = render_all(&src.diagnostics, &name);
    if src.parsed.is_none() {
        return Err(CliError::Diagnostics(report));
    }
    Ok(if report.is_empty() {
        format!("{name}: ok")
    } else {
        report
    })
}

/// Validates the structure of a trace file. When a `run.cfg` sits beside
/// it, the run is repeated to recover the sensors, and every recorded result
/// is compared with a direct evaluation over the file's event structure.
pub fn validate_trace(file: &Path) -> Result<String, CliError> {
    let text = fs::read_to_string(file).map_err(|e| io_err("read", file, e))?;
    let tf = TraceFile::parse(&text)
        .map_err(|e| CliError::Config(format!("{}: {e}", file.display())))?;
    let structure = tf.structure();
    let violations = validate(&structure);
    if !violations.is_empty() {
        let lines: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
        return Err(CliError::Diagnostics(lines.join("\n")));
    }
    let summary = format!(
        "{}: {} events, {} edges, well formed",
        file.display(),
        tf.events.len(),
        tf.edges.len()
    );
    let sidecar = file.parent().unwrap_or(Path::new("")).join(SIDECAR);
    if !sidecar.exists() {
        return Ok(format!("{summary}; no {SIDECAR}, results not checked"));
    }
    let spec = RunSpec {
        config: Some(sidecar.clone()),
        scenario: None,
        seed: None,
        out: PathBuf::new(),
        repeat: 1,
        program: None,
    };
    let (kv, program) = load(&spec)?;
    let s = scenario(&kv, program.as_deref())?;
    let rerun = run_scenario(&s)?;
    let recomputed = rerun.trace.structure;
    if recomputed.events != structure.events || recomputed.edges != structure.edges {
        return Err(CliError::Diagnostics(format!(
            "{}: events or edges differ from the run described by {}",
            file.display(),
            sidecar.display()
        )));
    }
    let program = s.program().map_err(|e| CliError::Config(e.to_string()))?;
    let outcomes = oracle_denotational(&recomputed, &program)
        .map_err(|e| CliError::Diagnostics(e.to_string()))?;
    let bad: Vec<String> = outcomes
        .iter()
        .zip(&tf.summaries)
        .enumerate()
        .filter(|(_, (o, s))| o.summary() != **s)
        .map(|(i, (o, s))| format!("event {i}: recorded `{s}`, evaluates to `{}`", o.summary()))
        .collect();
    if !bad.is_empty() {
        return Err(CliError::Diagnostics(bad.join("\n")));
    }
    Ok(format!(
        "{summary}; all results agree with direct evaluation"
    ))
}
