use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use pco_core::topology::generators;
use pco_core::harness::{
    emit_results, head_bounds, preset, run_experiment, sched_dump_jsonl, summary_json, sync_trace_jsonl,
    ExperimentKind, ExperimentSpec, HarnessError, PRESET_NAMES,
};

#[derive(Parser)]
#[command(name = "pco", version, about = "Pulse-coupled oscillator synchronization and scheduling experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synchronization trials (kinds `sync`, `sync-delay`).
    Sync(Common),
    /// Scheduling trials (kinds `sched`, `histogram-f`).
    Sched(Common),
    /// Eigenvalue report of the largest clique (kind `spectral`).
    Spectral(Common),
    /// Network-size sweeps and histograms (kinds `montecarlo-line`,
    /// `montecarlo-star`, `histogram-f`).
    Montecarlo(Common),
    /// Best and worst head-node delay bounds of the configured topology.
    Bounds(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file in TOML.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in experiment.
    #[arg(long)]
    preset: Option<String>,
    /// Base seed; trial k uses seed + k.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Directory for per-trial CSV files and summary.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the event trace (sync) or per-frame timers (sched) of the
    /// first trial as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Topology(_) => Failure::Config(e.to_string()),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn load(args: &Common) -> Result<ExperimentSpec, Failure> {
    let mut spec = match (&args.config, &args.preset) {
        (Some(path), _) => ExperimentSpec::from_file(path)?,
        (None, Some(name)) => preset(name).ok_or_else(|| {
            Failure::Config(format!("unknown preset {name}; available: {}", PRESET_NAMES.join(", ")))
        })?,
        (None, None) => return Err(Failure::Config("either --config or --preset is required".into())),
    };
    if let Some(seed) = args.seed {
        spec.seeds.base = seed;
    }
    if let Some(trials) = args.trials {
        spec.seeds.trials = trials;
    }
    spec.validate()?;
    Ok(spec)
}

fn kind_name(kind: ExperimentKind) -> String {
    serde_json::to_string(&kind).unwrap_or_default().trim_matches('"').to_string()
}

fn expect_kind(spec: &ExperimentSpec, command: &str, allowed: &[ExperimentKind]) -> Result<(), Failure> {
    if allowed.contains(&spec.kind) {
        Ok(())
    } else {
        Err(Failure::Config(format!("kind {} cannot run under `{command}`", kind_name(spec.kind))))
    }
}

fn run(cli: Cli) -> Result<bool, Failure> {
    use ExperimentKind::*;
    let (args, name, allowed): (&Common, &str, &[ExperimentKind]) = match &cli.command {
        Command::Sync(a) => (a, "sync", &[Sync, SyncDelay]),
        Command::Sched(a) => (a, "sched", &[Sched, HistogramF]),
        Command::Spectral(a) => (a, "spectral", &[Spectral]),
        Command::Montecarlo(a) => (a, "montecarlo", &[MontecarloLine, MontecarloStar, HistogramF]),
        Command::Bounds(a) => return bounds(a).map(|()| true),
    };
    let spec = load(args)?;
    expect_kind(&spec, name, allowed)?;
    if let Some(path) = &args.trace {
        let text = match spec.kind {
            Sync | SyncDelay => sync_trace_jsonl(&spec, spec.seeds.base)?,
            Sched | HistogramF => sched_dump_jsonl(&spec, spec.seeds.base)?,
            _ => return Err(Failure::Config(format!("--trace is not available for kind {}", kind_name(spec.kind)))),
        };
        fs::write(path, text).map_err(|e| Failure::Run(format!("{}: {e}", path.display())))?;
    }
    let output = run_experiment(&spec)?;
    if let Some(dir) = args.out.as_ref().or(spec.output.dir.as_ref()) {
        emit_results(&output, dir)?;
    }
    print!("{}", summary_json(&output)?);
    let failed = output.failed_trials();
    if failed > 0 {
        eprintln!("{failed} trial(s) failed; see the failures list in the summary");
    }
    Ok(failed == 0)
}

fn bounds(args: &Common) -> Result<(), Failure> {
    #[derive(Serialize)]
    struct Report {
        nodes: usize,
        per_node: Vec<f64>,
        best: f64,
        worst: f64,
    }
    let spec = load(args)?;
    let tau_max = spec.montecarlo.tau_max;
    let topologies = match spec.kind {
        ExperimentKind::MontecarloLine => spec
            .montecarlo
            .sizes
            .iter()
            .map(|&n| generators::line(n, tau_max / (n - 1) as f64))
            .collect::<Result<Vec<_>, _>>()
            .map_err(HarnessError::from)?,
        ExperimentKind::MontecarloStar => spec
            .montecarlo
            .sizes
            .iter()
            .map(|&n| generators::star(n - 1, tau_max))
            .collect::<Result<Vec<_>, _>>()
            .map_err(HarnessError::from)?,
        _ => vec![spec.topology()?],
    };
    let reports: Vec<Report> = topologies
        .iter()
        .map(|topo| {
            let b = head_bounds(topo);
            Report {
                nodes: topo.node_count(),
                per_node: b.per_node,
                best: b.best,
                worst: b.worst,
            }
        })
        .collect();
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(&reports)
    }
    .map_err(|e| Failure::Run(e.to_string()))?
        + "\n";
    if let Some(dir) = &args.out {
        fs::create_dir_all(dir).map_err(|e| Failure::Run(e.to_string()))?;
        fs::write(dir.join("bounds.json"), &text).map_err(|e| Failure::Run(e.to_string()))?;
    }
    print!("{text}");
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
