//! `sentinel` — run the event-recognition pipeline over a scripted scenario
//! or a recorded detection stream, generate scenarios, and evaluate event
//! logs against ground truth.
//!
//! Exit codes: 0 success, 1 input error, 2 config error, 3 evaluation gate
//! failure.

use clap::{Args, Parser, Subcommand};
use sentinel_core::config::Config;
use sentinel_core::eval::{match_events, MatchReport, ReportKind};
use sentinel_core::events::{read_event_log, write_event_log, SecurityEvent};
use sentinel_core::perception::read_detection_stream;
use sentinel_core::pipeline::Pipeline;
use sentinel_core::scenario::{generate_random, GenParams, GtParams, Scenario};
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(
    name = "sentinel",
    version,
    about = "Security-event recognition for surveillance streams"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the pipeline over a scenario or a recorded detection stream.
    Run(RunArgs),
    /// Generate a random scripted scenario.
    Gen(GenArgs),
    /// Match an event log against ground truth and print the report table.
    Eval(EvalArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "detections")]
    scenario: Option<PathBuf>,
    /// Recorded detection stream (JSON lines); frames are synthesized.
    #[arg(long)]
    detections: Option<PathBuf>,
    /// Config file (TOML); falls back to $SENTINEL_CONFIG, then defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed for the detector noise model.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Event log output path (JSON lines).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the scenario's ground-truth event log here.
    #[arg(long)]
    gt_out: Option<PathBuf>,
    /// Worker threads for appearance verification.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Frame rate assumed for detection streams.
    #[arg(long, default_value_t = 25)]
    fps: u32,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    /// Output path; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    persons: usize,
    #[arg(long, default_value_t = 2)]
    objects: usize,
    /// Probability a deposited object gets stolen.
    #[arg(long, default_value_t = 0.3)]
    theft: f64,
    /// Probability a non-stolen object is relocated by a stranger.
    #[arg(long, default_value_t = 0.2)]
    relocate: f64,
}

#[derive(Args)]
struct EvalArgs {
    /// Predicted event log (JSON lines).
    #[arg(long)]
    events: PathBuf,
    /// Ground-truth event log (JSON lines).
    #[arg(long)]
    gt: PathBuf,
    /// Matching tolerance in seconds.
    #[arg(long, default_value_t = 5.0)]
    tolerance: f64,
    /// Exit nonzero if any kind's recall falls below this gate.
    #[arg(long)]
    min_recall: Option<f64>,
    /// Write the machine-readable report here.
    #[arg(long)]
    json: Option<PathBuf>,
}

enum AppError {
    Input(String),
    Config(String),
    Gate(String),
}

impl AppError {
    fn code(&self) -> u8 {
        match self {
            AppError::Input(_) => 1,
            AppError::Config(_) => 2,
            AppError::Gate(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            AppError::Input(m) | AppError::Config(m) | AppError::Gate(m) => m,
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> AppError {
    AppError::Input(e.to_string())
}

fn load_config(flag: &Option<PathBuf>) -> Result<Config, AppError> {
    let path = flag
        .clone()
        .or_else(|| std::env::var_os("SENTINEL_CONFIG").map(PathBuf::from));
    match path {
        Some(p) => Config::from_file(&p).map_err(|e| AppError::Config(e.to_string())),
        None => Ok(Config::default()),
    }
}

fn write_log(path: &Path, events: &[SecurityEvent]) -> Result<(), AppError> {
    let file = std::fs::File::create(path).map_err(input_err)?;
    write_event_log(std::io::BufWriter::new(file), events).map_err(input_err)
}

fn cmd_run(args: RunArgs) -> Result<(), AppError> {
    let cfg = load_config(&args.config)?;
    let threads = args.threads.max(1);

    let events = if let Some(path) = &args.scenario {
        let scenario = Arc::new(Scenario::from_file(path).map_err(input_err)?);
        let (mut pipeline, source) =
            Pipeline::for_scenario(scenario.clone(), cfg.clone(), args.seed, threads);
        let events = pipeline.run(&source).map_err(input_err)?;
        if let Some(gt_path) = &args.gt_out {
            let params = GtParams::from_config(&cfg, scenario.width, scenario.height, scenario.fps);
            write_log(gt_path, &scenario.ground_truth_events(&params))?;
        }
        events
    } else if let Some(path) = &args.detections {
        let file = std::fs::File::open(path).map_err(input_err)?;
        let records = read_detection_stream(BufReader::new(file)).map_err(input_err)?;
        if records.is_empty() {
            return Err(AppError::Input(format!(
                "{}: detection stream is empty",
                path.display()
            )));
        }
        let (mut pipeline, source) =
            Pipeline::for_detections(&records, cfg.clone(), args.fps, threads);
        pipeline.run(&source).map_err(input_err)?
    } else {
        return Err(AppError::Input(
            "one of --scenario or --detections is required".into(),
        ));
    };

    for e in &events {
        println!(
            "frame {:>6} t={:>8.2}s  {:<24} object={:<12} person={:<12} {}",
            e.frame,
            e.time_s,
            e.kind.to_string(),
            e.object.as_deref().unwrap_or("-"),
            e.person.as_deref().unwrap_or("-"),
            e.detail
        );
    }
    eprintln!("{} event(s) recognized", events.len());
    if let Some(out) = &args.out {
        write_log(out, &events)?;
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), AppError> {
    let params = GenParams {
        n_persons: args.persons,
        n_objects: args.objects,
        p_theft: args.theft,
        p_relocate: args.relocate,
    };
    let scenario = generate_random(args.seed, &params).map_err(input_err)?;
    let toml = scenario.to_toml_string();
    match &args.out {
        Some(path) => std::fs::write(path, toml).map_err(input_err)?,
        None => print!("{toml}"),
    }
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> Result<(), AppError> {
    let read = |path: &Path| -> Result<Vec<SecurityEvent>, AppError> {
        let file = std::fs::File::open(path)
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))?;
        read_event_log(BufReader::new(file))
            .map_err(|e| AppError::Input(format!("{}: {e}", path.display())))
    };
    let predicted = read(&args.events)?;
    let gt = read(&args.gt)?;
    let scene = args
        .events
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "run".into());

    let mut report = MatchReport::default();
    report.push(match_events(&predicted, &gt, args.tolerance, &scene));
    print!("{}", report.render());
    if let Some(path) = &args.json {
        std::fs::write(path, report.to_json()).map_err(input_err)?;
    }

    if let Some(gate) = args.min_recall {
        let sums = report.sums();
        for (kind, counts) in &sums {
            if counts.gt > 0 && counts.recall() < gate {
                return Err(AppError::Gate(format!(
                    "{} recall {:.3} below the --min-recall gate {gate}",
                    ReportKind::title(kind),
                    counts.recall()
                )));
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Gen(args) => cmd_gen(args),
        Cmd::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
