//! `hitlsim`: evaluate detections, run operator-loop simulations and
//! compute UX metrics from the command line.
//!
//! Exit status is 0 on success, 2 for unreadable or invalid input and 1 for
//! anything else. Each subcommand prints its effective settings to stderr.

use std::fmt;
use std::io::IsTerminal;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hitl_core::io::{self, render_report, render_table, ReportFormat, TableStyle};
use hitl_core::metrics::{trust_score, AdaptationParams, LogMetrics};
use hitl_core::{match_events, postprocess_with, MetricsBundle, SimConfig, SmoothingMode, DEFAULT_IOU_THRESHOLD};

#[derive(Parser)]
#[command(name = "hitlsim", version, about = "Human-in-the-loop anomaly detection toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Smooth per-frame predictions and write event intervals.
    Postprocess {
        #[arg(long)]
        frames: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Mode::Replace)]
        mode: Mode,
    },
    /// Match predicted events against ground truth.
    Eval {
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Run a simulation and write its event log.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed from the config file.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compute operational metrics from an event log.
    Metrics {
        #[arg(long)]
        log: PathBuf,
        #[arg(long, default_value_t = AdaptationParams::default().window_s)]
        window: f64,
        #[arg(long, default_value_t = AdaptationParams::default().cv_threshold)]
        cv: f64,
        #[arg(long, default_value_t = AdaptationParams::default().stable_windows)]
        stable: usize,
        /// Ground-truth intervals; with --pred adds detection metrics.
        #[arg(long, requires = "pred")]
        gt: Option<PathBuf>,
        #[arg(long, requires = "gt")]
        pred: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou: f64,
        #[command(flatten)]
        output: Output,
    },
    /// Score a Likert trust survey.
    Survey {
        #[arg(long)]
        responses: PathBuf,
        #[command(flatten)]
        output: Output,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Replace,
    SetOnly,
}

impl From<Mode> for SmoothingMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Replace => SmoothingMode::Replace,
            Mode::SetOnly => SmoothingMode::SetOnly,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(Args)]
struct Output {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

impl Output {
    fn name(&self) -> &'static str {
        match self.format {
            Format::Json => "json",
            Format::Table => "table",
        }
    }

    fn render(&self, bundle: &MetricsBundle) -> String {
        match self.format {
            Format::Json => render_report(bundle, ReportFormat::Json),
            Format::Table => {
                let styled = std::env::var_os("HITLSIM_NO_COLOR").is_none() && std::io::stdout().is_terminal();
                render_table(bundle, if styled { TableStyle::Bold } else { TableStyle::Plain })
            }
        }
    }
}

enum Failure {
    Input(String),
    Internal(String),
}

impl Failure {
    fn input(e: impl fmt::Display) -> Self {
        Failure::Input(e.to_string())
    }

    fn internal(e: impl fmt::Display) -> Self {
        Failure::Internal(e.to_string())
    }
}

fn effective(pairs: &[(&str, String)]) {
    for (key, value) in pairs {
        eprintln!("# {key} = {value}");
    }
}

fn path(p: &Path) -> String {
    p.display().to_string()
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Postprocess { frames, out, mode } => {
            let mode = SmoothingMode::from(mode);
            effective(&[("frames", path(&frames)), ("out", path(&out)), ("mode", mode.to_string())]);
            let series = io::read_frames(&frames).map_err(Failure::input)?;
            let events = postprocess_with(&series, mode);
            io::write_intervals_file(&out, &events).map_err(Failure::internal)?;
            println!("events: {}", events.len());
        }
        Command::Eval { gt, pred, iou, output } => {
            effective(&[
                ("gt", path(&gt)),
                ("pred", path(&pred)),
                ("iou", iou.to_string()),
                ("format", output.name().into()),
            ]);
            let gt = io::read_intervals(&gt).map_err(Failure::input)?;
            let pred = io::read_intervals(&pred).map_err(Failure::input)?;
            let report = match_events(&gt, &pred, iou).map_err(Failure::input)?;
            print!("{}", output.render(&MetricsBundle { detection: Some(report), ..Default::default() }));
        }
        Command::Simulate { config, out, seed } => {
            let text =
                std::fs::read_to_string(&config).map_err(|e| Failure::Input(format!("{}: {e}", config.display())))?;
            let mut cfg = SimConfig::from_toml(&text).map_err(Failure::input)?;
            if let Some(seed) = seed {
                cfg.seed = seed;
            }
            effective(&[("config", path(&config)), ("out", path(&out))]);
            for line in cfg.to_toml().lines() {
                eprintln!("# {line}");
            }
            let log = hitl_core::run_simulation(&cfg).map_err(Failure::input)?;
            io::write_log_file(&out, &log).map_err(Failure::internal)?;
            println!(
                "events: {}  labels: {}  retrains: {}",
                log.count_kind("detection"),
                log.count_kind("label"),
                log.count_kind("retrain")
            );
        }
        Command::Metrics { log, window, cv, stable, gt, pred, iou, output } => {
            let params = AdaptationParams { window_s: window, cv_threshold: cv, stable_windows: stable };
            let mut shown = vec![
                ("log", path(&log)),
                ("window", window.to_string()),
                ("cv", cv.to_string()),
                ("stable", stable.to_string()),
            ];
            if let (Some(g), Some(p)) = (&gt, &pred) {
                shown.extend([("gt", path(g)), ("pred", path(p)), ("iou", iou.to_string())]);
            }
            shown.push(("format", output.name().into()));
            effective(&shown);
            params.validate().map_err(Failure::input)?;
            let log = io::read_log(&log).map_err(Failure::input)?;
            let mut bundle = MetricsBundle {
                log: Some(LogMetrics::compute(&log, params).map_err(Failure::input)?),
                ..Default::default()
            };
            if let (Some(g), Some(p)) = (gt, pred) {
                let g = io::read_intervals(&g).map_err(Failure::input)?;
                let p = io::read_intervals(&p).map_err(Failure::input)?;
                bundle.detection = Some(match_events(&g, &p, iou).map_err(Failure::input)?);
            }
            print!("{}", output.render(&bundle));
        }
        Command::Survey { responses, output } => {
            effective(&[("responses", path(&responses)), ("format", output.name().into())]);
            let survey = io::read_survey(&responses).map_err(Failure::input)?;
            let bundle = MetricsBundle { trust: Some(trust_score(&survey)), ..Default::default() };
            print!("{}", output.render(&bundle));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(1)
        }
    }
}
