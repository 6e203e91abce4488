//! `darksts`: command-line front end for the transfer detection pipeline.
//!
//! Every subcommand reads an optional TOML config (`--config`), applies
//! flag overrides on top, writes `effective_config.toml` into its output
//! directory and embeds the same values in its JSON reports. Failures are
//! reported as one JSON object per line on stderr.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use commands::{CliError, Context};
use config::{LogLevel, RunConfig};

#[derive(Parser)]
#[command(
    name = "darksts",
    version,
    about = "Ship-to-ship transfer detection and dark-transfer audit"
)]
struct Cli {
    #[command(flatten)]
    knobs: Knobs,
    #[command(subcommand)]
    command: Command,
}

/// Settings accepted by every subcommand; each overrides the config file.
#[derive(Args)]
struct Knobs {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads; 1 runs sequentially.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true, value_name = "quiet|info|debug")]
    log_level: Option<LogLevel>,

    /// Largest pair separation, meters (inclusive).
    #[arg(long, global = true, help_heading = "Transfer thresholds")]
    max_distance_m: Option<f64>,
    /// Shortest qualifying event, seconds (inclusive).
    #[arg(long, global = true, help_heading = "Transfer thresholds")]
    min_duration_s: Option<i64>,
    /// Speed both vessels must stay below, knots (strict).
    #[arg(long, global = true, help_heading = "Transfer thresholds")]
    max_sog_kn: Option<f64>,
    #[arg(long, global = true, help_heading = "Transfer thresholds")]
    resample_step_s: Option<i64>,
    /// Longer reporting gaps split a track.
    #[arg(long, global = true, help_heading = "Transfer thresholds")]
    max_gap_s: Option<i64>,

    /// Audit radius around a detection, meters.
    #[arg(long, global = true, help_heading = "Dark audit")]
    radius_m: Option<f64>,
    /// Half-width of the audit time window, hours.
    #[arg(long, global = true, help_heading = "Dark audit")]
    window_hours: Option<f64>,
    /// Fewer distinct AIS identities than this makes a detection dark.
    #[arg(long, global = true, help_heading = "Dark audit")]
    min_identities: Option<usize>,

    /// Meters from tile center to edge.
    #[arg(long, global = true, help_heading = "Tiles")]
    tile_buffer_m: Option<f64>,
    /// Largest |fix time - acquisition time| for a scene match, seconds.
    #[arg(long, global = true, help_heading = "Tiles")]
    match_window_s: Option<i64>,
    /// Scenes with a larger cloud fraction are skipped.
    #[arg(long, global = true, help_heading = "Tiles")]
    cloud_threshold: Option<f64>,

    #[arg(long, global = true, help_heading = "Synthetic scenarios")]
    seed: Option<u64>,
    #[arg(long, global = true, help_heading = "Synthetic scenarios")]
    vessels: Option<usize>,
    #[arg(long, global = true, help_heading = "Synthetic scenarios")]
    sts_events: Option<usize>,
    #[arg(long, global = true, help_heading = "Synthetic scenarios")]
    dark_fraction: Option<f64>,
    #[arg(long, global = true, help_heading = "Synthetic scenarios")]
    duration_hours: Option<f64>,

    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrackInputs {
    /// Position CSV: vessel_id,timestamp,lat,lon,sog[,draught].
    #[arg(long)]
    positions: Option<PathBuf>,
    /// Vessel registry CSV.
    #[arg(long)]
    registry: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Normalize NMEA logs and/or position CSVs into positions.csv plus a track summary.
    Ingest {
        /// Timestamped AIVDM log; repeatable.
        #[arg(long)]
        nmea: Vec<PathBuf>,
        #[command(flatten)]
        inputs: TrackInputs,
    },
    /// Detect transfers; writes sts_events.csv and sts_events.geojson.
    DetectSts {
        #[command(flatten)]
        inputs: TrackInputs,
    },
    /// Cut classifier tiles; writes tiles_manifest.csv.
    MakeTiles {
        #[command(flatten)]
        inputs: TrackInputs,
        #[arg(long)]
        scenes: Option<PathBuf>,
        /// Transfer events CSV; detected from the tracks when absent.
        #[arg(long)]
        events: Option<PathBuf>,
    },
    /// Audit transfer detections; writes dark_report.geojson and dark_summary.json.
    DarkScan {
        #[command(flatten)]
        inputs: TrackInputs,
        #[arg(long)]
        scenes: Option<PathBuf>,
        #[arg(long)]
        detections: Option<PathBuf>,
    },
    /// Generate a synthetic scenario directory.
    Synth,
    /// Generate, run every stage and compare with the planted truth.
    E2e,
}

fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn set_path(slot: &mut Option<PathBuf>, flag: Option<PathBuf>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn effective_config(k: Knobs, command: &Command) -> Result<RunConfig, CliError> {
    let mut c = match &k.config {
        Some(p) => RunConfig::load(p).map_err(CliError::Config)?,
        None => RunConfig::default(),
    };
    set(&mut c.workers, k.workers);
    set(&mut c.log_level, k.log_level);
    set(&mut c.sts.max_distance_m, k.max_distance_m);
    set(&mut c.sts.min_duration_s, k.min_duration_s);
    set(&mut c.sts.max_sog_kn, k.max_sog_kn);
    set(&mut c.sts.resample_step_s, k.resample_step_s);
    set(&mut c.sts.max_gap_s, k.max_gap_s);
    set(&mut c.audit.radius_m, k.radius_m);
    set(&mut c.audit.window_hours, k.window_hours);
    set(&mut c.audit.min_identities, k.min_identities);
    set(&mut c.tiles.buffer_m, k.tile_buffer_m);
    set(&mut c.tiles.match_window_s, k.match_window_s);
    set(&mut c.tiles.cloud_threshold, k.cloud_threshold);
    set(&mut c.synth.seed, k.seed);
    set(&mut c.synth.vessels, k.vessels);
    set(&mut c.synth.sts_events, k.sts_events);
    set(&mut c.synth.dark_fraction, k.dark_fraction);
    set(&mut c.synth.duration_hours, k.duration_hours);
    set(&mut c.paths.out, k.out);

    let p = &mut c.paths;
    match command {
        Command::Ingest { nmea, inputs } => {
            if !nmea.is_empty() {
                p.nmea = nmea.clone();
            }
            set_path(&mut p.positions, inputs.positions.clone());
            set_path(&mut p.registry, inputs.registry.clone());
        }
        Command::DetectSts { inputs } => {
            set_path(&mut p.positions, inputs.positions.clone());
            set_path(&mut p.registry, inputs.registry.clone());
        }
        Command::MakeTiles {
            inputs,
            scenes,
            events,
        } => {
            set_path(&mut p.positions, inputs.positions.clone());
            set_path(&mut p.registry, inputs.registry.clone());
            set_path(&mut p.scenes, scenes.clone());
            set_path(&mut p.events, events.clone());
        }
        Command::DarkScan {
            inputs,
            scenes,
            detections,
        } => {
            set_path(&mut p.positions, inputs.positions.clone());
            set_path(&mut p.registry, inputs.registry.clone());
            set_path(&mut p.scenes, scenes.clone());
            set_path(&mut p.detections, detections.clone());
        }
        Command::Synth | Command::E2e => {}
    }
    if c.workers == 0 {
        return Err(CliError::Config("workers must be at least 1".into()));
    }
    Ok(c)
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Ingest { .. } => "ingest",
        Command::DetectSts { .. } => "detect-sts",
        Command::MakeTiles { .. } => "make-tiles",
        Command::DarkScan { .. } => "dark-scan",
        Command::Synth => "synth",
        Command::E2e => "e2e",
    }
}

#[cfg(feature = "parallel")]
fn init_workers(n: usize) -> Result<(), CliError> {
    if n > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    Ok(())
}

#[cfg(not(feature = "parallel"))]
fn init_workers(_n: usize) -> Result<(), CliError> {
    Ok(())
}

fn run(cli: Cli) -> Result<(), (&'static str, CliError)> {
    let command = name(&cli.command);
    let config = effective_config(cli.knobs, &cli.command).map_err(|e| (command, e))?;
    init_workers(config.workers).map_err(|e| (command, e))?;
    let ctx = Context { command, config };
    match cli.command {
        Command::Ingest { .. } => commands::ingest(&ctx),
        Command::DetectSts { .. } => commands::detect_sts(&ctx),
        Command::MakeTiles { .. } => commands::make_tiles(&ctx),
        Command::DarkScan { .. } => commands::dark_scan(&ctx),
        Command::Synth => commands::synth(&ctx),
        Command::E2e => commands::e2e(&ctx),
    }
    .map_err(|e| (command, e))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if e.use_stderr() => {
            eprintln!(
                "{}",
                json!({ "error": "usage", "message": e.to_string().trim_end() })
            );
            return ExitCode::from(1);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err((command, e)) => {
            let code = e.exit_code();
            match e {
                CliError::Config(m) => eprintln!(
                    "{}",
                    json!({ "error": "config", "command": command, "message": m })
                ),
                CliError::Run(m) => eprintln!(
                    "{}",
                    json!({ "error": "run", "command": command, "message": m })
                ),
                CliError::Mismatch(list) => {
                    for m in list {
                        eprintln!(
                            "{}",
                            json!({ "error": "e2e_mismatch", "command": command, "message": m })
                        );
                    }
                }
            }
            ExitCode::from(code as u8)
        }
    }
}
