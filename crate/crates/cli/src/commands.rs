use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use darksts::ais::nmea::{read_nmea_log, NmeaStats};
use darksts::ais::{
    build_tracks, load_position_table_with, load_registry, write_position_table, IngestError,
    PositionFix, Track,
};
use darksts::dark::{load_detections, scan_with, write_report};
use darksts::pipeline::run_e2e;
use darksts::scene::{load_scenes, tile_scenes, write_tiles_manifest};
use darksts::sts::{
    detect_sts_with, read_events_csv, write_events_csv, write_events_geojson, StsEvent,
};
use darksts::synth::{export_scenario, generate_scenario};
use serde_json::{json, Value};

use crate::config::{LogLevel, RunConfig};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config file or parameter values.
    Config(String),
    /// A stage failed on its inputs or outputs.
    Run(String),
    /// The end-to-end run disagreed with its planted truth.
    Mismatch(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Run(_) => 1,
            CliError::Mismatch(_) => 2,
        }
    }
}

fn run_err(e: impl std::fmt::Display) -> CliError {
    CliError::Run(e.to_string())
}

pub struct Context {
    pub command: &'static str,
    pub config: RunConfig,
}

impl Context {
    pub fn log(&self, level: LogLevel, event: &str, detail: Value) {
        if level <= self.config.log_level && self.config.log_level != LogLevel::Quiet {
            eprintln!(
                "{}",
                json!({ "level": level.to_string(), "command": self.command, "event": event, "detail": detail })
            );
        }
    }

    /// Effective configuration embedded in every JSON report.
    pub fn run_config(&self) -> Value {
        let mut v = serde_json::to_value(&self.config).expect("config serializes");
        v["command"] = json!(self.command);
        v
    }

    fn out_dir(&self) -> Result<&Path, CliError> {
        let dir = &self.config.paths.out;
        fs::create_dir_all(dir).map_err(|e| CliError::Run(format!("{}: {e}", dir.display())))?;
        fs::write(dir.join("effective_config.toml"), self.config.to_toml()).map_err(run_err)?;
        Ok(dir)
    }

    fn require(&self, path: &Option<PathBuf>, flag: &str) -> Result<PathBuf, CliError> {
        path.clone().ok_or_else(|| {
            CliError::Config(format!(
                "{} needs --{flag} (or paths.{flag} in the config file)",
                self.command
            ))
        })
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Run(format!("{}: {e}", path.display())))
}

fn finish(mut w: BufWriter<File>) -> Result<(), CliError> {
    w.flush().map_err(run_err)
}

/// A file with no header row counts as no fixes.
fn load_fixes(ctx: &Context, path: &Path) -> Result<Vec<PositionFix>, CliError> {
    match load_position_table_with(path, ctx.config.exec()) {
        Ok(t) => {
            if t.rejected > 0 {
                ctx.log(
                    LogLevel::Info,
                    "rejected_rows",
                    json!({ "file": path, "rows": t.rejected }),
                );
            }
            Ok(t.fixes)
        }
        Err(IngestError::EmptyFile) => Ok(Vec::new()),
        Err(e) => Err(CliError::Run(format!("{}: {e}", path.display()))),
    }
}

fn load_tracks(ctx: &Context) -> Result<Vec<Track>, CliError> {
    let positions = ctx.require(&ctx.config.paths.positions, "positions")?;
    let fixes = load_fixes(ctx, &positions)?;
    let registry = match &ctx.config.paths.registry {
        Some(p) => match load_registry(p) {
            Ok(r) => r.records,
            Err(IngestError::EmptyFile) => Vec::new(),
            Err(e) => return Err(CliError::Run(format!("{}: {e}", p.display()))),
        },
        None => Vec::new(),
    };
    let tracks = build_tracks(&fixes, &registry);
    ctx.log(
        LogLevel::Debug,
        "tracks",
        json!({ "fixes": fixes.len(), "tracks": tracks.len() }),
    );
    Ok(tracks)
}

fn nmea_stats_json(s: &NmeaStats) -> Value {
    let unsupported: serde_json::Map<String, Value> = s
        .unsupported
        .iter()
        .map(|(k, v)| (k.to_string(), json!(v)))
        .collect();
    json!({
        "lines": s.lines,
        "messages": s.messages,
        "position_reports": s.position_reports,
        "static_reports": s.static_reports,
        "checksum_errors": s.checksum_errors,
        "truncated": s.truncated,
        "malformed": s.malformed,
        "unsupported": unsupported,
        "untimed": s.untimed,
        "rejected_fixes": s.rejected_fixes,
        "incomplete_groups": s.incomplete_groups,
    })
}

pub fn ingest(ctx: &Context) -> Result<(), CliError> {
    let paths = &ctx.config.paths;
    if paths.nmea.is_empty() && paths.positions.is_none() {
        return Err(CliError::Config(
            "ingest needs --nmea and/or --positions".into(),
        ));
    }
    let mut fixes = Vec::new();
    let mut logs = Vec::new();
    for p in &paths.nmea {
        let f = File::open(p).map_err(|e| CliError::Run(format!("{}: {e}", p.display())))?;
        let ingest = read_nmea_log(BufReader::new(f))
            .map_err(|e| CliError::Run(format!("{}: {e}", p.display())))?;
        logs.push(json!({ "file": p, "fixes": ingest.fixes.len(), "stats": nmea_stats_json(&ingest.stats) }));
        fixes.extend(ingest.fixes);
    }
    if let Some(p) = &paths.positions {
        fixes.extend(load_fixes(ctx, p)?);
    }
    let registry = match &paths.registry {
        Some(p) => {
            load_registry(p)
                .map_err(|e| CliError::Run(format!("{}: {e}", p.display())))?
                .records
        }
        None => Vec::new(),
    };
    let tracks = build_tracks(&fixes, &registry);
    let normalized: Vec<PositionFix> = tracks
        .iter()
        .flat_map(|t| t.fixes.iter().cloned())
        .collect();

    let out = ctx.out_dir()?;
    let mut w = create(&out.join("positions.csv"))?;
    write_position_table(&mut w, &normalized).map_err(run_err)?;
    finish(w)?;

    let per_track: Vec<Value> = tracks
        .iter()
        .map(|t| {
            json!({
                "vessel_id": t.id(),
                "registered": t.registered,
                "fixes": t.fixes.len(),
                "first": t.fixes.first().map(|f| f.t.to_string()),
                "last": t.fixes.last().map(|f| f.t.to_string()),
            })
        })
        .collect();
    let summary = json!({
        "input_fixes": fixes.len(),
        "fixes": normalized.len(),
        "duplicates_dropped": fixes.len() - normalized.len(),
        "tracks": per_track,
        "nmea": logs,
        "run_config": ctx.run_config(),
    });
    write_json(&out.join("tracks_summary.json"), &summary)?;
    ctx.log(
        LogLevel::Info,
        "ingested",
        json!({ "fixes": normalized.len(), "tracks": tracks.len() }),
    );
    Ok(())
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, v).map_err(run_err)?;
    w.write_all(b"\n").map_err(run_err)?;
    finish(w)
}

pub fn detect_sts(ctx: &Context) -> Result<(), CliError> {
    let params = ctx.config.sts_params().map_err(CliError::Config)?;
    let tracks = load_tracks(ctx)?;
    let events = detect_sts_with(&tracks, &params, ctx.config.exec());
    let out = ctx.out_dir()?;
    let mut w = create(&out.join("sts_events.csv"))?;
    write_events_csv(&mut w, &events).map_err(run_err)?;
    finish(w)?;
    let mut w = create(&out.join("sts_events.geojson"))?;
    write_events_geojson(&mut w, &events, Some(&ctx.run_config())).map_err(run_err)?;
    finish(w)?;
    ctx.log(
        LogLevel::Info,
        "detected",
        json!({ "tracks": tracks.len(), "events": events.len() }),
    );
    Ok(())
}

pub fn make_tiles(ctx: &Context) -> Result<(), CliError> {
    let params = ctx.config.tile_params().map_err(CliError::Config)?;
    let scenes_path = ctx.require(&ctx.config.paths.scenes, "scenes")?;
    let tracks = load_tracks(ctx)?;
    let scenes = load_scenes(&scenes_path)
        .map_err(|e| CliError::Run(format!("{}: {e}", scenes_path.display())))?;
    let events: Vec<StsEvent> = match &ctx.config.paths.events {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::Run(format!("{}: {e}", p.display())))?;
            read_events_csv(BufReader::new(f))
                .map_err(|e| CliError::Run(format!("{}: {e}", p.display())))?
        }
        None => {
            let sts = ctx.config.sts_params().map_err(CliError::Config)?;
            detect_sts_with(&tracks, &sts, ctx.config.exec())
        }
    };
    let tiles = tile_scenes(
        &scenes,
        &tracks,
        &events,
        &params,
        ctx.config.tiles.cloud_threshold,
        ctx.config.exec(),
    );
    let out = ctx.out_dir()?;
    let mut w = create(&out.join("tiles_manifest.csv"))?;
    write_tiles_manifest(&mut w, &tiles).map_err(run_err)?;
    finish(w)?;
    ctx.log(
        LogLevel::Info,
        "tiled",
        json!({ "scenes": scenes.len(), "tiles": tiles.len() }),
    );
    Ok(())
}

pub fn dark_scan(ctx: &Context) -> Result<(), CliError> {
    let params = ctx.config.audit_params().map_err(CliError::Config)?;
    let scenes_path = ctx.require(&ctx.config.paths.scenes, "scenes")?;
    let det_path = ctx.require(&ctx.config.paths.detections, "detections")?;
    let tracks = load_tracks(ctx)?;
    let scenes = load_scenes(&scenes_path)
        .map_err(|e| CliError::Run(format!("{}: {e}", scenes_path.display())))?;
    let detections = load_detections(&det_path, &scenes)
        .map_err(|e| CliError::Run(format!("{}: {e}", det_path.display())))?;
    let report = scan_with(&detections, &tracks, &params, ctx.config.exec());
    let out = ctx.out_dir()?;
    write_report(out, &report, Some(&ctx.run_config())).map_err(run_err)?;
    for n in &report.notes {
        ctx.log(LogLevel::Info, "note", json!(n));
    }
    ctx.log(
        LogLevel::Info,
        "scanned",
        json!({ "detections": report.total_detections, "sts": report.sts_detections, "dark": report.dark_count }),
    );
    Ok(())
}

pub fn synth(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.synth_config().map_err(CliError::Config)?;
    let scenario = generate_scenario(ctx.config.synth.seed, &cfg)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let out = ctx.out_dir()?;
    export_scenario(&scenario, out).map_err(run_err)?;
    ctx.log(
        LogLevel::Info,
        "generated",
        json!({ "fixes": scenario.fixes.len(), "events": scenario.truth.len(), "dark": scenario.dark_count() }),
    );
    Ok(())
}

pub fn e2e(ctx: &Context) -> Result<(), CliError> {
    let cfg = ctx.config.e2e_config().map_err(CliError::Config)?;
    let out = ctx.out_dir()?;
    let outcome =
        run_e2e(ctx.config.synth.seed, &cfg, out, Some(&ctx.run_config())).map_err(run_err)?;
    let summary = json!({
        "seed": ctx.config.synth.seed,
        "planted_sts": outcome.scenario.truth.len(),
        "detected_sts": outcome.events.len(),
        "tiles": outcome.tiles.len(),
        "planted_dark": outcome.planted_dark,
        "dark_count": outcome.report.dark_count,
        "passed": outcome.passed(),
        "mismatches": outcome.mismatches,
    });
    println!("{summary}");
    if outcome.passed() {
        Ok(())
    } else {
        Err(CliError::Mismatch(outcome.mismatches))
    }
}
