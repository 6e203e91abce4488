//! Run configuration: TOML file values, then command-line overrides.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use darksts::dark::{AuditParams, DEFAULT_WINDOW_S};
use darksts::pipeline::E2eConfig;
use darksts::scene::{
    TileParams, DEFAULT_CLOUD_THRESHOLD, DEFAULT_TILE_BUFFER_M, MAX_MATCH_DELTA_S,
};
use darksts::sts::StsParams;
use darksts::synth::SynthConfig;
use darksts::Exec;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LogLevel {
    Quiet,
    #[default]
    Info,
    Debug,
}

impl FromStr for LogLevel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "quiet" => Ok(Self::Quiet),
            "info" => Ok(Self::Info),
            "debug" => Ok(Self::Debug),
            _ => Err(format!("unknown log level {s:?} (quiet, info, debug)")),
        }
    }
}

impl fmt::Display for LogLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Quiet => "quiet",
            Self::Info => "info",
            Self::Debug => "debug",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StsSection {
    pub max_distance_m: f64,
    pub min_duration_s: i64,
    pub max_sog_kn: f64,
    pub resample_step_s: i64,
    pub max_gap_s: i64,
}

impl Default for StsSection {
    fn default() -> Self {
        let p = StsParams::default();
        Self {
            max_distance_m: p.max_distance_m,
            min_duration_s: p.min_duration_s,
            max_sog_kn: p.max_sog_kn,
            resample_step_s: p.resample_step_s,
            max_gap_s: p.max_gap_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AuditSection {
    pub radius_m: f64,
    /// Half-width of the audit window.
    pub window_hours: f64,
    pub min_identities: usize,
}

impl Default for AuditSection {
    fn default() -> Self {
        let p = AuditParams::default();
        Self {
            radius_m: p.radius_m,
            window_hours: DEFAULT_WINDOW_S as f64 / 3_600.0,
            min_identities: p.min_identities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TileSection {
    pub buffer_m: f64,
    pub match_window_s: i64,
    pub cloud_threshold: f64,
}

impl Default for TileSection {
    fn default() -> Self {
        Self {
            buffer_m: DEFAULT_TILE_BUFFER_M,
            match_window_s: MAX_MATCH_DELTA_S,
            cloud_threshold: DEFAULT_CLOUD_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSection {
    pub seed: u64,
    pub vessels: usize,
    pub sts_events: usize,
    pub dark_fraction: f64,
    pub duration_hours: f64,
    pub report_interval_s: i64,
}

impl Default for SynthSection {
    fn default() -> Self {
        let e = E2eConfig::default().synth;
        Self {
            seed: 0,
            vessels: e.vessels,
            sts_events: e.sts_events,
            dark_fraction: e.dark_fraction,
            duration_hours: e.duration_s as f64 / 3_600.0,
            report_interval_s: e.report_interval_s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathSection {
    pub nmea: Vec<PathBuf>,
    pub positions: Option<PathBuf>,
    pub registry: Option<PathBuf>,
    pub scenes: Option<PathBuf>,
    pub detections: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub out: PathBuf,
}

impl Default for PathSection {
    fn default() -> Self {
        Self {
            nmea: Vec::new(),
            positions: None,
            registry: None,
            scenes: None,
            detections: None,
            events: None,
            out: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub workers: usize,
    pub log_level: LogLevel,
    pub sts: StsSection,
    pub audit: AuditSection,
    pub tiles: TileSection,
    pub synth: SynthSection,
    pub paths: PathSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            workers: 1,
            log_level: LogLevel::default(),
            sts: StsSection::default(),
            audit: AuditSection::default(),
            tiles: TileSection::default(),
            synth: SynthSection::default(),
            paths: PathSection::default(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn exec(&self) -> Exec {
        Exec::from_workers(self.workers)
    }

    pub fn sts_params(&self) -> Result<StsParams, String> {
        let s = &self.sts;
        let p = StsParams {
            max_distance_m: s.max_distance_m,
            min_duration_s: s.min_duration_s,
            max_sog_kn: s.max_sog_kn,
            resample_step_s: s.resample_step_s,
            max_gap_s: s.max_gap_s,
        };
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }

    pub fn audit_params(&self) -> Result<AuditParams, String> {
        let h = self.audit.window_hours;
        if !(h > 0.0 && h.is_finite()) {
            return Err(format!("window_hours must be positive, got {h}"));
        }
        let p = AuditParams {
            radius_m: self.audit.radius_m,
            window_s: (h * 3_600.0).round() as i64,
            min_identities: self.audit.min_identities,
        };
        p.validate().map_err(|e| e.to_string())?;
        Ok(p)
    }

    pub fn tile_params(&self) -> Result<TileParams, String> {
        let t = &self.tiles;
        if !(t.buffer_m > 0.0 && t.buffer_m.is_finite()) {
            return Err(format!(
                "tile buffer_m must be positive, got {}",
                t.buffer_m
            ));
        }
        if t.match_window_s < 0 {
            return Err(format!(
                "match_window_s must not be negative, got {}",
                t.match_window_s
            ));
        }
        if !(0.0..=1.0).contains(&t.cloud_threshold) {
            return Err(format!(
                "cloud_threshold must lie in [0, 1], got {}",
                t.cloud_threshold
            ));
        }
        Ok(TileParams {
            buffer_m: t.buffer_m,
            match_window_s: t.match_window_s,
        })
    }

    pub fn synth_config(&self) -> Result<SynthConfig, String> {
        let s = &self.synth;
        let h = s.duration_hours;
        if !(h > 0.0 && h.is_finite()) {
            return Err(format!("duration_hours must be positive, got {h}"));
        }
        let cfg = SynthConfig {
            vessels: s.vessels,
            sts_events: s.sts_events,
            dark_fraction: s.dark_fraction,
            duration_s: (h * 3_600.0).round() as i64,
            report_interval_s: s.report_interval_s,
            sts: self.sts_params()?,
            ..Default::default()
        };
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }

    pub fn e2e_config(&self) -> Result<E2eConfig, String> {
        Ok(E2eConfig {
            synth: self.synth_config()?,
            sts: self.sts_params()?,
            audit: self.audit_params()?,
            tiles: self.tile_params()?,
            cloud_threshold: self.tiles.cloud_threshold,
            exec: self.exec(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.sts.max_distance_m, 500.0);
        assert_eq!(c.sts.min_duration_s, 7_200);
        assert_eq!(c.sts.max_sog_kn, 1.0);
        assert_eq!(c.tiles.match_window_s, 7_200);
        assert_eq!(c.audit.window_hours, 12.0);
        assert_eq!(c.tiles.cloud_threshold, 0.7);
        assert_eq!(c.audit_params().unwrap().window_s, 43_200);
    }

    #[test]
    fn toml_round_trip() {
        let mut c = RunConfig::default();
        c.paths.positions = Some("p.csv".into());
        c.audit.window_hours = 24.0;
        let back: RunConfig = toml::from_str(&c.to_toml()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c: RunConfig = toml::from_str("[audit]\nradius_m = 800.0\n").unwrap();
        assert_eq!(c.audit.radius_m, 800.0);
        assert_eq!(c.audit.min_identities, 2);
        assert_eq!(c.sts, StsSection::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<RunConfig>("[sts]\nmax_distance = 5.0\n").is_err());
    }

    #[test]
    fn invalid_values() {
        let mut c = RunConfig::default();
        c.audit.window_hours = 0.0;
        assert!(c.audit_params().is_err());
        let mut c = RunConfig::default();
        c.tiles.cloud_threshold = 1.5;
        assert!(c.tile_params().is_err());
        let mut c = RunConfig::default();
        c.sts.max_gap_s = 9_000;
        assert!(c.sts_params().is_err());
    }
}
