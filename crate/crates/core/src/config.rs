//! Runtime configuration: every threshold the pipeline uses, with defaults,
//! TOML loading, and range validation. Unknown keys are rejected.

use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundCfg {
    /// Long-term model samples one frame out of every `long_interval`.
    pub long_interval: u64,
    /// Short-term model cadence.
    pub short_interval: u64,
    /// Samples kept per pixel in each model.
    pub samples: usize,
    /// Euclidean RGB distance under which a sample matches the current pixel.
    pub match_radius: f64,
    /// A pixel is background once at least this many samples match it.
    pub min_consensus: usize,
    /// Fraction of a box that must be foreground to count as "present".
    pub coverage_threshold: f64,
}

impl Default for BackgroundCfg {
    fn default() -> Self {
        BackgroundCfg {
            long_interval: 50,
            short_interval: 3,
            samples: 20,
            match_radius: 20.0,
            // Full-buffer consensus: a color becomes background only once the
            // whole sample buffer agrees, i.e. after a complete model refresh.
            min_consensus: 20,
            coverage_threshold: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerceptionCfg {
    /// Dilation margin around static-region components before detection.
    pub roi_margin: u32,
    /// A detection overlapping an existing BO/SO above this IoU is a duplicate.
    pub dedup_iou: f64,
    /// Consecutive sightings before a static-object candidate is registered
    /// (suppresses one-frame spurious detections).
    pub so_confirm: u32,
    /// Closed label set accepted from detectors.
    pub categories: Vec<String>,
}

impl Default for PerceptionCfg {
    fn default() -> Self {
        PerceptionCfg {
            roi_margin: 8,
            dedup_iou: 0.3,
            so_confirm: 3,
            categories: ["person", "bag", "backpack", "suitcase", "laptop", "box"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerCfg {
    /// Minimum IoU for a detection-to-track match.
    pub iou_min: f64,
    /// Frames a track survives without a matched detection.
    pub max_age: u32,
    /// Consecutive hits before a track is confirmed.
    pub min_hits: u32,
}

impl Default for TrackerCfg {
    fn default() -> Self {
        TrackerCfg {
            iou_min: 0.3,
            max_age: 25,
            min_hits: 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentityCfg {
    /// Verification score above which two sample sets are the same identity.
    pub threshold: f64,
    /// Appearance crops sampled per person.
    pub samples: usize,
    /// "histogram" or "oracle".
    pub embedder: String,
}

impl Default for IdentityCfg {
    fn default() -> Self {
        IdentityCfg {
            threshold: 0.5,
            samples: 20,
            embedder: "histogram".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OwnershipCfg {
    /// Trace window (seconds) considered when assigning an owner.
    pub window_s: f64,
    /// Continuous owner absence (seconds) after which an object is abandoned.
    pub abandon_timeout_s: f64,
    /// Edge band width as a fraction of min(frame width, height).
    pub edge_margin_pct: f64,
    /// Alarm on objects that never got an owner, after the same timeout.
    pub alarm_ownerless: bool,
}

impl Default for OwnershipCfg {
    fn default() -> Self {
        OwnershipCfg {
            window_s: 2.0,
            abandon_timeout_s: 30.0,
            edge_margin_pct: 0.05,
            alarm_ownerless: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventsCfg {
    /// Short-term foreground coverage of a box that triggers the move check.
    pub tau_move: f64,
    /// A same-category redetection above this IoU means the object stayed put.
    pub iou_keep: f64,
    /// Re-run owner verification once the candidate trace grew this much.
    pub reverify_growth: usize,
    /// Consecutive triggered frames before a move is believed (detector-miss
    /// debounce).
    pub move_confirm: u32,
    /// Exit regions as [x, y, w, h] rectangles; the edge band always counts.
    pub exit_regions: Vec<[i32; 4]>,
}

impl Default for EventsCfg {
    fn default() -> Self {
        EventsCfg {
            tau_move: 0.3,
            iou_keep: 0.5,
            reverify_growth: 5,
            move_confirm: 3,
            exit_regions: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectorCfg {
    /// Uniform box jitter in pixels applied by the mock detector.
    pub jitter_px: u32,
    /// Probability a ground-truth detection is dropped.
    pub miss_rate: f64,
    /// Probability a spurious detection is added per detector call.
    pub fp_rate: f64,
}

impl Default for DetectorCfg {
    fn default() -> Self {
        DetectorCfg {
            jitter_px: 0,
            miss_rate: 0.0,
            fp_rate: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalCfg {
    /// Time tolerance (seconds) when matching predicted events to truth.
    pub tolerance_s: f64,
}

impl Default for EvalCfg {
    fn default() -> Self {
        EvalCfg { tolerance_s: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub bg: BackgroundCfg,
    pub perc: PerceptionCfg,
    pub track: TrackerCfg,
    pub id: IdentityCfg,
    pub own: OwnershipCfg,
    pub ev: EventsCfg,
    pub det: DetectorCfg,
    pub eval: EvalCfg,
}

impl Config {
    pub fn from_toml_str(s: &str) -> Result<Config, ConfigError> {
        let cfg: Config = toml::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Config, ConfigError> {
        Config::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        fn ratio(name: &str, v: f64) -> Result<(), ConfigError> {
            if !(0.0..=1.0).contains(&v) {
                return Err(ConfigError::Invalid(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
            Ok(())
        }
        fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
            if v <= 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "{name} must be positive, got {v}"
                )));
            }
            Ok(())
        }

        if self.bg.long_interval == 0 || self.bg.short_interval == 0 {
            return Err(ConfigError::Invalid(
                "bg.long_interval and bg.short_interval must be positive".into(),
            ));
        }
        if self.bg.samples == 0 {
            return Err(ConfigError::Invalid("bg.samples must be positive".into()));
        }
        if self.bg.min_consensus == 0 || self.bg.min_consensus > self.bg.samples {
            return Err(ConfigError::Invalid(format!(
                "bg.min_consensus must lie in [1, bg.samples], got {}",
                self.bg.min_consensus
            )));
        }
        positive("bg.match_radius", self.bg.match_radius)?;
        ratio("bg.coverage_threshold", self.bg.coverage_threshold)?;
        ratio("perc.dedup_iou", self.perc.dedup_iou)?;
        if self.perc.so_confirm == 0 {
            return Err(ConfigError::Invalid("perc.so_confirm must be positive".into()));
        }
        if !self.perc.categories.iter().any(|c| c == "person") {
            return Err(ConfigError::Invalid(
                "perc.categories must include \"person\"".into(),
            ));
        }
        ratio("track.iou_min", self.track.iou_min)?;
        if self.track.min_hits == 0 {
            return Err(ConfigError::Invalid("track.min_hits must be positive".into()));
        }
        ratio("id.threshold", self.id.threshold)?;
        if self.id.samples == 0 {
            return Err(ConfigError::Invalid("id.samples must be positive".into()));
        }
        if self.id.embedder != "histogram" && self.id.embedder != "oracle" {
            return Err(ConfigError::Invalid(format!(
                "id.embedder must be \"histogram\" or \"oracle\", got {:?}",
                self.id.embedder
            )));
        }
        positive("own.window_s", self.own.window_s)?;
        positive("own.abandon_timeout_s", self.own.abandon_timeout_s)?;
        ratio("own.edge_margin_pct", self.own.edge_margin_pct)?;
        ratio("ev.tau_move", self.ev.tau_move)?;
        ratio("ev.iou_keep", self.ev.iou_keep)?;
        if self.ev.move_confirm == 0 {
            return Err(ConfigError::Invalid("ev.move_confirm must be positive".into()));
        }
        ratio("det.miss_rate", self.det.miss_rate)?;
        ratio("det.fp_rate", self.det.fp_rate)?;
        positive("eval.tolerance_s", self.eval.tolerance_s)?;
        Ok(())
    }
}
