//! Pipeline settings: built-in defaults, then an optional `key=value` file,
//! then command-line flags, each layer overriding the previous one.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use pitchsync::decision::TOKHURA_WEIGHTS;
use pitchsync::features::{FeatureConfig, CEPSTRAL_DIM, TEMPORAL_DIM};
use pitchsync::pitch::PitchConfig;
use pitchsync::preprocess::FramePlan;
use pitchsync::{DistanceWeights, PipelineConfig};

/// Keys accepted in a `--config` file; each matches the flag of the same
/// name with `-` in place of `_`.
pub const CONFIG_KEYS: [&str; 11] = [
    "sample_rate_hz",
    "frame_len",
    "frame_shift",
    "silence_multiplier",
    "silence_frames",
    "normalization_target",
    "min_f0_hz",
    "max_f0_hz",
    "lpc_order",
    "cepstral_weights",
    "temporal_weights",
];

#[derive(Debug, Clone, Default, Args)]
pub struct Settings {
    /// File of `key=value` lines (`#` starts a comment); flags override it
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Sample rate assumed for headerless text sample files [default: 16000]
    #[arg(long, global = true, value_name = "HZ")]
    pub sample_rate_hz: Option<u32>,

    /// Energy frame length in samples [default: 100]
    #[arg(long, global = true, value_name = "N")]
    pub frame_len: Option<usize>,

    /// Energy frame shift in samples [default: 50]
    #[arg(long, global = true, value_name = "N")]
    pub frame_shift: Option<usize>,

    /// A frame is speech when its energy exceeds this multiple of the
    /// silence reference [default: 1.1]
    #[arg(long, global = true, value_name = "X")]
    pub silence_multiplier: Option<f64>,

    /// Number of lowest-energy frames averaged into the silence reference
    /// [default: 10]
    #[arg(long, global = true, value_name = "N")]
    pub silence_frames: Option<usize>,

    /// Peak magnitude after normalization [default: 10000]
    #[arg(long, global = true, value_name = "X")]
    pub normalization_target: Option<f64>,

    /// Lowest admissible F0, sets the longest pitch period [default: 50]
    #[arg(long, global = true, value_name = "HZ")]
    pub min_f0_hz: Option<f64>,

    /// Highest admissible F0, sets the shortest pitch period [default: 500]
    #[arg(long, global = true, value_name = "HZ")]
    pub max_f0_hz: Option<f64>,

    /// LPC order used for the cepstra [default: 12]
    #[arg(long, global = true, value_name = "P")]
    pub lpc_order: Option<usize>,

    /// Twelve comma-separated weights for c1..c12
    /// [default: 1,3,7,13,19,22,25,33,42,50,56,61]
    #[arg(long, global = true, value_name = "W,..")]
    pub cepstral_weights: Option<String>,

    /// Four comma-separated weights for poc,pot,nec,net [default: 1,1,1,1]
    #[arg(long, global = true, value_name = "W,..")]
    pub temporal_weights: Option<String>,
}

/// Fully resolved settings.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub pipeline: PipelineConfig,
    pub weights: DistanceWeights,
}

fn parse_value<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T, String> {
    raw.trim()
        .parse()
        .map_err(|_| format!("invalid value {raw:?} for {key}"))
}

fn parse_weights<const N: usize>(key: &str, raw: &str) -> Result<[f64; N], String> {
    let vals: Vec<f64> = raw
        .split(',')
        .map(|v| parse_value::<f64>(key, v))
        .collect::<Result<_, _>>()?;
    vals.try_into()
        .map_err(|v: Vec<f64>| format!("{key} needs {N} values, got {}", v.len()))
}

fn positive(key: &str, v: f64) -> Result<f64, String> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{key} must be positive, got {v}"))
    }
}

fn nonzero(key: &str, v: usize) -> Result<usize, String> {
    if v > 0 {
        Ok(v)
    } else {
        Err(format!("{key} must be positive"))
    }
}

impl Settings {
    /// Fills every unset field from `text`, a config file body.
    fn fill_from_config(&mut self, text: &str, origin: &str) -> Result<(), String> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("{origin}:{}: expected key=value", n + 1))?;
            let (key, value) = (key.trim(), value.trim().to_string());
            let at = |e: String| format!("{origin}:{}: {e}", n + 1);
            match key {
                "sample_rate_hz" => {
                    self.sample_rate_hz
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "frame_len" => {
                    self.frame_len
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "frame_shift" => {
                    self.frame_shift
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "silence_multiplier" => {
                    self.silence_multiplier
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "silence_frames" => {
                    self.silence_frames
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "normalization_target" => {
                    self.normalization_target
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "min_f0_hz" => {
                    self.min_f0_hz
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "max_f0_hz" => {
                    self.max_f0_hz
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "lpc_order" => {
                    self.lpc_order
                        .get_or_insert(parse_value(key, &value).map_err(at)?);
                }
                "cepstral_weights" => {
                    self.cepstral_weights.get_or_insert(value);
                }
                "temporal_weights" => {
                    self.temporal_weights.get_or_insert(value);
                }
                other => {
                    return Err(at(format!(
                        "unknown key {other:?} (known: {})",
                        CONFIG_KEYS.join(", ")
                    )))
                }
            }
        }
        Ok(())
    }

    pub fn resolve(&self) -> Result<Resolved, String> {
        let mut s = self.clone();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
            s.fill_from_config(&text, &path.display().to_string())?;
        }

        let d = PipelineConfig::default();
        let frame_plan = FramePlan::new(
            s.frame_len.unwrap_or(d.frame_plan.frame_len()),
            s.frame_shift.unwrap_or(d.frame_plan.frame_shift()),
        )
        .map_err(|e| e.to_string())?;
        let sample_rate_hz = s.sample_rate_hz.unwrap_or(d.sample_rate_hz);
        let pitch = PitchConfig {
            min_f0_hz: positive("min_f0_hz", s.min_f0_hz.unwrap_or(d.pitch.min_f0_hz))?,
            max_f0_hz: positive("max_f0_hz", s.max_f0_hz.unwrap_or(d.pitch.max_f0_hz))?,
        };
        pitch
            .period_bounds(nonzero("sample_rate_hz", sample_rate_hz as usize)? as u32)
            .map_err(|e| e.to_string())?;
        let pipeline = PipelineConfig {
            sample_rate_hz,
            frame_plan,
            silence_multiplier: positive(
                "silence_multiplier",
                s.silence_multiplier.unwrap_or(d.silence_multiplier),
            )?,
            silence_frames: nonzero(
                "silence_frames",
                s.silence_frames.unwrap_or(d.silence_frames),
            )?,
            normalization_target: positive(
                "normalization_target",
                s.normalization_target.unwrap_or(d.normalization_target),
            )?,
            pitch,
            features: FeatureConfig {
                lpc_order: nonzero("lpc_order", s.lpc_order.unwrap_or(d.features.lpc_order))?,
            },
        };

        let cepstral = match &s.cepstral_weights {
            Some(raw) => parse_weights::<CEPSTRAL_DIM>("cepstral_weights", raw)?,
            None => TOKHURA_WEIGHTS,
        };
        let temporal = match &s.temporal_weights {
            Some(raw) => parse_weights::<TEMPORAL_DIM>("temporal_weights", raw)?,
            None => [1.0; TEMPORAL_DIM],
        };
        let weights = DistanceWeights::new(cepstral, temporal).map_err(|e| e.to_string())?;
        Ok(Resolved { pipeline, weights })
    }
}
