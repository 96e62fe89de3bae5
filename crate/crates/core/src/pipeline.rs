//! End-to-end per-utterance processing with all tunable constants in one place.

use std::path::Path;

use crate::error::Result;
use crate::features::{extract_utterance_features, FeatureConfig, UtteranceFeatures};
use crate::pitch::{detect_pitch_marks, PitchConfig, PitchMarks};
use crate::preprocess::{
    energy_profile, normalize_peak, remove_dc, trim_silence, FramePlan,
    DEFAULT_NORMALIZATION_TARGET, DEFAULT_SILENCE_FRAMES, DEFAULT_SILENCE_MULTIPLIER,
};
use crate::signal_io::{load_signal, SampleBuffer, DEFAULT_SAMPLE_RATE_HZ};
use crate::vowel::Vowel;

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Rate assumed for headerless text sample files.
    pub sample_rate_hz: u32,
    pub frame_plan: FramePlan,
    pub silence_multiplier: f64,
    pub silence_frames: usize,
    pub normalization_target: f64,
    pub pitch: PitchConfig,
    pub features: FeatureConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            sample_rate_hz: DEFAULT_SAMPLE_RATE_HZ,
            frame_plan: FramePlan::default(),
            silence_multiplier: DEFAULT_SILENCE_MULTIPLIER,
            silence_frames: DEFAULT_SILENCE_FRAMES,
            normalization_target: DEFAULT_NORMALIZATION_TARGET,
            pitch: PitchConfig::default(),
            features: FeatureConfig::default(),
        }
    }
}

/// DC removal, peak normalization and silence trimming, in that order.
pub fn preprocess(buffer: &SampleBuffer, config: &PipelineConfig) -> Result<SampleBuffer> {
    let centred = remove_dc(buffer)?;
    let normalized = normalize_peak(&centred, config.normalization_target)?;
    let profile = energy_profile(
        &normalized,
        config.frame_plan,
        config.silence_frames,
        config.silence_multiplier,
    )?;
    trim_silence(&normalized, &profile, config.frame_plan)
}

/// A preprocessed utterance with its pitch marks.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedUtterance {
    pub signal: SampleBuffer,
    pub marks: PitchMarks,
}

pub fn mark_utterance(buffer: &SampleBuffer, config: &PipelineConfig) -> Result<MarkedUtterance> {
    let signal = preprocess(buffer, config)?;
    let marks = detect_pitch_marks(&signal, &config.pitch)?;
    Ok(MarkedUtterance { signal, marks })
}

pub fn analyze(
    buffer: &SampleBuffer,
    vowel: Vowel,
    config: &PipelineConfig,
) -> Result<UtteranceFeatures> {
    let marked = mark_utterance(buffer, config)?;
    extract_utterance_features(&marked.signal, &marked.marks, vowel, &config.features)
}

pub fn analyze_file(
    path: impl AsRef<Path>,
    vowel: Vowel,
    config: &PipelineConfig,
) -> Result<UtteranceFeatures> {
    let buffer = load_signal(path, config.sample_rate_hz)?;
    analyze(&buffer, vowel, config)
}
