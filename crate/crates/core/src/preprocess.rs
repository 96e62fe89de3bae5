//! DC correction, peak normalization and energy-based silence trimming.

use crate::error::{Error, Result};
use crate::signal_io::SampleBuffer;

pub const DEFAULT_NORMALIZATION_TARGET: f64 = 10_000.0;
pub const DEFAULT_SILENCE_MULTIPLIER: f64 = 1.10;
pub const DEFAULT_SILENCE_FRAMES: usize = 10;

/// Framing used for the short-time energy profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FramePlan {
    frame_len: usize,
    frame_shift: usize,
}

impl FramePlan {
    pub fn new(frame_len: usize, frame_shift: usize) -> Result<Self> {
        if frame_shift == 0 || frame_shift > frame_len {
            return Err(Error::invalid(format!(
                "frame plan needs 0 < shift <= len (len {frame_len}, shift {frame_shift})"
            )));
        }
        Ok(Self {
            frame_len,
            frame_shift,
        })
    }

    pub fn frame_len(&self) -> usize {
        self.frame_len
    }

    pub fn frame_shift(&self) -> usize {
        self.frame_shift
    }

    /// Number of whole frames that fit in `len` samples.
    pub fn frame_count(&self, len: usize) -> usize {
        if len < self.frame_len {
            0
        } else {
            (len - self.frame_len) / self.frame_shift + 1
        }
    }

    pub fn frame_start(&self, index: usize) -> usize {
        index * self.frame_shift
    }
}

impl Default for FramePlan {
    fn default() -> Self {
        Self {
            frame_len: 100,
            frame_shift: 50,
        }
    }
}

/// Short-time energies with the speech/non-speech decision per frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyProfile {
    pub frame_energies: Vec<f64>,
    pub silence_energy: f64,
    pub speech_flags: Vec<bool>,
}

impl EnergyProfile {
    pub fn speech_frame_count(&self) -> usize {
        self.speech_flags.iter().filter(|&&f| f).count()
    }
}

fn peak_magnitude(samples: &[f64]) -> f64 {
    samples.iter().fold(0.0f64, |m, s| m.max(s.abs()))
}

/// Subtracts the sample mean.
pub fn remove_dc(buffer: &SampleBuffer) -> Result<SampleBuffer> {
    let samples = buffer.samples();
    if samples.is_empty() {
        return Err(Error::EmptySignal);
    }
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    buffer.with_samples(samples.iter().map(|s| s - mean).collect())
}

/// Scales the buffer so that its largest magnitude equals `target`.
pub fn normalize_peak(buffer: &SampleBuffer, target: f64) -> Result<SampleBuffer> {
    if !(target > 0.0 && target.is_finite()) {
        return Err(Error::invalid("normalization target must be positive"));
    }
    let peak = peak_magnitude(buffer.samples());
    if peak == 0.0 {
        return Err(Error::SilentSignal);
    }
    if peak == target {
        return Ok(buffer.clone());
    }
    let gain = target / peak;
    buffer.with_samples(buffer.samples().iter().map(|s| s * gain).collect())
}

/// Per-frame mean-square energy. The silence reference is the mean energy of
/// the `silence_frames` quietest frames; a frame is speech when its energy is
/// strictly above `multiplier` times that reference.
pub fn energy_profile(
    buffer: &SampleBuffer,
    plan: FramePlan,
    silence_frames: usize,
    multiplier: f64,
) -> Result<EnergyProfile> {
    if silence_frames == 0 {
        return Err(Error::invalid("silence_frames must be positive"));
    }
    let samples = buffer.samples();
    let n_frames = plan.frame_count(samples.len());
    if n_frames == 0 {
        return Err(Error::SignalTooShort {
            len: samples.len(),
            frame_len: plan.frame_len(),
        });
    }
    let frame_energies: Vec<f64> = (0..n_frames)
        .map(|i| {
            let start = plan.frame_start(i);
            let frame = &samples[start..start + plan.frame_len()];
            frame.iter().map(|s| s * s).sum::<f64>() / frame.len() as f64
        })
        .collect();

    let mut sorted = frame_energies.clone();
    sorted.sort_by(f64::total_cmp);
    let quiet = &sorted[..silence_frames.min(sorted.len())];
    let silence_energy = quiet.iter().sum::<f64>() / quiet.len() as f64;

    let threshold = multiplier * silence_energy;
    let speech_flags = frame_energies.iter().map(|&e| e > threshold).collect();
    Ok(EnergyProfile {
        frame_energies,
        silence_energy,
        speech_flags,
    })
}

/// Keeps the contiguous span from the first to the last speech frame. When the
/// last speech frame is also the last whole frame, the trailing partial frame
/// is kept as well.
pub fn trim_silence(
    buffer: &SampleBuffer,
    profile: &EnergyProfile,
    plan: FramePlan,
) -> Result<SampleBuffer> {
    let n_frames = profile.speech_flags.len();
    if n_frames != plan.frame_count(buffer.len()) {
        return Err(Error::invalid(
            "energy profile does not match buffer and frame plan",
        ));
    }
    let first = profile
        .speech_flags
        .iter()
        .position(|&f| f)
        .ok_or(Error::NoSpeech)?;
    let last = profile.speech_flags.iter().rposition(|&f| f).unwrap();
    let start = plan.frame_start(first);
    let end = if last + 1 == n_frames {
        buffer.len()
    } else {
        plan.frame_start(last) + plan.frame_len()
    };
    buffer.with_samples(buffer.samples()[start..end].to_vec())
}
