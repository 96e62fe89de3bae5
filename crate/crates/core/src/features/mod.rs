//! The 16-value utterance feature vector: four intrapitch extrema averages
//! followed by twelve pitch-synchronous cepstral coefficients.

mod lpc;
mod temporal;

pub use lpc::{
    autocorrelation, cepstral_frame_count, frame_cepstrum, levinson_durbin, lpc_to_cepstral,
    pitch_synchronous_cepstra, CepstralVector, LpcSolution, CEPSTRAL_DIM, DEFAULT_LPC_ORDER,
    MAX_CEPSTRAL_FRAMES, PERIODS_PER_FRAME,
};
pub use temporal::{
    average_counts, count_extrema, count_extrema_in, temporal_features, ExtremaCounts,
    TemporalFeatures,
};

use crate::error::{Error, Result};
use crate::pitch::{periods_from_marks, Period, PitchMarks};
use crate::signal_io::SampleBuffer;
use crate::vowel::Vowel;

pub const TEMPORAL_DIM: usize = 4;
pub const FEATURE_DIM: usize = TEMPORAL_DIM + CEPSTRAL_DIM;

/// Periods taken before the peak period.
pub const PERIODS_BEFORE_PEAK: usize = 10;
/// Periods taken after the peak period.
pub const PERIODS_AFTER_PEAK: usize = 9;

/// Fixed layout `[poc, pot, nec, net, c1, .., c12]`.
pub type FeatureVector = [f64; FEATURE_DIM];

pub const FEATURE_NAMES: [&str; FEATURE_DIM] = [
    "poc", "pot", "nec", "net", "c1", "c2", "c3", "c4", "c5", "c6", "c7", "c8", "c9", "c10", "c11",
    "c12",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FeatureConfig {
    pub lpc_order: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            lpc_order: DEFAULT_LPC_ORDER,
        }
    }
}

/// Contiguous pitch periods around the period holding the amplitude peak.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SteadyStateRegion {
    pub periods: Vec<Period>,
    /// Index of the first region period within the full period list.
    pub first_period: usize,
    /// Index of the peak period within the full period list.
    pub peak_period_index: usize,
}

impl SteadyStateRegion {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }
}

/// Takes periods `p-10 ..= p+9` around the period `p` that holds the largest
/// absolute sample, clipped to the available periods.
pub fn select_steady_state(buffer: &SampleBuffer, periods: &[Period]) -> Result<SteadyStateRegion> {
    if periods.len() < PERIODS_PER_FRAME {
        return Err(Error::RegionTooShort {
            periods: periods.len(),
            required: PERIODS_PER_FRAME,
        });
    }
    let samples = buffer.samples();
    let covered = periods[0].start..periods[periods.len() - 1].end();
    let in_range = samples
        .get(covered.clone())
        .ok_or_else(|| Error::invalid("periods lie outside the buffer"))?;
    // Periods are contiguous, so the peak inside the marked span always falls in one.
    let mut peak = covered.start;
    for (i, s) in in_range.iter().enumerate() {
        if s.abs() > samples[peak].abs() {
            peak = covered.start + i;
        }
    }
    let p = periods
        .iter()
        .position(|per| per.contains(peak))
        .unwrap_or(0);
    let first = p.saturating_sub(PERIODS_BEFORE_PEAK);
    let last = (p + PERIODS_AFTER_PEAK).min(periods.len() - 1);
    Ok(SteadyStateRegion {
        periods: periods[first..=last].to_vec(),
        first_period: first,
        peak_period_index: p,
    })
}

/// Features of one vowel utterance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtteranceFeatures {
    pub temporal: TemporalFeatures,
    pub cepstral: CepstralVector,
    pub vowel: Vowel,
}

impl UtteranceFeatures {
    pub fn to_vector(&self) -> FeatureVector {
        let mut v = [0.0; FEATURE_DIM];
        v[..TEMPORAL_DIM].copy_from_slice(&self.temporal.to_array());
        v[TEMPORAL_DIM..].copy_from_slice(&self.cepstral.0);
        v
    }

    pub fn from_vector(vowel: Vowel, v: &FeatureVector) -> Self {
        let mut t = [0.0; TEMPORAL_DIM];
        t.copy_from_slice(&v[..TEMPORAL_DIM]);
        let mut c = [0.0; CEPSTRAL_DIM];
        c.copy_from_slice(&v[TEMPORAL_DIM..]);
        Self {
            temporal: TemporalFeatures::from_array(t),
            cepstral: CepstralVector(c),
            vowel,
        }
    }
}

/// Steady-state selection, extrema averages and cepstra for a preprocessed,
/// pitch-marked buffer.
pub fn extract_utterance_features(
    buffer: &SampleBuffer,
    marks: &PitchMarks,
    vowel: Vowel,
    config: &FeatureConfig,
) -> Result<UtteranceFeatures> {
    let periods = periods_from_marks(marks)?;
    let region = select_steady_state(buffer, &periods)?;
    let temporal = temporal_features(buffer, &region.periods)?;
    let cepstral = pitch_synchronous_cepstra(buffer, &region.periods, config.lpc_order)?;
    Ok(UtteranceFeatures {
        temporal,
        cepstral,
        vowel,
    })
}
