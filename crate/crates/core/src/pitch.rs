//! Pitch-period marking from half-wave peaks.
//!
//! The signal is split into maximal runs of strictly positive and strictly
//! negative samples ("halves"). Each half contributes its extreme sample and a
//! maximum peak difference (MPD) against the neighbouring halves of the same
//! polarity. The polarity whose MPDs are more consistent drives the marking: a
//! new pitch mark is placed on the next half whose peak reaches a threshold
//! derived from the previously marked peak, where the threshold drop (1..=20 %)
//! depends on where that peak's MPD falls relative to the average MPD.

use std::fmt;

use crate::error::{Error, Result};
use crate::signal_io::SampleBuffer;

pub const DEFAULT_MIN_F0_HZ: f64 = 50.0;
pub const DEFAULT_MAX_F0_HZ: f64 = 500.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Positive,
    Negative,
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
        })
    }
}

/// The extreme sample of one half wave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPeak {
    pub polarity: Polarity,
    /// First sample of the half.
    pub start: usize,
    /// One past the last sample of the half.
    pub end: usize,
    pub peak_index: usize,
    pub peak_value: f64,
    pub mpd: f64,
}

impl HalfPeak {
    pub fn magnitude(&self) -> f64 {
        self.peak_value.abs()
    }
}

/// MPD summary for one polarity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MpdStats {
    pub count: usize,
    /// Average of the maximum peak differences (AMPV).
    pub ampv: f64,
    pub max_mpd: f64,
    /// Population standard deviation of the MPDs.
    pub std_dev: f64,
}

impl MpdStats {
    fn from_mpds(mpds: &[f64]) -> Option<Self> {
        if mpds.is_empty() {
            return None;
        }
        let n = mpds.len() as f64;
        let ampv = mpds.iter().sum::<f64>() / n;
        let var = mpds.iter().map(|m| (m - ampv).powi(2)).sum::<f64>() / n;
        Some(Self {
            count: mpds.len(),
            ampv,
            max_mpd: mpds.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            std_dev: var.sqrt(),
        })
    }

    /// Coefficient of variation; `None` when the mean is zero.
    pub fn coefficient_of_variation(&self) -> Option<f64> {
        (self.ampv > 0.0).then(|| self.std_dev / self.ampv)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchStats {
    pub positive: MpdStats,
    pub negative: MpdStats,
}

impl PitchStats {
    pub fn for_polarity(&self, polarity: Polarity) -> &MpdStats {
        match polarity {
            Polarity::Positive => &self.positive,
            Polarity::Negative => &self.negative,
        }
    }
}

/// Pitch-cycle start indices, strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PitchMarks {
    pub mark_indices: Vec<usize>,
    pub polarity_used: Polarity,
}

/// One pitch period `[start, start + len)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Period {
    pub start: usize,
    pub len: usize,
}

impl Period {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..self.end()).contains(&index)
    }
}

/// Admissible F0 range, converted to period bounds per sample rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchConfig {
    pub min_f0_hz: f64,
    pub max_f0_hz: f64,
}

impl Default for PitchConfig {
    fn default() -> Self {
        Self {
            min_f0_hz: DEFAULT_MIN_F0_HZ,
            max_f0_hz: DEFAULT_MAX_F0_HZ,
        }
    }
}

impl PitchConfig {
    /// `(min_period, max_period)` in samples.
    pub fn period_bounds(&self, sample_rate_hz: u32) -> Result<(usize, usize)> {
        if !(self.min_f0_hz > 0.0 && self.min_f0_hz < self.max_f0_hz) {
            return Err(Error::invalid(format!(
                "need 0 < min_f0 < max_f0 (got {} and {})",
                self.min_f0_hz, self.max_f0_hz
            )));
        }
        let sr = f64::from(sample_rate_hz);
        let min_period = ((sr / self.max_f0_hz).floor() as usize).max(1);
        let max_period = (sr / self.min_f0_hz).ceil() as usize;
        if min_period >= max_period {
            return Err(Error::invalid("F0 range collapses to a single period"));
        }
        Ok((min_period, max_period))
    }
}

/// Finds every half wave and its peak, then fills in MPDs per polarity.
pub fn extract_half_peaks(buffer: &SampleBuffer) -> Result<Vec<HalfPeak>> {
    let samples = buffer.samples();
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < samples.len() {
        let polarity = if samples[i] > 0.0 {
            Polarity::Positive
        } else if samples[i] < 0.0 {
            Polarity::Negative
        } else {
            i += 1;
            continue;
        };
        let start = i;
        let mut peak_index = i;
        while i < samples.len() && same_sign(samples[i], polarity) {
            if samples[i].abs() > samples[peak_index].abs() {
                peak_index = i;
            }
            i += 1;
        }
        peaks.push(HalfPeak {
            polarity,
            start,
            end: i,
            peak_index,
            peak_value: samples[peak_index],
            mpd: 0.0,
        });
    }

    let has = |p| peaks.iter().any(|h: &HalfPeak| h.polarity == p);
    if !has(Polarity::Positive) || !has(Polarity::Negative) {
        return Err(Error::Degenerate);
    }

    for polarity in [Polarity::Positive, Polarity::Negative] {
        let idx: Vec<usize> = (0..peaks.len())
            .filter(|&k| peaks[k].polarity == polarity)
            .collect();
        for (pos, &k) in idx.iter().enumerate() {
            let v = peaks[k].peak_value;
            let prev = pos
                .checked_sub(1)
                .map_or(0.0, |p| (v - peaks[idx[p]].peak_value).abs());
            let next = idx
                .get(pos + 1)
                .map_or(0.0, |&n| (v - peaks[n].peak_value).abs());
            peaks[k].mpd = prev.max(next);
        }
    }
    Ok(peaks)
}

fn same_sign(x: f64, polarity: Polarity) -> bool {
    match polarity {
        Polarity::Positive => x > 0.0,
        Polarity::Negative => x < 0.0,
    }
}

/// AMPV, maximum and spread of the MPDs for each polarity.
pub fn compute_stats(peaks: &[HalfPeak]) -> Result<PitchStats> {
    let mpds = |p: Polarity| -> Vec<f64> {
        peaks
            .iter()
            .filter(|h| h.polarity == p)
            .map(|h| h.mpd)
            .collect()
    };
    let positive = MpdStats::from_mpds(&mpds(Polarity::Positive)).ok_or(Error::Degenerate)?;
    let negative = MpdStats::from_mpds(&mpds(Polarity::Negative)).ok_or(Error::Degenerate)?;
    Ok(PitchStats { positive, negative })
}

/// Picks the polarity with the smaller MPD coefficient of variation. Ties and
/// zero-mean cases go to the positive half.
pub fn choose_polarity(stats: &PitchStats) -> Polarity {
    match (
        stats.positive.coefficient_of_variation(),
        stats.negative.coefficient_of_variation(),
    ) {
        (Some(pos), Some(neg)) if neg < pos => Polarity::Negative,
        _ => Polarity::Positive,
    }
}

/// The interval number `x` (1..=20) of an MPD within its polarity's MPD range.
///
/// `[0, AMPV]` is split into ten equal intervals numbered 1..=10 and
/// `(AMPV, max]` into ten more numbered 11..=20. Intervals are closed below and
/// open above, except the last of each range which is closed.
pub fn threshold_interval(mpd: f64, stats: &MpdStats) -> u32 {
    const PARTS: f64 = 10.0;
    if mpd <= stats.ampv {
        if stats.ampv <= 0.0 {
            return 1;
        }
        let idx = (mpd / stats.ampv * PARTS).floor() as u32 + 1;
        idx.clamp(1, 10)
    } else {
        let span = stats.max_mpd - stats.ampv;
        if span <= 0.0 {
            return 20;
        }
        let idx = ((mpd - stats.ampv) / span * PARTS).floor() as u32 + 1;
        10 + idx.clamp(1, 10)
    }
}

/// Signed threshold `peak - (x / 100) * peak`; crossings compare by magnitude.
pub fn threshold_for_peak(peak: &HalfPeak, stats: &PitchStats) -> f64 {
    let x = threshold_interval(peak.mpd, stats.for_polarity(peak.polarity));
    peak.peak_value - f64::from(x) / 100.0 * peak.peak_value
}

/// Chains pitch marks across the halves of `polarity`.
///
/// Starting from the largest peak within the first `max_period` samples, each
/// step takes the first later half, at least `min_period` and at most
/// `max_period` samples away, whose peak magnitude reaches the threshold of the
/// current mark. A window without such a half breaks the chain and a new one
/// is anchored past it; the longest chain is returned.
pub fn mark_pitch_periods(
    peaks: &[HalfPeak],
    stats: &PitchStats,
    polarity: Polarity,
    min_period: usize,
    max_period: usize,
) -> Result<PitchMarks> {
    if min_period == 0 || min_period >= max_period {
        return Err(Error::invalid("need 0 < min_period < max_period"));
    }
    let chosen: Vec<&HalfPeak> = peaks.iter().filter(|h| h.polarity == polarity).collect();
    if chosen.len() < 2 {
        return Err(Error::PitchNotDetected);
    }

    let anchor_from = |from: usize| -> usize {
        let limit = chosen[from].peak_index + max_period;
        let mut best = from;
        for (k, h) in chosen.iter().enumerate().skip(from + 1) {
            if h.peak_index >= limit {
                break;
            }
            if h.magnitude() > chosen[best].magnitude() {
                best = k;
            }
        }
        best
    };

    let mut best_chain: Vec<usize> = Vec::new();
    let mut chain: Vec<usize> = Vec::new();
    let mut current = anchor_from(0);
    loop {
        chain.push(chosen[current].peak_index);
        let here = chosen[current];
        let threshold = threshold_for_peak(here, stats).abs();

        let mut crossing = None;
        let mut resume = chosen.len();
        for (k, h) in chosen.iter().enumerate().skip(current + 1) {
            let gap = h.peak_index - here.peak_index;
            if gap < min_period {
                continue;
            }
            if gap > max_period {
                resume = k;
                break;
            }
            if h.magnitude() >= threshold {
                crossing = Some(k);
                break;
            }
        }

        match crossing {
            Some(next) => current = next,
            None => {
                if chain.len() > best_chain.len() {
                    best_chain = std::mem::take(&mut chain);
                } else {
                    chain.clear();
                }
                if resume >= chosen.len() {
                    break;
                }
                current = anchor_from(resume);
            }
        }
    }

    if best_chain.len() < 2 {
        return Err(Error::PitchNotDetected);
    }
    Ok(PitchMarks {
        mark_indices: best_chain,
        polarity_used: polarity,
    })
}

/// Consecutive marks as `[mark_i, mark_{i+1})` periods.
pub fn periods_from_marks(marks: &PitchMarks) -> Result<Vec<Period>> {
    if marks.mark_indices.len() < 2 {
        return Err(Error::PitchNotDetected);
    }
    Ok(marks
        .mark_indices
        .windows(2)
        .map(|w| Period {
            start: w[0],
            len: w[1] - w[0],
        })
        .collect())
}

/// Runs half-peak extraction, polarity selection and marking on a
/// preprocessed buffer.
pub fn detect_pitch_marks(buffer: &SampleBuffer, config: &PitchConfig) -> Result<PitchMarks> {
    let (min_period, max_period) = config.period_bounds(buffer.sample_rate_hz())?;
    let peaks = extract_half_peaks(buffer)?;
    let stats = compute_stats(&peaks)?;
    let polarity = choose_polarity(&stats);
    mark_pitch_periods(&peaks, &stats, polarity, min_period, max_period)
}
