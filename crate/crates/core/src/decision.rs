//! Nearest-speaker scoring and the agree-or-reject fusion rule.
//!
//! The cepstral and temporal blocks are scored separately with weighted
//! squared distances. A trial is accepted only when both blocks name the same
//! nearest speaker; exact distance ties go to the lexicographically smallest
//! speaker id.

use std::fmt;

use crate::error::{Error, Result};
use crate::features::{UtteranceFeatures, CEPSTRAL_DIM, TEMPORAL_DIM};
use crate::modeling::ModelSet;

/// Tohkura's cepstral weights for `c1..c12`.
pub const TOKHURA_WEIGHTS: [f64; CEPSTRAL_DIM] = [
    1.0, 3.0, 7.0, 13.0, 19.0, 22.0, 25.0, 33.0, 42.0, 50.0, 56.0, 61.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceWeights {
    pub cepstral: [f64; CEPSTRAL_DIM],
    pub temporal: [f64; TEMPORAL_DIM],
}

impl Default for DistanceWeights {
    fn default() -> Self {
        Self {
            cepstral: TOKHURA_WEIGHTS,
            temporal: [1.0; TEMPORAL_DIM],
        }
    }
}

impl DistanceWeights {
    pub fn new(cepstral: [f64; CEPSTRAL_DIM], temporal: [f64; TEMPORAL_DIM]) -> Result<Self> {
        if cepstral
            .iter()
            .chain(&temporal)
            .any(|w| !(*w > 0.0 && w.is_finite()))
        {
            return Err(Error::invalid(
                "distance weights must be positive and finite",
            ));
        }
        Ok(Self { cepstral, temporal })
    }
}

/// `Σ w_i (x_i - y_i)^2`.
pub fn weighted_distance(x: &[f64], y: &[f64], w: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if w.len() != x.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: w.len(),
        });
    }
    Ok(x.iter()
        .zip(y)
        .zip(w)
        .map(|((a, b), w)| w * (a - b) * (a - b))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerDistance {
    pub speaker_id: String,
    pub cepstral: f64,
    pub temporal: f64,
}

/// Distances from one test vector to every enrolled speaker of its vowel.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceReport {
    /// Sorted by speaker id.
    pub rows: Vec<SpeakerDistance>,
    pub argmin_cepstral: String,
    pub argmin_temporal: String,
}

/// Index of the smallest value; the first wins ties.
pub(crate) fn argmin_first(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

impl DistanceReport {
    /// Builds a report from unsorted rows, sorting by speaker id and resolving
    /// argmins with the smallest-id tie-break.
    pub fn from_rows(mut rows: Vec<SpeakerDistance>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::invalid("distance report needs at least one speaker"));
        }
        rows.sort_by(|a, b| a.speaker_id.cmp(&b.speaker_id));
        let c = argmin_first(rows.iter().map(|r| r.cepstral)).unwrap();
        let t = argmin_first(rows.iter().map(|r| r.temporal)).unwrap();
        Ok(Self {
            argmin_cepstral: rows[c].speaker_id.clone(),
            argmin_temporal: rows[t].speaker_id.clone(),
            rows,
        })
    }
}

pub fn score_against_models(
    features: &UtteranceFeatures,
    models: &ModelSet,
    weights: &DistanceWeights,
) -> Result<DistanceReport> {
    let temporal = features.temporal.to_array();
    let mut rows = Vec::new();
    for m in models.for_vowel(features.vowel) {
        let (mt, mc) = m.mean_features.split_at(TEMPORAL_DIM);
        rows.push(SpeakerDistance {
            speaker_id: m.speaker_id.clone(),
            cepstral: weighted_distance(&features.cepstral.0, mc, &weights.cepstral)?,
            temporal: weighted_distance(&temporal, mt, &weights.temporal)?,
        });
    }
    if rows.is_empty() {
        return Err(Error::NoModelForVowel(features.vowel));
    }
    DistanceReport::from_rows(rows)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerificationOutcome {
    Accepted(String),
    Rejected,
}

impl VerificationOutcome {
    pub fn speaker(&self) -> Option<&str> {
        match self {
            VerificationOutcome::Accepted(s) => Some(s),
            VerificationOutcome::Rejected => None,
        }
    }
}

impl fmt::Display for VerificationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerificationOutcome::Accepted(s) => write!(f, "accepted {s}"),
            VerificationOutcome::Rejected => f.write_str("rejected"),
        }
    }
}

pub fn identify_combined(report: &DistanceReport) -> VerificationOutcome {
    if report.argmin_cepstral == report.argmin_temporal {
        VerificationOutcome::Accepted(report.argmin_cepstral.clone())
    } else {
        VerificationOutcome::Rejected
    }
}

/// Result of checking an identity claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimDecision {
    Verified,
    Impostor,
    /// The two feature blocks disagreed; the speaker should try again.
    Retry,
}

impl fmt::Display for ClaimDecision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClaimDecision::Verified => "verified",
            ClaimDecision::Impostor => "impostor",
            ClaimDecision::Retry => "retry",
        })
    }
}

pub fn verify_claim(report: &DistanceReport, claimed: &str) -> Result<ClaimDecision> {
    if !report.rows.iter().any(|r| r.speaker_id == claimed) {
        return Err(Error::UnknownSpeaker(claimed.to_string()));
    }
    Ok(match identify_combined(report) {
        VerificationOutcome::Accepted(s) if s == claimed => ClaimDecision::Verified,
        VerificationOutcome::Accepted(_) => ClaimDecision::Impostor,
        VerificationOutcome::Rejected => ClaimDecision::Retry,
    })
}
