//! Per-speaker, per-vowel mean feature models and their text file format.
//!
//! ```text
//! PSV-MODELS v1
//! <speaker_id> <vowel> <n_utterances> <poc> <pot> <nec> <net> <c1> ... <c12>
//! ```
//!
//! Values are written in the shortest decimal form that reads back to the
//! identical `f64`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{FeatureVector, UtteranceFeatures, FEATURE_DIM};
use crate::vowel::Vowel;

pub const MODEL_FILE_HEADER: &str = "PSV-MODELS v1";

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerModel {
    pub speaker_id: String,
    pub vowel: Vowel,
    pub mean_features: FeatureVector,
    pub n_utterances: usize,
}

fn validate_speaker_id(id: &str) -> Result<()> {
    if id.is_empty() || id.chars().any(char::is_whitespace) {
        return Err(Error::invalid(format!(
            "speaker id {id:?} must be non-empty and free of whitespace"
        )));
    }
    Ok(())
}

/// Coordinate-wise mean of the utterance vectors. Each coordinate is summed
/// in sorted order so the result does not depend on input order.
pub fn build_model(
    speaker_id: &str,
    vowel: Vowel,
    features: &[UtteranceFeatures],
) -> Result<SpeakerModel> {
    validate_speaker_id(speaker_id)?;
    if features.is_empty() {
        return Err(Error::invalid(format!(
            "no utterances for speaker `{speaker_id}` vowel /{vowel}/"
        )));
    }
    if let Some(f) = features.iter().find(|f| f.vowel != vowel) {
        return Err(Error::invalid(format!(
            "utterance labelled /{}/ in a /{vowel}/ model",
            f.vowel
        )));
    }
    let vectors: Vec<FeatureVector> = features.iter().map(UtteranceFeatures::to_vector).collect();
    let n = vectors.len() as f64;
    let mut mean = [0.0; FEATURE_DIM];
    let mut column = Vec::with_capacity(vectors.len());
    for (d, m) in mean.iter_mut().enumerate() {
        column.clear();
        column.extend(vectors.iter().map(|v| v[d]));
        column.sort_by(f64::total_cmp);
        *m = column.iter().sum::<f64>() / n;
    }
    Ok(SpeakerModel {
        speaker_id: speaker_id.to_string(),
        vowel,
        mean_features: mean,
        n_utterances: features.len(),
    })
}

/// Enrolled models keyed by `(speaker, vowel)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelSet {
    models: BTreeMap<(String, Vowel), SpeakerModel>,
}

impl ModelSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, model: SpeakerModel) -> Result<()> {
        validate_speaker_id(&model.speaker_id)?;
        if model.n_utterances == 0 || model.mean_features.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "model for `{}` /{}/ has no utterances or non-finite values",
                model.speaker_id, model.vowel
            )));
        }
        let key = (model.speaker_id.clone(), model.vowel);
        if self.models.contains_key(&key) {
            return Err(Error::invalid(format!(
                "duplicate model for speaker `{}` vowel /{}/",
                key.0, key.1
            )));
        }
        self.models.insert(key, model);
        Ok(())
    }

    pub fn get(&self, speaker_id: &str, vowel: Vowel) -> Option<&SpeakerModel> {
        self.models.get(&(speaker_id.to_string(), vowel))
    }

    pub fn len(&self) -> usize {
        self.models.len()
    }

    pub fn is_empty(&self) -> bool {
        self.models.is_empty()
    }

    /// All models ordered by speaker id, then vowel.
    pub fn iter(&self) -> impl Iterator<Item = &SpeakerModel> {
        self.models.values()
    }

    /// Models for one vowel, ordered by speaker id.
    pub fn for_vowel(&self, vowel: Vowel) -> impl Iterator<Item = &SpeakerModel> {
        self.models.values().filter(move |m| m.vowel == vowel)
    }

    pub fn contains_speaker(&self, speaker_id: &str) -> bool {
        self.models.keys().any(|(s, _)| s == speaker_id)
    }

    /// Distinct speaker ids in sorted order.
    pub fn speakers(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.models.keys().map(|(s, _)| s.as_str()).collect();
        out.dedup();
        out
    }
}

pub fn format_models(set: &ModelSet) -> String {
    let mut out = String::new();
    out.push_str(MODEL_FILE_HEADER);
    out.push('\n');
    for m in set.iter() {
        write!(out, "{} {} {}", m.speaker_id, m.vowel, m.n_utterances).unwrap();
        for v in m.mean_features {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn save_models(set: &ModelSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_models(set)).map_err(|e| Error::io(path, e))
}

pub fn parse_models(text: &str, path: &Path) -> Result<ModelSet> {
    let err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == MODEL_FILE_HEADER => {}
        Some((_, h)) => {
            return Err(err(
                1,
                format!(
                    "expected header {MODEL_FILE_HEADER:?}, found {:?}",
                    h.trim()
                ),
            ))
        }
        None => return Err(err(1, "missing header".into())),
    }

    let mut set = ModelSet::new();
    for (i, line) in lines {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 + FEATURE_DIM {
            return Err(err(
                lineno,
                format!(
                    "expected {} feature values, found {}",
                    FEATURE_DIM,
                    fields.len().saturating_sub(3)
                ),
            ));
        }
        let vowel: Vowel = fields[1]
            .parse()
            .map_err(|e: Error| err(lineno, e.to_string()))?;
        let n_utterances: usize = fields[2]
            .parse()
            .map_err(|_| err(lineno, format!("bad utterance count {:?}", fields[2])))?;
        let mut mean = [0.0; FEATURE_DIM];
        for (slot, f) in mean.iter_mut().zip(&fields[3..]) {
            *slot = f
                .parse()
                .map_err(|_| err(lineno, format!("bad value {f:?}")))?;
        }
        set.insert(SpeakerModel {
            speaker_id: fields[0].to_string(),
            vowel,
            mean_features: mean,
            n_utterances,
        })
        .map_err(|e| err(lineno, e.to_string()))?;
    }
    Ok(set)
}

pub fn load_models(path: impl AsRef<Path>) -> Result<ModelSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_models(&text, path)
}
