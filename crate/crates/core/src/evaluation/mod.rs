//! Batch enrollment and evaluation over labelled manifests.

mod manifest;
mod report;
mod synth;

pub use manifest::{
    read_manifest, write_manifest, Manifest, ManifestEntry, Split, MANIFEST_HEADER,
};
pub use report::{EvalReport, System, Tally, TrialOutcome, UNDEFINED_MARKER};
pub use synth::{
    make_synthetic_corpus, reference_formants, speaker_profiles, synth_vowel, synth_vowel_with,
    CorpusSpec, Formant, SpeakerProfile, SynthOptions, SynthVowel,
};

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::decision::{score_against_models, DistanceWeights};
use crate::error::{Error, Result};
use crate::features::UtteranceFeatures;
use crate::modeling::{build_model, ModelSet};
use crate::pipeline::{analyze_file, PipelineConfig};
use crate::vowel::Vowel;

/// Models plus the files that were skipped while building them.
#[derive(Debug, Clone)]
pub struct TrainingOutcome {
    pub models: ModelSet,
    pub warnings: Vec<(String, String)>,
}

fn analyze_entries<'a>(
    manifest: &Manifest,
    entries: &[&'a ManifestEntry],
    config: &PipelineConfig,
    parallel: bool,
) -> Vec<(&'a ManifestEntry, Result<UtteranceFeatures>)> {
    let run = |e: &'a ManifestEntry| (e, analyze_file(manifest.resolve(e), e.vowel, config));
    // Ordered collect keeps results in manifest order either way.
    if parallel {
        entries.par_iter().map(|&e| run(e)).collect()
    } else {
        entries.iter().map(|&e| run(e)).collect()
    }
}

/// Runs the pipeline on every `train` entry, one file at a time, and averages
/// per (speaker, vowel). Files that fail are reported as warnings; a group left
/// with no usable file aborts training.
pub fn run_training(manifest: &Manifest, config: &PipelineConfig) -> Result<TrainingOutcome> {
    let entries: Vec<&ManifestEntry> = manifest.split(Split::Train).collect();
    if entries.is_empty() {
        return Err(Error::Manifest("no training entries".into()));
    }
    let mut groups: BTreeMap<(String, Vowel), Vec<UtteranceFeatures>> = BTreeMap::new();
    let mut warnings = Vec::new();
    for (e, res) in analyze_entries(manifest, &entries, config, false) {
        let group = groups.entry((e.speaker_id.clone(), e.vowel)).or_default();
        match res {
            Ok(f) => group.push(f),
            Err(err) => warnings.push((e.path.display().to_string(), err.to_string())),
        }
    }
    let mut models = ModelSet::new();
    for ((speaker, vowel), feats) in groups {
        if feats.is_empty() {
            return Err(Error::EmptyGroup { speaker, vowel });
        }
        models.insert(build_model(&speaker, vowel, &feats)?)?;
    }
    Ok(TrainingOutcome { models, warnings })
}

/// Scores every `test` entry against `models`, analyzing files on the rayon
/// pool; results keep manifest order. Files the pipeline cannot
/// process are listed in [`EvalReport::failures`] and left out of the tallies.
pub fn run_evaluation(
    manifest: &Manifest,
    models: &ModelSet,
    config: &PipelineConfig,
    weights: &DistanceWeights,
) -> Result<EvalReport> {
    let entries: Vec<&ManifestEntry> = manifest.split(Split::Test).collect();
    for e in &entries {
        if models.for_vowel(e.vowel).next().is_none() {
            return Err(Error::NoModelForVowel(e.vowel));
        }
    }
    let mut trials = Vec::with_capacity(entries.len());
    let mut failures = Vec::new();
    for (e, res) in analyze_entries(manifest, &entries, config, true) {
        match res.and_then(|f| score_against_models(&f, models, weights)) {
            Ok(report) => trials.push(TrialOutcome {
                true_speaker: e.speaker_id.clone(),
                vowel: e.vowel,
                cepstral_pick: report.argmin_cepstral,
                temporal_pick: report.argmin_temporal,
            }),
            Err(err) => failures.push((e.path.display().to_string(), err.to_string())),
        }
    }
    let mut report = EvalReport::from_trials(trials);
    report.failures = failures;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::path::Path;

    fn small_corpus(dir: &Path) -> Manifest {
        let spec = CorpusSpec {
            n_speakers: 2,
            train_per_vowel: 3,
            test_per_vowel: 1,
            ..CorpusSpec::default()
        };
        make_synthetic_corpus(dir, &spec).unwrap();
        read_manifest(dir.join("manifest.csv")).unwrap()
    }

    #[test]
    fn trains_one_model_per_group() {
        let dir = tempfile::tempdir().unwrap();
        let m = small_corpus(dir.path());
        let out = run_training(&m, &PipelineConfig::default()).unwrap();
        assert_eq!(out.models.len(), 10);
        assert!(out.warnings.is_empty(), "{:?}", out.warnings);
        assert!(out.models.iter().all(|m| m.n_utterances == 3));
    }

    #[test]
    fn unreadable_file_is_a_warning() {
        let dir = tempfile::tempdir().unwrap();
        let m = small_corpus(dir.path());
        let victim = m.split(Split::Train).next().unwrap().clone();
        std::fs::write(m.resolve(&victim), "garbage\n").unwrap();
        let out = run_training(&m, &PipelineConfig::default()).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(
            out.models
                .get(&victim.speaker_id, victim.vowel)
                .unwrap()
                .n_utterances,
            2
        );
    }

    #[test]
    fn failed_group_aborts() {
        let dir = tempfile::tempdir().unwrap();
        let m = small_corpus(dir.path());
        for e in m
            .split(Split::Train)
            .filter(|e| e.speaker_id == "s01" && e.vowel == Vowel::O)
        {
            std::fs::write(m.resolve(e), "0\n").unwrap();
        }
        match run_training(&m, &PipelineConfig::default()) {
            Err(Error::EmptyGroup { speaker, vowel }) => {
                assert_eq!(speaker, "s01");
                assert_eq!(vowel, Vowel::O);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn evaluation_needs_models_for_each_vowel() {
        let dir = tempfile::tempdir().unwrap();
        let m = small_corpus(dir.path());
        let err = run_evaluation(
            &m,
            &ModelSet::new(),
            &PipelineConfig::default(),
            &DistanceWeights::default(),
        );
        assert!(matches!(err, Err(Error::NoModelForVowel(_))));
    }
}
