//! Synthetic vowels and speaker corpora with known ground truth.
//!
//! A unit impulse train at an exact integer period drives a cascade of
//! two-pole formant resonators. Slow amplitude shaping, short onset and
//! offset ramps, optional silence padding and a seeded Gaussian noise floor
//! make the result look like a cut vowel segment.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::manifest::{write_manifest, ManifestEntry, Split};
use crate::error::{Error, Result};
use crate::signal_io::SampleBuffer;
use crate::vowel::Vowel;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Formant {
    pub center_hz: f64,
    pub bandwidth_hz: f64,
}

impl Formant {
    pub const fn new(center_hz: f64, bandwidth_hz: f64) -> Self {
        Self {
            center_hz,
            bandwidth_hz,
        }
    }
}

/// Adult male reference formants (F1..F3) with typical bandwidths.
pub fn reference_formants(vowel: Vowel) -> [Formant; 3] {
    match vowel {
        Vowel::A => [
            Formant::new(730.0, 90.0),
            Formant::new(1090.0, 110.0),
            Formant::new(2440.0, 170.0),
        ],
        Vowel::E => [
            Formant::new(530.0, 70.0),
            Formant::new(1840.0, 120.0),
            Formant::new(2480.0, 170.0),
        ],
        Vowel::I => [
            Formant::new(270.0, 60.0),
            Formant::new(2290.0, 120.0),
            Formant::new(3010.0, 200.0),
        ],
        Vowel::O => [
            Formant::new(570.0, 80.0),
            Formant::new(840.0, 90.0),
            Formant::new(2410.0, 160.0),
        ],
        Vowel::U => [
            Formant::new(300.0, 60.0),
            Formant::new(870.0, 90.0),
            Formant::new(2240.0, 160.0),
        ],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthOptions {
    /// Peak amplitude of the voiced part before noise is added.
    pub amplitude: f64,
    /// Noise standard deviation relative to `amplitude`.
    pub noise_level: f64,
    /// Raised-cosine onset and offset length.
    pub ramp_s: f64,
    /// Noise-only padding before and after the vowel.
    pub padding_s: f64,
    /// Round samples to integers, as a 16-bit export would.
    pub quantize: bool,
}

impl Default for SynthOptions {
    fn default() -> Self {
        Self {
            amplitude: 8_000.0,
            noise_level: 1e-3,
            ramp_s: 0.02,
            padding_s: 0.0,
            quantize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthVowel {
    pub buffer: SampleBuffer,
    /// Exact excitation period in samples.
    pub period_samples: usize,
    /// First sample of the voiced part.
    pub voiced_start: usize,
    pub voiced_len: usize,
}

/// Two-pole resonator with unity gain at DC.
struct Resonator {
    a: f64,
    b: f64,
    c: f64,
    y1: f64,
    y2: f64,
}

impl Resonator {
    fn new(f: Formant, sample_rate: f64) -> Self {
        let r = (-PI * f.bandwidth_hz / sample_rate).exp();
        let c = -r * r;
        let b = 2.0 * r * (2.0 * PI * f.center_hz / sample_rate).cos();
        Self {
            a: 1.0 - b - c,
            b,
            c,
            y1: 0.0,
            y2: 0.0,
        }
    }

    fn tick(&mut self, x: f64) -> f64 {
        let y = self.a * x + self.b * self.y1 + self.c * self.y2;
        self.y2 = self.y1;
        self.y1 = y;
        y
    }
}

pub fn synth_vowel(
    f0_hz: f64,
    formants: &[Formant],
    duration_s: f64,
    sample_rate_hz: u32,
    seed: u64,
) -> Result<SynthVowel> {
    synth_vowel_with(
        f0_hz,
        formants,
        duration_s,
        sample_rate_hz,
        seed,
        &SynthOptions::default(),
    )
}

pub fn synth_vowel_with(
    f0_hz: f64,
    formants: &[Formant],
    duration_s: f64,
    sample_rate_hz: u32,
    seed: u64,
    opts: &SynthOptions,
) -> Result<SynthVowel> {
    let sr = f64::from(sample_rate_hz);
    let nyquist = sr / 2.0;
    if sample_rate_hz == 0 || !(f0_hz > 0.0 && f0_hz < nyquist) {
        return Err(Error::invalid(format!(
            "f0 {f0_hz} Hz must lie in (0, {nyquist}) Hz"
        )));
    }
    if formants.len() > 3 {
        return Err(Error::invalid("at most three formants"));
    }
    for f in formants {
        if !(f.center_hz > 0.0 && f.center_hz < nyquist && f.bandwidth_hz > 0.0) {
            return Err(Error::invalid(format!(
                "formant {} Hz / {} Hz bandwidth is out of range",
                f.center_hz, f.bandwidth_hz
            )));
        }
    }
    if duration_s.is_nan() || duration_s <= 0.0 || opts.padding_s < 0.0 || opts.ramp_s < 0.0 {
        return Err(Error::invalid("durations must be positive"));
    }

    let period = (sr / f0_hz).round().max(1.0) as usize;
    let voiced_len = (duration_s * sr).round() as usize;
    if voiced_len < 2 * period {
        return Err(Error::invalid("duration shorter than two pitch periods"));
    }
    let ramp = ((opts.ramp_s * sr).round() as usize).min(voiced_len / 2);
    let pad = (opts.padding_s * sr).round() as usize;

    let envelope = |n: usize| -> f64 {
        let t = n as f64 / voiced_len as f64;
        let swell = 0.9 + 0.1 * (PI * t).sin();
        let edge = if n < ramp {
            0.5 - 0.5 * (PI * n as f64 / ramp as f64).cos()
        } else if n >= voiced_len - ramp {
            0.5 - 0.5 * (PI * (voiced_len - 1 - n) as f64 / ramp as f64).cos()
        } else {
            1.0
        };
        swell * edge
    };

    let mut resonators: Vec<Resonator> = formants.iter().map(|&f| Resonator::new(f, sr)).collect();
    let mut voiced: Vec<f64> = (0..voiced_len)
        .map(|n| {
            let x = if n % period == 0 { envelope(n) } else { 0.0 };
            resonators.iter_mut().fold(x, |acc, r| r.tick(acc))
        })
        .collect();
    let peak = voiced.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak > 0.0 {
        let g = opts.amplitude / peak;
        voiced.iter_mut().for_each(|v| *v *= g);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = opts.noise_level * opts.amplitude;
    let mut samples = Vec::with_capacity(voiced_len + 2 * pad);
    samples.extend(std::iter::repeat_n(0.0, pad));
    samples.extend(voiced);
    samples.extend(std::iter::repeat_n(0.0, pad));
    if sigma > 0.0 {
        for s in samples.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *s += sigma * z;
        }
    }
    if opts.quantize {
        samples.iter_mut().for_each(|s| *s = s.round());
    }

    Ok(SynthVowel {
        buffer: SampleBuffer::new(samples, sample_rate_hz)?,
        period_samples: period,
        voiced_start: pad,
        voiced_len,
    })
}

/// Layout and randomness of a synthetic enrollment/test corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub n_speakers: usize,
    pub train_per_vowel: usize,
    pub test_per_vowel: usize,
    pub seed: u64,
    pub sample_rate_hz: u32,
    pub duration_s: f64,
    /// Per-utterance relative F0 jitter bound.
    pub f0_jitter: f64,
    /// Per-utterance relative formant jitter bound.
    pub formant_jitter: f64,
    pub options: SynthOptions,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            n_speakers: 10,
            train_per_vowel: 20,
            test_per_vowel: 5,
            seed: 2012,
            sample_rate_hz: 16_000,
            duration_s: 0.3,
            f0_jitter: 0.02,
            formant_jitter: 0.03,
            options: SynthOptions {
                padding_s: 0.05,
                quantize: true,
                ..SynthOptions::default()
            },
        }
    }
}

/// Stable vocal characteristics of one synthetic speaker.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerProfile {
    pub speaker_id: String,
    pub f0_hz: f64,
    pub formants: Vec<(Vowel, [Formant; 3])>,
}

impl SpeakerProfile {
    pub fn formants_for(&self, vowel: Vowel) -> [Formant; 3] {
        self.formants
            .iter()
            .find(|(v, _)| *v == vowel)
            .map(|(_, f)| *f)
            .expect("profile covers every vowel")
    }
}

/// Draws distinct speaker profiles: F0 spread over 90..190 Hz, an overall
/// vocal-tract scale, per-formant offsets and a bandwidth scale.
pub fn speaker_profiles(n_speakers: usize, seed: u64) -> Vec<SpeakerProfile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_5eed);
    (0..n_speakers)
        .map(|s| {
            let slot = if n_speakers > 1 {
                s as f64 / (n_speakers - 1) as f64
            } else {
                0.5
            };
            let f0_hz = 90.0 + 100.0 * slot + rng.random_range(-4.0..4.0);
            let tract = rng.random_range(0.88..1.12);
            let bw_scale = rng.random_range(0.8..1.25);
            let formants = Vowel::ALL
                .iter()
                .map(|&v| {
                    let f = reference_formants(v).map(|f| {
                        Formant::new(
                            f.center_hz * tract * rng.random_range(0.95..1.05),
                            f.bandwidth_hz * bw_scale,
                        )
                    });
                    (v, f)
                })
                .collect();
            SpeakerProfile {
                speaker_id: format!("s{:02}", s + 1),
                f0_hz,
                formants,
            }
        })
        .collect()
}

/// Writes one quantized text-sample file per utterance under `dir` plus
/// `dir/manifest.csv`, and returns the manifest entries (paths relative to
/// `dir`).
pub fn make_synthetic_corpus(
    dir: impl AsRef<Path>,
    spec: &CorpusSpec,
) -> Result<Vec<ManifestEntry>> {
    let dir = dir.as_ref();
    if spec.n_speakers < 2 {
        return Err(Error::invalid("a corpus needs at least two speakers"));
    }
    if spec.train_per_vowel == 0 || spec.test_per_vowel == 0 {
        return Err(Error::invalid(
            "need at least one train and one test utterance per vowel",
        ));
    }
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

    let profiles = speaker_profiles(spec.n_speakers, spec.seed);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut entries = Vec::new();
    for profile in &profiles {
        for vowel in Vowel::ALL {
            let base = profile.formants_for(vowel);
            let splits = std::iter::repeat_n(Split::Train, spec.train_per_vowel)
                .chain(std::iter::repeat_n(Split::Test, spec.test_per_vowel));
            for (k, split) in splits.enumerate() {
                let f0 = profile.f0_hz * (1.0 + rng.random_range(-spec.f0_jitter..=spec.f0_jitter));
                let formants = base.map(|f| {
                    Formant::new(
                        f.center_hz
                            * (1.0 + rng.random_range(-spec.formant_jitter..=spec.formant_jitter)),
                        f.bandwidth_hz,
                    )
                });
                let seed = rng.random::<u64>();
                let utt = synth_vowel_with(
                    f0,
                    &formants,
                    spec.duration_s,
                    spec.sample_rate_hz,
                    seed,
                    &spec.options,
                )?;
                let rel = PathBuf::from(format!(
                    "{}/{}_{}_{}_{:02}.txt",
                    profile.speaker_id, profile.speaker_id, vowel, split, k
                ));
                let full = dir.join(&rel);
                if let Some(parent) = full.parent() {
                    fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
                }
                crate::signal_io::write_text_samples(&utt.buffer, &full)?;
                entries.push(ManifestEntry {
                    path: rel,
                    speaker_id: profile.speaker_id.clone(),
                    vowel,
                    split,
                });
            }
        }
    }
    write_manifest(dir.join("manifest.csv"), &entries)?;
    Ok(entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::count_extrema_in;

    #[test]
    fn exact_period() {
        let v = synth_vowel(100.0, &reference_formants(Vowel::A), 0.5, 16_000, 1).unwrap();
        assert_eq!(v.period_samples, 160);
        assert_eq!(v.buffer.len(), 8_000);
        let v = synth_vowel(120.0, &reference_formants(Vowel::A), 0.5, 16_000, 1).unwrap();
        assert_eq!(v.period_samples, 133);
    }

    #[test]
    fn same_seed_same_buffer() {
        let f = reference_formants(Vowel::E);
        let a = synth_vowel(130.0, &f, 0.3, 16_000, 42).unwrap();
        let b = synth_vowel(130.0, &f, 0.3, 16_000, 42).unwrap();
        let c = synth_vowel(130.0, &f, 0.3, 16_000, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.buffer, c.buffer);
    }

    #[test]
    fn bare_pulse_train() {
        let opts = SynthOptions {
            noise_level: 0.0,
            ramp_s: 0.0,
            ..SynthOptions::default()
        };
        let v = synth_vowel_with(100.0, &[], 0.1, 16_000, 0, &opts).unwrap();
        let s = v.buffer.samples();
        for (n, &x) in s.iter().enumerate() {
            assert_eq!(x != 0.0, n % 160 == 0);
        }
        // An isolated impulse inside a period is one positive crest.
        let c = count_extrema_in(&s[150..170]).unwrap();
        assert_eq!((c.poc, c.pot, c.nec, c.net), (1, 0, 0, 0));
    }

    #[test]
    fn rejects_bad_parameters() {
        let f = reference_formants(Vowel::I);
        assert!(synth_vowel(9_000.0, &f, 0.3, 16_000, 0).is_err());
        assert!(synth_vowel(0.0, &f, 0.3, 16_000, 0).is_err());
        assert!(synth_vowel(100.0, &[Formant::new(9_000.0, 100.0)], 0.3, 16_000, 0).is_err());
        assert!(synth_vowel(100.0, &[f[0], f[1], f[2], f[0]], 0.3, 16_000, 0).is_err());
        assert!(synth_vowel(100.0, &f, 0.0, 16_000, 0).is_err());
    }

    #[test]
    fn profiles_are_distinct() {
        let p = speaker_profiles(10, 7);
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                assert!((p[i].f0_hz - p[j].f0_hz).abs() > 0.0);
            }
        }
        assert_eq!(p, speaker_profiles(10, 7));
    }

    #[test]
    fn corpus_counts_and_determinism() {
        let spec = CorpusSpec {
            n_speakers: 2,
            train_per_vowel: 2,
            test_per_vowel: 1,
            duration_s: 0.1,
            ..CorpusSpec::default()
        };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ea = make_synthetic_corpus(a.path(), &spec).unwrap();
        let eb = make_synthetic_corpus(b.path(), &spec).unwrap();
        assert_eq!(ea.len(), 2 * 5 * 3);
        assert_eq!(ea, eb);
        for e in &ea {
            assert_eq!(
                fs::read(a.path().join(&e.path)).unwrap(),
                fs::read(b.path().join(&e.path)).unwrap()
            );
        }
        assert!(a.path().join("manifest.csv").exists());

        let one = CorpusSpec {
            n_speakers: 1,
            ..spec
        };
        assert!(make_synthetic_corpus(a.path(), &one).is_err());
    }
}
