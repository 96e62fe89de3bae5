//! `pitchsync`: command-line front end for the speaker verification pipeline.

mod settings;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use pitchsync::evaluation::{
    make_synthetic_corpus, read_manifest, reference_formants, run_evaluation, run_training,
    synth_vowel_with, CorpusSpec, SynthOptions,
};
use pitchsync::pipeline::mark_utterance;
use pitchsync::signal_io::{load_signal, write_text_samples, write_wav_pcm16};
use pitchsync::{
    analyze, load_models, save_models, score_against_models, verify_claim, ClaimDecision,
    DistanceReport, Error, SampleBuffer, Vowel,
};

use settings::{Resolved, Settings};

const AFTER_HELP: &str = "\
Signals are 16-bit PCM mono WAV (by .wav extension) or text files with one
sample per line; text files use --sample-rate-hz.

Exit status: 0 success, 1 usage or configuration error, 2 data error.
`verify` additionally exits 2 for an impostor and 3 when the two feature
blocks disagree and the speaker should retry.";

#[derive(Debug, Parser)]
#[command(name = "pitchsync", version, about, after_help = AFTER_HELP)]
struct Cli {
    #[command(flatten)]
    settings: Settings,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Remove DC, normalize the peak and trim leading and trailing silence
    Preprocess {
        input: PathBuf,
        /// Output file; `.wav` writes 16-bit PCM, anything else text
        output: PathBuf,
    },
    /// Print the pitch marks of the preprocessed signal: a polarity header
    /// line, then one sample index per line
    PitchMarks { input: PathBuf },
    /// Print the 16 feature values (poc pot nec net c1..c12) on one line
    Features { input: PathBuf },
    /// Build per-speaker, per-vowel models from the manifest's train rows
    Enroll {
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
    },
    /// Report the nearest speaker of each feature block and the fused outcome
    Identify {
        #[arg(long, value_name = "FILE")]
        models: PathBuf,
        /// Vowel spoken in the input
        #[arg(long, value_parser = parse_vowel)]
        vowel: Vowel,
        input: PathBuf,
    },
    /// Check an identity claim: prints verified (exit 0), impostor (exit 2)
    /// or retry (exit 3)
    Verify {
        #[arg(long, value_name = "FILE")]
        models: PathBuf,
        /// Claimed speaker id
        #[arg(long, value_name = "ID")]
        claim: String,
        /// Vowel spoken in the input
        #[arg(long, value_parser = parse_vowel)]
        vowel: Vowel,
        input: PathBuf,
    },
    /// Score the manifest's test rows and write report.csv, trials.csv and
    /// tables.txt
    Evaluate {
        #[arg(long, value_name = "FILE")]
        models: PathBuf,
        #[arg(long, value_name = "CSV")]
        manifest: PathBuf,
        /// Report directory, created if missing
        #[arg(long, value_name = "DIR")]
        report: PathBuf,
    },
    /// Generate synthetic vowels
    #[command(subcommand)]
    Synth(SynthCommand),
}

#[derive(Debug, Subcommand)]
enum SynthCommand {
    /// One vowel with reference formants
    Vowel {
        #[arg(long, value_parser = parse_vowel)]
        vowel: Vowel,
        #[arg(long, default_value_t = 120.0, value_name = "HZ")]
        f0_hz: f64,
        #[arg(long, default_value_t = 1.0, value_name = "S")]
        duration_s: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Noise-only padding before and after the vowel
        #[arg(long, default_value_t = 0.0, value_name = "S")]
        padding_s: f64,
        /// Noise standard deviation relative to the peak amplitude
        #[arg(long, default_value_t = 1e-3, value_name = "X")]
        noise_level: f64,
        /// Output file; `.wav` writes 16-bit PCM, anything else text
        output: PathBuf,
    },
    /// A speaker corpus with manifest.csv
    Corpus {
        #[arg(long, value_name = "DIR")]
        dir: PathBuf,
        #[arg(long, default_value_t = 10)]
        speakers: usize,
        /// Training utterances per speaker and vowel
        #[arg(long, default_value_t = 20)]
        train: usize,
        /// Test utterances per speaker and vowel
        #[arg(long, default_value_t = 5)]
        test: usize,
        #[arg(long, default_value_t = 2012)]
        seed: u64,
        #[arg(long, default_value_t = 0.3, value_name = "S")]
        duration_s: f64,
    },
}

fn parse_vowel(s: &str) -> Result<Vowel, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            // A claim naming no enrolled speaker is an argument mistake.
            Error::UnknownSpeaker(_) => Failure::Usage(e.to_string()),
            e => Failure::Data(e),
        }
    }
}

/// Up to 9 significant digits, `%g` style.
fn sig9(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return format!("{v}");
    }
    let sci = format!("{v:.8e}");
    let exp: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-5..9).contains(&exp) {
        let fixed = format!("{v:.*}", (8 - exp) as usize);
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        let (mant, e) = sci.split_once('e').unwrap();
        let mant = mant.trim_end_matches('0').trim_end_matches('.');
        format!("{mant}e{e}")
    }
}

fn write_signal(buffer: &SampleBuffer, path: &Path) -> pitchsync::Result<()> {
    let is_wav = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("wav"));
    if is_wav {
        write_wav_pcm16(buffer, path)
    } else {
        write_text_samples(buffer, path)
    }
}

fn distance_table(report: &DistanceReport) -> String {
    let mut out = String::from("speaker cepstral_distance temporal_distance\n");
    for r in &report.rows {
        let _ = writeln!(
            out,
            "{} {} {}",
            r.speaker_id,
            sig9(r.cepstral),
            sig9(r.temporal)
        );
    }
    out
}

fn run(cli: Cli) -> Result<ExitCode, Failure> {
    let Resolved { pipeline, weights } = cli.settings.resolve().map_err(Failure::Usage)?;
    let load = |p: &Path| load_signal(p, pipeline.sample_rate_hz);

    match cli.command {
        Command::Preprocess { input, output } => {
            let cleaned = pitchsync::preprocess(&load(&input)?, &pipeline)?;
            write_signal(&cleaned, &output)?;
        }
        Command::PitchMarks { input } => {
            let marked = mark_utterance(&load(&input)?, &pipeline)?;
            let mut out = format!("polarity {}\n", marked.marks.polarity_used);
            for m in &marked.marks.mark_indices {
                let _ = writeln!(out, "{m}");
            }
            print!("{out}");
        }
        Command::Features { input } => {
            // The vowel only labels the result; it does not affect the values.
            let f = analyze(&load(&input)?, Vowel::A, &pipeline)?;
            let vals: Vec<String> = f.to_vector().iter().map(|v| sig9(*v)).collect();
            println!("{}", vals.join(" "));
        }
        Command::Enroll { manifest, out } => {
            let manifest = read_manifest(&manifest)?;
            let trained = run_training(&manifest, &pipeline)?;
            for (path, reason) in &trained.warnings {
                eprintln!("warning: skipped {path}: {reason}");
            }
            save_models(&trained.models, &out)?;
            println!(
                "enrolled {} models for {} speakers into {}",
                trained.models.len(),
                trained.models.speakers().len(),
                out.display()
            );
        }
        Command::Identify {
            models,
            vowel,
            input,
        } => {
            let models = load_models(&models)?;
            let f = analyze(&load(&input)?, vowel, &pipeline)?;
            let report = score_against_models(&f, &models, &weights)?;
            println!("outcome {}", pitchsync::identify_combined(&report));
            println!("cepstral_nearest {}", report.argmin_cepstral);
            println!("temporal_nearest {}", report.argmin_temporal);
            print!("{}", distance_table(&report));
        }
        Command::Verify {
            models,
            claim,
            vowel,
            input,
        } => {
            let models = load_models(&models)?;
            if !models.contains_speaker(&claim) {
                return Err(Error::UnknownSpeaker(claim).into());
            }
            let f = analyze(&load(&input)?, vowel, &pipeline)?;
            let report = score_against_models(&f, &models, &weights)?;
            let decision = verify_claim(&report, &claim)?;
            println!("{decision}");
            return Ok(ExitCode::from(match decision {
                ClaimDecision::Verified => 0,
                ClaimDecision::Impostor => 2,
                ClaimDecision::Retry => 3,
            }));
        }
        Command::Evaluate {
            models,
            manifest,
            report,
        } => {
            let models = load_models(&models)?;
            let manifest = read_manifest(&manifest)?;
            let result = run_evaluation(&manifest, &models, &pipeline, &weights)?;
            for (path, reason) in &result.failures {
                eprintln!("warning: not scored {path}: {reason}");
            }
            result.write_to_dir(&report)?;
            print!("{}", result.render_tables());
        }
        Command::Synth(SynthCommand::Vowel {
            vowel,
            f0_hz,
            duration_s,
            seed,
            padding_s,
            noise_level,
            output,
        }) => {
            let opts = SynthOptions {
                padding_s,
                noise_level,
                quantize: true,
                ..SynthOptions::default()
            };
            let s = synth_vowel_with(
                f0_hz,
                &reference_formants(vowel),
                duration_s,
                pipeline.sample_rate_hz,
                seed,
                &opts,
            )?;
            write_signal(&s.buffer, &output)?;
            println!("period_samples {}", s.period_samples);
        }
        Command::Synth(SynthCommand::Corpus {
            dir,
            speakers,
            train,
            test,
            seed,
            duration_s,
        }) => {
            let spec = CorpusSpec {
                n_speakers: speakers,
                train_per_vowel: train,
                test_per_vowel: test,
                seed,
                sample_rate_hz: pipeline.sample_rate_hz,
                duration_s,
                ..CorpusSpec::default()
            };
            let entries = make_synthetic_corpus(&dir, &spec)?;
            println!(
                "wrote {} utterances and {}",
                entries.len(),
                dir.join("manifest.csv").display()
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
