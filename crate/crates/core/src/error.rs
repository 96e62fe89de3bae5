use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: unsupported WAV file: {reason}")]
    WavFormat { path: PathBuf, reason: String },

    #[error("empty signal")]
    EmptySignal,

    #[error("silent signal")]
    SilentSignal,

    #[error("no speech detected")]
    NoSpeech,

    #[error("signal shorter than one analysis frame ({len} < {frame_len} samples)")]
    SignalTooShort { len: usize, frame_len: usize },

    #[error("unvoiced or degenerate signal")]
    Degenerate,

    #[error("pitch not detected")]
    PitchNotDetected,

    #[error("region too short: {periods} pitch periods, need at least {required}")]
    RegionTooShort { periods: usize, required: usize },

    #[error("ill-conditioned autocorrelation at order {order}")]
    IllConditioned { order: usize },

    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("no model enrolled for vowel /{0}/")]
    NoModelForVowel(crate::Vowel),

    #[error("unknown speaker `{0}`")]
    UnknownSpeaker(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "training failed for speaker `{speaker}` vowel /{vowel}/: no utterance could be processed"
    )]
    EmptyGroup {
        speaker: String,
        vowel: crate::Vowel,
    },

    #[error("manifest: {0}")]
    Manifest(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
