//! Speaker verification from steady-state vowels.
//!
//! Each vowel utterance is reduced to 16 values: the per-period averages of
//! four intrapitch extrema counters (positive crest, positive trough,
//! negative crest, negative trough) and twelve LPC-derived cepstral
//! coefficients computed pitch-synchronously over three-period frames.
//! Speakers are enrolled as per-vowel mean vectors. At test time the cepstral
//! block and the temporal block each pick their nearest speaker under a
//! weighted squared distance; the trial is accepted only when both agree.
//!
//! The pipeline stages live in their own modules:
//! [`signal_io`] → [`preprocess`] → [`pitch`] → [`features`] →
//! [`modeling`] → [`decision`], with [`evaluation`] driving batch runs and
//! synthetic test corpora.

pub mod decision;
pub mod error;
pub mod evaluation;
pub mod features;
pub mod modeling;
pub mod pipeline;
pub mod pitch;
pub mod preprocess;
pub mod signal_io;
mod vowel;

pub use decision::{
    identify_combined, score_against_models, verify_claim, weighted_distance, ClaimDecision,
    DistanceReport, DistanceWeights, VerificationOutcome,
};
pub use error::{Error, Result};
pub use features::{FeatureVector, UtteranceFeatures, FEATURE_DIM};
pub use modeling::{build_model, load_models, save_models, ModelSet, SpeakerModel};
pub use pipeline::{analyze, analyze_file, preprocess, PipelineConfig};
pub use pitch::{PitchMarks, Polarity};
pub use signal_io::SampleBuffer;
pub use vowel::Vowel;
