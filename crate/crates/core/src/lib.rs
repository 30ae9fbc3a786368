//! Numerical core for modulated replay attacks and their detection.
//!
//! Everything here is `no_std` (with `alloc`) and free of IO: transforms,
//! loudspeaker modelling and inverse filtering, the modulation processor,
//! a software replay channel, and the dual-domain detector (local extrema
//! patterns in time, spectral-CDF area in frequency).
//!
//! File formats, corpus management and the command line live in the
//! `replaymod` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod attack;
pub mod dsp;
pub mod dualguard;
mod error;
pub mod rng;
pub mod speaker;
pub mod voice;

pub use error::{Error, Result};

pub use attack::{
    apply_speaker, classical_replay, l2_similarity, modulate, modulated_replay, Converter,
    ModulatedAudio, Provenance,
};
pub use dsp::{
    combine, fft, frame, ifft, mix_noise, split, AmplitudeSpectrum, FrameSequence, PhaseSpectrum,
    Signal, Spectrum,
};
pub use dualguard::{
    classify_freq, classify_time, detect, detect_utterance, extract_lep, local_extrema_ratio,
    spectral_auc, train_svm, tune_threshold, DetectionVerdict, Detector, FreqDecision, Label,
    LerPattern, SpectrumConvention, SvmConfig, SvmModel, UtteranceVerdict,
};
pub use speaker::{
    build_inverse_filter, fit_response, measure_speaker, measurement_grid, sample_response,
    DiscreteResponse, InverseFilter, ResponseCurve, SpeakerModel, SpeakerProfile,
};
pub use voice::{synth_voice, VoiceSpec};
