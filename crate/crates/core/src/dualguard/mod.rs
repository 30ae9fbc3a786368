//! Dual-domain replay detector.
//!
//! Time domain: the local extrema ratio (LER) of a segment at window
//! radii 1..=r_max forms a pattern ([`LerPattern`]) that a linear
//! max-margin classifier separates into genuine and modulated audio.
//! Frequency domain: the area under the cumulative distribution of
//! normalised power over frequency ([`spectral_auc`]) is compared with a
//! threshold; replayed audio loses low-frequency power and scores lower.
//! [`detect`] runs the two checks in series.

mod auc;
mod detect;
mod ler;
mod svm;

pub use auc::{
    classify_freq, error_count, spectral_auc, spectral_auc_with, spectral_cdf, tune_threshold, FreqDecision,
    SpectrumConvention, DEFAULT_AUC_THRESHOLD,
};
pub use detect::{
    detect, detect_utterance, DetectionVerdict, Detector, Label, UtteranceVerdict, SILENCE_POWER,
};
pub use ler::{extract_lep, extract_lep_samples, ler_samples, local_extrema_ratio, LerPattern, DEFAULT_R_MAX};
pub use svm::{classify_time, train_svm, SvmConfig, SvmModel};
