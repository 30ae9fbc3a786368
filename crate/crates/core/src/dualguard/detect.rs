use crate::dsp::{frame, next_pow2, power, Signal, DEFAULT_FRAME_MS, DEFAULT_HOP_MS};
use crate::{Error, Result};

use super::{
    classify_freq, classify_time, spectral_auc_with, FreqDecision, LerPattern, SpectrumConvention, SvmModel,
    DEFAULT_AUC_THRESHOLD,
};
use super::ler::extract_lep_samples;

/// Segments with mean power below this are not classified.
pub const SILENCE_POWER: f64 = 1e-6;

pub use crate::attack::Provenance as Label;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionVerdict {
    pub label: Label,
    /// Signed SVM margin; positive leans modulated.
    pub ler_score: f64,
    /// `None` when the time-domain check already flagged the segment.
    pub freq: Option<FreqDecision>,
}

/// Trained detector plus its framing and frequency-check settings.
#[derive(Debug, Clone, PartialEq)]
pub struct Detector {
    pub model: SvmModel,
    pub threshold: f64,
    pub convention: SpectrumConvention,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub silence_power: f64,
}

impl Detector {
    pub fn new(model: SvmModel, threshold: f64) -> Self {
        Self {
            model,
            threshold,
            convention: SpectrumConvention::OneSided,
            frame_ms: DEFAULT_FRAME_MS,
            hop_ms: DEFAULT_HOP_MS,
            silence_power: SILENCE_POWER,
        }
    }

    pub fn with_default_threshold(model: SvmModel) -> Self {
        Self::new(model, DEFAULT_AUC_THRESHOLD)
    }

    /// Verdict for one segment, or `None` if it is below the silence gate.
    pub fn detect(&self, segment: &[f64]) -> Result<Option<DetectionVerdict>> {
        if segment.is_empty() {
            return Err(Error::EmptyInput);
        }
        if power(segment) < self.silence_power {
            return Ok(None);
        }
        let lep = LerPattern { values: extract_lep_samples(segment, self.model.r_max())? };
        let convention = self.convention;
        self.classify_features(&lep, || spectral_auc_with(segment, next_pow2(segment.len()), convention)).map(Some)
    }

    /// Serial decision from precomputed features. `auc` is only evaluated
    /// when the time-domain check passes.
    pub fn classify_features<F>(&self, lep: &LerPattern, auc: F) -> Result<DetectionVerdict>
    where
        F: FnOnce() -> Result<f64>,
    {
        let (is_modulated, margin) = classify_time(&self.model, lep);
        if is_modulated {
            return Ok(DetectionVerdict { label: Label::ModulatedReplay, ler_score: margin, freq: None });
        }
        let freq = classify_freq(auc()?, self.threshold);
        let label = if freq.is_replay { Label::ClassicalReplay } else { Label::Genuine };
        Ok(DetectionVerdict { label, ler_score: margin, freq: Some(freq) })
    }

    pub fn detect_utterance(&self, signal: &Signal) -> Result<UtteranceVerdict> {
        let frames = frame(signal, self.frame_ms, self.hop_ms)?;
        let mut verdicts = alloc::vec::Vec::with_capacity(frames.len());
        for f in &frames.frames {
            verdicts.push(self.detect(f.samples())?);
        }
        UtteranceVerdict::aggregate(verdicts.iter().map(|v| v.as_ref()))
    }
}

/// Serial check on one segment with default framing-independent settings.
pub fn detect(segment: &Signal, model: &SvmModel, threshold: f64) -> Result<Option<DetectionVerdict>> {
    Detector::new(model.clone(), threshold).detect(segment.samples())
}

pub fn detect_utterance(signal: &Signal, detector: &Detector) -> Result<UtteranceVerdict> {
    detector.detect_utterance(signal)
}

/// Majority vote over voiced frames.
#[derive(Debug, Clone, PartialEq)]
pub struct UtteranceVerdict {
    pub label: Label,
    /// Frame counts indexed by `Label as usize` order: genuine, classical, modulated.
    pub counts: [usize; 3],
    pub skipped: usize,
    pub mean_margin: f64,
    /// Mean AUC over frames that reached the frequency check (NaN if none).
    pub mean_auc: f64,
}

impl UtteranceVerdict {
    pub fn voiced(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Ties go to the more severe label (modulated, then classical).
    pub fn aggregate<'a, I>(verdicts: I) -> Result<Self>
    where
        I: IntoIterator<Item = Option<&'a DetectionVerdict>>,
    {
        let mut counts = [0usize; 3];
        let mut skipped = 0;
        let (mut margin, mut auc, mut n_auc) = (0.0, 0.0, 0usize);
        for v in verdicts {
            match v {
                None => skipped += 1,
                Some(v) => {
                    counts[label_index(v.label)] += 1;
                    margin += v.ler_score;
                    if let Some(f) = v.freq {
                        auc += f.auc;
                        n_auc += 1;
                    }
                }
            }
        }
        let voiced: usize = counts.iter().sum();
        if voiced == 0 {
            return Err(Error::NoVoicedContent);
        }
        let best = counts.iter().copied().max().unwrap_or(0);
        let label = [Label::ModulatedReplay, Label::ClassicalReplay, Label::Genuine]
            .into_iter()
            .find(|l| counts[label_index(*l)] == best)
            .expect("some label attains the maximum");
        Ok(Self {
            label,
            counts,
            skipped,
            mean_margin: margin / voiced as f64,
            mean_auc: if n_auc > 0 { auc / n_auc as f64 } else { f64::NAN },
        })
    }
}

pub(crate) fn label_index(l: Label) -> usize {
    match l {
        Label::Genuine => 0,
        Label::ClassicalReplay => 1,
        Label::ModulatedReplay => 2,
    }
}
