//! Feature extraction, k-fold cross-validation and report emitters.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use replaymod_core::dsp::{frame, next_pow2, power, DEFAULT_FRAME_MS, DEFAULT_HOP_MS};
use replaymod_core::dualguard::{extract_lep_samples, spectral_auc_with, tune_threshold, SILENCE_POWER};
use replaymod_core::rng::SplitMix64;
use replaymod_core::{train_svm, Detector, LerPattern, Provenance, Signal, SpectrumConvention, SvmConfig, UtteranceVerdict};

use crate::atomic::write_atomic;
use crate::corpus::Sample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalConfig {
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub r_max: usize,
    pub convention: SpectrumConvention,
    pub silence_power: f64,
    pub svm: SvmConfig,
    pub folds: usize,
    /// Use every `train_stride`-th voiced frame for training.
    pub train_stride: usize,
    /// Train the time-domain classifier against genuine and classical
    /// frames rather than genuine frames alone.
    pub classical_negatives: bool,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            frame_ms: DEFAULT_FRAME_MS,
            hop_ms: DEFAULT_HOP_MS,
            r_max: 20,
            convention: SpectrumConvention::OneSided,
            silence_power: SILENCE_POWER,
            svm: SvmConfig::default(),
            folds: 10,
            train_stride: 1,
            classical_negatives: false,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameFeatures {
    pub lep: LerPattern,
    pub auc: f64,
}

#[derive(Debug, Clone)]
pub struct UtteranceFeatures {
    pub label: Provenance,
    pub speaker: String,
    pub index: usize,
    pub frames: Vec<FrameFeatures>,
    pub skipped: usize,
}

pub fn label_index(l: Provenance) -> usize {
    match l {
        Provenance::Genuine => 0,
        Provenance::ClassicalReplay => 1,
        Provenance::ModulatedReplay => 2,
    }
}

/// Per-frame features of the voiced frames of `signal`.
pub fn frame_features(signal: &Signal, cfg: &EvalConfig) -> Result<(Vec<FrameFeatures>, usize)> {
    let frames = frame(signal, cfg.frame_ms, cfg.hop_ms)?;
    let mut out = Vec::with_capacity(frames.len());
    let mut skipped = 0;
    for f in &frames.frames {
        let x = f.samples();
        if power(x) < cfg.silence_power {
            skipped += 1;
            continue;
        }
        let lep = LerPattern { values: extract_lep_samples(x, cfg.r_max)? };
        let auc = spectral_auc_with(x, next_pow2(x.len()), cfg.convention)?;
        out.push(FrameFeatures { lep, auc });
    }
    Ok((out, skipped))
}

pub fn corpus_features(samples: &[Sample], cfg: &EvalConfig) -> Result<Vec<UtteranceFeatures>> {
    samples
        .par_iter()
        .map(|s| {
            let (frames, skipped) = frame_features(&s.signal, cfg)?;
            Ok(UtteranceFeatures { label: s.label, speaker: s.speaker.clone(), index: s.index, frames, skipped })
        })
        .collect()
}

/// Trains the time-domain classifier on genuine vs modulated frames and
/// tunes the AUC threshold on genuine vs classical frames.
pub fn train_detector(train: &[&UtteranceFeatures], cfg: &EvalConfig) -> Result<Detector> {
    let frames_of = |label: Provenance| -> Vec<&FrameFeatures> {
        train
            .iter()
            .filter(|u| u.label == label)
            .flat_map(|u| u.frames.iter().step_by(cfg.train_stride.max(1)))
            .collect()
    };
    let genuine = frames_of(Provenance::Genuine);
    let modulated = frames_of(Provenance::ModulatedReplay);
    let classical = frames_of(Provenance::ClassicalReplay);
    let mut g: Vec<LerPattern> = genuine.iter().map(|f| f.lep.clone()).collect();
    if cfg.classical_negatives {
        g.extend(classical.iter().map(|f| f.lep.clone()));
    }
    let m: Vec<LerPattern> = modulated.iter().map(|f| f.lep.clone()).collect();
    let model = train_svm(&g, &m, &cfg.svm)?;
    let ga: Vec<f64> = genuine.iter().map(|f| f.auc).collect();
    let ca: Vec<f64> = classical.iter().map(|f| f.auc).collect();
    let threshold = if ca.is_empty() { replaymod_core::dualguard::DEFAULT_AUC_THRESHOLD } else { tune_threshold(&ga, &ca)? };
    let mut det = Detector::new(model, threshold);
    det.convention = cfg.convention;
    det.frame_ms = cfg.frame_ms;
    det.hop_ms = cfg.hop_ms;
    det.silence_power = cfg.silence_power;
    Ok(det)
}

pub fn predict(det: &Detector, utt: &UtteranceFeatures) -> Result<UtteranceVerdict> {
    let verdicts = utt
        .frames
        .iter()
        .map(|f| det.classify_features(&f.lep, || Ok(f.auc)))
        .collect::<replaymod_core::Result<Vec<_>>>()?;
    let skipped = std::iter::repeat(None).take(utt.skipped);
    Ok(UtteranceVerdict::aggregate(verdicts.iter().map(Some).chain(skipped))?)
}

/// Frame-majority replay decision from AUC alone (ties count as replay).
pub fn predict_freq_only(threshold: f64, utt: &UtteranceFeatures) -> bool {
    let replay = utt.frames.iter().filter(|f| f.auc < threshold).count();
    2 * replay >= utt.frames.len()
}

#[derive(Debug, Clone, Default)]
pub struct CvReport {
    /// `confusion[true][pred]`, indices genuine / classical / modulated.
    pub confusion: [[usize; 3]; 3],
    /// `freq_only[true]` = (predicted genuine, predicted replay).
    pub freq_only: [[usize; 2]; 3],
    pub fold_accuracy: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub training_accuracy: Vec<f64>,
}

impl CvReport {
    pub fn class_total(&self, c: usize) -> usize {
        self.confusion[c].iter().sum()
    }

    /// Exact-label accuracy for class `c`.
    pub fn class_accuracy(&self, c: usize) -> f64 {
        self.confusion[c][c] as f64 / self.class_total(c).max(1) as f64
    }

    /// Fraction of class `c` given any non-genuine label.
    pub fn flagged_rate(&self, c: usize) -> f64 {
        (self.class_total(c) - self.confusion[c][0]) as f64 / self.class_total(c).max(1) as f64
    }

    pub fn false_positive_rate(&self) -> f64 {
        self.flagged_rate(0)
    }

    /// Three-class exact accuracy.
    pub fn overall_accuracy(&self) -> f64 {
        let total: usize = (0..3).map(|c| self.class_total(c)).sum();
        (0..3).map(|c| self.confusion[c][c]).sum::<usize>() as f64 / total.max(1) as f64
    }

    /// Genuine-vs-replay accuracy (either replay label counts as correct on replays).
    pub fn binary_accuracy(&self) -> f64 {
        let total: usize = (0..3).map(|c| self.class_total(c)).sum();
        let correct = self.confusion[0][0] + (1..3).map(|c| self.class_total(c) - self.confusion[c][0]).sum::<usize>();
        correct as f64 / total.max(1) as f64
    }

    pub fn freq_only_flagged_rate(&self, c: usize) -> f64 {
        let [g, r] = self.freq_only[c];
        r as f64 / (g + r).max(1) as f64
    }
}

pub fn cross_validate(feats: &[UtteranceFeatures], cfg: &EvalConfig) -> Result<CvReport> {
    cross_validate_paired(feats, feats, cfg)
}

/// k-fold cross-validation where the detector of each fold is trained on
/// `train_feats` and scored on `test_feats` (e.g. the same corpus with
/// noise added). Folds are drawn over utterance indices, so the three
/// variants of one index always fall in the same fold.
pub fn cross_validate_paired(
    train_feats: &[UtteranceFeatures],
    test_feats: &[UtteranceFeatures],
    cfg: &EvalConfig,
) -> Result<CvReport> {
    if cfg.folds < 2 {
        return Err(Error::Invalid("at least two folds required".into()));
    }
    let mut indices: Vec<usize> = train_feats.iter().chain(test_feats).map(|u| u.index).collect();
    indices.sort_unstable();
    indices.dedup();
    let mut rng = SplitMix64::derive(cfg.seed, 0xF01D);
    rng.shuffle(&mut indices);
    let fold: std::collections::HashMap<usize, usize> =
        indices.iter().enumerate().map(|(pos, &idx)| (idx, pos % cfg.folds)).collect();

    let results: Vec<Result<(CvReport, f64)>> = (0..cfg.folds)
        .into_par_iter()
        .map(|k| {
            let train: Vec<&UtteranceFeatures> = train_feats.iter().filter(|u| fold[&u.index] != k).collect();
            let test: Vec<&UtteranceFeatures> = test_feats.iter().filter(|u| fold[&u.index] == k).collect();
            let det = train_detector(&train, cfg)?;
            // The frequency-only baseline is the same detector without its time-domain stage.
            let t_freq = det.threshold;
            let mut r = CvReport::default();
            let mut correct = 0usize;
            for u in &test {
                let v = predict(&det, u)?;
                let (t, p) = (label_index(u.label), label_index(v.label));
                r.confusion[t][p] += 1;
                correct += (t == p) as usize;
                r.freq_only[t][predict_freq_only(t_freq, u) as usize] += 1;
            }
            r.thresholds.push(det.threshold);
            r.training_accuracy.push(det.model.training_accuracy);
            Ok((r, correct as f64 / test.len().max(1) as f64))
        })
        .collect();

    let mut report = CvReport::default();
    for res in results {
        let (r, acc) = res?;
        for t in 0..3 {
            for p in 0..3 {
                report.confusion[t][p] += r.confusion[t][p];
            }
            for p in 0..2 {
                report.freq_only[t][p] += r.freq_only[t][p];
            }
        }
        report.fold_accuracy.push(acc);
        report.thresholds.extend(r.thresholds);
        report.training_accuracy.extend(r.training_accuracy);
    }
    Ok(report)
}

/// Wall-clock milliseconds per `Detector::detect` call over up to
/// `max_frames` voiced frames, sorted ascending.
pub fn time_frames(det: &Detector, samples: &[Sample], max_frames: usize) -> Result<Vec<f64>> {
    let mut times = Vec::new();
    'outer: for s in samples {
        let frames = frame(&s.signal, det.frame_ms, det.hop_ms)?;
        for f in &frames.frames {
            if times.len() >= max_frames {
                break 'outer;
            }
            let t0 = Instant::now();
            let v = det.detect(f.samples())?;
            let dt = t0.elapsed().as_secs_f64() * 1e3;
            if v.is_some() {
                times.push(dt);
            }
        }
    }
    times.sort_by(f64::total_cmp);
    Ok(times)
}

pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub const LABEL_NAMES: [&str; 3] = ["genuine", "classical_replay", "modulated_replay"];

pub fn metrics_csv(r: &CvReport, timing_ms: &[f64]) -> String {
    let mut s = String::from("metric_v1,value\n");
    let mut row = |k: &str, v: f64| {
        let _ = writeln!(s, "{k},{v}");
    };
    for (c, name) in LABEL_NAMES.iter().enumerate() {
        row(&format!("accuracy.{name}"), r.class_accuracy(c));
        row(&format!("flagged.{name}"), r.flagged_rate(c));
        row(&format!("freq_only_flagged.{name}"), r.freq_only_flagged_rate(c));
        row(&format!("count.{name}"), r.class_total(c) as f64);
    }
    row("false_positive_rate", r.false_positive_rate());
    row("overall_accuracy", r.overall_accuracy());
    row("binary_accuracy", r.binary_accuracy());
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    row("cv_fold_accuracy_mean", mean(&r.fold_accuracy));
    row("auc_threshold_mean", mean(&r.thresholds));
    row("svm_training_accuracy_mean", mean(&r.training_accuracy));
    row("frame_ms_median", percentile(timing_ms, 0.5));
    row("frame_ms_p95", percentile(timing_ms, 0.95));
    s
}

pub fn confusion_csv(r: &CvReport) -> String {
    let mut s = String::from("true_label_v1,pred_genuine,pred_classical_replay,pred_modulated_replay\n");
    for (c, name) in LABEL_NAMES.iter().enumerate() {
        let row = r.confusion[c];
        let _ = writeln!(s, "{name},{},{},{}", row[0], row[1], row[2]);
    }
    s
}

/// Mean LER per radius and class.
pub fn ler_vs_r_csv(feats: &[UtteranceFeatures], r_max: usize) -> String {
    let mut sums = vec![[0.0f64; 3]; r_max];
    let mut counts = [0usize; 3];
    for u in feats {
        let c = label_index(u.label);
        for f in &u.frames {
            counts[c] += 1;
            for (r, v) in f.lep.values.iter().enumerate().take(r_max) {
                sums[r][c] += v;
            }
        }
    }
    let mut s = String::from("r_v1,genuine,classical_replay,modulated_replay\n");
    for (r, row) in sums.iter().enumerate() {
        let m = |c: usize| row[c] / counts[c].max(1) as f64;
        let _ = writeln!(s, "{},{},{},{}", r + 1, m(0), m(1), m(2));
    }
    s
}

/// Histogram of frame AUCs per class over `[lo, hi]` (data range by default).
pub fn auc_histogram_csv(feats: &[UtteranceFeatures], bins: usize) -> String {
    let all: Vec<f64> = feats.iter().flat_map(|u| u.frames.iter().map(|f| f.auc)).collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut s = String::from("bin_lo_v1,bin_hi,genuine,classical_replay,modulated_replay\n");
    if all.is_empty() || bins == 0 {
        return s;
    }
    let width = ((hi - lo) / bins as f64).max(1e-12);
    let mut h = vec![[0usize; 3]; bins];
    for u in feats {
        for f in &u.frames {
            let b = (((f.auc - lo) / width) as usize).min(bins - 1);
            h[b][label_index(u.label)] += 1;
        }
    }
    for (b, row) in h.iter().enumerate() {
        let a = lo + b as f64 * width;
        let _ = writeln!(s, "{a},{},{},{},{}", a + width, row[0], row[1], row[2]);
    }
    s
}

/// Distribution of per-utterance mean AUC per class.
pub fn auc_distribution_csv(feats: &[UtteranceFeatures]) -> String {
    let mut s = String::from("label_v1,n,min,p05,p25,median,p75,p95,max,mean\n");
    for (c, name) in LABEL_NAMES.iter().enumerate() {
        let mut v: Vec<f64> = feats
            .iter()
            .filter(|u| label_index(u.label) == c && !u.frames.is_empty())
            .map(|u| u.frames.iter().map(|f| f.auc).sum::<f64>() / u.frames.len() as f64)
            .collect();
        v.sort_by(f64::total_cmp);
        let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
        let p = |q| percentile(&v, q);
        let _ = writeln!(
            s,
            "{name},{},{},{},{},{},{},{},{},{}",
            v.len(),
            p(0.0),
            p(0.05),
            p(0.25),
            p(0.5),
            p(0.75),
            p(0.95),
            p(1.0),
            mean
        );
    }
    s
}

/// Writes every report CSV into `dir`.
pub fn write_reports(dir: &Path, r: &CvReport, feats: &[UtteranceFeatures], r_max: usize, timing_ms: &[f64]) -> Result<()> {
    write_atomic(&dir.join("metrics.csv"), metrics_csv(r, timing_ms).as_bytes())?;
    write_atomic(&dir.join("confusion.csv"), confusion_csv(r).as_bytes())?;
    write_atomic(&dir.join("ler_vs_r.csv"), ler_vs_r_csv(feats, r_max).as_bytes())?;
    write_atomic(&dir.join("auc_histogram.csv"), auc_histogram_csv(feats, 40).as_bytes())?;
    write_atomic(&dir.join("auc_distribution.csv"), auc_distribution_csv(feats).as_bytes())?;
    let mut t = String::from("frame_v1,ms\n");
    for (i, ms) in timing_ms.iter().enumerate() {
        let _ = writeln!(t, "{i},{ms}");
    }
    write_atomic(&dir.join("timing.csv"), t.as_bytes())
}
