//! Synthetic corpus generation.
//!
//! For utterance `i` a harmonic voice is synthesised from a seed derived
//! from `(seed, i)`. The genuine sample is that voice as captured by the
//! recorder. The attacker works from the clean (quantised) capture: the
//! classical replay plays it as is, the modulated replay first
//! compensates it with an inverse filter fitted to a 68-tone measurement
//! of the target speaker. Optional white noise is added to every sample
//! just before the recorder.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use replaymod_core::attack::{classical_replay_with, modulated_replay_with, quantize};
use replaymod_core::dsp::next_pow2;
use replaymod_core::rng::SplitMix64;
use replaymod_core::speaker::{build_inverse_filter, fit_response, measure_speaker, sample_response, DEFAULT_EPS};
use replaymod_core::speaker::{ResponseCurve, MEASUREMENT_TONE_S};
use replaymod_core::{mix_noise, synth_voice, Converter, InverseFilter, Provenance, Signal, SpeakerModel, VoiceSpec};

use crate::atomic::write_atomic;
use crate::error::{Error, Result};
use crate::wav::write_wav;

pub const MANIFEST_HEADER: [&str; 5] = ["path", "label", "speaker", "snr_db", "seed"];
pub const MANIFEST_FORMAT_VERSION: u32 = 1;
pub const MIN_PER_CLASS: usize = 10;

#[derive(Debug, Clone)]
pub struct CorpusConfig {
    pub n_per_class: usize,
    pub speakers: Vec<SpeakerModel>,
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub seed: u64,
    /// Template; `seed` and `sample_rate` are overwritten per utterance.
    pub voice: VoiceSpec,
    pub sample_rate: u32,
    pub converter: Converter,
    pub eps: f64,
    pub c: f64,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            n_per_class: 100,
            speakers: vec![SpeakerModel::phone(0)],
            snr_db: f64::INFINITY,
            seed: 0,
            voice: VoiceSpec::default(),
            sample_rate: 96_000,
            converter: Converter::pcm16(),
            eps: DEFAULT_EPS,
            c: 1.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Sample {
    pub label: Provenance,
    pub speaker: String,
    pub index: usize,
    /// Utterance seed (shared by the three variants of one index).
    pub seed: u64,
    pub snr_db: f64,
    pub signal: Signal,
}

impl Sample {
    pub fn relative_path(&self) -> PathBuf {
        PathBuf::from(&self.speaker).join(format!("{}_{:05}.wav", self.label.as_str(), self.index))
    }
}

/// The attacker's model of one speaker: a spline through its measured
/// response.
#[derive(Debug, Clone)]
pub struct Attacker {
    pub model: SpeakerModel,
    pub curve: ResponseCurve,
}

impl Attacker {
    pub fn measure(model: &SpeakerModel, sample_rate: u32) -> Result<Self> {
        let n = next_pow2((MEASUREMENT_TONE_S * sample_rate as f64).ceil() as usize);
        let profile = model.profile(sample_rate, n)?;
        let measured = measure_speaker(&profile, sample_rate, n)?;
        Ok(Self { model: model.clone(), curve: fit_response(&measured)? })
    }

    pub fn inverse_filter(&self, sample_rate: u32, n_fft: usize, eps: f64, c: f64) -> Result<InverseFilter> {
        let df = sample_rate as f64 / n_fft as f64;
        let gains = sample_response(&self.curve, df, n_fft)?;
        Ok(build_inverse_filter(&gains, df, eps, c)?)
    }
}

pub fn utterance_seed(seed: u64, index: usize) -> u64 {
    SplitMix64::derive(seed, index as u64).next_u64()
}

fn validate(cfg: &CorpusConfig) -> Result<()> {
    if cfg.n_per_class < MIN_PER_CLASS {
        return Err(Error::Invalid(format!("n_per_class must be at least {MIN_PER_CLASS}")));
    }
    if cfg.speakers.is_empty() {
        return Err(Error::Invalid("at least one speaker required".into()));
    }
    let mut names: Vec<&str> = cfg.speakers.iter().map(|s| s.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Invalid("speaker names must be unique".into()));
    }
    if cfg.snr_db.is_nan() {
        return Err(Error::Invalid("snr_db is NaN".into()));
    }
    Ok(())
}

/// Every sample, ordered by index, then speaker, then label.
pub fn generate(cfg: &CorpusConfig) -> Result<Vec<Sample>> {
    validate(cfg)?;
    let attackers: Vec<Attacker> =
        cfg.speakers.par_iter().map(|m| Attacker::measure(m, cfg.sample_rate)).collect::<Result<_>>()?;
    let per_index: Vec<Vec<Sample>> =
        (0..cfg.n_per_class).into_par_iter().map(|i| generate_index(cfg, &attackers, i)).collect::<Result<_>>()?;
    Ok(per_index.into_iter().flatten().collect())
}

fn generate_index(cfg: &CorpusConfig, attackers: &[Attacker], index: usize) -> Result<Vec<Sample>> {
    let seed = utterance_seed(cfg.seed, index);
    let voice = synth_voice(&VoiceSpec { seed, sample_rate: cfg.sample_rate, ..cfg.voice.clone() })?;
    let n_fft = next_pow2(voice.len());
    let conv = cfg.converter;
    let playback_only = Converter { record_bits: None, ..conv };
    let capture = |x: &Signal, stream: u64| -> Result<Signal> {
        let noisy = mix_noise(x, cfg.snr_db, SplitMix64::derive(seed, stream).next_u64())?;
        match conv.record_bits {
            Some(bits) => Ok(quantize(&noisy, bits)?),
            None => Ok(noisy),
        }
    };
    // What the attacker recorded from the victim in a quiet room.
    let source = conv.record(&voice)?;

    let mut out = Vec::with_capacity(3 * attackers.len());
    for (s, attacker) in attackers.iter().enumerate() {
        let profile = attacker.model.profile(cfg.sample_rate, n_fft)?;
        let filter = &attacker.inverse_filter(cfg.sample_rate, n_fft, cfg.eps, cfg.c)?;
        let replay_seed = SplitMix64::derive(seed, 0x1000 + s as u64).next_u64();
        let stream = 0x2000 + 4 * s as u64;
        let genuine = capture(&voice, stream)?;
        let classical = classical_replay_with(&source, &profile, replay_seed, &playback_only)?.signal;
        let classical = capture(&classical, stream + 1)?;
        let modulated = modulated_replay_with(&source, filter, &profile, replay_seed, &playback_only)?.signal;
        let modulated = capture(&modulated, stream + 2)?;
        for (label, signal) in [
            (Provenance::Genuine, genuine),
            (Provenance::ClassicalReplay, classical),
            (Provenance::ModulatedReplay, modulated),
        ] {
            out.push(Sample { label, speaker: attacker.model.name.clone(), index, seed, snr_db: cfg.snr_db, signal });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub path: String,
    pub label: Provenance,
    pub speaker: String,
    pub snr_db: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub format_version: u32,
}

impl CorpusManifest {
    pub fn render(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |source| Error::Csv { path: "manifest".into(), source };
        w.write_record(MANIFEST_HEADER).map_err(csv_err)?;
        for e in &self.entries {
            w.write_record([
                e.path.as_str(),
                e.label.as_str(),
                e.speaker.as_str(),
                &e.snr_db.to_string(),
                &e.seed.to_string(),
            ])
            .map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Error::Invalid(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.render()?)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let header = r.headers().map_err(csv_err)?.clone();
        if header.iter().ne(MANIFEST_HEADER) {
            return Err(Error::parse(path, 1, format!("expected header `{}`", MANIFEST_HEADER.join(","))));
        }
        let mut entries = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let line = i + 2;
            let field = |k: usize| rec.get(k).ok_or_else(|| Error::parse(path, line, "missing field"));
            let label = Provenance::parse(field(1)?)
                .ok_or_else(|| Error::parse(path, line, format!("unknown label `{}`", &rec[1])))?;
            entries.push(ManifestEntry {
                path: field(0)?.to_string(),
                label,
                speaker: field(2)?.to_string(),
                snr_db: field(3)?.parse().map_err(|_| Error::parse(path, line, "bad snr_db"))?,
                seed: field(4)?.parse().map_err(|_| Error::parse(path, line, "bad seed"))?,
            });
        }
        let mut paths: Vec<&str> = entries.iter().map(|e| e.path.as_str()).collect();
        paths.sort_unstable();
        if let Some(w) = paths.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Invalid(format!("{}: duplicate path {}", path.display(), w[0])));
        }
        Ok(Self { entries, format_version: MANIFEST_FORMAT_VERSION })
    }
}

/// Writes `<out_dir>/<speaker>/<label>_<index>.wav` and
/// `<out_dir>/manifest.csv`.
pub fn build_corpus(cfg: &CorpusConfig, out_dir: &Path) -> Result<CorpusManifest> {
    let samples = generate(cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    samples.par_iter().try_for_each(|s| {
        write_wav(&out_dir.join(s.relative_path()), &s.signal)
    })?;
    let entries = samples
        .iter()
        .map(|s| ManifestEntry {
            path: s.relative_path().to_string_lossy().replace('\\', "/"),
            label: s.label,
            speaker: s.speaker.clone(),
            snr_db: s.snr_db,
            seed: s.seed,
        })
        .collect();
    let manifest = CorpusManifest { entries, format_version: MANIFEST_FORMAT_VERSION };
    manifest.write(&out_dir.join("manifest.csv"))?;
    Ok(manifest)
}

/// Reads a corpus written by [`build_corpus`]. Variants sharing an
/// utterance seed get the same `index`.
pub fn load_corpus(dir: &Path) -> Result<Vec<Sample>> {
    let manifest = CorpusManifest::read(&dir.join("manifest.csv"))?;
    let mut group: HashMap<u64, usize> = HashMap::new();
    for e in &manifest.entries {
        let next = group.len();
        group.entry(e.seed).or_insert(next);
    }
    manifest
        .entries
        .par_iter()
        .map(|e| {
            Ok(Sample {
                label: e.label,
                speaker: e.speaker.clone(),
                index: group[&e.seed],
                seed: e.seed,
                snr_db: e.snr_db,
                signal: crate::wav::read_wav(&dir.join(&e.path))?,
            })
        })
        .collect()
}
