//! Command-line interface. Exit codes: 0 success, 1 runtime failure,
//! 2 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use replaymod_core::dsp::next_pow2;
use replaymod_core::rng::SplitMix64;
use replaymod_core::speaker::{PhaseModel, MEASUREMENT_TONE_S};
use replaymod_core::{
    build_inverse_filter, fit_response, measure_speaker, modulate, sample_response, Converter, DiscreteResponse,
    InverseFilter, Signal, SpeakerModel, SpeakerProfile, SvmConfig,
};

use crate::atomic::write_atomic;
use crate::config::{RunConfig, SEED_ENV};
use crate::corpus::{build_corpus, load_corpus, CorpusConfig};
use crate::error::{Error, Result};
use crate::eval::{corpus_features, cross_validate_paired, time_frames, train_detector, write_reports, EvalConfig, LABEL_NAMES};
use crate::formats::{parse_response_csv, render_response_csv, ModelFile, SpeakerFile};
use crate::wav::{read_wav, write_wav};

#[derive(Debug, Parser)]
#[command(name = "replaymod", version, about = "Modulated replay attack synthesis and dual-domain detection")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// `key = value` configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub sample_rate: Option<u32>,
    #[arg(long, global = true)]
    pub frame_ms: Option<f64>,
    #[arg(long, global = true)]
    pub hop_ms: Option<f64>,
    #[arg(long, global = true)]
    pub r_max: Option<usize>,
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    #[arg(long, global = true)]
    pub auc_threshold: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub spectrum_convention: Option<Convention>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Convention {
    OneSided,
    TwoSided,
}

#[derive(Debug, Clone, Copy, ValueEnum, PartialEq, Eq)]
pub enum ConverterKind {
    /// 16-bit playback and recording, played files normalised to 0.99 peak
    Pcm16,
    /// Identity converters
    Ideal,
}

impl ConverterKind {
    fn converter(self) -> Converter {
        match self {
            ConverterKind::Pcm16 => Converter::pcm16(),
            ConverterKind::Ideal => Converter::ideal(),
        }
    }
}

#[derive(Debug, Args)]
pub struct SpeakerArgs {
    /// Speaker preset: flat, phone or two-way
    #[arg(long, default_value = "phone")]
    pub speaker: String,
    /// Replace the preset's phase response with zero phase
    #[arg(long)]
    pub zero_phase: bool,
    /// Drop the preset's sub-bass resonance
    #[arg(long)]
    pub no_subbass: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus and its manifest
    Gen {
        #[arg(long)]
        n: usize,
        /// Speaker preset (repeatable)
        #[arg(long = "speaker", default_value = "phone")]
        speakers: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Mix white noise at this SNR into every sample
        #[arg(long)]
        snr_db: Option<f64>,
        #[arg(long, value_enum, default_value = "pcm16")]
        converter: ConverterKind,
    },
    /// Measure a speaker at the 68 grid tones and write `freq_hz,gain` CSV
    Measure {
        #[command(flatten)]
        speaker: SpeakerArgs,
        #[arg(long)]
        out: PathBuf,
        /// Also write the measurement in speaker text format
        #[arg(long)]
        speaker_out: Option<PathBuf>,
    },
    /// Fit a natural cubic spline to a response CSV and write samples of it
    Fit {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Evaluation points inside each knot interval (knots are always included)
        #[arg(long, default_value_t = 4)]
        points_per_interval: usize,
    },
    /// Compensate a WAV with an inverse filter
    Modulate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Measured response CSV to invert
        #[arg(long, conflicts_with_all = ["speaker", "identity"])]
        response: Option<PathBuf>,
        /// Measure this preset and invert it
        #[arg(long, conflicts_with = "identity")]
        speaker: Option<String>,
        /// All-ones filter
        #[arg(long)]
        identity: bool,
        /// Pass-through constant
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    /// Play a WAV through a simulated speaker (optionally modulating first)
    Replay {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        speaker: SpeakerArgs,
        /// Modulate with a filter fitted to a measurement of the same speaker
        #[arg(long)]
        modulate: bool,
        #[arg(long, value_enum, default_value = "ideal")]
        converter: ConverterKind,
    },
    /// Train the detector on a corpus directory
    Train {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        epochs: usize,
        #[arg(long, default_value_t = 1e-3)]
        lambda: f64,
    },
    /// Classify WAV files
    Detect {
        #[arg(long)]
        model: PathBuf,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Cross-validate on a corpus and write metric CSVs
    Eval {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Score folds on this corpus instead (same seeds, e.g. with noise)
        #[arg(long)]
        test_corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Frames timed for the throughput report
        #[arg(long, default_value_t = 500)]
        timing_frames: usize,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cfg = match resolve_config(&cli.global) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match execute(cli.command, &cfg) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

pub fn resolve_config(g: &GlobalArgs) -> Result<RunConfig> {
    let env_seed = std::env::var(SEED_ENV).ok();
    let mut cfg = RunConfig::load(g.config.as_deref(), env_seed.as_deref())?;
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.sample_rate {
        cfg.sample_rate = v;
    }
    if let Some(v) = g.frame_ms {
        cfg.frame_ms = v;
    }
    if let Some(v) = g.hop_ms {
        cfg.hop_ms = v;
    }
    if let Some(v) = g.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = g.eps {
        cfg.eps = v;
    }
    if let Some(v) = g.auc_threshold {
        cfg.auc_threshold = v;
    }
    if let Some(v) = g.spectrum_convention {
        cfg.spectrum_convention = match v {
            Convention::OneSided => replaymod_core::SpectrumConvention::OneSided,
            Convention::TwoSided => replaymod_core::SpectrumConvention::TwoSided,
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

fn speaker_seed(cfg: &RunConfig, name: &str) -> u64 {
    let h = name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x100_0000_01b3));
    SplitMix64::derive(cfg.seed, h).next_u64()
}

pub fn preset(cfg: &RunConfig, name: &str) -> Result<SpeakerModel> {
    SpeakerModel::preset(name, speaker_seed(cfg, name)).ok_or_else(|| {
        Error::Invalid(format!("unknown speaker `{name}` (expected one of {})", SpeakerModel::PRESETS.join(", ")))
    })
}

fn speaker_model(cfg: &RunConfig, a: &SpeakerArgs) -> Result<SpeakerModel> {
    let mut m = preset(cfg, &a.speaker)?;
    if a.zero_phase {
        m.phase = PhaseModel::zero();
    }
    if a.no_subbass {
        m.subbass_noise_rms = 0.0;
    }
    Ok(m)
}

fn eval_config(cfg: &RunConfig) -> EvalConfig {
    EvalConfig {
        frame_ms: cfg.frame_ms,
        hop_ms: cfg.hop_ms,
        r_max: cfg.r_max,
        convention: cfg.spectrum_convention,
        svm: SvmConfig { seed: cfg.seed, ..SvmConfig::default() },
        seed: cfg.seed,
        ..EvalConfig::default()
    }
}

fn measure_model(model: &SpeakerModel, fs: u32) -> Result<DiscreteResponse> {
    let n = next_pow2((MEASUREMENT_TONE_S * fs as f64).ceil() as usize);
    let profile = model.profile(fs, n)?;
    Ok(measure_speaker(&profile, fs, n)?)
}

fn filter_for(signal: &Signal, response: &DiscreteResponse, eps: f64, c: f64) -> Result<InverseFilter> {
    let n = next_pow2(signal.len());
    let df = signal.sample_rate() as f64 / n as f64;
    let gains = sample_response(&fit_response(response)?, df, n)?;
    Ok(build_inverse_filter(&gains, df, eps, c)?)
}

fn profile_for(model: &SpeakerModel, signal: &Signal) -> Result<SpeakerProfile> {
    Ok(model.profile(signal.sample_rate(), next_pow2(signal.len()))?)
}

fn execute(cmd: Command, cfg: &RunConfig) -> Result<()> {
    match cmd {
        Command::Gen { n, speakers, out, snr_db, converter } => {
            let models = speakers.iter().map(|s| preset(cfg, s)).collect::<Result<Vec<_>>>()?;
            let corpus = CorpusConfig {
                n_per_class: n,
                speakers: models,
                snr_db: snr_db.unwrap_or(f64::INFINITY),
                seed: cfg.seed,
                sample_rate: cfg.sample_rate,
                converter: converter.converter(),
                eps: cfg.eps,
                ..CorpusConfig::default()
            };
            let manifest = build_corpus(&corpus, &out)?;
            for label in LABEL_NAMES {
                let k = manifest.entries.iter().filter(|e| e.label.as_str() == label).count();
                println!("{label}\t{k}");
            }
            println!("total\t{}", manifest.entries.len());
        }
        Command::Measure { speaker, out, speaker_out } => {
            let model = speaker_model(cfg, &speaker)?;
            let response = measure_model(&model, cfg.sample_rate)?;
            write_atomic(&out, render_response_csv(response.points()).as_bytes())?;
            if let Some(p) = speaker_out {
                SpeakerFile::from_response(&model.name, cfg.sample_rate, &response).write(&p)?;
            }
            println!("{} points", response.points().len());
        }
        Command::Fit { input, out, points_per_interval } => {
            let response = read_response(&input)?;
            let curve = fit_response(&response)?;
            let knots = response.frequencies();
            let mut rows = Vec::new();
            for w in knots.windows(2) {
                let steps = points_per_interval + 1;
                for j in 0..steps {
                    let f = if j == 0 { w[0] } else { w[0] + (w[1] - w[0]) * j as f64 / steps as f64 };
                    rows.push((f, curve.eval(f)));
                }
            }
            if let Some(&last) = knots.last() {
                rows.push((last, curve.eval(last)));
            }
            write_atomic(&out, render_response_csv(&rows).as_bytes())?;
            println!("{} rows", rows.len());
        }
        Command::Modulate { input, out, response, speaker, identity, c } => {
            let x = read_wav(&input)?;
            let filter = if identity {
                let n = next_pow2(x.len());
                InverseFilter::identity(n, x.sample_rate() as f64 / n as f64, c)
            } else if let Some(p) = response {
                filter_for(&x, &read_response(&p)?, cfg.eps, c)?
            } else if let Some(name) = speaker {
                filter_for(&x, &measure_model(&preset(cfg, &name)?, x.sample_rate())?, cfg.eps, c)?
            } else {
                return Err(Error::Invalid("one of --response, --speaker or --identity is required".into()));
            };
            write_wav(&out, &modulate(&x, &filter)?.signal)?;
        }
        Command::Replay { input, out, speaker, modulate: do_modulate, converter } => {
            let x = read_wav(&input)?;
            let model = speaker_model(cfg, &speaker)?;
            let profile = profile_for(&model, &x)?;
            let conv = converter.converter();
            let y = if do_modulate {
                let filter = filter_for(&x, &measure_model(&model, x.sample_rate())?, cfg.eps, 1.0)?;
                replaymod_core::attack::modulated_replay_with(&x, &filter, &profile, cfg.seed, &conv)?.signal
            } else {
                replaymod_core::attack::classical_replay_with(&x, &profile, cfg.seed, &conv)?.signal
            };
            write_wav(&out, &y)?;
        }
        Command::Train { corpus, out, epochs, lambda } => {
            let samples = load_corpus(&corpus)?;
            let mut ecfg = eval_config(cfg);
            ecfg.svm.epochs = epochs;
            ecfg.svm.lambda = lambda;
            let feats = corpus_features(&samples, &ecfg)?;
            let det = train_detector(&feats.iter().collect::<Vec<_>>(), &ecfg)?;
            println!("training_accuracy\t{}", det.model.training_accuracy);
            println!("auc_threshold\t{}", det.threshold);
            ModelFile { model: det.model, auc_threshold: Some(det.threshold) }.write(&out)?;
        }
        Command::Detect { model, inputs } => {
            let file = ModelFile::read(&model)?;
            if file.model.r_max() != cfg.r_max {
                eprintln!("note: model has r_max {}, using it", file.model.r_max());
            }
            let threshold = file.auc_threshold.unwrap_or(cfg.auc_threshold);
            let mut det = replaymod_core::Detector::new(file.model, threshold);
            det.frame_ms = cfg.frame_ms;
            det.hop_ms = cfg.hop_ms;
            det.convention = cfg.spectrum_convention;
            for p in &inputs {
                let v = det.detect_utterance(&read_wav(p)?)?;
                println!(
                    "{}\t{}\tgenuine={}\tclassical_replay={}\tmodulated_replay={}\tskipped={}",
                    p.display(),
                    v.label,
                    v.counts[0],
                    v.counts[1],
                    v.counts[2],
                    v.skipped
                );
            }
        }
        Command::Eval { corpus, out, test_corpus, folds, timing_frames } => {
            let ecfg = EvalConfig { folds, ..eval_config(cfg) };
            let train_samples = load_corpus(&corpus)?;
            let train_feats = corpus_features(&train_samples, &ecfg)?;
            let test_feats = match &test_corpus {
                Some(dir) => corpus_features(&load_corpus(dir)?, &ecfg)?,
                None => train_feats.clone(),
            };
            let report = cross_validate_paired(&train_feats, &test_feats, &ecfg)?;
            let det = train_detector(&train_feats.iter().collect::<Vec<_>>(), &ecfg)?;
            let timing = time_frames(&det, &train_samples, timing_frames)?;
            write_reports(&out, &report, &test_feats, ecfg.r_max, &timing)?;
            for (c, name) in LABEL_NAMES.iter().enumerate() {
                println!("{name}\taccuracy={:.4}\tflagged={:.4}", report.class_accuracy(c), report.flagged_rate(c));
            }
            println!("false_positive_rate\t{:.4}", report.false_positive_rate());
            println!("binary_accuracy\t{:.4}", report.binary_accuracy());
            println!("frame_ms_median\t{:.4}", crate::eval::percentile(&timing, 0.5));
        }
    }
    Ok(())
}

fn read_response(path: &Path) -> Result<DiscreteResponse> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(DiscreteResponse::new(parse_response_csv(&text, path)?)?)
}
