//! Text formats.
//!
//! Speaker file (tab separated, `#` lines are headers):
//!
//! ```text
//! # speaker phone fs=96000
//! # n_fft=65536
//! # subbass_noise_rms=0.001
//! 60<TAB>0.0102<TAB>0.31
//! ```
//!
//! The first line is mandatory. `n_fft` and `subbass_noise_rms` appear
//! only in per-bin profiles. Rows are `freq_hz`, `gain` and optionally
//! `phase_rad`; the phase column is either present on every row or none.
//!
//! Model file: the magic line `dualguard-svm v1`, then one `key values...`
//! line each for `rmax`, `mean`, `scale`, `weights`, `bias`, followed by
//! optional `trained_on` (hex), `training_accuracy` and `auc_threshold`.
//! Numbers use shortest round-trip decimal formatting.
//!
//! Response CSV: header `freq_hz,gain`, one row per point.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use replaymod_core::{DiscreteResponse, SpeakerProfile, SvmModel};

use crate::atomic::write_atomic;
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "dualguard-svm v1";
pub const RESPONSE_CSV_HEADER: &str = "freq_hz,gain";

#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerFile {
    pub name: String,
    pub sample_rate: u32,
    pub n_fft: Option<usize>,
    pub subbass_noise_rms: Option<f64>,
    pub rows: Vec<(f64, f64, Option<f64>)>,
}

impl SpeakerFile {
    pub fn from_response(name: &str, sample_rate: u32, r: &DiscreteResponse) -> Self {
        Self {
            name: name.to_string(),
            sample_rate,
            n_fft: None,
            subbass_noise_rms: None,
            rows: r.points().iter().map(|&(f, g)| (f, g, None)).collect(),
        }
    }

    pub fn from_profile(p: &SpeakerProfile) -> Self {
        let df = p.delta_f();
        Self {
            name: p.name.clone(),
            sample_rate: p.sample_rate,
            n_fft: Some(p.n_fft),
            subbass_noise_rms: Some(p.subbass_noise_level),
            rows: p.amplitude.iter().zip(&p.phase).enumerate().map(|(k, (&g, &ph))| (k as f64 * df, g, Some(ph))).collect(),
        }
    }

    pub fn to_response(&self) -> Result<DiscreteResponse> {
        Ok(DiscreteResponse::new(self.rows.iter().map(|r| (r.0, r.1)).collect())?)
    }

    /// Requires `n_fft` and a phase column with `n_fft / 2 + 1` rows.
    pub fn to_profile(&self) -> Result<SpeakerProfile> {
        let n_fft = self.n_fft.ok_or_else(|| Error::Invalid(format!("speaker {}: missing n_fft header", self.name)))?;
        let phase = self
            .rows
            .iter()
            .map(|r| r.2)
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::Invalid(format!("speaker {}: missing phase column", self.name)))?;
        let amplitude = self.rows.iter().map(|r| r.1).collect();
        Ok(SpeakerProfile::new(
            self.name.clone(),
            self.sample_rate,
            n_fft,
            amplitude,
            phase,
            self.subbass_noise_rms.unwrap_or(0.0),
        )?)
    }

    pub fn render(&self) -> String {
        let mut s = format!("# speaker {} fs={}\n", self.name, self.sample_rate);
        if let Some(n) = self.n_fft {
            let _ = writeln!(s, "# n_fft={n}");
        }
        if let Some(r) = self.subbass_noise_rms {
            let _ = writeln!(s, "# subbass_noise_rms={r}");
        }
        for (f, g, p) in &self.rows {
            match p {
                Some(p) => {
                    let _ = writeln!(s, "{f}\t{g}\t{p}");
                }
                None => {
                    let _ = writeln!(s, "{f}\t{g}");
                }
            }
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (_, head) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty speaker file"))?;
        let rest = head
            .strip_prefix("# speaker ")
            .ok_or_else(|| Error::parse(path, 1, "expected `# speaker <name> fs=<Hz>`"))?;
        let (name, fs) = rest.rsplit_once(' ').ok_or_else(|| Error::parse(path, 1, "missing fs="))?;
        let fs = fs
            .strip_prefix("fs=")
            .and_then(|v| v.parse::<u32>().ok())
            .ok_or_else(|| Error::parse(path, 1, "bad fs= value"))?;
        let mut out = Self { name: name.trim().to_string(), sample_rate: fs, n_fft: None, subbass_noise_rms: None, rows: Vec::new() };
        let mut has_phase = None;
        for (i, line) in lines {
            let ln = i + 1;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(h) = line.strip_prefix('#') {
                let h = h.trim();
                if let Some(v) = h.strip_prefix("n_fft=") {
                    out.n_fft = Some(v.parse().map_err(|_| Error::parse(path, ln, "bad n_fft"))?);
                } else if let Some(v) = h.strip_prefix("subbass_noise_rms=") {
                    out.subbass_noise_rms = Some(v.parse().map_err(|_| Error::parse(path, ln, "bad subbass_noise_rms"))?);
                }
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&cols.len()) {
                return Err(Error::parse(path, ln, "expected 2 or 3 tab-separated columns"));
            }
            let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::parse(path, ln, format!("bad number `{s}`")));
            let phase = if cols.len() == 3 { Some(num(cols[2])?) } else { None };
            match has_phase {
                None => has_phase = Some(phase.is_some()),
                Some(h) if h != phase.is_some() => return Err(Error::parse(path, ln, "inconsistent column count")),
                _ => {}
            }
            out.rows.push((num(cols[0])?, num(cols[1])?, phase));
        }
        Ok(out)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

/// Model plus the frequency threshold tuned alongside it, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub model: SvmModel,
    pub auc_threshold: Option<f64>,
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

impl ModelFile {
    pub fn render(&self) -> String {
        let m = &self.model;
        let mut s = String::new();
        let _ = writeln!(s, "{MODEL_MAGIC}");
        let _ = writeln!(s, "rmax {}", m.weights.len());
        let _ = writeln!(s, "mean {}", join(&m.feature_mean));
        let _ = writeln!(s, "scale {}", join(&m.feature_scale));
        let _ = writeln!(s, "weights {}", join(&m.weights));
        let _ = writeln!(s, "bias {}", m.bias);
        let _ = writeln!(s, "trained_on {:016x}", m.trained_on);
        let _ = writeln!(s, "training_accuracy {}", m.training_accuracy);
        if let Some(t) = self.auc_threshold {
            let _ = writeln!(s, "auc_threshold {t}");
        }
        s
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, l)) if l.trim() == MODEL_MAGIC => {}
            _ => return Err(Error::parse(path, 1, format!("expected `{MODEL_MAGIC}`"))),
        }
        let (mut rmax, mut mean, mut scale, mut weights, mut bias) = (None, None, None, None, None);
        let (mut trained_on, mut acc, mut thr) = (0u64, f64::NAN, None);
        for (i, line) in lines {
            let ln = i + 1;
            let (key, vals) = line.trim().split_once(' ').unwrap_or((line.trim(), ""));
            let nums = || -> Result<Vec<f64>> {
                vals.split_whitespace()
                    .map(|v| v.parse::<f64>().map_err(|_| Error::parse(path, ln, format!("bad number `{v}`"))))
                    .collect()
            };
            let one = || -> Result<f64> {
                match nums()?.as_slice() {
                    [v] => Ok(*v),
                    _ => Err(Error::parse(path, ln, format!("`{key}` takes one value"))),
                }
            };
            match key {
                "rmax" => rmax = Some(vals.trim().parse::<usize>().map_err(|_| Error::parse(path, ln, "bad rmax"))?),
                "mean" => mean = Some(nums()?),
                "scale" => scale = Some(nums()?),
                "weights" => weights = Some(nums()?),
                "bias" => bias = Some(one()?),
                "trained_on" => {
                    trained_on =
                        u64::from_str_radix(vals.trim(), 16).map_err(|_| Error::parse(path, ln, "bad trained_on"))?
                }
                "training_accuracy" => acc = one()?,
                "auc_threshold" => thr = Some(one()?),
                other => return Err(Error::parse(path, ln, format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::parse(path, 0, format!("missing `{k}` line"));
        let model = SvmModel {
            weights: weights.ok_or_else(|| missing("weights"))?,
            bias: bias.ok_or_else(|| missing("bias"))?,
            feature_mean: mean.ok_or_else(|| missing("mean"))?,
            feature_scale: scale.ok_or_else(|| missing("scale"))?,
            trained_on,
            training_accuracy: acc,
        };
        let rmax = rmax.ok_or_else(|| missing("rmax"))?;
        if rmax != model.weights.len() {
            return Err(Error::parse(path, 0, format!("rmax {rmax} but {} weights", model.weights.len())));
        }
        model.validate()?;
        Ok(Self { model, auc_threshold: thr })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.render().as_bytes())
    }
}

pub fn render_response_csv(points: &[(f64, f64)]) -> String {
    let mut s = String::from(RESPONSE_CSV_HEADER);
    s.push('\n');
    for (f, g) in points {
        let _ = writeln!(s, "{f},{g}");
    }
    s
}

pub fn parse_response_csv(text: &str, path: &Path) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == RESPONSE_CSV_HEADER => {}
        _ => return Err(Error::parse(path, 1, format!("expected header `{RESPONSE_CSV_HEADER}`"))),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (f, g) = line.split_once(',').ok_or_else(|| Error::parse(path, i + 1, "expected two columns"))?;
        let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::parse(path, i + 1, format!("bad number `{s}`")));
        out.push((num(f)?, num(g)?));
    }
    Ok(out)
}
