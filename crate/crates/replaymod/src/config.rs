//! Run configuration: defaults, then `REPLAYMOD_SEED`, then a `key = value`
//! file, then command-line flags.
//!
//! ```text
//! # comments and blank lines are ignored
//! sample_rate = 96000
//! frame_ms = 32
//! hop_ms = 16
//! r_max = 20
//! eps = 0.001
//! auc_threshold = 0.817
//! spectrum_convention = one_sided
//! seed = 0
//! ```

use std::fs;
use std::path::Path;

use replaymod_core::dualguard::{SpectrumConvention, DEFAULT_AUC_THRESHOLD, DEFAULT_R_MAX};
use replaymod_core::speaker::DEFAULT_EPS;

use crate::error::{Error, Result};

pub const SEED_ENV: &str = "REPLAYMOD_SEED";

pub const KEYS: [&str; 8] =
    ["sample_rate", "frame_ms", "hop_ms", "r_max", "eps", "auc_threshold", "spectrum_convention", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub sample_rate: u32,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub r_max: usize,
    pub eps: f64,
    pub auc_threshold: f64,
    pub spectrum_convention: SpectrumConvention,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            sample_rate: 96_000,
            frame_ms: 32.0,
            hop_ms: 16.0,
            r_max: DEFAULT_R_MAX,
            eps: DEFAULT_EPS,
            auc_threshold: DEFAULT_AUC_THRESHOLD,
            spectrum_convention: SpectrumConvention::OneSided,
            seed: 0,
        }
    }
}

impl RunConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("{key}: invalid {what} `{value}`"));
        let v = value.trim();
        match key {
            "sample_rate" => self.sample_rate = v.parse().map_err(|_| bad("integer"))?,
            "frame_ms" => self.frame_ms = v.parse().map_err(|_| bad("number"))?,
            "hop_ms" => self.hop_ms = v.parse().map_err(|_| bad("number"))?,
            "r_max" => self.r_max = v.parse().map_err(|_| bad("integer"))?,
            "eps" => self.eps = v.parse().map_err(|_| bad("number"))?,
            "auc_threshold" => self.auc_threshold = v.parse().map_err(|_| bad("number"))?,
            "spectrum_convention" => {
                self.spectrum_convention = SpectrumConvention::parse(v).ok_or_else(|| bad("convention"))?
            }
            "seed" => self.seed = v.parse().map_err(|_| bad("integer"))?,
            _ => return Err(Error::Config(format!("unknown key `{key}` (expected one of {})", KEYS.join(", ")))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str, origin: &Path) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, i + 1, "expected `key = value`"))?;
            self.set(k.trim(), v).map_err(|e| Error::parse(origin, i + 1, e.to_string()))?;
        }
        Ok(())
    }

    /// Defaults, overridden by `env_seed` (the value of [`SEED_ENV`]) and
    /// then by the file, if given.
    pub fn load(file: Option<&Path>, env_seed: Option<&str>) -> Result<Self> {
        let mut cfg = Self::default();
        if let Some(s) = env_seed {
            cfg.seed = s.trim().parse().map_err(|_| Error::Config(format!("{SEED_ENV}: invalid integer `{s}`")))?;
        }
        if let Some(path) = file {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            cfg.apply_text(&text, path)?;
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if !(8_000..=384_000).contains(&self.sample_rate) {
            return fail("sample_rate must be in 8000..=384000");
        }
        if !(self.frame_ms > 0.0 && self.frame_ms <= 1000.0) {
            return fail("frame_ms must be in (0, 1000]");
        }
        if !(self.hop_ms > 0.0 && self.hop_ms <= self.frame_ms) {
            return fail("hop_ms must be in (0, frame_ms]");
        }
        if !(1..=256).contains(&self.r_max) {
            return fail("r_max must be in 1..=256");
        }
        if !(self.eps == 0.0 || (1e-4..=1e-1).contains(&self.eps)) {
            return fail("eps must be 0 or in [1e-4, 1e-1]");
        }
        if !(self.auc_threshold > 0.0 && self.auc_threshold < 1.0) {
            return fail("auc_threshold must be in (0, 1)");
        }
        Ok(())
    }

    pub fn render(&self) -> String {
        format!(
            "sample_rate = {}\nframe_ms = {}\nhop_ms = {}\nr_max = {}\neps = {}\nauc_threshold = {}\nspectrum_convention = {}\nseed = {}\n",
            self.sample_rate,
            self.frame_ms,
            self.hop_ms,
            self.r_max,
            self.eps,
            self.auc_threshold,
            self.spectrum_convention.as_str(),
            self.seed
        )
    }
}
