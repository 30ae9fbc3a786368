use crate::dsp::Signal;
use crate::{Error, Result};

/// Playback/recording converter model.
///
/// `playback_peak` normalises the played file to that peak before the
/// playback quantiser (what an attacker does to use the converter's full
/// range). `record_bits` quantises the captured signal at fixed gain.
/// `None` everywhere is the ideal (identity) converter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Converter {
    pub playback_bits: Option<u32>,
    pub record_bits: Option<u32>,
    pub playback_peak: Option<f64>,
    /// Analogue volume set so the speaker output has the RMS of the
    /// genuine source.
    pub match_loudness: bool,
}

impl Default for Converter {
    fn default() -> Self {
        Self::ideal()
    }
}

impl Converter {
    pub const fn ideal() -> Self {
        Self { playback_bits: None, record_bits: None, playback_peak: None, match_loudness: false }
    }

    /// 16-bit PCM on both ends, played files normalised to 0.99 peak.
    pub const fn pcm16() -> Self {
        Self { playback_bits: Some(16), record_bits: Some(16), playback_peak: Some(0.99), match_loudness: false }
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::ideal()
    }

    pub fn playback(&self, signal: &Signal) -> Result<Signal> {
        let mut s = match self.playback_peak {
            Some(p) => {
                let peak = signal.peak();
                if peak > 0.0 {
                    signal.scaled(p / peak)?
                } else {
                    signal.clone()
                }
            }
            None => signal.clone(),
        };
        if let Some(bits) = self.playback_bits {
            s = quantize(&s, bits)?;
        }
        Ok(s)
    }

    pub fn record(&self, signal: &Signal) -> Result<Signal> {
        match self.record_bits {
            Some(bits) => quantize(signal, bits),
            None => Ok(signal.clone()),
        }
    }
}

/// Rounds to a signed `bits`-bit grid over [-1, 1), clipping out-of-range
/// samples.
pub fn quantize(signal: &Signal, bits: u32) -> Result<Signal> {
    if !(2..=32).contains(&bits) {
        return Err(Error::InvalidParameter("quantiser bits must be in 2..=32"));
    }
    let scale = (1u64 << (bits - 1)) as f64;
    let max = (scale - 1.0) / scale;
    let samples = signal
        .samples()
        .iter()
        .map(|&x| libm::round(x.clamp(-1.0, max) * scale) / scale)
        .collect();
    signal.with_samples(samples)
}
