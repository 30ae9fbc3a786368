use alloc::vec::Vec;

use crate::dsp::{fft_padded, Signal};
use crate::{Error, Result};

/// Threshold quoted for real recordings. Synthetic corpora should re-tune.
pub const DEFAULT_AUC_THRESHOLD: f64 = 0.817;

/// Which bins enter the power distribution. `OneSided` uses bins
/// `0..=N/2`; `TwoSided` uses all N, including the mirrored upper half.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectrumConvention {
    #[default]
    OneSided,
    TwoSided,
}

impl SpectrumConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            SpectrumConvention::OneSided => "one_sided",
            SpectrumConvention::TwoSided => "two_sided",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "one_sided" | "one-sided" => Some(Self::OneSided),
            "two_sided" | "two-sided" => Some(Self::TwoSided),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreqDecision {
    pub auc: f64,
    pub threshold: f64,
    pub is_replay: bool,
}

/// Cumulative normalised power A(n) over the bins selected by `convention`.
pub fn spectral_cdf(samples: &[f64], n_fft: usize, convention: SpectrumConvention) -> Result<Vec<f64>> {
    if !n_fft.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n_fft));
    }
    let spectrum = fft_padded(samples, n_fft)?;
    let count = match convention {
        SpectrumConvention::OneSided => n_fft / 2 + 1,
        SpectrumConvention::TwoSided => n_fft,
    };
    let power: Vec<f64> = spectrum[..count].iter().map(|c| c.norm_sqr()).collect();
    let total: f64 = power.iter().sum();
    if !(total > 0.0) {
        return Err(Error::SilentSegment);
    }
    let mut acc = 0.0;
    Ok(power
        .iter()
        .map(|p| {
            acc += p / total;
            acc
        })
        .collect())
}

/// One-sided spectral-CDF area of `segment` at an `n_fft`-point transform.
pub fn spectral_auc(segment: &Signal, n_fft: usize) -> Result<f64> {
    spectral_auc_with(segment.samples(), n_fft, SpectrumConvention::OneSided)
}

pub fn spectral_auc_with(samples: &[f64], n_fft: usize, convention: SpectrumConvention) -> Result<f64> {
    let cdf = spectral_cdf(samples, n_fft, convention)?;
    Ok(cdf.iter().sum::<f64>() / cdf.len() as f64)
}

/// Replay when strictly below the threshold.
pub fn classify_freq(auc: f64, threshold: f64) -> FreqDecision {
    FreqDecision { auc, threshold, is_replay: auc < threshold }
}

/// Misclassifications of `threshold` on the two sets.
pub fn error_count(genuine: &[f64], replay: &[f64], threshold: f64) -> usize {
    genuine.iter().filter(|&&a| a < threshold).count() + replay.iter().filter(|&&a| a >= threshold).count()
}

/// Threshold minimising total errors among midpoints of adjacent distinct
/// pooled values. Ties go to the larger threshold. With a single distinct
/// value that value is returned.
pub fn tune_threshold(genuine: &[f64], replay: &[f64]) -> Result<f64> {
    if genuine.is_empty() {
        return Err(Error::EmptyClass("genuine"));
    }
    if replay.is_empty() {
        return Err(Error::EmptyClass("replay"));
    }
    if genuine.iter().chain(replay).any(|a| !a.is_finite()) {
        return Err(Error::InvalidParameter("AUC values must be finite"));
    }
    let mut pooled: Vec<f64> = genuine.iter().chain(replay).copied().collect();
    pooled.sort_by(f64::total_cmp);
    pooled.dedup();
    if pooled.len() == 1 {
        return Ok(pooled[0]);
    }
    let mut g = genuine.to_vec();
    let mut r = replay.to_vec();
    g.sort_by(f64::total_cmp);
    r.sort_by(f64::total_cmp);
    let (mut best_t, mut best_err) = (f64::NAN, usize::MAX);
    for w in pooled.windows(2) {
        let t = 0.5 * (w[0] + w[1]);
        let err = g.partition_point(|&a| a < t) + (r.len() - r.partition_point(|&a| a < t));
        if err <= best_err {
            best_err = err;
            best_t = t;
        }
    }
    Ok(best_t)
}
