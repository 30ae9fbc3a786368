use alloc::vec;
use alloc::vec::Vec;

use super::LerPattern;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Hinge loss + L2 penalty, trained by seeded stochastic subgradient
/// descent with step `eta0 / (1 + lambda·eta0·t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvmConfig {
    pub lambda: f64,
    pub epochs: usize,
    pub eta0: f64,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { lambda: 1e-3, epochs: 200, eta0: 0.1, seed: 0 }
    }
}

/// Linear classifier on z-scored features. Positive margin means modulated.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub feature_mean: Vec<f64>,
    pub feature_scale: Vec<f64>,
    /// FNV-1a hash of the training features and labels.
    pub trained_on: u64,
    pub training_accuracy: f64,
}

impl SvmModel {
    pub fn r_max(&self) -> usize {
        self.weights.len()
    }

    pub fn margin(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.weights.len());
        let mut m = self.bias;
        for i in 0..self.weights.len() {
            m += self.weights[i] * (values[i] - self.feature_mean[i]) / self.feature_scale[i];
        }
        m
    }

    /// Checks the internal shape invariants (equal lengths, positive scales).
    pub fn validate(&self) -> Result<()> {
        let d = self.weights.len();
        if d == 0 {
            return Err(Error::EmptyInput);
        }
        for len in [self.feature_mean.len(), self.feature_scale.len()] {
            if len != d {
                return Err(Error::LengthMismatch { expected: d, found: len });
            }
        }
        if self.feature_scale.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(Error::InvalidParameter("feature scales must be positive"));
        }
        if self.weights.iter().chain(&self.feature_mean).any(|v| !v.is_finite()) || !self.bias.is_finite() {
            return Err(Error::InvalidParameter("model parameters must be finite"));
        }
        Ok(())
    }
}

/// (is_modulated, margin).
pub fn classify_time(model: &SvmModel, feat: &LerPattern) -> (bool, f64) {
    let m = model.margin(&feat.values);
    (m > 0.0, m)
}

pub fn train_svm(genuine: &[LerPattern], modulated: &[LerPattern], cfg: &SvmConfig) -> Result<SvmModel> {
    if genuine.is_empty() {
        return Err(Error::EmptyClass("genuine"));
    }
    if modulated.is_empty() {
        return Err(Error::EmptyClass("modulated"));
    }
    if !(cfg.lambda > 0.0) || !(cfg.eta0 > 0.0) || cfg.epochs == 0 {
        return Err(Error::InvalidParameter("lambda, eta0 and epochs must be positive"));
    }
    let d = genuine[0].values.len();
    if let Some(bad) = genuine.iter().chain(modulated).find(|p| p.values.len() != d) {
        return Err(Error::LengthMismatch { expected: d, found: bad.values.len() });
    }

    let samples: Vec<(&[f64], f64)> = genuine
        .iter()
        .map(|p| (p.values.as_slice(), -1.0))
        .chain(modulated.iter().map(|p| (p.values.as_slice(), 1.0)))
        .collect();
    let n = samples.len() as f64;

    let mut mean = vec![0.0; d];
    for (x, _) in &samples {
        for i in 0..d {
            mean[i] += x[i];
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut scale = vec![0.0; d];
    for (x, _) in &samples {
        for i in 0..d {
            let c = x[i] - mean[i];
            scale[i] += c * c;
        }
    }
    for s in scale.iter_mut() {
        let sd = libm::sqrt(*s / n);
        *s = if sd > 1e-12 { sd } else { 1.0 };
    }
    let z: Vec<Vec<f64>> =
        samples.iter().map(|(x, _)| (0..d).map(|i| (x[i] - mean[i]) / scale[i]).collect()).collect();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut order: Vec<usize> = (0..samples.len()).collect();
    let mut rng = SplitMix64::derive(cfg.seed, 0x5356_4D31);
    let mut t = 0u64;
    for _ in 0..cfg.epochs {
        rng.shuffle(&mut order);
        for &j in &order {
            let eta = cfg.eta0 / (1.0 + cfg.lambda * cfg.eta0 * t as f64);
            let y = samples[j].1;
            let xj = &z[j];
            let m = y * (dot(&w, xj) + b);
            let shrink = 1.0 - eta * cfg.lambda;
            if m < 1.0 {
                for i in 0..d {
                    w[i] = shrink * w[i] + eta * y * xj[i];
                }
                b += eta * y;
            } else {
                w.iter_mut().for_each(|v| *v *= shrink);
            }
            t += 1;
        }
    }

    let correct = z.iter().zip(&samples).filter(|(x, (_, y))| (dot(&w, x) + b > 0.0) == (*y > 0.0)).count();
    Ok(SvmModel {
        weights: w,
        bias: b,
        feature_mean: mean,
        feature_scale: scale,
        trained_on: fingerprint(&samples),
        training_accuracy: correct as f64 / n,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn fingerprint(samples: &[(&[f64], f64)]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |bytes: [u8; 8]| {
        for byte in bytes {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    for (x, y) in samples {
        eat(y.to_bits().to_le_bytes());
        for v in x.iter() {
            eat(v.to_bits().to_le_bytes());
        }
    }
    h
}
