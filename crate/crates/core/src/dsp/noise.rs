use alloc::vec::Vec;

use super::Signal;
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Mean squared amplitude.
pub fn power(samples: &[f64]) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64
}

/// Adds seeded white Gaussian noise at `snr_db` relative to the signal's
/// mean power. `f64::INFINITY` means no noise.
///
/// The noise is rescaled to its exact target power after drawing, so the
/// realised SNR equals `snr_db` up to rounding.
pub fn mix_noise(signal: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    let p_signal = power(signal.samples());
    if p_signal == 0.0 {
        return Err(Error::ZeroPower);
    }
    if snr_db == f64::INFINITY {
        return Ok(signal.clone());
    }
    if !snr_db.is_finite() {
        return Err(Error::InvalidParameter("snr_db must be finite or +inf"));
    }
    let mut rng = SplitMix64::new(seed);
    let noise: Vec<f64> = (0..signal.len()).map(|_| rng.gaussian()).collect();
    let p_noise = power(&noise);
    let target = p_signal / libm::pow(10.0, snr_db / 10.0);
    let gain = libm::sqrt(target / p_noise);
    signal.with_samples(signal.samples().iter().zip(&noise).map(|(s, n)| s + gain * n).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize) -> Signal {
        let x = (0..n).map(|i| 0.3 * libm::sin(i as f64 * 0.05)).collect();
        Signal::new(x, 16_000).unwrap()
    }

    #[test]
    fn infinite_snr_is_identity() {
        let s = tone(500);
        assert_eq!(mix_noise(&s, f64::INFINITY, 1).unwrap(), s);
    }

    #[test]
    fn realised_snr() {
        let s = tone(8192);
        let y = mix_noise(&s, 40.0, 3).unwrap();
        let noise: Vec<f64> = y.samples().iter().zip(s.samples()).map(|(a, b)| a - b).collect();
        let snr = 10.0 * libm::log10(power(s.samples()) / power(&noise));
        assert!((snr - 40.0).abs() < 0.5, "{snr}");
    }

    #[test]
    fn deterministic() {
        let s = tone(1000);
        let a = mix_noise(&s, 20.0, 9).unwrap();
        let b = mix_noise(&s, 20.0, 9).unwrap();
        assert_eq!(a.samples(), b.samples());
    }

    #[test]
    fn silent_signal_rejected() {
        let s = Signal::new(alloc::vec![0.0; 10], 8000).unwrap();
        assert_eq!(mix_noise(&s, 10.0, 1), Err(Error::ZeroPower));
    }
}
