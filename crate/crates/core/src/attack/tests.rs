use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::dsp::{fft_padded, next_pow2};
use crate::speaker::{build_inverse_filter, SpeakerModel};

const FS: u32 = 8000;

fn sine(freq: f64, len: usize, fs: u32) -> Signal {
    let w = 2.0 * PI * freq / fs as f64;
    Signal::new((0..len).map(|n| libm::sin(w * n as f64)).collect(), fs).unwrap()
}

fn noise_signal(len: usize, seed: u64) -> Signal {
    let mut rng = SplitMix64::new(seed);
    Signal::new((0..len).map(|_| rng.uniform(-0.5, 0.5)).collect(), FS).unwrap()
}

fn flat_profile(n: usize, gain: f64) -> SpeakerProfile {
    SpeakerProfile::new("flat".into(), FS, n, vec![gain; n / 2 + 1], vec![0.0; n / 2 + 1], 0.0).unwrap()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[test]
fn identity_filter_is_identity() {
    let x = sine(440.0, 1000, FS);
    let n = next_pow2(x.len());
    let filter = InverseFilter::identity(n, FS as f64 / n as f64, 1.0);
    let out = modulate(&x, &filter).unwrap();
    assert_eq!(out.signal.len(), x.len());
    assert!(max_abs_diff(out.signal.samples(), x.samples()) < 1e-9);
}

#[test]
fn single_bin_scaling() {
    // 100 Hz lands exactly on bin 100 when fs = n = 8192.
    let fs = 8192;
    let x = sine(100.0, 8192, fs);
    let filter = InverseFilter::identity(8192, 1.0, 2.0);
    let out = modulate(&x, &filter).unwrap();
    let before = fft_padded(x.samples(), 8192).unwrap();
    let after = fft_padded(out.signal.samples(), 8192).unwrap();
    assert!((after[100].norm() / before[100].norm() - 2.0).abs() < 1e-9);
    assert!((2.0 * after[100].norm() / 8192.0 - 2.0).abs() < 1e-6);
}

#[test]
fn voice_through_phone_filter_matches_product() {
    let x = crate::voice::synth_voice(&crate::voice::VoiceSpec { seed: 3, ..Default::default() }).unwrap();
    let n = next_pow2(x.len());
    let fs = x.sample_rate();
    let profile = SpeakerModel::phone(1).profile(fs, n).unwrap();
    let filter = build_inverse_filter(&profile.amplitude_full(), fs as f64 / n as f64, 0.001, 1.0).unwrap();
    let spectrum = fft(&x).unwrap();
    let (amps, _) = compensate(&spectrum, &filter).unwrap();
    for k in 0..n {
        let expect = spectrum.bins[k].norm() * filter.gains[k];
        assert!((amps.magnitudes[k] - expect).abs() <= 1e-9 * expect.max(1.0));
    }
}

#[test]
fn compensation_preserves_phase_bits() {
    let x = noise_signal(300, 9);
    let spectrum = fft(&x).unwrap();
    let filter = InverseFilter::identity(spectrum.len(), spectrum.delta_f(), 3.0);
    let (_, phases) = compensate(&spectrum, &filter).unwrap();
    let (_, original) = split(&spectrum);
    assert_eq!(phases, original);
}

#[test]
fn filter_resolution_mismatch() {
    let x = noise_signal(300, 1);
    let filter = InverseFilter::identity(256, 1.0, 1.0);
    assert!(matches!(modulate(&x, &filter), Err(Error::FilterResolutionMismatch { .. })));
}

#[test]
fn flat_speaker_is_identity() {
    let x = noise_signal(1000, 2);
    let out = apply_speaker(&x, &flat_profile(1024, 1.0), 0).unwrap();
    assert!(max_abs_diff(out.samples(), x.samples()) < 1e-9);
}

#[test]
fn half_gain_quarter_power() {
    let x = noise_signal(1000, 3);
    let out = apply_speaker(&x, &flat_profile(1024, 0.5), 0).unwrap();
    let ratio = crate::dsp::power(out.samples()) / crate::dsp::power(x.samples());
    assert!((ratio - 0.25).abs() < 1e-6);
}

#[test]
fn pure_delay_is_circular_shift() {
    let n = 1024;
    let tau = 0.001;
    let shift = (FS as f64 * tau) as usize;
    let x = noise_signal(n, 4);
    let df = FS as f64 / n as f64;
    let phase = (0..=n / 2).map(|k| crate::speaker::wrap_phase(-2.0 * PI * k as f64 * df * tau)).collect();
    let profile = SpeakerProfile::new("delay".into(), FS, n, vec![1.0; n / 2 + 1], phase, 0.0).unwrap();
    let out = apply_speaker(&x, &profile, 0).unwrap();
    let expect: Vec<f64> = (0..n).map(|i| x.samples()[(i + n - shift) % n]).collect();
    assert!(max_abs_diff(out.samples(), &expect) < 1e-6);
}

#[test]
fn subbass_noise_has_requested_rms_and_band() {
    let n = 8192;
    let silent = Signal::new(vec![0.0; n], FS).unwrap();
    let mut profile = flat_profile(n, 1.0);
    profile.subbass_noise_level = 1e-3;
    let out = apply_speaker(&silent, &profile, 5).unwrap();
    let rms = libm::sqrt(crate::dsp::power(out.samples()));
    assert!((rms - 1e-3).abs() < 1e-12);
    let spec = fft_padded(out.samples(), n).unwrap();
    let df = FS as f64 / n as f64;
    let total: f64 = spec[..=n / 2].iter().map(|c| c.norm_sqr()).sum();
    let band: f64 = spec[..=n / 2]
        .iter()
        .enumerate()
        .filter(|(k, _)| (*k as f64 * df) < 80.0)
        .map(|(_, c)| c.norm_sqr())
        .sum();
    assert!(band / total > 0.95);
    assert_eq!(out, apply_speaker(&silent, &profile, 5).unwrap());
    assert_ne!(out, apply_speaker(&silent, &profile, 6).unwrap());
}

#[test]
fn replay_lengths_and_flat_identity() {
    let x = noise_signal(700, 5);
    let n = 1024;
    let profile = flat_profile(n, 1.0);
    let filter = InverseFilter::identity(n, FS as f64 / n as f64, 1.0);
    let cr = classical_replay(&x, &profile, 1).unwrap();
    assert_eq!(cr.provenance, Provenance::ClassicalReplay);
    assert!(max_abs_diff(cr.signal.samples(), x.samples()) < 1e-9);
    let mr = modulated_replay(&x, &filter, &profile, 1).unwrap();
    assert_eq!(mr.provenance, Provenance::ModulatedReplay);
    assert!(max_abs_diff(mr.signal.samples(), x.samples()) < 1e-6);
}

#[test]
fn converter_quantises_and_normalises() {
    let x = Signal::new(vec![0.1, -0.25, 0.123456789, 2.0, -2.0], FS).unwrap();
    let q = quantize(&x, 16).unwrap();
    for &v in q.samples() {
        assert_eq!(v * 32768.0, libm::round(v * 32768.0));
    }
    assert_eq!(q.samples()[3], 32767.0 / 32768.0);
    assert_eq!(q.samples()[4], -1.0);
    let played = Converter::pcm16().playback(&x.scaled(0.1).unwrap()).unwrap();
    assert!((played.peak() - 0.99).abs() < 1.0 / 32768.0);
    assert!(quantize(&x, 1).is_err());
    assert_eq!(Converter::ideal().playback(&x).unwrap(), x);
}

#[test]
fn l2_examples() {
    let a = AmplitudeSpectrum { magnitudes: vec![1.0, 0.0], delta_f: 1.0 };
    let b = AmplitudeSpectrum { magnitudes: vec![0.0, 1.0], delta_f: 1.0 };
    assert_eq!(l2_similarity(&a, &a).unwrap(), 0.0);
    assert_eq!(l2_similarity(&a, &b).unwrap(), 2.0);
    let z = AmplitudeSpectrum { magnitudes: vec![0.0, 0.0], delta_f: 1.0 };
    assert!(matches!(l2_similarity(&a, &z), Err(Error::ZeroPower)));
    let c = AmplitudeSpectrum { magnitudes: vec![0.0; 3], delta_f: 1.0 };
    assert!(l2_similarity(&a, &c).is_err());
}

#[test]
fn provenance_names_round_trip() {
    for p in Provenance::ALL {
        assert_eq!(Provenance::parse(p.as_str()), Some(p));
    }
    assert_eq!(Provenance::parse("bogus"), None);
}
