//! Harmonic voice synthesiser used as the genuine-audio source.
//!
//! A voice is `Σ_n n^-decay · sin(n·φ(t) + θ_n)` where φ is the integrated
//! instantaneous fundamental (with sinusoidal vibrato) and θ_n are seeded
//! random phases, shaped by a linear attack/release envelope and
//! normalised to a fixed peak.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dsp::Signal;
use crate::rng::SplitMix64;
use crate::{Error, Result};

pub const F0_RANGE_HZ: (f64, f64) = (85.0, 400.0);
pub const VIBRATO_RANGE_CENTS: (f64, f64) = (0.0, 30.0);
pub const VOICE_PEAK: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct VoiceSpec {
    /// Fundamental; drawn from [`F0_RANGE_HZ`] when `None`.
    pub f0: Option<f64>,
    pub n_harmonics: usize,
    /// Amplitude of harmonic n is `n^-decay`.
    pub decay: f64,
    pub duration_s: f64,
    /// Vibrato depth; drawn from [`VIBRATO_RANGE_CENTS`] when `None`.
    pub vibrato_cents: Option<f64>,
    pub vibrato_hz: f64,
    pub attack_s: f64,
    pub release_s: f64,
    pub sample_rate: u32,
    pub seed: u64,
}

impl Default for VoiceSpec {
    fn default() -> Self {
        Self {
            f0: None,
            n_harmonics: 12,
            decay: 2.0,
            duration_s: 0.5,
            vibrato_cents: None,
            vibrato_hz: 5.0,
            attack_s: 0.02,
            release_s: 0.05,
            sample_rate: 96_000,
            seed: 0,
        }
    }
}

impl VoiceSpec {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

pub fn synth_voice(spec: &VoiceSpec) -> Result<Signal> {
    if spec.sample_rate == 0 {
        return Err(Error::InvalidSampleRate(0));
    }
    if !(spec.duration_s > 0.0) || !spec.duration_s.is_finite() {
        return Err(Error::InvalidParameter("duration must be positive"));
    }
    if spec.n_harmonics == 0 {
        return Err(Error::InvalidParameter("at least one harmonic required"));
    }
    if !(spec.attack_s >= 0.0 && spec.release_s >= 0.0 && spec.vibrato_hz >= 0.0 && spec.decay.is_finite()) {
        return Err(Error::InvalidParameter("envelope, vibrato rate and decay must be non-negative and finite"));
    }
    let mut rng = SplitMix64::derive(spec.seed, 0x564F_4943);
    let f0 = match spec.f0 {
        Some(f) => f,
        None => rng.uniform(F0_RANGE_HZ.0, F0_RANGE_HZ.1),
    };
    let cents = match spec.vibrato_cents {
        Some(c) => c,
        None => rng.uniform(VIBRATO_RANGE_CENTS.0, VIBRATO_RANGE_CENTS.1),
    };
    if !(f0 > 0.0) || !(cents >= 0.0) {
        return Err(Error::InvalidParameter("f0 must be positive and vibrato depth non-negative"));
    }
    let fs = spec.sample_rate as f64;
    let nyquist = fs / 2.0;
    let top = spec.n_harmonics as f64 * f0 * libm::exp2(cents / 1200.0);
    if top >= nyquist {
        return Err(Error::AboveNyquist { freq_hz: top, nyquist_hz: nyquist });
    }
    let phases: Vec<f64> = (0..spec.n_harmonics).map(|_| rng.uniform(0.0, 2.0 * PI)).collect();
    let vib_phase = rng.uniform(0.0, 2.0 * PI);

    let len = libm::round(spec.duration_s * fs) as usize;
    if len == 0 {
        return Err(Error::InvalidParameter("duration shorter than one sample"));
    }
    // Depth in the log domain: f(t) = f0 · 2^(cents/1200 · sin(2π f_v t)).
    let depth = cents / 1200.0;
    let mut phi = 0.0;
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        let t = n as f64 / fs;
        let env = envelope(t, spec.duration_s, spec.attack_s, spec.release_s);
        let mut v = 0.0;
        for (h, theta) in phases.iter().enumerate() {
            let h = (h + 1) as f64;
            v += libm::pow(h, -spec.decay) * libm::sin(h * phi + theta);
        }
        out.push(v * env);
        let f = f0 * libm::exp2(depth * libm::sin(2.0 * PI * spec.vibrato_hz * t + vib_phase));
        phi += 2.0 * PI * f / fs;
    }
    let peak = out.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    if !(peak > 0.0) {
        return Err(Error::ZeroPower);
    }
    let g = VOICE_PEAK / peak;
    out.iter_mut().for_each(|s| *s *= g);
    Signal::new(out, spec.sample_rate)
}

fn envelope(t: f64, duration: f64, attack: f64, release: f64) -> f64 {
    let a = if attack > 0.0 { t / attack } else { 1.0 };
    let r = if release > 0.0 { (duration - t) / release } else { 1.0 };
    a.min(r).clamp(0.0, 1.0)
}
