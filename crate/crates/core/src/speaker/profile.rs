use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::{bin_frequency, measurement_grid, CubicSpline, DiscreteResponse};
use crate::attack::apply_speaker;
use crate::dsp::{fft_padded, Signal};
use crate::rng::SplitMix64;
use crate::{Error, Result};

/// Default RMS of the additive 20–60 Hz resonance (about -60 dBFS).
pub const DEFAULT_SUBBASS_NOISE_RMS: f64 = 1e-3;
/// Minimum length of each measurement tone.
pub const MEASUREMENT_TONE_S: f64 = 0.5;
const PHASE_CONTROL_POINTS: usize = 8;

/// Continuous amplitude response of a simulated loudspeaker.
#[derive(Debug, Clone, PartialEq)]
pub enum AmplitudeShape {
    Flat { gain: f64 },
    /// `floor + (1 - floor)·|Butterworth high-pass|`.
    HighPass { cutoff_hz: f64, order: u32, floor: f64 },
    /// Brick-wall step between two gains.
    Step { edge_hz: f64, below: f64, above: f64 },
    /// Woofer ridge around 300 Hz, tweeter ridge around 5 kHz, crossover dip between.
    TwoWay,
}

impl AmplitudeShape {
    pub fn gain(&self, freq_hz: f64) -> f64 {
        match *self {
            AmplitudeShape::Flat { gain } => gain,
            AmplitudeShape::HighPass { cutoff_hz, order, floor } => {
                floor + (1.0 - floor) * butterworth_high_pass(freq_hz, cutoff_hz, order)
            }
            AmplitudeShape::Step { edge_hz, below, above } => {
                if freq_hz < edge_hz {
                    below
                } else {
                    above
                }
            }
            AmplitudeShape::TwoWay => {
                let ridge = |centre: f64, width_oct: f64| {
                    let oct = libm::log2(freq_hz.max(1.0) / centre);
                    libm::exp(-oct * oct / (2.0 * width_oct * width_oct))
                };
                butterworth_high_pass(freq_hz, 70.0, 2)
                    * (0.35 + 0.65 * ridge(300.0, 0.9) + 0.55 * ridge(5000.0, 0.8))
            }
        }
    }
}

fn butterworth_high_pass(freq_hz: f64, cutoff_hz: f64, order: u32) -> f64 {
    let q = libm::pow(freq_hz.max(0.0) / cutoff_hz, order as f64);
    q / libm::sqrt(1.0 + q * q)
}

/// Smooth phase response ψ(f): natural spline through control values spaced
/// uniformly over [0, fs/2], plus a pure delay, wrapped to (-π, π].
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseModel {
    pub control: Vec<f64>,
    pub delay_s: f64,
}

impl PhaseModel {
    pub fn zero() -> Self {
        Self { control: Vec::new(), delay_s: 0.0 }
    }

    pub fn delay(delay_s: f64) -> Self {
        Self { control: Vec::new(), delay_s }
    }

    /// Eight control values drawn uniformly from [-bound, bound], rescaled
    /// when the spline through them would overshoot, so |ψ(f)| ≤ bound
    /// everywhere.
    pub fn random(seed: u64, bound: f64) -> Self {
        let mut rng = SplitMix64::derive(seed, 0x5053_4921);
        let mut control: Vec<f64> = (0..PHASE_CONTROL_POINTS).map(|_| rng.uniform(-bound, bound)).collect();
        let knots: Vec<f64> = (0..PHASE_CONTROL_POINTS).map(|i| i as f64).collect();
        if let Ok(s) = CubicSpline::natural(&knots, &control) {
            let steps = 512 * (PHASE_CONTROL_POINTS - 1);
            let peak = (0..=steps)
                .map(|j| libm::fabs(s.eval(j as f64 / 512.0)))
                .fold(0.0, f64::max);
            // Margin covers the maximum falling between grid points.
            let limit = bound * (1.0 - 1e-3);
            if peak > limit {
                control.iter_mut().for_each(|c| *c *= limit / peak);
            }
        }
        Self { control, delay_s: 0.0 }
    }

    fn spline(&self, sample_rate: u32) -> Option<CubicSpline> {
        if self.control.len() < 2 {
            return None;
        }
        let nyq = sample_rate as f64 / 2.0;
        let step = nyq / (self.control.len() - 1) as f64;
        let knots: Vec<f64> = (0..self.control.len()).map(|i| i as f64 * step).collect();
        CubicSpline::natural(&knots, &self.control).ok()
    }

    /// ψ at each of `freqs`.
    pub fn eval_many(&self, freqs: &[f64], sample_rate: u32) -> Vec<f64> {
        let spline = self.spline(sample_rate);
        let constant = if self.control.len() == 1 { self.control[0] } else { 0.0 };
        freqs
            .iter()
            .map(|&f| {
                let smooth = spline.as_ref().map_or(constant, |s| s.eval(f));
                wrap_phase(smooth - 2.0 * PI * f * self.delay_s)
            })
            .collect()
    }
}

/// Wraps into (-π, π].
pub fn wrap_phase(p: f64) -> f64 {
    let mut w = libm::fmod(p + PI, 2.0 * PI);
    if w < 0.0 {
        w += 2.0 * PI;
    }
    let w = w - PI;
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// A simulated loudspeaker, independent of any FFT size.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerModel {
    pub name: String,
    pub amplitude: AmplitudeShape,
    pub phase: PhaseModel,
    pub subbass_noise_rms: f64,
}

impl SpeakerModel {
    /// Ideal speaker: unit gain, zero phase, no resonance noise.
    pub fn flat() -> Self {
        Self {
            name: "flat".into(),
            amplitude: AmplitudeShape::Flat { gain: 1.0 },
            phase: PhaseModel::zero(),
            subbass_noise_rms: 0.0,
        }
    }

    /// Small phone speaker: steep low cut at 500 Hz, 40 dB floor.
    pub fn phone(seed: u64) -> Self {
        Self {
            name: "phone".into(),
            amplitude: AmplitudeShape::HighPass { cutoff_hz: 500.0, order: 4, floor: 0.01 },
            phase: PhaseModel::random(seed, PI / 4.0),
            subbass_noise_rms: DEFAULT_SUBBASS_NOISE_RMS,
        }
    }

    pub fn two_way(seed: u64) -> Self {
        Self {
            name: "two-way".into(),
            amplitude: AmplitudeShape::TwoWay,
            phase: PhaseModel::random(seed, PI / 4.0),
            subbass_noise_rms: DEFAULT_SUBBASS_NOISE_RMS,
        }
    }

    pub fn preset(name: &str, seed: u64) -> Option<Self> {
        match name {
            "flat" => Some(Self::flat()),
            "phone" => Some(Self::phone(seed)),
            "two-way" | "two_way" | "twoway" => Some(Self::two_way(seed)),
            _ => None,
        }
    }

    pub const PRESETS: [&'static str; 3] = ["flat", "phone", "two-way"];

    /// Renders the model at the resolution of an `n_fft`-point transform.
    pub fn profile(&self, sample_rate: u32, n_fft: usize) -> Result<SpeakerProfile> {
        if !n_fft.is_power_of_two() || n_fft < 2 {
            return Err(Error::NotPowerOfTwo(n_fft));
        }
        let df = sample_rate as f64 / n_fft as f64;
        let freqs: Vec<f64> = (0..=n_fft / 2).map(|k| k as f64 * df).collect();
        let amplitude = freqs.iter().map(|&f| self.amplitude.gain(f)).collect();
        let phase = self.phase.eval_many(&freqs, sample_rate);
        SpeakerProfile::new(self.name.clone(), sample_rate, n_fft, amplitude, phase, self.subbass_noise_rms)
    }
}

/// Ground-truth per-bin response of a simulated speaker at one FFT size.
/// Only bins `0..=n_fft/2` are stored; the rest follow by conjugate symmetry.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerProfile {
    pub name: String,
    pub sample_rate: u32,
    pub n_fft: usize,
    pub amplitude: Vec<f64>,
    pub phase: Vec<f64>,
    pub subbass_noise_level: f64,
}

impl SpeakerProfile {
    pub fn new(
        name: String,
        sample_rate: u32,
        n_fft: usize,
        amplitude: Vec<f64>,
        phase: Vec<f64>,
        subbass_noise_level: f64,
    ) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidSampleRate(sample_rate));
        }
        if !n_fft.is_power_of_two() || n_fft < 2 {
            return Err(Error::NotPowerOfTwo(n_fft));
        }
        let half = n_fft / 2 + 1;
        if amplitude.len() != half {
            return Err(Error::LengthMismatch { expected: half, found: amplitude.len() });
        }
        if phase.len() != half {
            return Err(Error::LengthMismatch { expected: half, found: phase.len() });
        }
        if amplitude.iter().any(|g| !g.is_finite() || *g < 0.0) {
            return Err(Error::InvalidParameter("speaker gains must be finite and non-negative"));
        }
        if phase.iter().any(|p| !(*p > -PI && *p <= PI)) {
            return Err(Error::InvalidParameter("speaker phases must lie in (-pi, pi]"));
        }
        if !(subbass_noise_level >= 0.0) || !subbass_noise_level.is_finite() {
            return Err(Error::InvalidParameter("sub-bass noise level must be non-negative"));
        }
        Ok(Self { name, sample_rate, n_fft, amplitude, phase, subbass_noise_level })
    }

    pub fn delta_f(&self) -> f64 {
        self.sample_rate as f64 / self.n_fft as f64
    }

    /// H(k) over all `n_fft` bins.
    pub fn amplitude_full(&self) -> Vec<f64> {
        let n = self.n_fft;
        (0..n).map(|k| self.amplitude[if k > n / 2 { n - k } else { k }]).collect()
    }

    /// Complex factor H(k)·e^{iψ(k)} for bin `k` of the full transform. DC
    /// and Nyquist are real (H·cos ψ) so a real input stays real.
    pub fn response(&self, k: usize) -> Complex64 {
        let n = self.n_fft;
        let half = n / 2;
        if k == 0 || k == half {
            return Complex64::new(self.amplitude[k] * libm::cos(self.phase[k]), 0.0);
        }
        let (idx, sign) = if k > half { (n - k, -1.0) } else { (k, 1.0) };
        Complex64::from_polar(self.amplitude[idx], sign * self.phase[idx])
    }

    pub fn bin_frequency(&self, k: usize) -> f64 {
        bin_frequency(k, self.n_fft, self.delta_f())
    }

    /// Same speaker with a zero phase response and no additive noise.
    pub fn without_phase_and_noise(&self) -> Self {
        Self { phase: alloc::vec![0.0; self.phase.len()], subbass_noise_level: 0.0, ..self.clone() }
    }
}

/// Plays a unit sine at each grid frequency through `profile` (via the
/// replay channel) and records output/input magnitude at the nearest bin.
///
/// Each tone is exactly `n_fft` samples long, so it must last at least
/// [`MEASUREMENT_TONE_S`]. The input magnitude is read from the same bin
/// of the clean tone, so window scalloping cancels out of the ratio.
pub fn measure_speaker(profile: &SpeakerProfile, sample_rate: u32, n_fft: usize) -> Result<DiscreteResponse> {
    if profile.sample_rate != sample_rate || profile.n_fft != n_fft {
        return Err(Error::FilterResolutionMismatch { filter_bins: profile.n_fft, signal_bins: n_fft });
    }
    let nyquist = sample_rate as f64 / 2.0;
    if (n_fft as f64) < MEASUREMENT_TONE_S * sample_rate as f64 {
        return Err(Error::InvalidParameter("n_fft too small for a 0.5 s measurement tone"));
    }
    let df = profile.delta_f();
    let mut points = Vec::with_capacity(super::GRID_LEN);
    for (i, f) in measurement_grid().into_iter().enumerate() {
        if f >= nyquist {
            return Err(Error::AboveNyquist { freq_hz: f, nyquist_hz: nyquist });
        }
        let w = 2.0 * PI * f / sample_rate as f64;
        let tone: Vec<f64> = (0..n_fft).map(|n| libm::sin(w * n as f64)).collect();
        let bin = libm::round(f / df) as usize;
        let input = fft_padded(&tone, n_fft)?[bin].norm();
        let played = apply_speaker(&Signal::new(tone, sample_rate)?, profile, i as u64)?;
        let output = fft_padded(played.samples(), n_fft)?[bin].norm();
        points.push((f, output / input));
    }
    DiscreteResponse::new(points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_phase_range() {
        for &p in &[0.0, PI, -PI, 3.0 * PI, -3.0 * PI, 7.5, -7.5, 1e3] {
            let w = wrap_phase(p);
            assert!(w > -PI && w <= PI, "{p} -> {w}");
            assert!((libm::cos(w) - libm::cos(p)).abs() < 1e-9);
        }
        assert_eq!(wrap_phase(-PI), PI);
    }

    #[test]
    fn profile_validation() {
        assert!(SpeakerProfile::new("x".into(), 8000, 12, alloc::vec![1.0; 7], alloc::vec![0.0; 7], 0.0).is_err());
        assert!(SpeakerProfile::new("x".into(), 8000, 8, alloc::vec![1.0; 4], alloc::vec![0.0; 5], 0.0).is_err());
        assert!(SpeakerProfile::new("x".into(), 8000, 8, alloc::vec![1.0; 5], alloc::vec![4.0; 5], 0.0).is_err());
        assert!(SpeakerProfile::new("x".into(), 8000, 8, alloc::vec![1.0; 5], alloc::vec![0.0; 5], 0.0).is_ok());
    }

    #[test]
    fn presets_render() {
        for name in SpeakerModel::PRESETS {
            let p = SpeakerModel::preset(name, 3).unwrap().profile(96_000, 4096).unwrap();
            assert_eq!(p.amplitude.len(), 2049);
            assert!(p.phase.iter().all(|v| v.abs() <= PI));
        }
        let phone = SpeakerModel::phone(1);
        assert!(phone.amplitude.gain(100.0) < 0.02);
        assert!(phone.amplitude.gain(2000.0) > 0.99);
        assert!(SpeakerModel::preset("horn", 0).is_none());
    }

    #[test]
    fn random_phase_is_bounded_by_control_range() {
        let m = PhaseModel::random(11, PI / 4.0);
        assert_eq!(m.control.len(), 8);
        assert!(m.control.iter().all(|c| c.abs() <= PI / 4.0));
        for seed in 0..200 {
            let p = SpeakerModel::phone(seed).profile(48_000, 4096).unwrap();
            assert!(p.phase.iter().all(|v| v.abs() <= PI / 4.0), "seed {seed}");
        }
    }

    #[test]
    fn response_is_hermitian() {
        let p = SpeakerModel::phone(5).profile(8000, 64).unwrap();
        for k in 1..32 {
            assert_eq!(p.response(k), p.response(64 - k).conj());
        }
        assert_eq!(p.response(0).im, 0.0);
        assert_eq!(p.response(32).im, 0.0);
    }

    fn shaped(shape: AmplitudeShape, fs: u32, n: usize) -> SpeakerProfile {
        let model = SpeakerModel { name: "t".into(), amplitude: shape, phase: PhaseModel::zero(), subbass_noise_rms: 0.0 };
        model.profile(fs, n).unwrap()
    }

    #[test]
    fn measure_flat_and_scalar() {
        let flat = SpeakerModel::flat().profile(16_000, 8192).unwrap();
        let m = measure_speaker(&flat, 16_000, 8192).unwrap();
        assert_eq!(m.points().len(), super::super::GRID_LEN);
        assert!(m.gains().iter().all(|g| (g - 1.0).abs() < 1e-3));
        let half = shaped(AmplitudeShape::Flat { gain: 0.5 }, 16_000, 8192);
        let m = measure_speaker(&half, 16_000, 8192).unwrap();
        assert!(m.gains().iter().all(|g| (g - 0.5).abs() < 1e-3));
    }

    #[test]
    fn measure_step_high_pass() {
        let step = shaped(AmplitudeShape::Step { edge_hz: 500.0, below: 0.1, above: 1.0 }, 16_000, 8192);
        let m = measure_speaker(&step, 16_000, 8192).unwrap();
        let at = |f: f64| m.points().iter().find(|p| p.0 == f).unwrap().1;
        assert!((at(60.0) - 0.1).abs() < 0.005);
        assert!((at(2000.0) - 1.0).abs() < 0.05);
    }

    #[test]
    fn measure_with_phase_and_noise() {
        let p = SpeakerModel::phone(2).profile(16_000, 8192).unwrap();
        let m = measure_speaker(&p, 16_000, 8192).unwrap();
        for &(f, g) in m.points() {
            let truth = p.amplitude[libm::round(f / p.delta_f()) as usize];
            assert!((g - truth).abs() < 0.02 * truth + 2e-4, "{f}: {g} vs {truth}");
        }
    }

    #[test]
    fn measure_errors() {
        let flat = SpeakerModel::flat().profile(8000, 4096).unwrap();
        assert!(matches!(measure_speaker(&flat, 8000, 4096), Err(Error::AboveNyquist { .. })));
        let short = SpeakerModel::flat().profile(16_000, 4096).unwrap();
        assert!(measure_speaker(&short, 16_000, 4096).is_err());
        assert!(measure_speaker(&short, 16_000, 8192).is_err());
    }
}
