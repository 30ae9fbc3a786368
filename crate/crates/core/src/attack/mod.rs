//! Modulation processor and the software replay channel.
//!
//! [`modulate`] pre-compensates a recording with an [`InverseFilter`];
//! [`apply_speaker`] plays a signal through a simulated [`SpeakerProfile`].
//! The replay helpers chain the two, optionally through a [`Converter`]
//! that models finite-resolution playback and recording.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::dsp::{combine, fft, ifft, split, AmplitudeSpectrum, PhaseSpectrum, Signal, Spectrum};
use crate::rng::SplitMix64;
use crate::speaker::{InverseFilter, SpeakerProfile};
use crate::{Error, Result};

mod converter;

pub use converter::{quantize, Converter};

const SUBBASS_TONES: usize = 3;
const SUBBASS_LO_HZ: f64 = 20.0;
const SUBBASS_HI_HZ: f64 = 60.0;
const SUBBASS_STREAM: u64 = 0x5542_4153;

/// Where a piece of audio came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Provenance {
    Genuine,
    ClassicalReplay,
    ModulatedReplay,
}

impl Provenance {
    pub const ALL: [Provenance; 3] = [Provenance::Genuine, Provenance::ClassicalReplay, Provenance::ModulatedReplay];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Genuine => "genuine",
            Provenance::ClassicalReplay => "classical_replay",
            Provenance::ModulatedReplay => "modulated_replay",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Provenance::ALL.into_iter().find(|p| p.as_str() == s)
    }
}

impl core::fmt::Display for Provenance {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Output of an attack stage, tagged with its provenance.
#[derive(Debug, Clone)]
pub struct ModulatedAudio<'a> {
    pub signal: Signal,
    pub source_filter: Option<&'a InverseFilter>,
    pub provenance: Provenance,
}

/// Scales each amplitude bin by the filter gain. The phase spectrum is
/// returned untouched.
pub fn compensate(spectrum: &Spectrum, filter: &InverseFilter) -> Result<(AmplitudeSpectrum, PhaseSpectrum)> {
    if filter.len() != spectrum.len() {
        return Err(Error::FilterResolutionMismatch { filter_bins: filter.len(), signal_bins: spectrum.len() });
    }
    let (mut amps, phases) = split(spectrum);
    for (m, g) in amps.magnitudes.iter_mut().zip(&filter.gains) {
        *m *= g;
    }
    Ok((amps, phases))
}

/// One FFT over the zero-padded utterance, amplitude compensation, and
/// reconstruction truncated back to the input length.
pub fn modulate<'a>(genuine: &Signal, filter: &'a InverseFilter) -> Result<ModulatedAudio<'a>> {
    let spectrum = fft(genuine)?;
    let (amps, phases) = compensate(&spectrum, filter)?;
    let signal = ifft(&combine(&amps, &phases, &spectrum)?)?;
    Ok(ModulatedAudio { signal, source_filter: Some(filter), provenance: Provenance::ModulatedReplay })
}

/// Circular filtering by H(k)·e^{iψ(k)} at the padded length, then the
/// speaker's seeded sub-bass resonance.
pub fn apply_speaker(signal: &Signal, profile: &SpeakerProfile, seed: u64) -> Result<Signal> {
    let mut spectrum = fft(signal)?;
    if spectrum.len() != profile.n_fft {
        return Err(Error::FilterResolutionMismatch { filter_bins: profile.n_fft, signal_bins: spectrum.len() });
    }
    if spectrum.sample_rate != profile.sample_rate {
        return Err(Error::InvalidSampleRate(signal.sample_rate()));
    }
    for (k, bin) in spectrum.bins.iter_mut().enumerate() {
        *bin *= profile.response(k);
    }
    let played = ifft(&spectrum)?;
    if profile.subbass_noise_level == 0.0 {
        return Ok(played);
    }
    let noise = subbass_noise(played.len(), played.sample_rate(), profile.subbass_noise_level, seed);
    let samples = played.samples().iter().zip(&noise).map(|(a, b)| a + b).collect();
    played.with_samples(samples)
}

fn subbass_noise(len: usize, sample_rate: u32, rms: f64, seed: u64) -> Vec<f64> {
    let mut rng = SplitMix64::derive(seed, SUBBASS_STREAM);
    let tones: Vec<(f64, f64)> = (0..SUBBASS_TONES)
        .map(|_| (rng.uniform(SUBBASS_LO_HZ, SUBBASS_HI_HZ), rng.uniform(0.0, 2.0 * PI)))
        .collect();
    let fs = sample_rate as f64;
    let mut out: Vec<f64> = (0..len)
        .map(|n| {
            let t = n as f64 / fs;
            tones.iter().map(|&(f, p)| libm::sin(2.0 * PI * f * t + p)).sum()
        })
        .collect();
    let actual = libm::sqrt(crate::dsp::power(&out));
    if actual > 0.0 {
        let g = rms / actual;
        out.iter_mut().for_each(|v| *v *= g);
    }
    out
}

/// Genuine audio played straight through the speaker with ideal converters.
pub fn classical_replay(genuine: &Signal, profile: &SpeakerProfile, seed: u64) -> Result<ModulatedAudio<'static>> {
    classical_replay_with(genuine, profile, seed, &Converter::ideal())
}

pub fn classical_replay_with(
    genuine: &Signal,
    profile: &SpeakerProfile,
    seed: u64,
    converter: &Converter,
) -> Result<ModulatedAudio<'static>> {
    let recorded = replay_through(genuine, genuine, profile, seed, converter)?;
    Ok(ModulatedAudio { signal: recorded, source_filter: None, provenance: Provenance::ClassicalReplay })
}

/// Modulates, then replays, with ideal converters.
pub fn modulated_replay<'a>(
    genuine: &Signal,
    filter: &'a InverseFilter,
    profile: &SpeakerProfile,
    seed: u64,
) -> Result<ModulatedAudio<'a>> {
    modulated_replay_with(genuine, filter, profile, seed, &Converter::ideal())
}

pub fn modulated_replay_with<'a>(
    genuine: &Signal,
    filter: &'a InverseFilter,
    profile: &SpeakerProfile,
    seed: u64,
    converter: &Converter,
) -> Result<ModulatedAudio<'a>> {
    let modulated = modulate(genuine, filter)?;
    let recorded = replay_through(&modulated.signal, genuine, profile, seed, converter)?;
    Ok(ModulatedAudio { signal: recorded, source_filter: Some(filter), provenance: Provenance::ModulatedReplay })
}

fn replay_through(
    signal: &Signal,
    reference: &Signal,
    profile: &SpeakerProfile,
    seed: u64,
    converter: &Converter,
) -> Result<Signal> {
    let played = converter.playback(signal)?;
    let mut acoustic = apply_speaker(&played, profile, seed)?;
    if converter.match_loudness {
        let target = crate::dsp::power(reference.samples());
        let actual = crate::dsp::power(acoustic.samples());
        if actual > 0.0 && target > 0.0 {
            acoustic = acoustic.scaled(libm::sqrt(target / actual))?;
        }
    }
    converter.record(&acoustic)
}

/// Squared Euclidean distance between the two spectra after scaling each
/// to unit sum.
pub fn l2_similarity(a: &AmplitudeSpectrum, b: &AmplitudeSpectrum) -> Result<f64> {
    if a.magnitudes.len() != b.magnitudes.len() {
        return Err(Error::LengthMismatch { expected: a.magnitudes.len(), found: b.magnitudes.len() });
    }
    let sa: f64 = a.magnitudes.iter().sum();
    let sb: f64 = b.magnitudes.iter().sum();
    if !(sa > 0.0) || !(sb > 0.0) {
        return Err(Error::ZeroPower);
    }
    Ok(a.magnitudes
        .iter()
        .zip(&b.magnitudes)
        .map(|(x, y)| {
            let d = x / sa - y / sb;
            d * d
        })
        .sum())
}

#[cfg(test)]
mod tests;
