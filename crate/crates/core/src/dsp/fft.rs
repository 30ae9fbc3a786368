use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use super::Signal;
use crate::{Error, Result};

/// Imaginary residue above which an inverse transform is rejected.
const IMAG_REJECT: f64 = 1e-6;

/// Complex spectrum of a zero-padded real signal.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bins: Vec<Complex64>,
    pub sample_rate: u32,
    /// Samples before padding; `ifft` truncates back to this.
    pub original_length: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn delta_f(&self) -> f64 {
        self.sample_rate as f64 / self.bins.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpectrum {
    pub magnitudes: Vec<f64>,
    pub delta_f: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSpectrum {
    /// Radians in (-π, π].
    pub phases: Vec<f64>,
}

pub fn next_pow2(n: usize) -> usize {
    n.max(1).next_power_of_two()
}

fn bit_reverse_permute(data: &mut [Complex64]) {
    let n = data.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            data.swap(i, j);
        }
    }
}

fn radix2(data: &mut [Complex64], sign: f64) -> Result<()> {
    let n = data.len();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if !n.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(n));
    }
    bit_reverse_permute(data);
    // Twiddles for the largest stage, evaluated directly so that error does
    // not accumulate through a recurrence.
    let half = n / 2;
    let twiddles: Vec<Complex64> = (0..half)
        .map(|k| {
            let theta = sign * 2.0 * PI * k as f64 / n as f64;
            Complex64::new(libm::cos(theta), libm::sin(theta))
        })
        .collect();
    let mut len = 2;
    while len <= n {
        let step = n / len;
        let h = len / 2;
        for start in (0..n).step_by(len) {
            for k in 0..h {
                let w = twiddles[k * step];
                let a = data[start + k];
                let b = data[start + k + h] * w;
                data[start + k] = a + b;
                data[start + k + h] = a - b;
            }
        }
        len <<= 1;
    }
    Ok(())
}

/// Forward transform, X(k) = Σ x(n) e^{-i2πkn/N}. Length must be a power of two.
pub fn fft_in_place(data: &mut [Complex64]) -> Result<()> {
    radix2(data, -1.0)
}

/// Inverse transform including the 1/N factor.
pub fn ifft_in_place(data: &mut [Complex64]) -> Result<()> {
    radix2(data, 1.0)?;
    let scale = 1.0 / data.len() as f64;
    for v in data.iter_mut() {
        *v *= scale;
    }
    Ok(())
}

/// Transform of `samples` zero-padded to `n_fft` (a power of two ≥ len).
pub fn fft_padded(samples: &[f64], n_fft: usize) -> Result<Vec<Complex64>> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if n_fft < samples.len() {
        return Err(Error::TooShort { needed: samples.len(), found: n_fft });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
    for (b, &s) in buf.iter_mut().zip(samples) {
        b.re = s;
    }
    fft_in_place(&mut buf)?;
    Ok(buf)
}

/// Spectrum at N = smallest power of two ≥ L.
pub fn fft(signal: &Signal) -> Result<Spectrum> {
    let n = next_pow2(signal.len());
    let bins = fft_padded(signal.samples(), n)?;
    Ok(Spectrum { bins, sample_rate: signal.sample_rate(), original_length: signal.len() })
}

/// Inverse transform truncated to the original length. Fails when the
/// spectrum is not (numerically) Hermitian.
pub fn ifft(spectrum: &Spectrum) -> Result<Signal> {
    let mut buf = spectrum.bins.clone();
    ifft_in_place(&mut buf)?;
    let residue = buf.iter().fold(0.0f64, |m, c| m.max(c.im.abs()));
    if residue >= IMAG_REJECT {
        return Err(Error::NonConjugateSymmetric { residue });
    }
    let keep = spectrum.original_length.min(buf.len());
    Signal::new(buf[..keep].iter().map(|c| c.re).collect(), spectrum.sample_rate)
}

/// Magnitude and phase; the phase of an exact zero bin is 0.
pub fn split(spectrum: &Spectrum) -> (AmplitudeSpectrum, PhaseSpectrum) {
    let magnitudes = spectrum.bins.iter().map(|c| c.norm()).collect();
    let phases = spectrum
        .bins
        .iter()
        .map(|c| if c.re == 0.0 && c.im == 0.0 { 0.0 } else { canonical_phase(c.arg()) })
        .collect();
    (AmplitudeSpectrum { magnitudes, delta_f: spectrum.delta_f() }, PhaseSpectrum { phases })
}

// atan2 returns [-π, π]; fold -π onto π.
fn canonical_phase(p: f64) -> f64 {
    if p <= -PI {
        p + 2.0 * PI
    } else {
        p
    }
}

/// Rebuild bins as amplitude · e^{i·phase}. The result carries no sample
/// rate or original length of its own; those are taken from `template`.
pub fn combine(
    amps: &AmplitudeSpectrum,
    phases: &PhaseSpectrum,
    template: &Spectrum,
) -> Result<Spectrum> {
    if amps.magnitudes.len() != phases.phases.len() {
        return Err(Error::LengthMismatch {
            expected: amps.magnitudes.len(),
            found: phases.phases.len(),
        });
    }
    if amps.magnitudes.len() != template.len() {
        return Err(Error::LengthMismatch {
            expected: template.len(),
            found: amps.magnitudes.len(),
        });
    }
    let bins = amps
        .magnitudes
        .iter()
        .zip(&phases.phases)
        .map(|(&m, &p)| Complex64::from_polar(m, p))
        .collect();
    Ok(Spectrum {
        bins,
        sample_rate: template.sample_rate,
        original_length: template.original_length,
    })
}
