//! Transforms and signal plumbing.

mod fft;
mod frame;
mod noise;
mod signal;

pub use fft::{
    combine, fft, fft_in_place, fft_padded, ifft, ifft_in_place, next_pow2, split,
    AmplitudeSpectrum, PhaseSpectrum, Spectrum,
};
pub use frame::{frame, FrameSequence, DEFAULT_FRAME_MS, DEFAULT_HOP_MS};
pub use noise::{mix_noise, power};
pub use signal::Signal;

pub use num_complex::Complex64;
