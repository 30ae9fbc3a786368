//! Loudspeaker characterisation and inverse filtering.
//!
//! The attacker's side: measure a speaker at 68 fixed tones, fit a natural
//! cubic spline through the measured gains, sample it at the FFT resolution
//! of the audio to be compensated, and invert it. The simulator's side:
//! [`SpeakerModel`] presets rendered into per-bin [`SpeakerProfile`]s,
//! which the replay channel in [`crate::attack`] applies.

mod inverse;
mod profile;
mod response;
mod spline;

pub use inverse::{build_inverse_filter, InverseFilter, DEFAULT_EPS, SUBBASS_CUT_HZ};
pub use profile::{
    measure_speaker, wrap_phase, AmplitudeShape, PhaseModel, SpeakerModel, SpeakerProfile,
    DEFAULT_SUBBASS_NOISE_RMS, MEASUREMENT_TONE_S,
};
pub use response::{
    bin_frequency, fit_response, measurement_grid, sample_response, DiscreteResponse,
    ResponseCurve, GRID_LEN,
};
pub use spline::CubicSpline;
