use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes of the numerical core.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    EmptyInput,
    InvalidSampleRate(u32),
    NonFiniteSample(usize),
    NotPowerOfTwo(usize),
    NonConjugateSymmetric { residue: f64 },
    LengthMismatch { expected: usize, found: usize },
    TooShort { needed: usize, found: usize },
    InvalidParameter(&'static str),
    ZeroPower,
    AboveNyquist { freq_hz: f64, nyquist_hz: f64 },
    UnsortedKnots(usize),
    FilterResolutionMismatch { filter_bins: usize, signal_bins: usize },
    SegmentTooShort(usize),
    SilentSegment,
    EmptyClass(&'static str),
    NoVoicedContent,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyInput => write!(f, "empty input"),
            Error::InvalidSampleRate(sr) => write!(f, "invalid sample rate {sr}"),
            Error::NonFiniteSample(i) => write!(f, "non-finite sample at index {i}"),
            Error::NotPowerOfTwo(n) => write!(f, "length {n} is not a power of two"),
            Error::NonConjugateSymmetric { residue } => {
                write!(f, "non-conjugate-symmetric spectrum (imaginary residue {residue:e})")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "length mismatch: expected {expected}, found {found}")
            }
            Error::TooShort { needed, found } => {
                write!(f, "too short: need {needed} samples, have {found}")
            }
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
            Error::ZeroPower => write!(f, "signal has zero power"),
            Error::AboveNyquist { freq_hz, nyquist_hz } => {
                write!(f, "frequency {freq_hz} Hz is not below Nyquist ({nyquist_hz} Hz)")
            }
            Error::UnsortedKnots(i) => {
                write!(f, "knot frequencies must be strictly increasing (at index {i})")
            }
            Error::FilterResolutionMismatch { filter_bins, signal_bins } => write!(
                f,
                "filter resolution mismatch: filter has {filter_bins} bins, signal needs {signal_bins}"
            ),
            Error::SegmentTooShort(l) => write!(f, "segment too short ({l} samples, need 3)"),
            Error::SilentSegment => write!(f, "silent segment"),
            Error::EmptyClass(which) => write!(f, "training class '{which}' is empty"),
            Error::NoVoicedContent => write!(f, "no voiced content"),
        }
    }
}

impl core::error::Error for Error {}
