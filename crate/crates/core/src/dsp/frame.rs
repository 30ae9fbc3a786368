use alloc::vec::Vec;

use super::Signal;
use crate::{Error, Result};

pub const DEFAULT_FRAME_MS: f64 = 32.0;
pub const DEFAULT_HOP_MS: f64 = 16.0;

/// Rectangular, equally sized frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameSequence {
    pub frames: Vec<Signal>,
    pub frame_length: usize,
    pub hop: usize,
}

impl FrameSequence {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

fn ms_to_samples(ms: f64, fs: u32) -> usize {
    libm::round(ms * fs as f64 / 1000.0) as usize
}

/// Splits `signal` into frames of `frame_ms` every `hop_ms`; a trailing
/// partial frame is dropped.
pub fn frame(signal: &Signal, frame_ms: f64, hop_ms: f64) -> Result<FrameSequence> {
    if !(hop_ms > 0.0) || frame_ms < hop_ms {
        return Err(Error::InvalidParameter("need frame_ms >= hop_ms > 0"));
    }
    let fs = signal.sample_rate();
    let frame_length = ms_to_samples(frame_ms, fs);
    let hop = ms_to_samples(hop_ms, fs).max(1);
    if frame_length == 0 {
        return Err(Error::InvalidParameter("frame shorter than one sample"));
    }
    if signal.len() < frame_length {
        return Err(Error::TooShort { needed: frame_length, found: signal.len() });
    }
    let x = signal.samples();
    let frames = (0..=(x.len() - frame_length) / hop)
        .map(|i| Signal::new(x[i * hop..i * hop + frame_length].to_vec(), fs))
        .collect::<Result<Vec<_>>>()?;
    Ok(FrameSequence { frames, frame_length, hop })
}
