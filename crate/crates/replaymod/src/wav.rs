//! Mono WAV I/O. Reads 16-bit PCM (scaled by 1/32768) and 32-bit float;
//! always writes 32-bit float.

use std::path::Path;

use hound::{SampleFormat, WavReader, WavSpec, WavWriter};
use replaymod_core::Signal;

use crate::atomic::write_atomic;
use crate::error::{Error, Result};

pub fn read_wav(path: &Path) -> Result<Signal> {
    let wav_err = |source| Error::Wav { path: path.to_path_buf(), source };
    let mut reader = WavReader::open(path).map_err(wav_err)?;
    let spec = reader.spec();
    let unsupported = |detail: String| Error::UnsupportedWav { path: path.to_path_buf(), detail };
    if spec.channels != 1 {
        return Err(unsupported(format!("{} channels (mono only)", spec.channels)));
    }
    let samples: Vec<f64> = match (spec.sample_format, spec.bits_per_sample) {
        (SampleFormat::Int, 16) => reader
            .samples::<i16>()
            .map(|s| s.map(|v| v as f64 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (SampleFormat::Float, 32) => reader
            .samples::<f32>()
            .map(|s| s.map(f64::from))
            .collect::<std::result::Result<_, _>>()
            .map_err(wav_err)?,
        (fmt, bits) => return Err(unsupported(format!("{bits}-bit {fmt:?}"))),
    };
    Ok(Signal::new(samples, spec.sample_rate)?)
}

/// Encodes `signal` as 32-bit float mono.
pub fn encode_wav(signal: &Signal) -> std::result::Result<Vec<u8>, hound::Error> {
    let spec = WavSpec {
        channels: 1,
        sample_rate: signal.sample_rate(),
        bits_per_sample: 32,
        sample_format: SampleFormat::Float,
    };
    let mut buf = std::io::Cursor::new(Vec::with_capacity(44 + 4 * signal.len()));
    {
        let mut w = WavWriter::new(&mut buf, spec)?;
        for &s in signal.samples() {
            w.write_sample(s as f32)?;
        }
        w.finalize()?;
    }
    Ok(buf.into_inner())
}

pub fn write_wav(path: &Path, signal: &Signal) -> Result<()> {
    let bytes = encode_wav(signal).map_err(|source| Error::Wav { path: path.to_path_buf(), source })?;
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.wav");
        let s = Signal::new(vec![0.0, 0.25, -0.5, 0.999], 96_000).unwrap();
        write_wav(&p, &s).unwrap();
        let back = read_wav(&p).unwrap();
        // Stored as f32.
        let want: Vec<f64> = s.samples().iter().map(|&v| v as f32 as f64).collect();
        assert_eq!(back.samples(), &want[..]);
        assert_eq!(back.sample_rate(), 96_000);
    }

    #[test]
    fn reads_pcm16() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("b.wav");
        let spec = WavSpec { channels: 1, sample_rate: 8000, bits_per_sample: 16, sample_format: SampleFormat::Int };
        let mut w = WavWriter::create(&p, spec).unwrap();
        for v in [0i16, 16384, -32768, 32767] {
            w.write_sample(v).unwrap();
        }
        w.finalize().unwrap();
        let s = read_wav(&p).unwrap();
        assert_eq!(s.samples(), &[0.0, 0.5, -1.0, 32767.0 / 32768.0]);
        assert_eq!(s.sample_rate(), 8000);
    }

    #[test]
    fn rejects_stereo() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.wav");
        let spec = WavSpec { channels: 2, sample_rate: 8000, bits_per_sample: 16, sample_format: SampleFormat::Int };
        let mut w = WavWriter::create(&p, spec).unwrap();
        w.write_sample(0i16).unwrap();
        w.write_sample(0i16).unwrap();
        w.finalize().unwrap();
        assert!(matches!(read_wav(&p), Err(Error::UnsupportedWav { .. })));
    }
}
