use alloc::vec::Vec;

use super::CubicSpline;
use crate::{Error, Result};

pub const GRID_LEN: usize = 68;

/// The 68 test tones: bass 60–225 Hz every 15, low midrange 250–500 every
/// 50, midrange 550–2000 every 50, upper midrange 2100–4000 every 100.
pub fn measurement_grid() -> Vec<f64> {
    let bands: [(u32, u32, u32); 4] = [(60, 225, 15), (250, 500, 50), (550, 2000, 50), (2100, 4000, 100)];
    bands
        .iter()
        .flat_map(|&(lo, hi, step)| (lo..=hi).step_by(step as usize).map(f64::from))
        .collect()
}

/// Physical frequency of bin `k` in an `n_fft` transform, folding the upper
/// half onto the lower.
pub fn bin_frequency(k: usize, n_fft: usize, delta_f: f64) -> f64 {
    let folded = if k > n_fft / 2 { n_fft - k } else { k };
    folded as f64 * delta_f
}

/// Measured (frequency, gain) pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteResponse {
    points: Vec<(f64, f64)>,
}

impl DiscreteResponse {
    /// At least four points, strictly increasing frequency, finite gains ≥ 0.
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.len() < 4 {
            return Err(Error::TooShort { needed: 4, found: points.len() });
        }
        if let Some(i) = (1..points.len()).find(|&i| !(points[i].0 > points[i - 1].0)) {
            return Err(Error::UnsortedKnots(i));
        }
        if points.iter().any(|&(f, g)| !f.is_finite() || !g.is_finite() || g < 0.0) {
            return Err(Error::InvalidParameter("gains must be finite and non-negative"));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn frequencies(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.0).collect()
    }

    pub fn gains(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.1).collect()
    }
}

/// Continuous amplitude response H(f) fitted through a [`DiscreteResponse`].
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseCurve {
    spline: CubicSpline,
}

impl ResponseCurve {
    pub fn spline(&self) -> &CubicSpline {
        &self.spline
    }

    pub fn domain(&self) -> (f64, f64) {
        self.spline.domain()
    }

    /// H(f), held at the end values outside the measured domain.
    pub fn eval(&self, freq_hz: f64) -> f64 {
        let (lo, hi) = self.domain();
        self.spline.eval(freq_hz.clamp(lo, hi))
    }
}

pub fn fit_response(measured: &DiscreteResponse) -> Result<ResponseCurve> {
    let spline = CubicSpline::natural(&measured.frequencies(), &measured.gains())?;
    Ok(ResponseCurve { spline })
}

/// Per-bin gains H(k) for an `n_bins`-point transform at resolution
/// `delta_f`; bins above Nyquist mirror the lower half. Spline undershoot
/// below zero is clipped to zero.
pub fn sample_response(curve: &ResponseCurve, delta_f: f64, n_bins: usize) -> Result<Vec<f64>> {
    if !(delta_f > 0.0) || !delta_f.is_finite() {
        return Err(Error::InvalidParameter("delta_f must be positive"));
    }
    Ok((0..n_bins).map(|k| curve.eval(bin_frequency(k, n_bins, delta_f)).max(0.0)).collect())
}
