use alloc::vec::Vec;

use crate::dsp::Signal;
use crate::{Error, Result};

pub const DEFAULT_R_MAX: usize = 20;

/// LER at radii 1..=r_max; `values[r - 1]` is the ratio at radius r.
#[derive(Debug, Clone, PartialEq)]
pub struct LerPattern {
    pub values: Vec<f64>,
}

impl LerPattern {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidParameter("LER values must lie in [0, 1]"));
        }
        Ok(Self { values })
    }

    pub fn r_max(&self) -> usize {
        self.values.len()
    }

    /// Value at radius `r` (1-based).
    pub fn at(&self, r: usize) -> f64 {
        self.values[r - 1]
    }
}

/// Fraction of interior samples equal to the min or max of the window
/// `[i - r, i + r]`, with indices clamped to the segment.
pub fn local_extrema_ratio(segment: &Signal, r: usize) -> Result<f64> {
    ler_samples(segment.samples(), r)
}

pub fn ler_samples(x: &[f64], r: usize) -> Result<f64> {
    if r == 0 {
        return Err(Error::InvalidParameter("window radius must be at least 1"));
    }
    Ok(*extract_lep_samples(x, r)?.last().expect("r >= 1"))
}

pub fn extract_lep(segment: &Signal, r_max: usize) -> Result<LerPattern> {
    if r_max == 0 {
        return Err(Error::InvalidParameter("r_max must be at least 1"));
    }
    Ok(LerPattern { values: extract_lep_samples(segment.samples(), r_max)? })
}

/// LER for every radius 1..=r_max in one pass per radius. Growing the
/// radius by one only adds the two (clamped) samples at the new window
/// edges, so the running min/max per position is updated in O(l).
pub fn extract_lep_samples(x: &[f64], r_max: usize) -> Result<Vec<f64>> {
    let l = x.len();
    if l < 3 {
        return Err(Error::SegmentTooShort(l));
    }
    let interior = l - 2;
    let mut lo: Vec<f64> = x[1..l - 1].to_vec();
    let mut hi = lo.clone();
    let mut out = Vec::with_capacity(r_max);
    for r in 1..=r_max {
        let mut count = 0usize;
        for j in 0..interior {
            let i = j + 1;
            let left = x[i.saturating_sub(r)];
            let right = x[(i + r).min(l - 1)];
            let (a, b) = if left < right { (left, right) } else { (right, left) };
            if a < lo[j] {
                lo[j] = a;
            }
            if b > hi[j] {
                hi[j] = b;
            }
            if x[i] == lo[j] || x[i] == hi[j] {
                count += 1;
            }
        }
        out.push(count as f64 / interior as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn sig(v: Vec<f64>) -> Signal {
        Signal::new(v, 1000).unwrap()
    }

    #[test]
    fn monotone_is_zero() {
        let s = sig((0..50).map(|i| i as f64).collect());
        assert!(extract_lep(&s, 20).unwrap().values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn alternating_is_one() {
        let s = sig((0..9).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect());
        assert_eq!(local_extrema_ratio(&s, 1).unwrap(), 1.0);
        assert_eq!(local_extrema_ratio(&sig(vec![1.0, -1.0, 1.0]), 1).unwrap(), 1.0);
    }

    #[test]
    fn worked_example() {
        let s = sig(vec![0.0, 2.0, 1.0, 3.0, 0.0, 2.0]);
        assert_eq!(local_extrema_ratio(&s, 1).unwrap(), 1.0);
        assert_eq!(local_extrema_ratio(&s, 2).unwrap(), 0.5);
    }

    #[test]
    fn plateau_samples_count() {
        let s = sig(vec![1.0, 1.0, 1.0, 1.0]);
        assert_eq!(local_extrema_ratio(&s, 3).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(local_extrema_ratio(&sig(vec![1.0, 2.0]), 1), Err(Error::SegmentTooShort(2))));
        assert!(local_extrema_ratio(&sig(vec![1.0, 2.0, 3.0]), 0).is_err());
        assert!(extract_lep(&sig(vec![1.0, 2.0, 3.0]), 0).is_err());
        assert!(LerPattern::new(vec![1.5]).is_err());
    }
}
