use alloc::vec::Vec;

use super::bin_frequency;
use crate::{Error, Result};

pub const DEFAULT_EPS: f64 = 0.001;
/// Upper edge of the band the inverse filter always zeroes.
pub const SUBBASS_CUT_HZ: f64 = 60.0;

/// Per-bin compensation gains H⁻¹(k) = c / (H(k) + eps), zero in the sub-bass.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseFilter {
    pub gains: Vec<f64>,
    pub delta_f: f64,
    pub eps: f64,
    pub c: f64,
    pub subbass_cut_hz: f64,
}

impl InverseFilter {
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// Pass-through filter: every gain is `c`, including the sub-bass.
    pub fn identity(n_bins: usize, delta_f: f64, c: f64) -> Self {
        Self { gains: alloc::vec![c; n_bins], delta_f, eps: 0.0, c, subbass_cut_hz: 0.0 }
    }
}

/// `eps` must be 0 or within [1e-4, 1e-1]; with `eps == 0` bins where H is
/// exactly 0 get a zero gain instead of a division by zero.
pub fn build_inverse_filter(gains: &[f64], delta_f: f64, eps: f64, c: f64) -> Result<InverseFilter> {
    if !(eps == 0.0 || (1e-4..=1e-1).contains(&eps)) {
        return Err(Error::InvalidParameter("eps must be 0 or in [1e-4, 1e-1]"));
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidParameter("c must be positive"));
    }
    if !(delta_f > 0.0) {
        return Err(Error::InvalidParameter("delta_f must be positive"));
    }
    if gains.iter().any(|g| !g.is_finite() || *g < 0.0) {
        return Err(Error::InvalidParameter("response gains must be finite and non-negative"));
    }
    let n = gains.len();
    let out = gains
        .iter()
        .enumerate()
        .map(|(k, &h)| {
            if bin_frequency(k, n, delta_f) < SUBBASS_CUT_HZ || h + eps == 0.0 {
                0.0
            } else {
                c / (h + eps)
            }
        })
        .collect();
    Ok(InverseFilter { gains: out, delta_f, eps, c, subbass_cut_hz: SUBBASS_CUT_HZ })
}
