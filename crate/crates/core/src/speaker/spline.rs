use alloc::vec;
use alloc::vec::Vec;

use crate::{Error, Result};

/// Natural cubic spline: second derivative zero at both end knots.
///
/// Piece `i` covers `[x[i], x[i+1]]` and evaluates
/// `a + b·t + c·t² + d·t³` with `t = x - x[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicSpline {
    x: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
    d: Vec<f64>,
}

impl CubicSpline {
    /// Needs at least two strictly increasing, finite knots.
    pub fn natural(x: &[f64], y: &[f64]) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch { expected: x.len(), found: y.len() });
        }
        let n = x.len();
        if n < 2 {
            return Err(Error::TooShort { needed: 2, found: n });
        }
        if x.iter().chain(y).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("spline knots must be finite"));
        }
        if let Some(i) = (1..n).find(|&i| x[i] <= x[i - 1]) {
            return Err(Error::UnsortedKnots(i));
        }
        let h: Vec<f64> = (0..n - 1).map(|i| x[i + 1] - x[i]).collect();

        // Tridiagonal system for interior second derivatives m[1..n-1],
        // solved with the Thomas algorithm; m[0] = m[n-1] = 0.
        let mut m = vec![0.0; n];
        if n > 2 {
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for j in 0..k {
                let i = j + 1;
                diag[j] = 2.0 * (h[i - 1] + h[i]);
                rhs[j] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
            }
            // Sub- and super-diagonal of row j are h[j] and h[j+1].
            for j in 1..k {
                let w = h[j] / diag[j - 1];
                diag[j] -= w * h[j];
                rhs[j] -= w * rhs[j - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for j in (0..k - 1).rev() {
                m[j + 1] = (rhs[j] - h[j + 1] * m[j + 2]) / diag[j];
            }
        }

        let mut a = Vec::with_capacity(n - 1);
        let mut b = Vec::with_capacity(n - 1);
        let mut c = Vec::with_capacity(n - 1);
        let mut d = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            a.push(y[i]);
            b.push((y[i + 1] - y[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0);
            c.push(m[i] / 2.0);
            d.push((m[i + 1] - m[i]) / (6.0 * h[i]));
        }
        Ok(Self { x: x.to_vec(), a, b, c, d })
    }

    pub fn knots(&self) -> &[f64] {
        &self.x
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], self.x[self.x.len() - 1])
    }

    fn piece(&self, x: f64) -> usize {
        let last = self.a.len() - 1;
        match self.x.binary_search_by(|k| k.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less)) {
            Ok(i) => i.min(last),
            Err(0) => 0,
            Err(i) => (i - 1).min(last),
        }
    }

    /// Value; outside the domain the end pieces are extended.
    pub fn eval(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let t = x - self.x[i];
        self.a[i] + t * (self.b[i] + t * (self.c[i] + t * self.d[i]))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let t = x - self.x[i];
        self.b[i] + t * (2.0 * self.c[i] + 3.0 * t * self.d[i])
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        let i = self.piece(x);
        let t = x - self.x[i];
        2.0 * self.c[i] + 6.0 * t * self.d[i]
    }

    /// Value, first and second derivative of piece `piece` at its right
    /// end. Comparing with the next piece at its left knot checks continuity.
    pub fn right_end(&self, piece: usize) -> (f64, f64, f64) {
        let t = self.x[piece + 1] - self.x[piece];
        let (a, b, c, d) = (self.a[piece], self.b[piece], self.c[piece], self.d[piece]);
        (
            a + t * (b + t * (c + t * d)),
            b + t * (2.0 * c + 3.0 * t * d),
            2.0 * c + 6.0 * t * d,
        )
    }

    /// Value, first and second derivative of piece `piece` at its left knot.
    pub fn left_end(&self, piece: usize) -> (f64, f64, f64) {
        (self.a[piece], self.b[piece], 2.0 * self.c[piece])
    }

    pub fn pieces(&self) -> usize {
        self.a.len()
    }
}
