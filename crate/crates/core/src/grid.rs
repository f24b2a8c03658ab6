use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Side length of the periodic box. Fixed so that the first eigenvalue of
/// `Λ` is exactly one.
pub const DOMAIN_SIZE: f64 = 2.0 * PI;

/// Uniform `n × n` collocation grid on `[0, 2π]²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    n: usize,
    dealias_cut: usize,
}

impl GridSpec {
    /// `n` must be even and at least 8.
    ///
    /// The retained radius is the largest `c` with `3c < n`, which is
    /// `floor(n/3)` whenever `3` does not divide `n`. For `n` divisible by
    /// three, `floor(n/3)` would let the square of the highest retained mode
    /// alias back onto the cut.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::InvalidGrid(format!("n = {n} is below the minimum of 8")));
        }
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!("n = {n} must be even")));
        }
        Ok(Self { n, dealias_cut: (n - 1) / 3 })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn domain_size(&self) -> f64 {
        DOMAIN_SIZE
    }

    pub fn dealias_cut(&self) -> usize {
        self.dealias_cut
    }

    /// Grid spacing `2π/n`.
    pub fn dx(&self) -> f64 {
        DOMAIN_SIZE / self.n as f64
    }

    /// Signed wavenumber stored at FFT index `i`; the Nyquist index maps to `+n/2`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        let n = self.n as i64;
        let i = i as i64;
        if i <= n / 2 {
            i
        } else {
            i - n
        }
    }

    /// FFT index of signed wavenumber `k`, if representable.
    #[inline]
    pub fn index_of(&self, k: i64) -> Option<usize> {
        let n = self.n as i64;
        if k > n / 2 || k <= -n / 2 {
            return None;
        }
        Some(k.rem_euclid(n) as usize)
    }

    /// Flat storage offset of wavevector `(k1, k2)`.
    pub fn offset(&self, k1: i64, k2: i64) -> Option<usize> {
        Some(self.index_of(k1)? * self.n + self.index_of(k2)?)
    }

    /// Wavevector at flat storage offset `idx`.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i64, i64) {
        (self.wavenumber(idx / self.n), self.wavenumber(idx % self.n))
    }

    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        let h = self.n / 2;
        idx / self.n == h || idx % self.n == h
    }

    #[inline]
    pub fn is_retained(&self, idx: usize) -> bool {
        let (k1, k2) = self.wavevector(idx);
        k1.unsigned_abs().max(k2.unsigned_abs()) as usize <= self.dealias_cut
    }

    /// Offset of `-k` for the wavevector stored at `idx`.
    #[inline]
    pub fn conjugate_offset(&self, idx: usize) -> usize {
        let n = self.n;
        let (i1, i2) = (idx / n, idx % n);
        ((n - i1) % n) * n + (n - i2) % n
    }

    /// Physical coordinate of grid node `j` along one axis.
    pub fn node(&self, j: usize) -> f64 {
        self.dx() * j as f64
    }
}

/// Convenience wrapper around [`GridSpec::new`].
pub fn make_grid(n: usize) -> Result<GridSpec> {
    GridSpec::new(n)
}
