//! Mean-zero periodic scalar fields stored as Fourier coefficients.
//!
//! Coefficients follow `f̂(k) = (2π)⁻² ∫ f(x) e^{-ik·x} dx`, so a field is
//! recovered as `f(x) = Σ f̂(k) e^{ik·x}` and `‖f‖²_{L²} = (2π)² Σ |f̂(k)|²`.
//! Storage is the full `n × n` lattice in FFT order, row index along `x₁`.

use std::io::{Read, Write};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{GridSpec, DOMAIN_SIZE};

const VOLUME: f64 = DOMAIN_SIZE * DOMAIN_SIZE;
const DUMP_MAGIC: &[u8; 8] = b"BSQSPEC1";

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Coordinate axis for spectral derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { grid, coeffs: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    /// Wraps raw coefficients. The zero mode is cleared; conjugate symmetry is
    /// the caller's responsibility.
    pub fn from_coeffs(grid: GridSpec, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: coeffs.len() });
        }
        coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Coefficient at wavevector `(k1, k2)`; zero if not representable.
    pub fn get(&self, k1: i64, k2: i64) -> Complex64 {
        self.grid
            .offset(k1, k2)
            .map(|i| self.coeffs[i])
            .unwrap_or_default()
    }

    /// Sets `f̂(k) = c` and `f̂(-k) = conj(c)`.
    pub fn set_mode(&mut self, k1: i64, k2: i64, c: Complex64) -> Result<()> {
        if k1 == 0 && k2 == 0 {
            return Err(Error::InvalidParameter("the k = 0 mode must stay zero".into()));
        }
        let i = self
            .grid
            .offset(k1, k2)
            .ok_or_else(|| Error::InvalidParameter(format!("wavevector ({k1}, {k2}) not on grid")))?;
        let j = self.grid.conjugate_offset(i);
        if i == j {
            self.coeffs[i] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[i] = c;
            self.coeffs[j] = c.conj();
        }
        Ok(())
    }

    /// Real trigonometric mode `amp·sin(k·x)`.
    pub fn sin_mode(grid: GridSpec, k1: i64, k2: i64, amp: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        f.set_mode(k1, k2, Complex64::new(0.0, -0.5 * amp))?;
        Ok(f)
    }

    /// Real trigonometric mode `amp·cos(k·x)`.
    pub fn cos_mode(grid: GridSpec, k1: i64, k2: i64, amp: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        f.set_mode(k1, k2, Complex64::new(0.5 * amp, 0.0))?;
        Ok(f)
    }

    /// Same field on another grid. Wavevectors that are Nyquist or absent on
    /// either grid are dropped.
    pub fn resample(&self, grid: GridSpec) -> Self {
        let mut out = Self::zeros(grid);
        for (i, &c) in self.coeffs.iter().enumerate().skip(1) {
            if self.grid.is_nyquist(i) {
                continue;
            }
            let (k1, k2) = self.grid.wavevector(i);
            if let Some(j) = grid.offset(k1, k2) {
                if !grid.is_nyquist(j) {
                    out.coeffs[j] = c;
                }
            }
        }
        out
    }

    /// Applies a real Fourier multiplier `m(k1, k2)`; the zero mode stays zero.
    pub fn map_multiplier(&self, mut m: impl FnMut(i64, i64) -> f64) -> Self {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if i == 0 {
                    return Complex64::new(0.0, 0.0);
                }
                let (k1, k2) = g.wavevector(i);
                c * m(k1, k2)
            })
            .collect();
        Self { grid: g, coeffs }
    }

    /// `Λ^s f`, multiplier `|k|^s`.
    pub fn fractional_laplacian(&self, s: f64) -> Self {
        self.map_multiplier(|k1, k2| abs_k(k1, k2).powf(s))
    }

    /// Squared `H^s` norm `(2π)² Σ |k|^{2s} |f̂(k)|²`.
    pub fn sobolev_norm_sq(&self, s: f64) -> f64 {
        let g = self.grid;
        let sum: f64 = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| {
                let (k1, k2) = g.wavevector(i);
                let k2sum = (k1 * k1 + k2 * k2) as f64;
                c.norm_sqr() * k2sum.powf(s)
            })
            .sum();
        VOLUME * sum
    }

    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.sobolev_norm_sq(s).sqrt()
    }

    /// L² norm, the `s = 0` Sobolev norm.
    pub fn l2_norm(&self) -> f64 {
        self.sobolev_norm_sq(0.0).sqrt()
    }

    /// L² inner product `∫ f g dx` of two real fields.
    pub fn inner(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.grid, other.grid);
        VOLUME
            * self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a.re * b.re + a.im * b.im)
                .sum::<f64>()
    }

    /// Zeroes every coefficient with `max(|k₁|, |k₂|)` above the dealias cut.
    pub fn dealias(&self) -> Self {
        let mut out = self.clone();
        out.dealias_in_place();
        out
    }

    pub fn dealias_in_place(&mut self) {
        let g = self.grid;
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            if !g.is_retained(i) {
                *c = Complex64::new(0.0, 0.0);
            }
        }
        self.coeffs[0] = Complex64::new(0.0, 0.0);
    }

    /// `∂f/∂x_axis`. The Nyquist row/column is dropped so the result stays real.
    pub fn derivative(&self, axis: Axis) -> Self {
        let g = self.grid;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                if g.is_nyquist(i) {
                    return Complex64::new(0.0, 0.0);
                }
                let (k1, k2) = g.wavevector(i);
                let k = match axis {
                    Axis::X1 => k1,
                    Axis::X2 => k2,
                } as f64;
                Complex64::new(-c.im * k, c.re * k)
            })
            .collect();
        Self { grid: g, coeffs }
    }

    pub fn scale(&self, a: f64) -> Self {
        Self { grid: self.grid, coeffs: self.coeffs.iter().map(|c| c * a).collect() }
    }

    /// `self + a·other`.
    pub fn axpy(&self, a: f64, other: &Self) -> Self {
        debug_assert_eq!(self.grid, other.grid);
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(x, y)| x + y * a).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(1.0, other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-1.0, other)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Largest violation of `f̂(-k) = conj(f̂(k))`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        (0..g.len())
            .map(|i| (self.coeffs[i] - self.coeffs[g.conjugate_offset(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Rows `(k₁, k₂, re, im)` in storage order.
    pub fn spectrum_rows(&self) -> impl Iterator<Item = (i64, i64, f64, f64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, c)| {
            let (k1, k2) = self.grid.wavevector(i);
            (k1, k2, c.re, c.im)
        })
    }

    /// Binary spectrum dump: magic, `n` as u64, then `n²` rows of
    /// `(k₁: i32, k₂: i32, re: f64, im: f64)`, all little-endian.
    pub fn write_binary<W: Write>(&self, w: &mut W) -> Result<()> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&(self.grid.n() as u64).to_le_bytes())?;
        for (k1, k2, re, im) in self.spectrum_rows() {
            w.write_all(&(k1 as i32).to_le_bytes())?;
            w.write_all(&(k2 as i32).to_le_bytes())?;
            w.write_all(&re.to_le_bytes())?;
            w.write_all(&im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(r: &mut R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != DUMP_MAGIC {
            return Err(Error::Format("bad spectrum magic".into()));
        }
        let mut b8 = [0u8; 8];
        let mut b4 = [0u8; 4];
        r.read_exact(&mut b8)?;
        let n = u64::from_le_bytes(b8) as usize;
        let grid = GridSpec::new(n)?;
        let mut field = Self::zeros(grid);
        for _ in 0..grid.len() {
            r.read_exact(&mut b4)?;
            let k1 = i32::from_le_bytes(b4) as i64;
            r.read_exact(&mut b4)?;
            let k2 = i32::from_le_bytes(b4) as i64;
            r.read_exact(&mut b8)?;
            let re = f64::from_le_bytes(b8);
            r.read_exact(&mut b8)?;
            let im = f64::from_le_bytes(b8);
            let i = grid
                .offset(k1, k2)
                .ok_or_else(|| Error::Format(format!("wavevector ({k1}, {k2}) off grid")))?;
            field.coeffs[i] = Complex64::new(re, im);
        }
        Ok(field)
    }

    /// CSV spectrum dump with an `# n=` header line. Values use Rust's
    /// shortest round-trip float formatting.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> Result<()> {
        writeln!(w, "# n={}", self.grid.n())?;
        writeln!(w, "k1,k2,re,im")?;
        for (k1, k2, re, im) in self.spectrum_rows() {
            writeln!(w, "{k1},{k2},{re:?},{im:?}")?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(r: &mut R) -> Result<Self> {
        let mut text = String::new();
        r.read_to_string(&mut text)?;
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Format("empty csv".into()))?;
        let n: usize = header
            .strip_prefix("# n=")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Format(format!("bad header line {header:?}")))?;
        let grid = GridSpec::new(n)?;
        let mut field = Self::zeros(grid);
        for line in lines.skip(1).filter(|l| !l.trim().is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Format(format!("bad row {line:?}")));
            }
            let parse_err = |_| Error::Format(format!("bad row {line:?}"));
            let k1: i64 = cols[0].trim().parse().map_err(parse_err)?;
            let k2: i64 = cols[1].trim().parse().map_err(parse_err)?;
            let re: f64 = cols[2].trim().parse().map_err(|_| Error::Format(format!("bad row {line:?}")))?;
            let im: f64 = cols[3].trim().parse().map_err(|_| Error::Format(format!("bad row {line:?}")))?;
            let i = grid
                .offset(k1, k2)
                .ok_or_else(|| Error::Format(format!("wavevector ({k1}, {k2}) off grid")))?;
            field.coeffs[i] = Complex64::new(re, im);
        }
        Ok(field)
    }
}

#[inline]
pub(crate) fn abs_k(k1: i64, k2: i64) -> f64 {
    ((k1 * k1 + k2 * k2) as f64).sqrt()
}

/// Planned 2D FFTs for one grid. Cheap to clone; plans are shared.
#[derive(Clone)]
pub struct Transform {
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    mean_removals: Arc<AtomicUsize>,
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Transform").field("grid", &self.grid).finish()
    }
}

impl Transform {
    pub fn new(grid: GridSpec) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            grid,
            forward: planner.plan_fft_forward(grid.n()),
            inverse: planner.plan_fft_inverse(grid.n()),
            mean_removals: Arc::new(AtomicUsize::new(0)),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// Number of times [`Transform::to_spectral`] had to strip a nonzero mean.
    pub fn mean_removals(&self) -> usize {
        self.mean_removals.load(Ordering::Relaxed)
    }

    fn fft2(&self, buf: &mut [Complex64], plan: &Arc<dyn Fft<f64>>) {
        let n = self.grid.n();
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, n);
        plan.process_with_scratch(buf, &mut scratch);
        transpose_in_place(buf, n);
    }

    /// Samples at `x = (2πj₁/n, 2πj₂/n)`, flat index `j₁·n + j₂`.
    pub fn to_spectral(&self, samples: &[f64]) -> Result<SpectralField> {
        let g = self.grid;
        if samples.len() != g.len() {
            return Err(Error::ShapeMismatch { expected: g.len(), got: samples.len() });
        }
        let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft2(&mut buf, &self.forward);
        let norm = 1.0 / g.len() as f64;
        buf.iter_mut().for_each(|c| *c *= norm);
        let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if buf[0].norm() > 1e-14 * scale.max(f64::MIN_POSITIVE) {
            self.mean_removals.fetch_add(1, Ordering::Relaxed);
        }
        buf[0] = Complex64::new(0.0, 0.0);
        Ok(SpectralField { grid: g, coeffs: buf })
    }

    pub fn from_spectral(&self, field: &SpectralField) -> Vec<f64> {
        let mut buf = field.coeffs.clone();
        self.fft2(&mut buf, &self.inverse);
        buf.into_iter().map(|c| c.re).collect()
    }

    /// Two real fields through one complex transform: returns `(a(x), b(x))`.
    pub fn from_spectral_pair(&self, a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
        let i = Complex64::new(0.0, 1.0);
        let mut buf: Vec<Complex64> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + i * y).collect();
        self.fft2(&mut buf, &self.inverse);
        buf.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Forward transform of two real sample arrays through one complex FFT.
    pub fn to_spectral_pair(&self, a: &[f64], b: &[f64]) -> (SpectralField, SpectralField) {
        let g = self.grid;
        let mut buf: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
        self.fft2(&mut buf, &self.forward);
        let norm = 0.5 / g.len() as f64;
        let mut fa = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut fb = vec![Complex64::new(0.0, 0.0); g.len()];
        for idx in 1..g.len() {
            let z = buf[idx];
            let zc = buf[g.conjugate_offset(idx)].conj();
            fa[idx] = (z + zc) * norm;
            let d = (z - zc) * norm;
            fb[idx] = Complex64::new(d.im, -d.re);
        }
        (SpectralField { grid: g, coeffs: fa }, SpectralField { grid: g, coeffs: fb })
    }

    /// Physical-space `L^p` norm by grid quadrature; `p = ∞` is the max norm.
    pub fn lp_norm(&self, field: &SpectralField, p: f64) -> Result<f64> {
        lp_norm_samples(&self.from_spectral(field), self.grid, p)
    }
}

/// `(Σ |f(x_j)|^p Δx)^{1/p}` with `Δx = (2π/n)²`.
pub fn lp_norm_samples(samples: &[f64], grid: GridSpec, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!("L^p exponent p = {p} must be >= 1")));
    }
    if samples.len() != grid.len() {
        return Err(Error::ShapeMismatch { expected: grid.len(), got: samples.len() });
    }
    if p.is_infinite() {
        return Ok(samples.iter().fold(0.0, |m, v| m.max(v.abs())));
    }
    let cell = grid.dx() * grid.dx();
    let sum: f64 = samples.iter().map(|v| v.abs().powf(p)).sum();
    Ok((sum * cell).powf(1.0 / p))
}

fn transpose_in_place(buf: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}
