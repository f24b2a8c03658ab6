//! Real eigenbasis of `Λ` on mean-zero fields and the Galerkin projectors
//! `P_m`, `Q_m = I − P_m`.
//!
//! Each half-lattice wavevector `k` (with `k₁ > 0`, or `k₁ = 0, k₂ > 0`)
//! contributes `sin(k·x)` and `cos(k·x)`, both with eigenvalue `|k|`. For a
//! coefficient `c = f̂(k)`, the cosine part lives in `Re c` and the sine part
//! in `Im c`, so projecting onto a subset of the basis is a per-coefficient
//! selection of real and imaginary parts and is exact in floating point.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{abs_k, SpectralField};
use crate::grid::GridSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Basis {
    Sin,
    Cos,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub k: (i64, i64),
    pub basis: Basis,
    pub lambda: f64,
}

/// Deterministic ordering of the retained real eigenfunctions by `|k|`.
#[derive(Debug, Clone)]
pub struct EigenIndex {
    grid: GridSpec,
    entries: Vec<Eigenfunction>,
}

impl EigenIndex {
    pub fn new(grid: GridSpec) -> Self {
        let c = grid.dealias_cut() as i64;
        let mut reps: Vec<(i64, i64, i64)> = Vec::new();
        for k1 in 0..=c {
            for k2 in -c..=c {
                if k1 > 0 || k2 > 0 {
                    reps.push((k1 * k1 + k2 * k2, k1, k2));
                }
            }
        }
        reps.sort_unstable();
        let entries = reps
            .into_iter()
            .flat_map(|(_, k1, k2)| {
                let lambda = abs_k(k1, k2);
                [Basis::Sin, Basis::Cos].map(|basis| Eigenfunction { k: (k1, k2), basis, lambda })
            })
            .collect();
        Self { grid, entries }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[Eigenfunction] {
        &self.entries
    }

    /// `λ_m`, 1-based.
    pub fn eigenvalue_of(&self, m: usize) -> Result<f64> {
        if m == 0 || m > self.entries.len() {
            return Err(Error::ModeOutOfRange { m, available: self.entries.len() });
        }
        Ok(self.entries[m - 1].lambda)
    }

    /// Number of eigenfunctions with `λ < bound`.
    pub fn count_below(&self, bound: f64) -> usize {
        self.entries.partition_point(|e| e.lambda < bound)
    }

    pub fn projector(&self, m: usize) -> Result<Projector> {
        if m > self.entries.len() {
            return Err(Error::ModeOutOfRange { m, available: self.entries.len() });
        }
        let mut keep = vec![0u8; self.grid.len()];
        for e in &self.entries[..m] {
            let bit = match e.basis {
                Basis::Cos => KEEP_COS,
                Basis::Sin => KEEP_SIN,
            };
            let i = self.grid.offset(e.k.0, e.k.1).expect("retained wavevector on grid");
            keep[i] |= bit;
            keep[self.grid.conjugate_offset(i)] |= bit;
        }
        Ok(Projector { grid: self.grid, m, keep })
    }
}

/// Convenience wrapper for [`EigenIndex::new`].
pub fn eigen_index(grid: GridSpec) -> EigenIndex {
    EigenIndex::new(grid)
}

const KEEP_COS: u8 = 1;
const KEEP_SIN: u8 = 2;

/// `P_m` and `Q_m` for a fixed `m`.
#[derive(Debug, Clone)]
pub struct Projector {
    grid: GridSpec,
    m: usize,
    keep: Vec<u8>,
}

#[inline]
fn select(c: Complex64, keep_re: bool, keep_im: bool) -> Complex64 {
    Complex64::new(if keep_re { c.re } else { 0.0 }, if keep_im { c.im } else { 0.0 })
}

impl Projector {
    pub fn m(&self) -> usize {
        self.m
    }

    fn apply(&self, f: &SpectralField, low: bool, velocity: bool) -> SpectralField {
        debug_assert_eq!(f.grid(), self.grid);
        let mut out = f.clone();
        for (c, &mask) in out.coeffs_mut().iter_mut().zip(&self.keep) {
            let (cos, sin) = (mask & KEEP_COS != 0, mask & KEEP_SIN != 0);
            // The velocity of a vorticity mode swaps the sine and cosine parts.
            let (re, im) = if velocity { (sin, cos) } else { (cos, sin) };
            *c = if low { select(*c, re, im) } else { select(*c, !re, !im) };
        }
        out
    }

    /// `P_m f` for a scalar field.
    pub fn low(&self, f: &SpectralField) -> SpectralField {
        self.apply(f, true, false)
    }

    /// `Q_m f` for a scalar field.
    pub fn high(&self, f: &SpectralField) -> SpectralField {
        self.apply(f, false, false)
    }

    /// Vorticity of `P_m u`, where `u` is the velocity of `omega` and `P_m`
    /// acts componentwise on `u`.
    pub fn low_velocity(&self, omega: &SpectralField) -> SpectralField {
        self.apply(omega, true, true)
    }

    /// Vorticity of `Q_m u`.
    pub fn high_velocity(&self, omega: &SpectralField) -> SpectralField {
        self.apply(omega, false, true)
    }

    /// Replaces the `P_m` part of `target` with that of `source`, keeping the
    /// `Q_m` part of `target`. With `velocity` set, the projection acts on the
    /// velocity represented by the vorticity fields.
    pub fn replace_low(&self, target: &mut SpectralField, source: &SpectralField, velocity: bool) {
        for ((t, s), &mask) in target.coeffs_mut().iter_mut().zip(source.coeffs()).zip(&self.keep) {
            let (cos, sin) = (mask & KEEP_COS != 0, mask & KEEP_SIN != 0);
            let (re, im) = if velocity { (sin, cos) } else { (cos, sin) };
            if re {
                t.re = s.re;
            }
            if im {
                t.im = s.im;
            }
        }
    }
}

/// `P_m f`.
pub fn project_low(index: &EigenIndex, f: &SpectralField, m: usize) -> Result<SpectralField> {
    Ok(index.projector(m)?.low(f))
}

/// `Q_m f`.
pub fn project_high(index: &EigenIndex, f: &SpectralField, m: usize) -> Result<SpectralField> {
    Ok(index.projector(m)?.high(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn idx(n: usize) -> EigenIndex {
        EigenIndex::new(GridSpec::new(n).unwrap())
    }

    #[test]
    fn first_eigenvalues() {
        let e = idx(16);
        assert_eq!(e.eigenvalue_of(1).unwrap(), 1.0);
        for m in 1..=4 {
            assert_eq!(e.eigenvalue_of(m).unwrap(), 1.0);
        }
        assert_eq!(e.eigenvalue_of(5).unwrap(), 2f64.sqrt());
        assert!(e.eigenvalue_of(0).is_err());
        assert!(e.eigenvalue_of(e.len() + 1).is_err());
    }

    #[test]
    fn ordering_is_lexicographic_within_shell() {
        let e = idx(16);
        let first: Vec<_> = e.entries()[..4].iter().map(|f| (f.k, f.basis)).collect();
        assert_eq!(
            first,
            vec![((0, 1), Basis::Sin), ((0, 1), Basis::Cos), ((1, 0), Basis::Sin), ((1, 0), Basis::Cos)]
        );
        assert!(e.entries().windows(2).all(|w| w[0].lambda <= w[1].lambda));
    }

    #[test]
    fn count_matches_retained_square() {
        let g = GridSpec::new(64).unwrap();
        let e = EigenIndex::new(g);
        assert_eq!(e.len(), 43 * 43 - 1);
        assert_eq!(e.count_below(1.0), 0);
        assert_eq!(e.count_below(1.2), 4);
    }

    #[test]
    fn shell_one_projection() {
        let g = GridSpec::new(16).unwrap();
        let e = EigenIndex::new(g);
        let f = SpectralField::sin_mode(g, 1, 0, 1.0)
            .unwrap()
            .add(&SpectralField::cos_mode(g, 0, 1, 0.5).unwrap());
        let p = e.projector(4).unwrap();
        assert_eq!(p.low(&f), f);
        assert_eq!(p.high(&f).max_abs_coeff(), 0.0);
        let p0 = e.projector(0).unwrap();
        assert_eq!(p0.low(&f).max_abs_coeff(), 0.0);
        assert_eq!(p0.high(&f), f);
        assert!(e.projector(e.len() + 1).is_err());
    }

    #[test]
    fn partial_shell_keeps_only_listed_part() {
        let g = GridSpec::new(16).unwrap();
        let e = EigenIndex::new(g);
        // first entry is sin(x₂)
        let p = e.projector(1).unwrap();
        let s = SpectralField::sin_mode(g, 0, 1, 1.0).unwrap();
        let c = SpectralField::cos_mode(g, 0, 1, 1.0).unwrap();
        let f = s.add(&c);
        assert_eq!(p.low(&f), s);
        assert_eq!(p.high(&f), c);
    }
}
