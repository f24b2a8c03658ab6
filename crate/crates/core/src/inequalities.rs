//! Numerical checks of the functional inequalities on trigonometric
//! polynomials.
//!
//! Constant-explicit inequalities (Poincaré, interpolation, uniform Gronwall)
//! are hard assertions up to a relative round-off slack. Constant-free ones
//! (Sobolev, Kato–Ponce, commutator) report a fitted constant.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::sobolev_constant;
use crate::error::{Error, Result};
use crate::field::{lp_norm_samples, Axis, SpectralField, Transform};
use crate::grid::GridSpec;
use crate::random::{random_field, rng_for};
use crate::rhs::velocity_from_vorticity;

/// Relative slack allowed on constant-explicit inequalities.
pub const ROUNDOFF_SLACK: f64 = 1e-12;

/// Multiplier applied to one factor in the bilinear scaling check.
const SCALING_FACTOR: f64 = 3.7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: String,
    pub samples: usize,
    /// `max(lhs − rhs)`; negative means every sample satisfies the bound.
    pub worst_margin: f64,
    /// `max((lhs − rhs)/rhs)` over samples with `rhs > 0`.
    pub worst_relative_margin: f64,
    /// `max lhs/rhs` for constant-free inequalities.
    pub fitted_constant: Option<f64>,
    /// Known constant the fit is compared against, if any.
    pub reference_constant: Option<f64>,
    /// Relative change of the fitted constant when one factor is rescaled.
    pub scaling_defect: Option<f64>,
    pub violations: usize,
    pub passed: bool,
}

impl InequalityReport {
    fn from_sides(id: &str, sides: &[(f64, f64)], hard: bool) -> Self {
        let mut worst_margin = f64::NEG_INFINITY;
        let mut worst_rel = f64::NEG_INFINITY;
        let mut violations = 0;
        for &(lhs, rhs) in sides {
            let margin = lhs - rhs;
            worst_margin = worst_margin.max(margin);
            if rhs > 0.0 {
                worst_rel = worst_rel.max(margin / rhs);
            }
            if margin > ROUNDOFF_SLACK * rhs.abs() {
                violations += 1;
            }
        }
        if sides.is_empty() {
            worst_margin = 0.0;
        }
        if !worst_rel.is_finite() {
            worst_rel = if worst_margin > 0.0 { f64::INFINITY } else { 0.0 };
        }
        Self {
            id: id.to_string(),
            samples: sides.len(),
            worst_margin,
            worst_relative_margin: worst_rel,
            fitted_constant: None,
            reference_constant: None,
            scaling_defect: None,
            violations,
            passed: !hard || violations == 0,
        }
    }
}

/// `count` seeded random fields, sample `i` drawn from stream `i`.
pub fn random_samples(grid: GridSpec, seed: u64, count: usize, gamma: f64, support: usize) -> Vec<SpectralField> {
    (0..count)
        .into_par_iter()
        .map(|i| random_field(grid, &mut rng_for(seed, i as u64), gamma, support))
        .collect()
}

fn require_samples(samples: &[SpectralField]) -> Result<()> {
    if samples.is_empty() {
        Err(Error::Empty("no sample fields".into()))
    } else {
        Ok(())
    }
}

/// `‖Λ^{s₁}g‖ ≤ ‖Λ^{s₂}g‖` for mean-zero `g` and `s₁ ≤ s₂`.
pub fn check_poincare(samples: &[SpectralField], s1: f64, s2: f64) -> Result<InequalityReport> {
    if !(s1 <= s2) {
        return Err(Error::InvalidParameter(format!("Poincare check needs s1 <= s2, got {s1} > {s2}")));
    }
    require_samples(samples)?;
    let sides: Vec<(f64, f64)> = samples.par_iter().map(|g| (g.sobolev_norm(s1), g.sobolev_norm(s2))).collect();
    Ok(InequalityReport::from_sides("poincare", &sides, true))
}

/// `‖Λ^s g‖ ≤ ‖Λ^{s₁}g‖^δ ‖Λ^{s₂}g‖^{1−δ}` with `s = δs₁ + (1−δ)s₂`.
pub fn check_interpolation(samples: &[SpectralField], s1: f64, s: f64, s2: f64) -> Result<InequalityReport> {
    if !(s1 <= s && s <= s2) {
        return Err(Error::InvalidParameter(format!(
            "interpolation check needs s1 <= s <= s2, got ({s1}, {s}, {s2})"
        )));
    }
    require_samples(samples)?;
    let delta = if s2 > s1 { (s2 - s) / (s2 - s1) } else { 1.0 };
    let sides: Vec<(f64, f64)> = samples
        .par_iter()
        .map(|g| (g.sobolev_norm(s), g.sobolev_norm(s1).powf(delta) * g.sobolev_norm(s2).powf(1.0 - delta)))
        .collect();
    Ok(InequalityReport::from_sides("interpolation", &sides, true))
}

/// Ratio `‖u‖²_{L^p} / ‖Λ^s u‖²` with `p = 2/(1−s)`.
pub fn sobolev_ratio(transform: &Transform, u: &SpectralField, s: f64) -> Result<Option<f64>> {
    let p = 2.0 / (1.0 - s);
    let den = u.sobolev_norm_sq(s);
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(transform.lp_norm(u, p)?.powi(2) / den))
}

/// Report-only comparison of the Sobolev ratio against `C_s`.
pub fn check_sobolev(samples: &[SpectralField], s: f64) -> Result<InequalityReport> {
    let c_s = sobolev_constant(s)?;
    require_samples(samples)?;
    let transform = Transform::new(samples[0].grid());
    let ratios = samples
        .par_iter()
        .map(|u| sobolev_ratio(&transform, u, s))
        .collect::<Result<Vec<_>>>()?;
    let sides: Vec<(f64, f64)> = ratios.iter().flatten().map(|&r| (r, c_s)).collect();
    let mut rep = InequalityReport::from_sides("sobolev", &sides, false);
    rep.samples = samples.len();
    rep.fitted_constant = sides.iter().map(|s| s.0).reduce(f64::max);
    rep.reference_constant = Some(c_s);
    Ok(rep)
}

/// Hölder pair exponents `1/p₁ + 1/p₂ = ½` with every exponent in `[min, ∞]`.
fn check_holder(pair: (f64, f64), min: f64, strict: bool, name: &str) -> Result<()> {
    let (a, b) = pair;
    let in_range = |p: f64| if strict { p > min } else { p >= min };
    if !in_range(a) || !in_range(b) {
        let op = if strict { ">" } else { ">=" };
        return Err(Error::InvalidParameter(format!("{name}: exponents ({a}, {b}) must be {op} {min}")));
    }
    let sum = 1.0 / a + 1.0 / b;
    if (sum - 0.5).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "{name}: Holder mismatch, 1/{a} + 1/{b} = {sum} but must equal 1/2"
        )));
    }
    Ok(())
}

/// Grid on which products of fields from `grid` are alias-free.
fn padded(grid: GridSpec) -> Result<GridSpec> {
    GridSpec::new(2 * grid.n())
}

fn pointwise_magnitude(components: &[Vec<f64>]) -> Vec<f64> {
    (0..components[0].len())
        .map(|j| components.iter().map(|c| c[j] * c[j]).sum::<f64>().sqrt())
        .collect()
}

/// Exponents for the Kato–Ponce and commutator checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderExponents {
    pub p1: f64,
    pub p2: f64,
    pub q1: f64,
    pub q2: f64,
}

impl HolderExponents {
    pub const L2_LINF: Self = Self { p1: 2.0, p2: f64::INFINITY, q1: 2.0, q2: f64::INFINITY };
}

fn kato_ponce_sides(t: &Transform, g: &SpectralField, h: &SpectralField, s: f64, e: HolderExponents) -> Result<(f64, f64)> {
    let pg = t.grid();
    let (g, h) = (g.resample(pg), h.resample(pg));
    let (gx, hx) = (t.from_spectral(&g), t.from_spectral(&h));
    let prod: Vec<f64> = gx.iter().zip(&hx).map(|(a, b)| a * b).collect();
    let lhs = t.to_spectral(&prod)?.sobolev_norm(s);
    let (lgx, lhx) = (t.from_spectral(&g.fractional_laplacian(s)), t.from_spectral(&h.fractional_laplacian(s)));
    let rhs = lp_norm_samples(&lgx, pg, e.p1)? * lp_norm_samples(&hx, pg, e.p2)?
        + lp_norm_samples(&lhx, pg, e.q1)? * lp_norm_samples(&gx, pg, e.q2)?;
    Ok((lhs, rhs))
}

fn fitted(sides: &[(f64, f64)]) -> Option<f64> {
    sides.iter().filter(|s| s.1 > 0.0).map(|s| s.0 / s.1).reduce(f64::max)
}

fn scaling_defect(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) if a > 0.0 => Some((a - b).abs() / a),
        (None, None) => Some(0.0),
        _ => None,
    }
}

/// `‖Λ^s(gh)‖ ≤ C(‖Λ^s g‖_{p₁}‖h‖_{p₂} + ‖Λ^s h‖_{q₁}‖g‖_{q₂})`, fitted `C`.
pub fn check_kato_ponce(
    g_samples: &[SpectralField],
    h_samples: &[SpectralField],
    s: f64,
    e: HolderExponents,
) -> Result<InequalityReport> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("Kato-Ponce check needs s > 0, got {s}")));
    }
    check_holder((e.p1, e.p2), 2.0, false, "Kato-Ponce (p1, p2)")?;
    check_holder((e.q1, e.q2), 2.0, false, "Kato-Ponce (q1, q2)")?;
    require_samples(g_samples)?;
    if g_samples.len() != h_samples.len() {
        return Err(Error::ShapeMismatch { expected: g_samples.len(), got: h_samples.len() });
    }
    let t = Transform::new(padded(g_samples[0].grid())?);
    let run = |c: f64| {
        g_samples
            .par_iter()
            .zip(h_samples)
            .map(|(g, h)| kato_ponce_sides(&t, &g.scale(c), h, s, e))
            .collect::<Result<Vec<_>>>()
    };
    let sides = run(1.0)?;
    let scaled = run(SCALING_FACTOR)?;
    let mut rep = InequalityReport::from_sides("kato_ponce", &sides, false);
    rep.fitted_constant = fitted(&sides);
    rep.scaling_defect = scaling_defect(rep.fitted_constant, fitted(&scaled));
    rep.passed = rep.fitted_constant.is_none_or(f64::is_finite) && rep.scaling_defect.is_some_and(|d| d < 1e-10);
    Ok(rep)
}

/// `Λ^s(g·∇h) − g·(Λ^s∇h)` for the velocity `g` of vorticity `g_omega`,
/// evaluated alias-free on the padded grid of `t`.
pub fn commutator_field(t: &Transform, g_omega: &SpectralField, h: &SpectralField, s: f64) -> Result<SpectralField> {
    let pg = t.grid();
    let (g1, g2) = velocity_from_vorticity(&g_omega.resample(pg));
    let h = h.resample(pg);
    let (h1, h2) = (h.derivative(Axis::X1), h.derivative(Axis::X2));
    let (g1x, g2x) = t.from_spectral_pair(&g1, &g2);
    let (h1x, h2x) = t.from_spectral_pair(&h1, &h2);
    let (l1x, l2x) = t.from_spectral_pair(&h1.fractional_laplacian(s), &h2.fractional_laplacian(s));
    let (adv, mixed): (Vec<f64>, Vec<f64>) = (0..pg.len())
        .map(|j| (g1x[j] * h1x[j] + g2x[j] * h2x[j], g1x[j] * l1x[j] + g2x[j] * l2x[j]))
        .unzip();
    let (adv, mixed) = t.to_spectral_pair(&adv, &mixed);
    Ok(adv.fractional_laplacian(s).sub(&mixed))
}

fn commutator_sides(t: &Transform, g_omega: &SpectralField, h: &SpectralField, s: f64, e: HolderExponents) -> Result<(f64, f64)> {
    let pg = t.grid();
    let lhs = commutator_field(t, g_omega, h, s)?.l2_norm();
    let (g1, g2) = velocity_from_vorticity(&g_omega.resample(pg));
    let h = h.resample(pg);
    let grad = |f: &SpectralField| (f.derivative(Axis::X1), f.derivative(Axis::X2));
    let ((a11, a12), (a21, a22)) = (grad(&g1), grad(&g2));
    let (d11, d12) = t.from_spectral_pair(&a11, &a12);
    let (d21, d22) = t.from_spectral_pair(&a21, &a22);
    let grad_g = pointwise_magnitude(&[d11, d12, d21, d22]);
    let (lg1, lg2) = t.from_spectral_pair(&g1.fractional_laplacian(s), &g2.fractional_laplacian(s));
    let lambda_g = pointwise_magnitude(&[lg1, lg2]);
    let (h1, h2) = grad(&h);
    let (h1x, h2x) = t.from_spectral_pair(&h1, &h2);
    let grad_h = pointwise_magnitude(&[h1x, h2x]);
    let lambda_h = t.from_spectral(&h.fractional_laplacian(s));
    let rhs = lp_norm_samples(&grad_g, pg, e.p1)? * lp_norm_samples(&lambda_h, pg, e.p2)?
        + lp_norm_samples(&lambda_g, pg, e.q1)? * lp_norm_samples(&grad_h, pg, e.q2)?;
    Ok((lhs, rhs))
}

/// `‖Λ^s(g·∇h) − g·Λ^s∇h‖ ≤ C(‖∇g‖_{p₁}‖Λ^s h‖_{p₂} + ‖Λ^s g‖_{q₁}‖∇h‖_{q₂})`,
/// fitted `C`. The divergence-free `g` is given through its vorticity.
pub fn check_commutator(
    g_omegas: &[SpectralField],
    h_samples: &[SpectralField],
    s: f64,
    e: HolderExponents,
) -> Result<InequalityReport> {
    if !(s > 0.0) {
        return Err(Error::InvalidParameter(format!("commutator check needs s > 0, got {s}")));
    }
    check_holder((e.p1, e.p2), 2.0, true, "commutator (p1, p2)")?;
    check_holder((e.q1, e.q2), 2.0, true, "commutator (q1, q2)")?;
    require_samples(g_omegas)?;
    if g_omegas.len() != h_samples.len() {
        return Err(Error::ShapeMismatch { expected: g_omegas.len(), got: h_samples.len() });
    }
    let t = Transform::new(padded(g_omegas[0].grid())?);
    let run = |c: f64| {
        g_omegas
            .par_iter()
            .zip(h_samples)
            .map(|(g, h)| commutator_sides(&t, &g.scale(c), h, s, e))
            .collect::<Result<Vec<_>>>()
    };
    let sides = run(1.0)?;
    let scaled = run(SCALING_FACTOR)?;
    let mut rep = InequalityReport::from_sides("commutator", &sides, false);
    rep.fitted_constant = fitted(&sides);
    rep.scaling_defect = scaling_defect(rep.fitted_constant, fitted(&scaled));
    rep.passed = rep.fitted_constant.is_none_or(f64::is_finite) && rep.scaling_defect.is_some_and(|d| d < 1e-10);
    Ok(rep)
}

/// Nonnegative `y` on a uniform mesh solving `y' = g y + h` exactly, with `g`
/// and `h` constant on each mesh interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallInstance {
    pub dt: f64,
    pub g: Vec<f64>,
    pub h: Vec<f64>,
    pub y: Vec<f64>,
}

/// `(e^{x} − 1)/x`, continuous at 0.
fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + 0.5 * x
    } else {
        x.exp_m1() / x
    }
}

/// `(e^{x} − 1 − x)/x²`, continuous at 0.
fn exprel2(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        0.5 + x / 6.0 + x * x / 24.0
    } else {
        (x.exp_m1() - x) / (x * x)
    }
}

/// One exact step of `y' = g y + h` over `dt`.
fn gronwall_step(y: f64, g: f64, h: f64, dt: f64) -> f64 {
    y * (g * dt).exp() + h * dt * exprel(g * dt)
}

/// `∫` of the exact solution over one interval.
fn gronwall_integral(y: f64, g: f64, h: f64, dt: f64) -> f64 {
    y * dt * exprel(g * dt) + h * dt * dt * exprel2(g * dt)
}

impl GronwallInstance {
    pub fn construct(y0: f64, dt: f64, g: Vec<f64>, h: Vec<f64>) -> Result<Self> {
        if g.len() != h.len() {
            return Err(Error::ShapeMismatch { expected: g.len(), got: h.len() });
        }
        if !(dt > 0.0) || !(y0 >= 0.0) {
            return Err(Error::InvalidParameter("need dt > 0 and y0 >= 0".into()));
        }
        let mut y = Vec::with_capacity(g.len() + 1);
        y.push(y0);
        for (&gi, &hi) in g.iter().zip(&h) {
            let last = *y.last().expect("nonempty");
            y.push(gronwall_step(last, gi, hi, dt));
        }
        Ok(Self { dt, g, h, y })
    }

    fn validate(&self) -> Result<()> {
        if self.y.len() != self.g.len() + 1 || self.g.len() != self.h.len() {
            return Err(Error::Hypothesis("mesh arrays have inconsistent lengths".into()));
        }
        if self.g.iter().chain(&self.h).chain(&self.y).any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Hypothesis("g, h and y must be finite and nonnegative".into()));
        }
        for i in 0..self.g.len() {
            let bound = gronwall_step(self.y[i], self.g[i], self.h[i], self.dt);
            if self.y[i + 1] > bound * (1.0 + ROUNDOFF_SLACK) + f64::MIN_POSITIVE {
                return Err(Error::Hypothesis(format!(
                    "y violates y' <= g y + h on interval {i}: {} > {bound}",
                    self.y[i + 1]
                )));
            }
        }
        Ok(())
    }
}

/// Window constants `(a₁, a₂, a₃)`: suprema of `∫g`, `∫h`, `∫y` over windows
/// of `window` mesh intervals.
pub fn gronwall_constants(inst: &GronwallInstance, window: usize) -> (f64, f64, f64) {
    let n = inst.g.len();
    let seg_y: Vec<f64> = (0..n).map(|i| gronwall_integral(inst.y[i], inst.g[i], inst.h[i], inst.dt)).collect();
    let mut best = (0.0f64, 0.0f64, 0.0f64);
    for start in 0..=(n - window) {
        let r = start..start + window;
        let a1: f64 = inst.g[r.clone()].iter().sum::<f64>() * inst.dt;
        let a2: f64 = inst.h[r.clone()].iter().sum::<f64>() * inst.dt;
        let a3: f64 = seg_y[r].iter().sum();
        best = (best.0.max(a1), best.1.max(a2), best.2.max(a3));
    }
    best
}

/// `y(t + r) ≤ (a₃/r + a₂)e^{a₁}` at every mesh point at least `r` past the start.
pub fn check_uniform_gronwall(inst: &GronwallInstance, window: usize) -> Result<InequalityReport> {
    inst.validate()?;
    if window == 0 || window > inst.g.len() {
        return Err(Error::InvalidParameter(format!(
            "window of {window} intervals must lie in [1, {}]",
            inst.g.len()
        )));
    }
    let r = window as f64 * inst.dt;
    let (a1, a2, a3) = gronwall_constants(inst, window);
    let bound = (a3 / r + a2) * a1.exp();
    let sides: Vec<(f64, f64)> = inst.y[window..].iter().map(|&y| (y, bound)).collect();
    Ok(InequalityReport::from_sides("uniform_gronwall", &sides, true))
}

/// Random piecewise-constant nonnegative `g`, `h` on `intervals` steps.
pub fn random_gronwall_instance(seed: u64, stream: u64, intervals: usize, dt: f64) -> Result<GronwallInstance> {
    use rand::Rng;
    let mut rng = rng_for(seed, stream);
    let pieces = 8;
    let len = intervals.div_ceil(pieces);
    let gp: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.0..1.0)).collect();
    let hp: Vec<f64> = (0..pieces).map(|_| rng.random_range(0.0..2.0)).collect();
    let y0 = rng.random_range(0.0..5.0);
    let g = (0..intervals).map(|i| gp[i / len]).collect();
    let h = (0..intervals).map(|i| hp[i / len]).collect();
    GronwallInstance::construct(y0, dt, g, h)
}
