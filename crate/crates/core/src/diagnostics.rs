//! Closed-form attractor bounds and a-priori norm monitoring.
//!
//! Every bound here carries an unspecified constant `C`; it is exposed as a
//! single user factor `c_free` (default 1) and, where trajectories are
//! available, fitted from data.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::eigen::EigenIndex;
use crate::error::{Error, Result};
use crate::field::{SpectralField, Transform};
use crate::integrator::Stepper;
use crate::rhs::{velocity_sobolev_sq, FlowState, Forcing, PhysParams};

/// `A`, `B`, `A₁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub a: f64,
    pub b: f64,
    pub a1: f64,
}

/// `A = ‖f‖_{L^{4/(2β−1)}}/κ`, `B = e^ν(1+κ)‖f‖²/(ν³κ³)`, `A₁ = ‖f‖_{L^{2/(α+β−1)}}/κ`.
pub fn compute_aggregates(forcing: &Forcing, params: &PhysParams) -> Result<Aggregates> {
    let PhysParams { alpha, beta, .. } = *params;
    if beta <= 0.5 {
        return Err(Error::InvalidParameter(format!("beta = {beta} must exceed 1/2 for L^(4/(2beta-1))")));
    }
    if alpha + beta <= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha + beta = {} must exceed 1 for L^(2/(alpha+beta-1))",
            alpha + beta
        )));
    }
    let la = forcing.norm_l_a.ok_or_else(|| Error::InvalidParameter("forcing lacks L^(4/(2beta-1)) norm".into()))?;
    let la1 =
        forcing.norm_l_a1.ok_or_else(|| Error::InvalidParameter("forcing lacks L^(2/(alpha+beta-1)) norm".into()))?;
    Ok(aggregates_from_norms(params, la, forcing.norm_l2, la1))
}

/// [`compute_aggregates`] from precomputed forcing norms.
pub fn aggregates_from_norms(params: &PhysParams, norm_l_a: f64, norm_l2: f64, norm_l_a1: f64) -> Aggregates {
    let PhysParams { nu, kappa, .. } = *params;
    Aggregates {
        a: norm_l_a / kappa,
        b: nu.exp() * (1.0 + kappa) / (nu.powi(3) * kappa.powi(3)) * norm_l2 * norm_l2,
        a1: norm_l_a1 / kappa,
    }
}

/// Gronwall exponents `M₁`, `M₂` and `M = max{M₁, M₂}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exponents {
    pub m1: f64,
    /// `None` when `3α − β ≤ 0` leaves an exponent undefined.
    pub m2: Option<f64>,
    pub m: f64,
    /// Set when `M` fell back to `M₁`.
    pub m2_undefined: bool,
}

pub fn compute_m(params: &PhysParams, agg: &Aggregates) -> Exponents {
    let PhysParams { nu, kappa, alpha, beta } = *params;
    let Aggregates { a, b, a1 } = *agg;
    let tb = 2.0 * beta - 1.0;
    let ta = 2.0 * alpha - 1.0;
    let ab = alpha + beta - 1.0;
    let b_term = nu.powf(-(2.0 * alpha + 1.0) / ta) * b.powf(4.0 * alpha / ta);
    let m1 = f64::max(
        kappa.powf(-(2.0 * beta + 1.0) / tb) * (a + b).powf(4.0 * beta / tb) + 1.0 / nu,
        nu.powf(-(2.0 * beta + 1.0) / tb) * a.powf(4.0 * beta / tb) + b_term,
    );
    let d = 3.0 * alpha - beta;
    let m2 = (d > 0.0).then(|| {
        f64::max(
            kappa.powf(-(alpha + beta) / ab) * (a1 + b).powf((2.0 * alpha + 2.0 * beta) / ab) + 1.0 / nu,
            nu.powf(-(beta - alpha) / d) * a1.powf(2.0 * alpha / d) + b_term,
        )
    });
    Exponents { m1, m2, m: m2.map_or(m1, |v| m1.max(v)), m2_undefined: m2.is_none() }
}

/// `N` with its overflow flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NValue {
    pub value: f64,
    pub overflow: bool,
}

/// `N = (1+κ)² e^{2ν} ‖Λ^β f‖² e^{2M} / (κ³ν²)`, evaluated in log space;
/// values beyond `f64::MAX` become `+∞` with `overflow` set.
pub fn compute_n(params: &PhysParams, norm_lambda_beta_f: f64, m: f64) -> NValue {
    let PhysParams { nu, kappa, .. } = *params;
    if norm_lambda_beta_f == 0.0 {
        return NValue { value: 0.0, overflow: false };
    }
    let ln = 2.0 * (1.0 + kappa).ln() + 2.0 * nu - 3.0 * kappa.ln() - 2.0 * nu.ln()
        + 2.0 * norm_lambda_beta_f.ln()
        + 2.0 * m;
    if ln >= f64::MAX.ln() || ln.is_nan() {
        NValue { value: f64::INFINITY, overflow: true }
    } else {
        NValue { value: ln.exp(), overflow: false }
    }
}

/// Outcome of the determining-modes threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    /// `2C(κ√N + N + 1)/(κν)`, the bound on `λ_{m+1}^{α−½}`.
    pub base: f64,
    /// The same bound expressed on `λ_{m+1}`.
    pub lambda: f64,
    /// Smallest `m` with `λ_{m+1} ≥ lambda`; `None` if unresolved on this grid.
    pub m_star: Option<usize>,
}

impl Threshold {
    pub fn unresolved(&self) -> bool {
        self.m_star.is_none()
    }
}

pub fn determining_threshold(params: &PhysParams, n: f64, c_free: f64, index: &EigenIndex) -> Result<Threshold> {
    let PhysParams { nu, kappa, alpha, .. } = *params;
    if alpha <= 0.5 {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must exceed 1/2")));
    }
    if !(c_free > 0.0) {
        return Err(Error::InvalidParameter(format!("C = {c_free} must be positive")));
    }
    let base = 2.0 * c_free * (kappa * n.sqrt() + n + 1.0) / (kappa * nu);
    let lambda = base.powf(1.0 / (alpha - 0.5));
    let below = index.count_below(lambda);
    let m_star = (lambda.is_finite() && below < index.len()).then_some(below);
    Ok(Threshold { base, lambda, m_star })
}

/// `ρ_m = ½ min{ν λ_m^α, κ λ_m^β}` for `λ_m ≥ 1`.
pub fn rho_m(params: &PhysParams, lambda_m: f64) -> f64 {
    0.5 * f64::min(params.nu * lambda_m.powf(params.alpha), params.kappa * lambda_m.powf(params.beta))
}

fn gauss_integrand(u: f64) -> f64 {
    // x = 1 − u² removes the endpoint singularity of 1/√(1 − x⁴)
    let x = 1.0 - u * u;
    2.0 / ((1.0 + x) * (1.0 + x * x)).sqrt()
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        return left + right + (left + right - whole) / 15.0;
    }
    adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// `(2/π) ∫₀¹ dx/√(1−x⁴)` by adaptive Simpson to absolute tolerance `tol`.
pub fn gauss_constant_with_tol(tol: f64) -> f64 {
    let f = gauss_integrand;
    let (fa, fm, fb) = (f(0.0), f(0.5), f(1.0));
    let whole = simpson(0.0, 1.0, fa, fm, fb);
    2.0 / PI * adaptive_simpson(&f, 0.0, 1.0, fa, fm, fb, whole, tol, 50)
}

/// Gauss's constant `G_a = 0.8346268…`.
pub fn gauss_constant() -> f64 {
    gauss_constant_with_tol(1e-14)
}

/// Fractal-dimension bound `N ln(8G²l²/(1−δ²)) / ln(2/(1+δ²))`.
pub fn dimension_bound(n_codim: u64, l: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {delta} must lie in (0, 1)")));
    }
    if !(l >= 1.0) || !l.is_finite() {
        return Err(Error::InvalidParameter(format!("l = {l} must be finite and >= 1")));
    }
    let g = gauss_constant();
    let d2 = delta * delta;
    Ok(n_codim as f64 * (8.0 * g * g * l * l / (1.0 - d2)).ln() / (2.0 / (1.0 + d2)).ln())
}

/// `C_s = Γ(1−s) / ((4π)^s π^{s/2} Γ(1+s))`, the whole-space sharp Sobolev constant.
pub fn sobolev_constant(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::InvalidParameter(format!("s = {s} must lie in (0, 1)")));
    }
    use statrs::function::gamma::gamma;
    Ok(gamma(1.0 - s) / ((4.0 * PI).powf(s) * PI.powf(0.5 * s) * gamma(1.0 + s)))
}

/// Every closed-form quantity for one parameter set and forcing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub nu: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
    pub norm_f: f64,
    pub norm_lambda_beta_f: f64,
    pub a: f64,
    pub b: f64,
    pub a1: f64,
    pub m1: f64,
    pub m2: Option<f64>,
    pub m: f64,
    pub m2_undefined: bool,
    pub n: f64,
    pub n_overflow: bool,
    pub c_free: f64,
    pub sigma: f64,
    pub threshold_base: f64,
    pub threshold_lambda: f64,
    pub m_star: Option<usize>,
    pub unresolved: bool,
    /// `(m, ρ_m)` for the requested `m`.
    pub rho_m: Vec<(usize, f64)>,
    /// Dimension bound at codimension `m_star` for a measured `(l, δ)`.
    pub dim_bound: Option<f64>,
    /// The a-priori level `(1+κ)² e^{2ν} ‖Λ^β f‖² e^{2M}/(κ³ν²)`, equal to `N`.
    pub apriori_level: f64,
}

/// Assembles a [`BoundReport`]. `squeeze` supplies measured `(l, δ)` for the
/// dimension bound with codimension `m_star`.
pub fn bound_report(
    forcing: &Forcing,
    params: &PhysParams,
    c_free: f64,
    index: &EigenIndex,
    rho_at: &[usize],
    squeeze: Option<(f64, f64)>,
) -> Result<BoundReport> {
    let agg = compute_aggregates(forcing, params)?;
    let ex = compute_m(params, &agg);
    let n = compute_n(params, forcing.norm_lambda_beta, ex.m);
    let th = determining_threshold(params, n.value, c_free, index)?;
    let rho = rho_at
        .iter()
        .map(|&m| Ok((m, rho_m(params, index.eigenvalue_of(m)?))))
        .collect::<Result<Vec<_>>>()?;
    let dim_bound = match (squeeze, th.m_star) {
        (Some((l, d)), Some(ms)) => Some(dimension_bound(ms as u64, l, d)?),
        _ => None,
    };
    Ok(BoundReport {
        nu: params.nu,
        kappa: params.kappa,
        alpha: params.alpha,
        beta: params.beta,
        norm_f: forcing.norm_l2,
        norm_lambda_beta_f: forcing.norm_lambda_beta,
        a: agg.a,
        b: agg.b,
        a1: agg.a1,
        m1: ex.m1,
        m2: ex.m2,
        m: ex.m,
        m2_undefined: ex.m2_undefined,
        n: n.value,
        n_overflow: n.overflow,
        c_free,
        sigma: params.sigma(),
        threshold_base: th.base,
        threshold_lambda: th.lambda,
        m_star: th.m_star,
        unresolved: th.unresolved(),
        rho_m: rho,
        dim_bound,
        apriori_level: n.value,
    })
}

/// Monitored norms at one instant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRecord {
    pub t: f64,
    pub theta: f64,
    pub lambda_beta_theta: f64,
    pub lambda_2beta_theta: f64,
    pub lambda_s1_theta: f64,
    pub u: f64,
    pub lambda_alpha_u: f64,
    pub lambda_2alpha_u: f64,
    pub lambda_s2_u: f64,
    /// `(p, ‖θ‖_{L^p})`
    pub lp_theta: Vec<(f64, f64)>,
}

pub fn norm_record(
    state: &FlowState,
    params: &PhysParams,
    s1: f64,
    s2: f64,
    lp: &[f64],
    transform: &Transform,
) -> Result<NormRecord> {
    let th = &state.theta;
    let w = &state.omega;
    let samples = if lp.is_empty() { Vec::new() } else { transform.from_spectral(th) };
    let lp_theta = lp
        .iter()
        .map(|&p| Ok((p, crate::field::lp_norm_samples(&samples, th.grid(), p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormRecord {
        t: state.t,
        theta: th.l2_norm(),
        lambda_beta_theta: th.sobolev_norm(params.beta),
        lambda_2beta_theta: th.sobolev_norm(2.0 * params.beta),
        lambda_s1_theta: th.sobolev_norm(s1),
        u: velocity_sobolev_sq(w, 0.0).sqrt(),
        lambda_alpha_u: velocity_sobolev_sq(w, params.alpha).sqrt(),
        lambda_2alpha_u: velocity_sobolev_sq(w, 2.0 * params.alpha).sqrt(),
        lambda_s2_u: velocity_sobolev_sq(w, s2).sqrt(),
        lp_theta,
    })
}

/// Per-step defect of the temperature budget
/// `d/dt ½‖θ‖² + κ‖Λ^βθ‖² − ⟨f,θ⟩ = 0`, with the time derivative as a
/// difference quotient and the remaining terms by the trapezoid rule.
#[derive(Debug, Clone)]
pub struct BudgetTracker {
    kappa: f64,
    beta: f64,
    forcing: SpectralField,
    dt: f64,
    energy: f64,
    source: f64,
}

impl BudgetTracker {
    pub fn new(stepper: &Stepper, state: &FlowState) -> Self {
        let model = stepper.model();
        let mut t = Self {
            kappa: model.params().kappa,
            beta: model.params().beta,
            forcing: model.forcing().clone(),
            dt: stepper.dt(),
            energy: 0.0,
            source: 0.0,
        };
        (t.energy, t.source) = t.terms(&state.theta);
        t
    }

    fn terms(&self, theta: &SpectralField) -> (f64, f64) {
        (0.5 * theta.sobolev_norm_sq(0.0), self.kappa * theta.sobolev_norm_sq(self.beta) - self.forcing.inner(theta))
    }

    /// Defect over the step ending at `state`.
    pub fn update(&mut self, state: &FlowState) -> f64 {
        let (e, s) = self.terms(&state.theta);
        let defect = (e - self.energy) / self.dt + 0.5 * (self.source + s);
        (self.energy, self.source) = (e, s);
        defect
    }
}

/// Runs `n_steps` and returns the final state with one budget defect per step.
pub fn energy_budget_defects(stepper: &Stepper, initial: &FlowState, n_steps: usize) -> Result<(FlowState, Vec<f64>)> {
    let mut tracker = BudgetTracker::new(stepper, initial);
    let mut state = initial.clone();
    let mut defects = Vec::with_capacity(n_steps);
    for _ in 0..n_steps {
        state = stepper.step(&state)?;
        defects.push(tracker.update(&state));
    }
    Ok((state, defects))
}

/// Trajectory-level comparison against the a-priori bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AprioriMargins {
    /// `sup_t (‖Λ^{2β}θ‖² + ‖Λ^{2α}u‖²)`
    pub sup_high: f64,
    /// `sup_high` divided by the a-priori level; zero for unforced runs.
    pub c_hat: f64,
    /// `sup_t ∫_t^{t+1} ‖Λ^β θ‖²` over windows fully inside the record.
    pub window_avg_lambda_beta: f64,
    /// The above divided by `(1+κ)‖f‖²/κ³`.
    pub c_hat_avg: f64,
}

pub fn monitor_apriori(records: &[NormRecord], report: &BoundReport) -> Result<AprioriMargins> {
    if records.is_empty() {
        return Err(Error::Empty("no norm records".into()));
    }
    let sup_high = records
        .iter()
        .map(|r| r.lambda_2beta_theta.powi(2) + r.lambda_2alpha_u.powi(2))
        .fold(0.0, f64::max);
    let level = report.apriori_level;
    let c_hat = if level > 0.0 && level.is_finite() { sup_high / level } else { 0.0 };

    // sliding unit-length windows, trapezoid rule
    let mut window_avg = 0.0f64;
    let t0 = records[0].t;
    let t_last = records[records.len() - 1].t;
    let mut start = 0;
    while start < records.len() && records[start].t + 1.0 <= t_last + 1e-12 {
        let mut acc = 0.0;
        let mut j = start;
        while j + 1 < records.len() && records[j + 1].t <= records[start].t + 1.0 + 1e-12 {
            let (a, b) = (&records[j], &records[j + 1]);
            acc += 0.5 * (b.t - a.t) * (a.lambda_beta_theta.powi(2) + b.lambda_beta_theta.powi(2));
            j += 1;
        }
        window_avg = window_avg.max(acc);
        start += 1;
    }
    if t_last - t0 < 1.0 {
        window_avg = f64::NAN;
    }
    let avg_level = (1.0 + report.kappa) / report.kappa.powi(3) * report.norm_f.powi(2);
    let c_hat_avg = if avg_level > 0.0 && window_avg.is_finite() { window_avg / avg_level } else { 0.0 };
    Ok(AprioriMargins { sup_high, c_hat, window_avg_lambda_beta: window_avg, c_hat_avg })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn p(nu: f64, kappa: f64, alpha: f64, beta: f64) -> PhysParams {
        PhysParams::new(nu, kappa, alpha, beta, false).unwrap()
    }

    #[test]
    fn aggregates_example() {
        let pp = p(1.0, 1.0, 0.75, 0.75);
        let norm2 = 2.0 * PI * PI;
        let agg = aggregates_from_norms(&pp, 0.0, norm2.sqrt(), 0.0);
        assert!((agg.b - 2.0 * std::f64::consts::E * norm2).abs() < 1e-12);
        let a1 = aggregates_from_norms(&pp, 3.0, 1.0, 1.0).a;
        let a2 = aggregates_from_norms(&p(1.0, 2.0, 0.75, 0.75), 3.0, 1.0, 1.0).a;
        assert!((a1 / a2 - 2.0).abs() < 1e-15);
        let z = aggregates_from_norms(&pp, 0.0, 0.0, 0.0);
        assert_eq!((z.a, z.b, z.a1), (0.0, 0.0, 0.0));
    }

    #[test]
    fn exponents_examples() {
        let pp = p(1.0, 1.0, 0.75, 0.75);
        let ex = compute_m(&pp, &Aggregates { a: 0.0, b: 0.0, a1: 0.0 });
        assert_eq!((ex.m1, ex.m2, ex.m), (1.0, Some(1.0), 1.0));
        // 4β/(2β−1) = 6 and (α+β)/(α+β−1)·2 = 6 at α=β=¾
        let ex = compute_m(&pp, &Aggregates { a: 1.0, b: 1.0, a1: 1.0 });
        assert!((ex.m1 - 65.0).abs() < 1e-12);
        assert!((ex.m2.unwrap() - 65.0).abs() < 1e-12);
        assert_eq!(ex.m, ex.m1.max(ex.m2.unwrap()));
        let mut last = 0.0;
        for a in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let m1 = compute_m(&pp, &Aggregates { a, b: 0.3, a1: 0.2 }).m1;
            assert!(m1 >= last);
            last = m1;
        }
    }

    #[test]
    fn m2_fallback_when_exponent_undefined() {
        let pp = PhysParams::new(1.0, 1.0, 0.2, 0.9, true).unwrap();
        let ex = compute_m(&pp, &Aggregates { a: 0.1, b: 0.1, a1: 0.1 });
        assert!(ex.m2_undefined && ex.m2.is_none());
        assert_eq!(ex.m, ex.m1);
    }

    #[test]
    fn n_examples() {
        let pp = p(1.0, 1.0, 0.75, 0.75);
        assert_eq!(compute_n(&pp, 0.0, 5.0).value, 0.0);
        let n = compute_n(&pp, 1.0, 0.0);
        assert!((n.value - 29.556224395722600909).abs() < 1e-12);
        let n2 = compute_n(&pp, 2.0, 0.0);
        assert!((n2.value / n.value - 4.0).abs() < 1e-14);
        let big = compute_n(&pp, 1.0, 1e4);
        assert!(big.overflow && big.value.is_infinite());
    }

    #[test]
    fn threshold_examples() {
        let g = GridSpec::new(64).unwrap();
        let idx = EigenIndex::new(g);
        let pp = p(1.0, 1.0, 0.75, 0.75);
        let th = determining_threshold(&pp, 0.0, 1.0, &idx).unwrap();
        assert!((th.lambda - 16.0).abs() < 1e-12);
        let ms = th.m_star.unwrap();
        assert!(idx.eigenvalue_of(ms + 1).unwrap() >= 16.0);
        assert!(idx.eigenvalue_of(ms).unwrap() < 16.0);
        let th2 = determining_threshold(&pp, 0.0, 2.0, &idx).unwrap();
        assert!((th2.lambda / th.lambda - 2f64.powf(4.0)).abs() < 1e-12);
        let near = PhysParams::new(1.0, 1.0, 0.5001, 0.75, false).unwrap();
        let th3 = determining_threshold(&near, 1.0, 1.0, &idx).unwrap();
        assert!(th3.lambda.is_infinite() && th3.unresolved());
    }

    #[test]
    fn rho_examples() {
        assert_eq!(rho_m(&p(1.0, 1.0, 0.75, 0.75), 1.0), 0.5);
        let pp = p(2.0, 1.0, 0.7, 0.7);
        assert_eq!(rho_m(&pp, 9.0), 0.5 * 9f64.powf(0.7));
        let pp = p(1.0, 1.0, 0.6, 0.9);
        assert!((rho_m(&pp, 4.0) - 0.5 * 4f64.powf(0.6)).abs() < 1e-15);
    }

    #[test]
    fn gauss_constant_digits() {
        let g = gauss_constant();
        assert!((g - 0.8346268416740731863).abs() < 1e-12);
        assert!((g - 0.8346268).abs() < 1e-6);
        // u = 1 is x = 0, where 1/√(1−x⁴) = 1 and the Jacobian contributes 2
        assert!((gauss_integrand(1.0) - 2.0).abs() < 1e-15);
        let coarse = gauss_constant_with_tol(1e-12);
        let fine = gauss_constant_with_tol(0.5e-12);
        assert!((coarse - fine).abs() < 1e-10);
    }

    #[test]
    fn dimension_bound_example() {
        let d = dimension_bound(10, 2.0, 0.5).unwrap();
        assert!((d - 72.167035821810214).abs() < 1e-9 * 72.17);
        assert!(dimension_bound(10, 2.0, 1.0).is_err());
        assert!(dimension_bound(10, 0.5, 0.5).is_err());
        assert!(dimension_bound(10, 2.0, 0.0).is_err());
    }

    #[test]
    fn sobolev_constant_half() {
        assert!((sobolev_constant(0.5).unwrap() - 0.42377720812375759679).abs() < 1e-13);
        assert!(sobolev_constant(1.0).is_err());
    }

    #[test]
    fn monitor_requires_records() {
        let g = GridSpec::new(16).unwrap();
        let pp = p(1.0, 1.0, 0.75, 0.75);
        let f = Forcing::zero(g, &pp);
        let rep = bound_report(&f, &pp, 1.0, &EigenIndex::new(g), &[1], None).unwrap();
        assert!(monitor_apriori(&[], &rep).is_err());
        assert_eq!(rep.a, 0.0);
        assert_eq!(rep.n, 0.0);
    }
}
