//! Temperature–vorticity form of the fractionally dissipative Boussinesq
//! system:
//!
//! ```text
//! ∂ₜθ + u·∇θ + κΛ^{2β}θ = f
//! ∂ₜω + u·∇ω + νΛ^{2α}ω = ∂₁θ,     u = ∇⊥ψ,  Δψ = ω
//! ```

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{abs_k, Axis, SpectralField, Transform};
use crate::grid::GridSpec;

/// Viscosity, diffusivity and the two dissipation exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    pub nu: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PhysParams {
    /// Validates `ν, κ > 0` and, unless `allow_out_of_range`, `α, β ∈ (½, 1)`.
    pub fn new(nu: f64, kappa: f64, alpha: f64, beta: f64, allow_out_of_range: bool) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::InvalidParameter(format!("viscosity nu = {nu} must be positive")));
        }
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("diffusivity kappa = {kappa} must be positive")));
        }
        if !alpha.is_finite() || !beta.is_finite() {
            return Err(Error::InvalidParameter("dissipation exponents must be finite".into()));
        }
        if !allow_out_of_range {
            for (name, v) in [("alpha", alpha), ("beta", beta)] {
                if !(v > 0.5 && v < 1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "subcritical dissipation condition violated: {name} = {v} must lie in (1/2, 1) \
                         (pass the out-of-range override to run anyway)"
                    )));
                }
            }
        }
        Ok(Self { nu, kappa, alpha, beta })
    }

    /// `σ = min{ν, κ}`.
    pub fn sigma(&self) -> f64 {
        self.nu.min(self.kappa)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Sin,
    Cos,
}

/// One term `amplitude·sin(k·x)` or `amplitude·cos(k·x)` of the forcing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ForcingMode {
    pub k: [i64; 2],
    pub amplitude: f64,
    pub phase: Phase,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ForcingSpec {
    pub modes: Vec<ForcingMode>,
}

/// Realized time-independent forcing with its cached norms.
#[derive(Debug, Clone)]
pub struct Forcing {
    pub spec: ForcingSpec,
    pub field: SpectralField,
    /// `‖f‖`
    pub norm_l2: f64,
    /// `‖Λ^β f‖`
    pub norm_lambda_beta: f64,
    /// `‖f‖_{L^{4/(2β−1)}}`, when `β > ½`.
    pub norm_l_a: Option<f64>,
    /// `‖f‖_{L^{2/(α+β−1)}}`, when `α + β > 1`.
    pub norm_l_a1: Option<f64>,
    /// Integrability exponent pair `(r₀, p₀ = 2/(1−r₀))` for regularity index `s₁`.
    pub r0: Option<f64>,
    pub p0: Option<f64>,
    pub norm_l_p0: Option<f64>,
}

impl Forcing {
    pub fn zero(grid: GridSpec, params: &PhysParams) -> Self {
        make_forcing(grid, &ForcingSpec::default(), params, 1.0).expect("empty forcing is valid")
    }
}

/// `r₀ = s₁` if `s₁ ∈ (2max{1−α,1−β}, 1)`; for `s₁ ≥ 1`, the midpoint of that interval.
pub fn integrability_index(params: &PhysParams, s1: f64) -> Option<f64> {
    let lo = 2.0 * (1.0 - params.alpha).max(1.0 - params.beta);
    if lo >= 1.0 {
        return None;
    }
    if s1 > lo && s1 < 1.0 {
        Some(s1)
    } else if s1 >= 1.0 {
        Some(0.5 * (lo + 1.0))
    } else {
        None
    }
}

/// Builds the forcing field and its norms. `s1` only selects `r₀`.
pub fn make_forcing(grid: GridSpec, spec: &ForcingSpec, params: &PhysParams, s1: f64) -> Result<Forcing> {
    let mut field = SpectralField::zeros(grid);
    let cut = grid.dealias_cut() as i64;
    for mode in &spec.modes {
        let [k1, k2] = mode.k;
        if k1 == 0 && k2 == 0 {
            return Err(Error::InvalidParameter("forcing must have zero mean: k = (0, 0) is not allowed".into()));
        }
        if k1.abs() > cut || k2.abs() > cut {
            return Err(Error::InvalidParameter(format!(
                "forcing mode ({k1}, {k2}) lies outside the dealias cut {cut}"
            )));
        }
        if !mode.amplitude.is_finite() {
            return Err(Error::InvalidParameter("forcing amplitude must be finite".into()));
        }
        let term = match mode.phase {
            Phase::Sin => SpectralField::sin_mode(grid, k1, k2, mode.amplitude)?,
            Phase::Cos => SpectralField::cos_mode(grid, k1, k2, mode.amplitude)?,
        };
        field = field.add(&term);
    }
    let transform = Transform::new(grid);
    let samples = transform.from_spectral(&field);
    let lq = |q: f64| -> Option<f64> {
        (q.is_finite() && q >= 1.0).then(|| crate::field::lp_norm_samples(&samples, grid, q).ok()).flatten()
    };
    let q_a = (params.beta > 0.5).then(|| 4.0 / (2.0 * params.beta - 1.0));
    let q_a1 = (params.alpha + params.beta > 1.0).then(|| 2.0 / (params.alpha + params.beta - 1.0));
    let r0 = integrability_index(params, s1);
    let p0 = r0.map(|r| 2.0 / (1.0 - r));
    Ok(Forcing {
        spec: spec.clone(),
        norm_l2: field.l2_norm(),
        norm_lambda_beta: field.sobolev_norm(params.beta),
        norm_l_a: q_a.and_then(lq),
        norm_l_a1: q_a1.and_then(lq),
        r0,
        p0,
        norm_l_p0: p0.and_then(lq),
        field,
    })
}

/// Temperature and vorticity at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub theta: SpectralField,
    pub omega: SpectralField,
    pub t: f64,
}

impl FlowState {
    pub fn zeros(grid: GridSpec) -> Self {
        Self { theta: SpectralField::zeros(grid), omega: SpectralField::zeros(grid), t: 0.0 }
    }

    pub fn new(theta: SpectralField, omega: SpectralField, t: f64) -> Result<Self> {
        if theta.grid() != omega.grid() {
            return Err(Error::GridMismatch(theta.grid().n(), omega.grid().n()));
        }
        Ok(Self { theta: theta.dealias(), omega: omega.dealias(), t })
    }

    pub fn grid(&self) -> GridSpec {
        self.theta.grid()
    }

    pub fn is_finite(&self) -> bool {
        self.theta.is_finite() && self.omega.is_finite()
    }

    /// `‖Λ^s u‖²` from the vorticity through the Biot–Savart multiplier.
    pub fn velocity_sobolev_sq(&self, s: f64) -> f64 {
        velocity_sobolev_sq(&self.omega, s)
    }
}

/// `‖Λ^s u‖² = (2π)² Σ |k|^{2s−2} |ω̂(k)|²` for `u` the velocity of `omega`.
pub fn velocity_sobolev_sq(omega: &SpectralField, s: f64) -> f64 {
    omega.sobolev_norm_sq(s - 1.0)
}

/// Divergence-free velocity `u = ∇⊥ψ` with `Δψ = ω`.
pub fn velocity_from_vorticity(omega: &SpectralField) -> (SpectralField, SpectralField) {
    let g = omega.grid();
    let mut u1 = SpectralField::zeros(g);
    let mut u2 = SpectralField::zeros(g);
    for (i, &w) in omega.coeffs().iter().enumerate().skip(1) {
        if g.is_nyquist(i) {
            continue;
        }
        let (k1, k2) = g.wavevector(i);
        let inv = 1.0 / (k1 * k1 + k2 * k2) as f64;
        // û₁ = i k₂ ω̂/|k|², û₂ = −i k₁ ω̂/|k|²
        let iw = Complex64::new(-w.im, w.re) * inv;
        u1.coeffs_mut()[i] = iw * k2 as f64;
        u2.coeffs_mut()[i] = -iw * k1 as f64;
    }
    (u1, u2)
}

/// Which physical terms the right-hand side includes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dynamics {
    pub advection: bool,
    pub buoyancy: bool,
}

impl Default for Dynamics {
    fn default() -> Self {
        Self { advection: true, buoyancy: true }
    }
}

/// Evaluates the split right-hand side on one grid.
#[derive(Debug, Clone)]
pub struct Model {
    transform: Transform,
    params: PhysParams,
    forcing: SpectralField,
    dynamics: Dynamics,
    /// `κ|k|^{2β}` per storage offset
    diss_theta: Vec<f64>,
    /// `ν|k|^{2α}` per storage offset
    diss_omega: Vec<f64>,
}

impl Model {
    pub fn new(grid: GridSpec, params: PhysParams, forcing: &Forcing, dynamics: Dynamics) -> Result<Self> {
        if forcing.field.grid() != grid {
            return Err(Error::GridMismatch(grid.n(), forcing.field.grid().n()));
        }
        let mult = |c: f64, e: f64| -> Vec<f64> {
            (0..grid.len())
                .map(|i| {
                    let (k1, k2) = grid.wavevector(i);
                    if i == 0 {
                        0.0
                    } else {
                        c * abs_k(k1, k2).powf(2.0 * e)
                    }
                })
                .collect()
        };
        Ok(Self {
            transform: Transform::new(grid),
            params,
            forcing: forcing.field.clone(),
            dynamics,
            diss_theta: mult(params.kappa, params.beta),
            diss_omega: mult(params.nu, params.alpha),
        })
    }

    pub fn grid(&self) -> GridSpec {
        self.transform.grid()
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    pub fn forcing(&self) -> &SpectralField {
        &self.forcing
    }

    pub fn dynamics(&self) -> Dynamics {
        self.dynamics
    }

    pub fn diss_theta(&self) -> &[f64] {
        &self.diss_theta
    }

    pub fn diss_omega(&self) -> &[f64] {
        &self.diss_omega
    }

    /// Dealiased advection terms `(u·∇θ, u·∇ω)`.
    pub fn advection(&self, theta: &SpectralField, omega: &SpectralField) -> (SpectralField, SpectralField) {
        let t = &self.transform;
        let (u1, u2) = velocity_from_vorticity(omega);
        let (u1p, u2p) = t.from_spectral_pair(&u1, &u2);
        let (tx, ty) = t.from_spectral_pair(&theta.derivative(Axis::X1), &theta.derivative(Axis::X2));
        let (wx, wy) = t.from_spectral_pair(&omega.derivative(Axis::X1), &omega.derivative(Axis::X2));
        let len = u1p.len();
        let mut adv_t = Vec::with_capacity(len);
        let mut adv_w = Vec::with_capacity(len);
        for j in 0..len {
            adv_t.push(u1p[j] * tx[j] + u2p[j] * ty[j]);
            adv_w.push(u1p[j] * wx[j] + u2p[j] * wy[j]);
        }
        let (mut at, mut aw) = t.to_spectral_pair(&adv_t, &adv_w);
        at.dealias_in_place();
        aw.dealias_in_place();
        (at, aw)
    }

    /// Explicit part `(−u·∇θ + f, −u·∇ω + ∂₁θ)`; dissipation excluded.
    pub fn explicit_terms(&self, theta: &SpectralField, omega: &SpectralField) -> (SpectralField, SpectralField) {
        let (mut nt, mut nw) = if self.dynamics.advection {
            let (at, aw) = self.advection(theta, omega);
            (at.scale(-1.0), aw.scale(-1.0))
        } else {
            (SpectralField::zeros(self.grid()), SpectralField::zeros(self.grid()))
        };
        nt = nt.add(&self.forcing);
        if self.dynamics.buoyancy {
            nw = nw.add(&theta.derivative(Axis::X1));
        }
        (nt, nw)
    }

    fn with_dissipation(&self, explicit: SpectralField, field: &SpectralField, diss: &[f64]) -> SpectralField {
        let mut out = explicit;
        for ((o, c), d) in out.coeffs_mut().iter_mut().zip(field.coeffs()).zip(diss) {
            *o -= c * d;
        }
        out
    }

    /// Full tendencies `(∂ₜθ, ∂ₜω)`.
    pub fn tendencies(&self, state: &FlowState) -> (SpectralField, SpectralField) {
        let (nt, nw) = self.explicit_terms(&state.theta, &state.omega);
        (
            self.with_dissipation(nt, &state.theta, &self.diss_theta),
            self.with_dissipation(nw, &state.omega, &self.diss_omega),
        )
    }
}

/// `−dealias(u·∇θ) − κΛ^{2β}θ + f`.
pub fn temperature_rhs(state: &FlowState, forcing: &Forcing, params: &PhysParams) -> Result<SpectralField> {
    let model = Model::new(state.grid(), *params, forcing, Dynamics::default())?;
    Ok(model.tendencies(state).0)
}

/// `−dealias(u·∇ω) − νΛ^{2α}ω + ∂₁θ`.
pub fn vorticity_rhs(state: &FlowState, params: &PhysParams) -> Result<SpectralField> {
    let forcing = Forcing::zero(state.grid(), params);
    let model = Model::new(state.grid(), *params, &forcing, Dynamics::default())?;
    Ok(model.tendencies(state).1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn params() -> PhysParams {
        PhysParams::new(0.3, 0.2, 0.75, 0.6, false).unwrap()
    }

    fn g(n: usize) -> GridSpec {
        GridSpec::new(n).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(PhysParams::new(0.1, 0.1, 0.4, 0.75, false).is_err());
        assert!(PhysParams::new(0.1, 0.1, 0.4, 0.75, true).is_ok());
        assert!(PhysParams::new(0.0, 0.1, 0.75, 0.75, false).is_err());
        assert!(PhysParams::new(0.1, -1.0, 0.75, 0.75, false).is_err());
        assert!(PhysParams::new(0.1, 0.1, 0.75, 1.0, false).is_err());
        let msg = PhysParams::new(0.1, 0.1, 0.4, 0.75, false).unwrap_err().to_string();
        assert!(msg.contains("(1/2, 1)") && msg.contains("alpha"));
    }

    #[test]
    fn velocity_of_sin_x1() {
        let grid = g(16);
        let w = SpectralField::sin_mode(grid, 1, 0, 1.0).unwrap();
        let (u1, u2) = velocity_from_vorticity(&w);
        assert_eq!(u1.max_abs_coeff(), 0.0);
        let expect = SpectralField::cos_mode(grid, 1, 0, -1.0).unwrap();
        assert!(u2.max_abs_diff(&expect) < 1e-16);
        let (z1, z2) = velocity_from_vorticity(&SpectralField::zeros(grid));
        assert_eq!(z1.max_abs_coeff() + z2.max_abs_coeff(), 0.0);
    }

    #[test]
    fn forcing_norms() {
        let grid = g(32);
        let p = PhysParams::new(0.1, 0.1, 0.75, 0.75, false).unwrap();
        let spec = ForcingSpec { modes: vec![ForcingMode { k: [1, 0], amplitude: 1.0, phase: Phase::Sin }] };
        let f = make_forcing(grid, &spec, &p, 1.0).unwrap();
        let base = (2.0 * PI * PI).sqrt();
        assert!((f.norm_l2 - base).abs() < 1e-13);
        assert!((f.norm_lambda_beta - base).abs() < 1e-13);
        assert!(f.norm_l_a.is_some() && f.norm_l_a1.is_some());
        assert_eq!(f.r0, Some(0.75));
        assert_eq!(f.p0, Some(8.0));

        let two = ForcingSpec {
            modes: vec![
                ForcingMode { k: [1, 0], amplitude: 1.0, phase: Phase::Sin },
                ForcingMode { k: [0, 2], amplitude: 1.0, phase: Phase::Cos },
            ],
        };
        let f2 = make_forcing(grid, &two, &p, 1.0).unwrap();
        let expect = 2.0 * PI * PI * (1.0 + 2f64.powf(2.0 * 0.75));
        assert!((f2.norm_lambda_beta.powi(2) - expect).abs() < 1e-11 * expect);

        let bad = ForcingSpec { modes: vec![ForcingMode { k: [0, 0], amplitude: 1.0, phase: Phase::Cos }] };
        assert!(make_forcing(grid, &bad, &p, 1.0).is_err());
        let outside = ForcingSpec { modes: vec![ForcingMode { k: [11, 0], amplitude: 1.0, phase: Phase::Cos }] };
        assert!(make_forcing(grid, &outside, &p, 1.0).is_err());
    }

    #[test]
    fn zero_state_zero_tendency() {
        let grid = g(16);
        let p = params();
        let f = Forcing::zero(grid, &p);
        let s = FlowState::zeros(grid);
        assert_eq!(temperature_rhs(&s, &f, &p).unwrap().max_abs_coeff(), 0.0);
        assert_eq!(vorticity_rhs(&s, &p).unwrap().max_abs_coeff(), 0.0);
    }

    #[test]
    fn single_mode_dissipation() {
        let grid = g(16);
        let p = params();
        let f = Forcing::zero(grid, &p);
        let theta = SpectralField::sin_mode(grid, 2, 0, 1.0).unwrap();
        let s = FlowState::new(theta.clone(), SpectralField::zeros(grid), 0.0).unwrap();
        let rhs = temperature_rhs(&s, &f, &p).unwrap();
        let expect = theta.scale(-p.kappa * 2f64.powf(2.0 * p.beta));
        assert!(rhs.max_abs_diff(&expect) < 1e-15);

        let omega = SpectralField::sin_mode(grid, 2, 0, 1.0).unwrap();
        let s = FlowState::new(SpectralField::zeros(grid), omega.clone(), 0.0).unwrap();
        let rhs = vorticity_rhs(&s, &p).unwrap();
        let expect = omega.scale(-p.nu * 2f64.powf(2.0 * p.alpha));
        assert!(rhs.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn buoyancy_is_x1_derivative() {
        let grid = g(16);
        let p = params();
        let s = FlowState::new(SpectralField::sin_mode(grid, 1, 0, 1.0).unwrap(), SpectralField::zeros(grid), 0.0)
            .unwrap();
        let rhs = vorticity_rhs(&s, &p).unwrap();
        assert!(rhs.max_abs_diff(&SpectralField::cos_mode(grid, 1, 0, 1.0).unwrap()) < 1e-15);
        let s = FlowState::new(SpectralField::sin_mode(grid, 0, 1, 1.0).unwrap(), SpectralField::zeros(grid), 0.0)
            .unwrap();
        assert!(vorticity_rhs(&s, &p).unwrap().max_abs_coeff() < 1e-16);
    }

    #[test]
    fn advection_of_sin_x2_by_shear() {
        // u = (0, −cos x₁), θ = sin x₂ ⇒ u·∇θ = −cos x₁ cos x₂
        let grid = g(16);
        let p = params();
        let f = Forcing::zero(grid, &p);
        let theta = SpectralField::sin_mode(grid, 0, 1, 1.0).unwrap();
        let omega = SpectralField::sin_mode(grid, 1, 0, 1.0).unwrap();
        let model = Model::new(grid, p, &f, Dynamics::default()).unwrap();
        let (adv, _) = model.advection(&theta, &omega);
        // cos x₁ cos x₂ = ½cos(x₁+x₂) + ½cos(x₁−x₂)
        let expect = SpectralField::cos_mode(grid, 1, 1, -0.5)
            .unwrap()
            .add(&SpectralField::cos_mode(grid, 1, -1, -0.5).unwrap());
        assert!(adv.max_abs_diff(&expect) < 1e-15);
        // grid cross-check of the product
        let t = Transform::new(grid);
        let phys = t.from_spectral(&adv);
        for j in 0..grid.len() {
            let (x, y) = (grid.node(j / 16), grid.node(j % 16));
            assert!((phys[j] + x.cos() * y.cos()).abs() < 1e-14);
        }
    }
}
