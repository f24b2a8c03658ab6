//! Integrating-factor Runge–Kutta time stepping.
//!
//! The diagonal dissipation `−κ|k|^{2β}`, `−ν|k|^{2α}` is integrated exactly
//! through the factors `e^{−κ|k|^{2β}h}`, `e^{−ν|k|^{2α}h}`; advection,
//! buoyancy and forcing are advanced explicitly (Lawson schemes).

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::rhs::{velocity_from_vorticity, FlowState, Model, PhysParams};

const CHECKPOINT_MAGIC: &[u8; 8] = b"BSQCKPT1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    #[serde(rename = "if-rk2")]
    IfRk2,
    #[serde(rename = "if-rk4")]
    IfRk4,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Upper bound on the step from the explicit terms.
    pub dt_max: f64,
    /// Re-check the advective Courant number every this many steps (0 = never).
    pub recheck_every: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { dt: 0.01, scheme: Scheme::IfRk4, cfl_safety: 0.5, t_end: 1.0, dt_max: 0.05, recheck_every: 100 }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!("cfl_safety = {} must lie in (0, 1]", self.cfl_safety)));
        }
        if !(self.dt_max > 0.0) {
            return Err(Error::InvalidParameter(format!("dt_max = {} must be positive", self.dt_max)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidParameter(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        Ok(())
    }
}

/// Fixed-step integrator with cached exponential factors.
#[derive(Debug, Clone)]
pub struct Stepper {
    model: Model,
    dt: f64,
    scheme: Scheme,
    half_theta: Vec<f64>,
    full_theta: Vec<f64>,
    half_omega: Vec<f64>,
    full_omega: Vec<f64>,
}

type Pair = (SpectralField, SpectralField);

impl Stepper {
    pub fn new(model: Model, dt: f64, scheme: Scheme) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParameter(format!("dt = {dt} must be positive")));
        }
        let exps = |d: &[f64], h: f64| d.iter().map(|l| (-l * h).exp()).collect::<Vec<_>>();
        Ok(Self {
            half_theta: exps(model.diss_theta(), 0.5 * dt),
            full_theta: exps(model.diss_theta(), dt),
            half_omega: exps(model.diss_omega(), 0.5 * dt),
            full_omega: exps(model.diss_omega(), dt),
            model,
            dt,
            scheme,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn explicit(&self, v: &Pair) -> Pair {
        self.model.explicit_terms(&v.0, &v.1)
    }

    /// `Σ cᵢ·Eᵢ·xᵢ` applied per mode, for both components.
    fn combine(&self, terms: &[(f64, Factor, &Pair)]) -> Pair {
        let g = self.model.grid();
        let mut out = (SpectralField::zeros(g), SpectralField::zeros(g));
        for &(c, factor, x) in terms {
            let (ft, fw): (Option<&[f64]>, Option<&[f64]>) = match factor {
                Factor::One => (None, None),
                Factor::Half => (Some(&self.half_theta), Some(&self.half_omega)),
                Factor::Full => (Some(&self.full_theta), Some(&self.full_omega)),
            };
            accumulate(out.0.coeffs_mut(), c, ft, x.0.coeffs());
            accumulate(out.1.coeffs_mut(), c, fw, x.1.coeffs());
        }
        out
    }

    /// One integrating-factor RK step. Fails if the new state is not finite.
    pub fn step(&self, state: &FlowState) -> Result<FlowState> {
        let h = self.dt;
        let v: Pair = (state.theta.clone(), state.omega.clone());
        let next = match self.scheme {
            Scheme::IfRk2 => {
                let k1 = self.explicit(&v);
                let a = self.combine(&[(1.0, Factor::Full, &v), (h, Factor::Full, &k1)]);
                let k2 = self.explicit(&a);
                self.combine(&[(1.0, Factor::Full, &v), (0.5 * h, Factor::Full, &k1), (0.5 * h, Factor::One, &k2)])
            }
            Scheme::IfRk4 => {
                let k1 = self.explicit(&v);
                let a = self.combine(&[(1.0, Factor::Half, &v), (0.5 * h, Factor::Half, &k1)]);
                let k2 = self.explicit(&a);
                let b = self.combine(&[(1.0, Factor::Half, &v), (0.5 * h, Factor::One, &k2)]);
                let k3 = self.explicit(&b);
                let c = self.combine(&[(1.0, Factor::Full, &v), (h, Factor::Half, &k3)]);
                let k4 = self.explicit(&c);
                let mid = self.combine(&[(2.0, Factor::One, &k2), (2.0, Factor::One, &k3)]);
                self.combine(&[
                    (1.0, Factor::Full, &v),
                    (h / 6.0, Factor::Full, &k1),
                    (h / 6.0, Factor::Half, &mid),
                    (h / 6.0, Factor::One, &k4),
                ])
            }
        };
        let out = FlowState { theta: next.0, omega: next.1, t: state.t + h };
        if !out.is_finite() {
            return Err(Error::BlowUp { t: out.t, detail: "non-finite spectral coefficient".into() });
        }
        Ok(out)
    }

    /// Advances `n_steps` fixed steps, calling `observe` after each.
    pub fn advance(
        &self,
        state: &FlowState,
        n_steps: usize,
        recheck_every: usize,
        mut observe: impl FnMut(&FlowState),
    ) -> Result<FlowState> {
        let mut s = state.clone();
        for i in 0..n_steps {
            s = self.step(&s)?;
            if recheck_every > 0 && (i + 1) % recheck_every == 0 {
                let courant = courant_number(&s, self.dt);
                if courant > 1.0 {
                    return Err(Error::CflViolation { t: s.t, courant });
                }
            }
            observe(&s);
        }
        Ok(s)
    }

    /// Number of fixed steps covering a duration.
    pub fn steps_for(&self, duration: f64) -> usize {
        (duration / self.dt).round().max(0.0) as usize
    }
}

#[derive(Debug, Clone, Copy)]
enum Factor {
    One,
    Half,
    Full,
}

fn accumulate(out: &mut [Complex64], c: f64, factor: Option<&[f64]>, x: &[Complex64]) {
    match factor {
        None => out.iter_mut().zip(x).for_each(|(o, v)| *o += v * c),
        Some(e) => out.iter_mut().zip(x).zip(e).for_each(|((o, v), e)| *o += v * (c * e)),
    }
}

/// One step from scratch; prefer [`Stepper`] in loops.
pub fn step(state: &FlowState, model: &Model, dt: f64, scheme: Scheme) -> Result<FlowState> {
    Stepper::new(model.clone(), dt, scheme)?.step(state)
}

/// Maximum pointwise speed `max|u|` on the collocation grid.
pub fn max_speed(state: &FlowState) -> f64 {
    let transform = crate::field::Transform::new(state.grid());
    let (u1, u2) = velocity_from_vorticity(&state.omega);
    let (a, b) = transform.from_spectral_pair(&u1, &u2);
    a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).fold(0.0, f64::max)
}

/// `dt·max|u|/Δx`.
pub fn courant_number(state: &FlowState, dt: f64) -> f64 {
    dt * max_speed(state) / state.grid().dx()
}

/// `safety · min(Δx/max|u|, cap)`; a motionless state gets `safety·cap`.
pub fn cfl_dt(state: &FlowState, safety: f64, cap: f64) -> Result<f64> {
    if !(safety > 0.0 && safety <= 1.0) {
        return Err(Error::InvalidParameter(format!("cfl safety {safety} must lie in (0, 1]")));
    }
    let umax = max_speed(state);
    let advective = if umax > 0.0 { state.grid().dx() / umax } else { f64::INFINITY };
    Ok(safety * advective.min(cap))
}

/// Outcome of a spin-up run.
#[derive(Debug, Clone)]
pub struct SpinUp {
    /// Final state, or the last finite state if the run blew up.
    pub state: FlowState,
    /// Relative drift of time-averaged `‖Λ^βθ‖²` between the two halves of the
    /// last 20% of the run.
    pub drift: f64,
    pub plateau: bool,
    pub failure: Option<Error>,
}

/// Integrates for `t_spin`, discarding the transient.
pub fn spin_up(initial: &FlowState, stepper: &Stepper, t_spin: f64, drift_threshold: f64) -> SpinUp {
    let n = stepper.steps_for(t_spin);
    if n == 0 {
        return SpinUp { state: initial.clone(), drift: f64::NAN, plateau: false, failure: None };
    }
    let beta = stepper.model().params().beta;
    let tail_start = n - (n / 5).max(2).min(n);
    let tail_len = n - tail_start;
    let mut tail = Vec::with_capacity(tail_len);
    let mut s = initial.clone();
    for i in 0..n {
        match stepper.step(&s) {
            Ok(next) => s = next,
            Err(e) => return SpinUp { state: s, drift: f64::NAN, plateau: false, failure: Some(e) },
        }
        if i >= tail_start {
            tail.push(s.theta.sobolev_norm_sq(beta));
        }
    }
    let half = tail.len() / 2;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
    let (a, b) = (mean(&tail[..half]), mean(&tail[half..]));
    let scale = a.abs().max(b.abs());
    let drift = if scale < 1e-30 { 0.0 } else { (b - a).abs() / scale };
    SpinUp { state: s, drift, plateau: drift < drift_threshold, failure: None }
}

/// Header `(magic, n, ν, κ, α, β, t)` followed by the θ̂ and ω̂ spectrum dumps.
pub fn write_checkpoint<W: Write>(w: &mut W, state: &FlowState, params: &PhysParams) -> Result<()> {
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&(state.grid().n() as u64).to_le_bytes())?;
    for v in [params.nu, params.kappa, params.alpha, params.beta, state.t] {
        w.write_all(&v.to_le_bytes())?;
    }
    state.theta.write_binary(w)?;
    state.omega.write_binary(w)
}

pub fn read_checkpoint<R: Read>(r: &mut R) -> Result<(PhysParams, FlowState)> {
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Format("bad checkpoint magic".into()));
    }
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    let n = u64::from_le_bytes(b) as usize;
    let mut vals = [0f64; 5];
    for v in vals.iter_mut() {
        r.read_exact(&mut b)?;
        *v = f64::from_le_bytes(b);
    }
    let theta = SpectralField::read_binary(r)?;
    let omega = SpectralField::read_binary(r)?;
    if theta.grid().n() != n || omega.grid().n() != n {
        return Err(Error::Format("checkpoint grid mismatch".into()));
    }
    let params = PhysParams { nu: vals[0], kappa: vals[1], alpha: vals[2], beta: vals[3] };
    Ok((params, FlowState { theta, omega, t: vals[4] }))
}
