//! Squeezing, determining-modes and trajectory-pair experiments.
//!
//! Differences are measured as `w = u₁ − u₂` (velocity) and `η = θ₁ − θ₂`.
//! The squeezing quantities are
//!
//! ```text
//! y(t) = ‖Λ^{s₂} w‖² + ‖Λ^{s₁} η‖²,   z(t) = ‖Λ^{s₂} Q_m w‖² + ‖Λ^{s₁} Q_m η‖²
//! ```
//!
//! and the determining-modes distance is `d(t) = ‖Q_m w‖² + ‖Q_m η‖²`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{EigenIndex, Projector};
use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;
use crate::integrator::{spin_up, Scheme, Stepper};
use crate::random::{random_field, rng_for};
use crate::rhs::{make_forcing, velocity_sobolev_sq, Dynamics, FlowState, ForcingSpec, Model, PhysParams};
use crate::stats::{linear_fit, spearman};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: usize,
    pub params: PhysParams,
    pub forcing: ForcingSpec,
    pub dt: f64,
    pub scheme: Scheme,
    pub t_spin: f64,
    pub horizon: f64,
    /// Size of the initial difference, `y(0) = ε²`.
    pub epsilon: f64,
    pub m_values: Vec<usize>,
    pub pairs: usize,
    pub seed: u64,
    pub s1: f64,
    pub s2: f64,
    /// `d(T) < sync_tol · d(0)` marks synchronization.
    pub sync_tol: f64,
    /// L² size of the random initial temperature and vorticity before spin-up.
    pub init_amplitude: f64,
    /// Spectral decay exponent of random fields.
    pub spectral_decay: f64,
    /// Spin-up plateau criterion on the relative drift of `‖Λ^βθ‖²`.
    pub plateau_threshold: f64,
    /// Keep every this many steps in emitted time series.
    pub sample_every: usize,
}

impl ExperimentConfig {
    /// Defaults for a grid of size `n` and the given parameters.
    pub fn new(n: usize, params: PhysParams, forcing: ForcingSpec) -> Self {
        Self {
            n,
            params,
            forcing,
            dt: 0.01,
            scheme: Scheme::IfRk4,
            t_spin: 50.0,
            horizon: 10.0,
            epsilon: 1e-3,
            m_values: vec![0, 4, 12, 24, 48, 96],
            pairs: 5,
            seed: 0,
            s1: 1.0,
            s2: 1.0,
            sync_tol: 1e-6,
            init_amplitude: 1.0,
            spectral_decay: 2.0,
            plateau_threshold: 0.05,
            sample_every: 10,
        }
    }

    pub fn validate(&self) -> Result<GridSpec> {
        let grid = GridSpec::new(self.n)?;
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return bad(format!("epsilon = {} must be nonnegative", self.epsilon));
        }
        if !(self.horizon > 0.0) {
            return bad(format!("horizon = {} must be positive", self.horizon));
        }
        if !(self.t_spin >= 0.0) {
            return bad(format!("t_spin = {} must be nonnegative", self.t_spin));
        }
        if !(self.dt > 0.0) {
            return bad(format!("dt = {} must be positive", self.dt));
        }
        if self.pairs == 0 {
            return bad("at least one trajectory pair is required".into());
        }
        if self.sample_every == 0 {
            return bad("sample_every must be at least 1".into());
        }
        let available = EigenIndex::new(grid).len();
        if let Some(&m) = self.m_values.iter().find(|&&m| m > available) {
            return Err(Error::ModeOutOfRange { m, available });
        }
        Ok(grid)
    }

    fn stepper(&self, grid: GridSpec) -> Result<Stepper> {
        let forcing = make_forcing(grid, &self.forcing, &self.params, self.s1)?;
        let model = Model::new(grid, self.params, &forcing, Dynamics::default())?;
        Stepper::new(model, self.dt, self.scheme)
    }

    /// Random initial state for `stream`, spun up for `t_spin`.
    fn base_state(&self, grid: GridSpec, stepper: &Stepper, stream: u64) -> Result<(FlowState, bool)> {
        let mut rng = rng_for(self.seed, 2 * stream);
        let th = random_field(grid, &mut rng, self.spectral_decay, grid.dealias_cut());
        let om = random_field(grid, &mut rng, self.spectral_decay, grid.dealias_cut());
        let scale = |f: SpectralField| {
            let norm = f.l2_norm();
            if norm > 0.0 {
                f.scale(self.init_amplitude / norm)
            } else {
                f
            }
        };
        let initial = FlowState::new(scale(th), scale(om), 0.0)?;
        let spun = spin_up(&initial, stepper, self.t_spin, self.plateau_threshold);
        if let Some(e) = spun.failure {
            return Err(e);
        }
        let mut state = spun.state;
        state.t = 0.0;
        Ok((state, spun.plateau))
    }

    /// Random difference `(η, ω_w)` with `y = ε²`.
    fn perturbation(&self, grid: GridSpec, stream: u64) -> (SpectralField, SpectralField) {
        let mut rng = rng_for(self.seed, 2 * stream + 1);
        let eta = random_field(grid, &mut rng, self.spectral_decay, grid.dealias_cut());
        let w = random_field(grid, &mut rng, self.spectral_decay, grid.dealias_cut());
        let y = difference_norm(&eta, &w, self.s1, self.s2);
        if y == 0.0 || self.epsilon == 0.0 {
            return (SpectralField::zeros(grid), SpectralField::zeros(grid));
        }
        let c = self.epsilon / y.sqrt();
        (eta.scale(c), w.scale(c))
    }
}

/// `‖Λ^{s₂} w‖² + ‖Λ^{s₁} η‖²` with `w` the velocity of vorticity `omega_w`.
pub fn difference_norm(eta: &SpectralField, omega_w: &SpectralField, s1: f64, s2: f64) -> f64 {
    velocity_sobolev_sq(omega_w, s2) + eta.sobolev_norm_sq(s1)
}

/// The same norm after applying `Q_m` to both differences.
pub fn projected_difference_norm(proj: &Projector, eta: &SpectralField, omega_w: &SpectralField, s1: f64, s2: f64) -> f64 {
    difference_norm(&proj.high(eta), &proj.high_velocity(omega_w), s1, s2)
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSample {
    pub t: f64,
    pub y: f64,
    /// `z` per tested `m`, in config order.
    pub z: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezePair {
    pub pair: usize,
    pub plateau: bool,
    pub y0: f64,
    pub y_t: f64,
    pub z0: Vec<f64>,
    pub z_t: Vec<f64>,
    pub series: Vec<SqueezeSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqueezingResult {
    pub m_values: Vec<usize>,
    pub pairs: Vec<SqueezePair>,
    /// `(pair, message)` for pairs aborted by blow-up.
    pub failures: Vec<(usize, String)>,
    /// `max y(T)/y(0)`; `None` when every `y(0)` vanishes.
    pub l_hat: Option<f64>,
    /// `max z(T)/y(0)` per `m`.
    pub delta_hat: Vec<Option<f64>>,
    /// Spearman correlation of `δ̂(m)` with `m`.
    pub rank_correlation: Option<f64>,
}

fn squeeze_pair(cfg: &ExperimentConfig, grid: GridSpec, stepper: &Stepper, projs: &[Projector], pair: usize) -> Result<SqueezePair> {
    let (base, plateau) = cfg.base_state(grid, stepper, pair as u64)?;
    let (eta, ww) = cfg.perturbation(grid, pair as u64);
    let mut a = base.clone();
    let mut b = FlowState { theta: base.theta.add(&eta), omega: base.omega.add(&ww), t: 0.0 };
    let measure = |a: &FlowState, b: &FlowState| {
        let eta = b.theta.sub(&a.theta);
        let w = b.omega.sub(&a.omega);
        let y = difference_norm(&eta, &w, cfg.s1, cfg.s2);
        let z: Vec<f64> = projs.iter().map(|p| projected_difference_norm(p, &eta, &w, cfg.s1, cfg.s2)).collect();
        (y, z)
    };
    let (y0, z0) = measure(&a, &b);
    let mut series = vec![SqueezeSample { t: 0.0, y: y0, z: z0.clone() }];
    let n = stepper.steps_for(cfg.horizon);
    for i in 0..n {
        a = stepper.step(&a)?;
        b = stepper.step(&b)?;
        if (i + 1) % cfg.sample_every == 0 || i + 1 == n {
            let (y, z) = measure(&a, &b);
            series.push(SqueezeSample { t: a.t, y, z });
        }
    }
    let last = series.last().cloned().expect("series has the initial sample");
    Ok(SqueezePair { pair, plateau, y0, y_t: last.y, z0, z_t: last.z, series })
}

/// Perturbed pairs on the spun-up attractor; estimates `l̂` and `δ̂(m)`.
pub fn run_squeezing(cfg: &ExperimentConfig) -> Result<SqueezingResult> {
    let grid = cfg.validate()?;
    let stepper = cfg.stepper(grid)?;
    let index = EigenIndex::new(grid);
    let projs = cfg.m_values.iter().map(|&m| index.projector(m)).collect::<Result<Vec<_>>>()?;
    let outcomes: Vec<Result<SqueezePair>> =
        (0..cfg.pairs).into_par_iter().map(|p| squeeze_pair(cfg, grid, &stepper, &projs, p)).collect();
    let mut pairs = Vec::new();
    let mut failures = Vec::new();
    for (p, o) in outcomes.into_iter().enumerate() {
        match o {
            Ok(rec) => pairs.push(rec),
            Err(e) => failures.push((p, e.to_string())),
        }
    }
    let l_hat = pairs.iter().filter_map(|r| ratio(r.y_t, r.y0)).reduce(f64::max);
    let delta_hat: Vec<Option<f64>> = (0..cfg.m_values.len())
        .map(|j| pairs.iter().filter_map(|r| ratio(r.z_t[j], r.y0)).reduce(f64::max))
        .collect();
    let (ms, ds): (Vec<f64>, Vec<f64>) = cfg
        .m_values
        .iter()
        .zip(&delta_hat)
        .filter_map(|(&m, d)| d.map(|d| (m as f64, d)))
        .unzip();
    Ok(SqueezingResult {
        m_values: cfg.m_values.clone(),
        rank_correlation: spearman(&ms, &ds),
        pairs,
        failures,
        l_hat,
        delta_hat,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminingMode {
    pub m: usize,
    pub d0: f64,
    pub d_end: f64,
    /// `d(T)/d(0)`; `None` when `d(0) = 0`.
    pub ratio: Option<f64>,
    /// Fitted exponential decay rate of `d`; `None` when `d` vanished (rate `+∞`).
    pub rate: Option<f64>,
    pub rate_infinite: bool,
    pub synchronized: bool,
    /// `d` exceeded `10⁶ d(0)`.
    pub non_determining: bool,
    /// `(t, d)` samples.
    pub series: Vec<(f64, f64)>,
}

impl DeterminingMode {
    /// Rate with `+∞` substituted for a vanished distance.
    pub fn rate_value(&self) -> f64 {
        if self.rate_infinite {
            f64::INFINITY
        } else {
            self.rate.unwrap_or(f64::NAN)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterminingResult {
    pub plateau: bool,
    pub modes: Vec<DeterminingMode>,
    /// Smallest tested `m` from which every larger tested `m` synchronizes.
    pub m_star_observed: Option<usize>,
    /// Spearman correlation of the fitted rate with `m`.
    pub rank_correlation: Option<f64>,
}

/// Relative level below which `d` is round-off of the state itself.
const NOISE_FLOOR: f64 = 1e-24;

/// Decay rate `−slope` of `ln d` over the second half of the window where
/// `d` is above the round-off floor.
fn fit_rate(times: &[f64], d: &[f64], floor: f64) -> Option<f64> {
    let end = d.iter().position(|&v| v <= floor).unwrap_or(d.len());
    let start = end / 2;
    if end - start < 2 {
        return None;
    }
    let ln: Vec<f64> = d[start..end].iter().map(|v| v.ln()).collect();
    linear_fit(&times[start..end], &ln).map(|(slope, _)| -slope)
}

fn determine_one(cfg: &ExperimentConfig, stepper: &Stepper, base: &FlowState, proj: &Projector) -> Result<DeterminingMode> {
    let grid = base.grid();
    let (eta, ww) = cfg.perturbation(grid, 0);
    let mut master = base.clone();
    let mut slave = FlowState { theta: base.theta.add(&eta), omega: base.omega.add(&ww), t: 0.0 };
    proj.replace_low(&mut slave.theta, &master.theta, false);
    proj.replace_low(&mut slave.omega, &master.omega, true);
    let distance = |m: &FlowState, s: &FlowState| {
        let eta = proj.high(&s.theta.sub(&m.theta));
        let w = proj.high_velocity(&s.omega.sub(&m.omega));
        velocity_sobolev_sq(&w, 0.0) + eta.sobolev_norm_sq(0.0)
    };
    let energy = base.theta.sobolev_norm_sq(0.0) + velocity_sobolev_sq(&base.omega, 0.0);
    let floor = NOISE_FLOOR * energy.max(f64::MIN_POSITIVE);
    let n = stepper.steps_for(cfg.horizon);
    let mut times = Vec::with_capacity(n + 1);
    let mut d = Vec::with_capacity(n + 1);
    times.push(0.0);
    d.push(distance(&master, &slave));
    let d0 = d[0];
    let mut non_determining = false;
    for _ in 0..n {
        master = stepper.step(&master)?;
        slave = stepper.step(&slave)?;
        proj.replace_low(&mut slave.theta, &master.theta, false);
        proj.replace_low(&mut slave.omega, &master.omega, true);
        let v = distance(&master, &slave);
        if v > 1e6 * d0 {
            non_determining = true;
        }
        times.push(master.t);
        d.push(v);
    }
    let d_end = *d.last().expect("nonempty");
    let ratio = ratio(d_end, d0);
    let vanished = d0 == 0.0 || d.iter().skip(1).any(|&v| v == 0.0);
    let rate = if vanished { None } else { fit_rate(&times, &d, floor) };
    let rate_infinite = vanished || (rate.is_none() && d0 > 0.0);
    let synchronized = d0 == 0.0 || d_end < cfg.sync_tol * d0;
    let series = times
        .iter()
        .zip(&d)
        .enumerate()
        .filter(|(i, _)| i % cfg.sample_every == 0 || *i == n)
        .map(|(_, (&t, &v))| (t, v))
        .collect();
    Ok(DeterminingMode { m: proj.m(), d0, d_end, ratio, rate, rate_infinite, synchronized, non_determining, series })
}

/// Master/slave synchronization with the slave's `P_m` part overwritten by
/// the master's after every step.
pub fn run_determining_modes(cfg: &ExperimentConfig) -> Result<DeterminingResult> {
    let grid = cfg.validate()?;
    let stepper = cfg.stepper(grid)?;
    let index = EigenIndex::new(grid);
    let (base, plateau) = cfg.base_state(grid, &stepper, 0)?;
    let projs = cfg.m_values.iter().map(|&m| index.projector(m)).collect::<Result<Vec<_>>>()?;
    let modes = projs
        .par_iter()
        .map(|p| determine_one(cfg, &stepper, &base, p))
        .collect::<Result<Vec<_>>>()?;
    let mut order: Vec<usize> = (0..modes.len()).collect();
    order.sort_by_key(|&i| modes[i].m);
    let mut m_star_observed = None;
    for &i in order.iter().rev() {
        if modes[i].synchronized {
            m_star_observed = Some(modes[i].m);
        } else {
            break;
        }
    }
    let ms: Vec<f64> = modes.iter().map(|r| r.m as f64).collect();
    let rates: Vec<f64> = modes.iter().map(DeterminingMode::rate_value).collect();
    let rank_correlation = if rates.iter().any(|r| r.is_nan()) { None } else { spearman(&ms, &rates) };
    Ok(DeterminingResult { plateau, modes, m_star_observed, rank_correlation })
}

/// Time series of one pair for the Gronwall-type estimate
/// `y(t) + σ ∫₀ᵗ (‖Λ^{s₂+α} w‖² + ‖Λ^{s₁+β} η‖²) ≤ y(0) K(t)`, with
/// `K(t) = C exp ∫₀ᵗ (‖Λ^{s₂+α}u₁‖² + ‖Λ^{s₂+α}u₂‖² + ‖Λ^{s₁+β}θ₂‖²)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GronwallRecord {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    /// `σ ∫₀ᵗ (‖Λ^{s₂+α} w‖² + ‖Λ^{s₁+β} η‖²)`
    pub dissipation: Vec<f64>,
    /// `ln(K(t)/C)`, the exponent integral.
    pub log_k: Vec<f64>,
    /// Fitted `C`: the supremum of the left side over `y(0)e^{log_k}`; `None` if `y(0) = 0`.
    pub c_fit: Option<f64>,
    pub holds: bool,
}

pub fn run_trajectory_pair(cfg: &ExperimentConfig, stream: u64) -> Result<GronwallRecord> {
    let grid = cfg.validate()?;
    let stepper = cfg.stepper(grid)?;
    let PhysParams { alpha, beta, .. } = cfg.params;
    let sigma = cfg.params.sigma();
    let (base, _) = cfg.base_state(grid, &stepper, stream)?;
    let (eta, ww) = cfg.perturbation(grid, stream);
    let mut a = base.clone();
    let mut b = FlowState { theta: base.theta.add(&eta), omega: base.omega.add(&ww), t: 0.0 };
    let snapshot = |a: &FlowState, b: &FlowState| {
        let eta = b.theta.sub(&a.theta);
        let w = b.omega.sub(&a.omega);
        let y = difference_norm(&eta, &w, cfg.s1, cfg.s2);
        let diss = velocity_sobolev_sq(&w, cfg.s2 + alpha) + eta.sobolev_norm_sq(cfg.s1 + beta);
        let expo = velocity_sobolev_sq(&a.omega, cfg.s2 + alpha)
            + velocity_sobolev_sq(&b.omega, cfg.s2 + alpha)
            + b.theta.sobolev_norm_sq(cfg.s1 + beta);
        (y, diss, expo)
    };
    let n = stepper.steps_for(cfg.horizon);
    let (y0, mut diss_prev, mut expo_prev) = snapshot(&a, &b);
    let (mut t, mut y, mut dissipation, mut log_k) = (vec![0.0], vec![y0], vec![0.0], vec![0.0]);
    let (mut diss_int, mut expo_int) = (0.0, 0.0);
    for _ in 0..n {
        a = stepper.step(&a)?;
        b = stepper.step(&b)?;
        let (yy, dd, ee) = snapshot(&a, &b);
        let h = stepper.dt();
        diss_int += 0.5 * h * (diss_prev + dd);
        expo_int += 0.5 * h * (expo_prev + ee);
        diss_prev = dd;
        expo_prev = ee;
        t.push(a.t);
        y.push(yy);
        dissipation.push(sigma * diss_int);
        log_k.push(expo_int);
    }
    let c_fit = (y0 > 0.0).then(|| {
        y.iter()
            .zip(&dissipation)
            .zip(&log_k)
            .map(|((yy, dd), lk)| ((yy + dd) / y0).ln() - lk)
            .fold(f64::NEG_INFINITY, f64::max)
            .exp()
    });
    let holds = match c_fit {
        None => y.iter().all(|&v| v == 0.0),
        Some(c) => y
            .iter()
            .zip(&dissipation)
            .zip(&log_k)
            .all(|((yy, dd), lk)| yy + dd <= y0 * c * lk.exp() * (1.0 + 1e-12)),
    };
    Ok(GronwallRecord { t, y, dissipation, log_k, c_fit, holds })
}
