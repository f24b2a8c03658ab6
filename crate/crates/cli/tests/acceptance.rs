//! Acceptance suite: one line per criterion, nonzero exit on any failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use boussinesq_core::random::{random_field, rng_for};
use boussinesq_core::{
    check_interpolation, check_poincare, compute_aggregates, compute_m, compute_n, determining_threshold,
    dimension_bound, energy_budget_defects, gauss_constant, make_forcing, random_samples, rho_m, run_determining_modes,
    run_squeezing, sobolev_constant, DeterminingMode, Dynamics, EigenIndex, ExperimentConfig, FlowState, Forcing,
    ForcingMode, ForcingSpec, GridSpec, Model, Phase, PhysParams, Scheme, SpectralField, Stepper,
};
use rand::Rng;

const BIN: &str = env!("CARGO_BIN_EXE_boussinesq");

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(a.abs())
    }
}

fn within(limit: Duration, start: Instant, what: &str) -> Result<(), String> {
    let el = start.elapsed();
    ensure(el < limit, format!("{what} took {el:.2?}, limit {limit:?}"))
}

fn tuned_params() -> PhysParams {
    PhysParams::new(0.1, 0.1, 0.75, 0.75, false).unwrap()
}

fn tuned_forcing() -> ForcingSpec {
    let mode = |k1, k2, phase| ForcingMode { k: [k1, k2], amplitude: 0.5, phase };
    ForcingSpec {
        modes: vec![mode(1, 0, Phase::Sin), mode(1, 1, Phase::Cos), mode(0, 2, Phase::Sin), mode(2, -1, Phase::Cos)],
    }
}

fn tuned_stepper(n: usize, dt: f64) -> Stepper {
    let grid = GridSpec::new(n).unwrap();
    let params = tuned_params();
    let forcing = make_forcing(grid, &tuned_forcing(), &params, 1.0).unwrap();
    let model = Model::new(grid, params, &forcing, Dynamics::default()).unwrap();
    Stepper::new(model, dt, Scheme::IfRk4).unwrap()
}

fn random_state(grid: GridSpec, seed: u64) -> FlowState {
    let mut rng = rng_for(seed, 0);
    let th = random_field(grid, &mut rng, 2.0, grid.dealias_cut());
    let om = random_field(grid, &mut rng, 2.0, grid.dealias_cut());
    FlowState::new(th, om, 0.0).unwrap()
}

fn unit_state(grid: GridSpec, seed: u64) -> FlowState {
    let s = random_state(grid, seed);
    let (th, om) = (s.theta.scale(1.0 / s.theta.l2_norm()), s.omega.scale(1.0 / s.omega.l2_norm()));
    FlowState::new(th, om, 0.0).unwrap()
}

/// Lanczos approximation (g = 7, 9 terms) with reflection.
fn lanczos_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const C: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return std::f64::consts::PI / ((std::f64::consts::PI * x).sin() * lanczos_gamma(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + G + 0.5;
    let a = C.iter().enumerate().skip(1).fold(C[0], |a, (i, c)| a + c / (x + i as f64));
    (2.0 * std::f64::consts::PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// `1/AGM(1, √2)`.
fn gauss_oracle() -> f64 {
    let (mut a, mut b) = (1.0f64, 2f64.sqrt());
    for _ in 0..10 {
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    1.0 / a
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let out = Command::new(BIN).arg("gauss").output().map_err(|e| e.to_string())?;
    within(Duration::from_secs(1), start, "gauss")?;
    ensure(out.status.success(), format!("exit status {}", out.status))?;
    let text = String::from_utf8_lossy(&out.stdout);
    let v: f64 = text.trim().parse().map_err(|_| format!("unparsable output {text:?}"))?;
    ensure((v - 0.8346268).abs() <= 1e-6, format!("printed {v}"))?;
    ensure((gauss_constant() - gauss_oracle()).abs() <= 1e-12, "quadrature disagrees with AGM")?;
    Ok(format!("printed {v} in {:.2?}", start.elapsed()))
}

fn criterion_2() -> Check {
    let reference = [(0.25, 0.622_323_945_187_262), (0.5, 0.423_777_208_123_757_6), (0.75, 0.384_766_644_476_192_5)];
    let mut worst = 0.0f64;
    for (s, lit) in reference {
        let pi = std::f64::consts::PI;
        let oracle = lanczos_gamma(1.0 - s) / ((4.0 * pi).powf(s) * pi.powf(s / 2.0) * lanczos_gamma(1.0 + s));
        let got = sobolev_constant(s).map_err(|e| e.to_string())?;
        ensure(rel(oracle, lit) <= 1e-12, format!("oracle at s = {s} is {oracle}, literal {lit}"))?;
        worst = worst.max(rel(got, oracle));
    }
    ensure(worst <= 1e-9, format!("worst relative error {worst:e}"))?;
    Ok(format!("worst relative error {worst:.1e}"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let grid = GridSpec::new(32).unwrap();
    let params = PhysParams::new(0.3, 0.2, 0.8, 0.6, false).unwrap();
    let model = Model::new(grid, params, &Forcing::zero(grid, &params), Dynamics { advection: false, buoyancy: false })
        .map_err(|e| e.to_string())?;
    let stepper = Stepper::new(model, 0.01, Scheme::IfRk4).map_err(|e| e.to_string())?;
    let s0 = random_state(grid, 3);
    let mut s = s0.clone();
    for _ in 0..100 {
        s = stepper.step(&s).map_err(|e| e.to_string())?;
    }
    let mut worst = 0.0f64;
    for i in 1..grid.len() {
        let (k1, k2) = grid.wavevector(i);
        let k = ((k1 * k1 + k2 * k2) as f64).sqrt();
        for (got, init, diff, exp) in
            [(&s.theta, &s0.theta, params.kappa, params.beta), (&s.omega, &s0.omega, params.nu, params.alpha)]
        {
            let exact = init.coeffs()[i] * (-diff * k.powf(2.0 * exp) * s.t).exp();
            if exact.norm() > 0.0 {
                worst = worst.max((got.coeffs()[i] - exact).norm() / exact.norm());
            } else {
                ensure(got.coeffs()[i].norm() == 0.0, format!("spurious coefficient at ({k1}, {k2})"))?;
            }
        }
    }
    within(Duration::from_secs(5), start, "pure diffusion")?;
    ensure(worst <= 1e-10, format!("worst relative error {worst:e}"))?;
    Ok(format!("worst relative error {worst:.1e}"))
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let s0 = unit_state(GridSpec::new(64).unwrap(), 5);
    let defect = |dt: f64| -> Result<f64, String> {
        let st = tuned_stepper(64, dt);
        let (_, d) = energy_budget_defects(&st, &s0, st.steps_for(10.0)).map_err(|e| e.to_string())?;
        Ok(d.iter().fold(0.0f64, |m, v| m.max(v.abs())))
    };
    let (a, b) = (defect(0.02)?, defect(0.01)?);
    let order = (a / b).log2();
    within(Duration::from_secs(120), start, "energy budget")?;
    ensure(order >= 1.8, format!("observed order {order}"))?;
    Ok(format!("max defect {a:.2e} -> {b:.2e}, order {order:.3}"))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let grid = GridSpec::new(32).unwrap();
    let samples = random_samples(grid, 11, 1000, 1.0, grid.dealias_cut());
    let p = check_poincare(&samples, 0.0, 1.0).map_err(|e| e.to_string())?;
    let i = check_interpolation(&samples, 0.0, 0.5, 1.0).map_err(|e| e.to_string())?;
    for r in [&p, &i] {
        ensure(r.samples == 1000 && r.passed, format!("{} failed: {} violations", r.id, r.violations))?;
        ensure(r.worst_relative_margin <= 1e-12, format!("{} margin {}", r.id, r.worst_relative_margin))?;
    }
    let unit = [SpectralField::sin_mode(grid, 1, 0, 1.3).unwrap(), SpectralField::cos_mode(grid, 0, -1, 0.4).unwrap()];
    let pe = check_poincare(&unit, 0.0, 1.0).map_err(|e| e.to_string())?;
    ensure(pe.worst_margin.abs() <= 1e-15, format!("unit-mode Poincare margin {}", pe.worst_margin))?;
    let modes = [SpectralField::sin_mode(grid, 3, 2, 1.0).unwrap(), SpectralField::cos_mode(grid, -4, 5, 2.0).unwrap()];
    let ie = check_interpolation(&modes, 0.25, 0.6, 1.5).map_err(|e| e.to_string())?;
    ensure(ie.worst_relative_margin.abs() <= 1e-14, format!("single-mode interpolation margin {}", ie.worst_relative_margin))?;
    within(Duration::from_secs(30), start, "inequality sweep")?;
    Ok(format!(
        "worst relative margins {:.1e} / {:.1e}, equality cases {:.1e} / {:.1e}",
        p.worst_relative_margin, i.worst_relative_margin, pe.worst_margin, ie.worst_relative_margin
    ))
}

fn criterion_6() -> Check {
    let grid = GridSpec::new(32).unwrap();
    let index = EigenIndex::new(grid);
    let mut rng = rng_for(21, 0);
    for m in [0, 1, 2, 3, 7, 8, 40, 41, 199, index.len() - 1, index.len()] {
        let p = index.projector(m).map_err(|e| e.to_string())?;
        let f = random_field(grid, &mut rng, 1.0, grid.dealias_cut());
        for velocity in [false, true] {
            let (low, high) = if velocity { (p.low_velocity(&f), p.high_velocity(&f)) } else { (p.low(&f), p.high(&f)) };
            let sum = low.add(&high);
            ensure(sum.sub(&f).l2_norm() <= 1e-14 * f.l2_norm(), format!("P + Q != I at m = {m}"))?;
            let again = if velocity { p.low_velocity(&low) } else { p.low(&low) };
            ensure(again == low, format!("P^2 != P at m = {m}"))?;
        }
    }
    let stepper = tuned_stepper(64, 0.01);
    let g64 = stepper.model().grid();
    let p = EigenIndex::new(g64).projector(48).map_err(|e| e.to_string())?;
    let mut master = random_state(g64, 1);
    let mut slave = random_state(g64, 2);
    for _ in 0..50 {
        master = stepper.step(&master).map_err(|e| e.to_string())?;
        slave = stepper.step(&slave).map_err(|e| e.to_string())?;
        p.replace_low(&mut slave.theta, &master.theta, false);
        p.replace_low(&mut slave.omega, &master.omega, true);
        ensure(p.low(&slave.theta) == p.low(&master.theta), "slaved temperature low modes differ")?;
        ensure(p.low_velocity(&slave.omega) == p.low_velocity(&master.omega), "slaved velocity low modes differ")?;
    }
    Ok("P + Q = I, P^2 = P and slaving exact over 50 steps".into())
}

fn tuned_experiment() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(64, tuned_params(), tuned_forcing());
    cfg.dt = 0.01;
    cfg.scheme = Scheme::IfRk4;
    cfg.t_spin = 20.0;
    cfg
}

/// Spearman correlation computed from scratch with average ranks.
fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|a| {
                let below = v.iter().filter(|b| *b < a).count() as f64;
                let equal = v.iter().filter(|b| *b == a).count() as f64;
                below + (equal + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let mut cfg = tuned_experiment();
    cfg.horizon = 10.0;
    cfg.m_values = vec![0, 4, 12, 24, 48, 100, 200, 400, EigenIndex::new(GridSpec::new(64).unwrap()).len()];
    let r = run_determining_modes(&cfg).map_err(|e| e.to_string())?;
    let ratio = |d: &DeterminingMode| if d.d_end == 0.0 { 0.0 } else { d.d_end / d.d0 };
    let m_star = (0..r.modes.len())
        .find(|&i| r.modes[i..].iter().all(|d| ratio(d) < 1e-6))
        .map(|i| r.modes[i].m)
        .ok_or("no tested m synchronizes")?;
    ensure(r.m_star_observed == Some(m_star), format!("reported m* {:?}, observed {m_star}", r.m_star_observed))?;
    let ms: Vec<f64> = r.modes.iter().map(|d| d.m as f64).collect();
    let rates: Vec<f64> = r.modes.iter().map(DeterminingMode::rate_value).collect();
    ensure(rates.iter().all(|v| !v.is_nan()), "a decay rate could not be fitted")?;
    let rho = spearman_oracle(&ms, &rates);
    ensure(r.rank_correlation.is_some_and(|c| (c - rho).abs() < 1e-12), "reported rank correlation differs")?;
    within(Duration::from_secs(600), start, "determining modes")?;
    ensure(rho >= 0.8, format!("rank correlation {rho}"))?;
    Ok(format!("m* = {m_star}, rank correlation {rho:.3}, {:.1?}", start.elapsed()))
}

fn criterion_8() -> Check {
    let start = Instant::now();
    let mut cfg = tuned_experiment();
    cfg.horizon = 2.0;
    cfg.pairs = 5;
    cfg.m_values = vec![0, 4, 12, 24, 48, 100, 200, 400];
    let r = run_squeezing(&cfg).map_err(|e| e.to_string())?;
    ensure(r.failures.is_empty() && r.pairs.len() == 5, format!("failed pairs {:?}", r.failures))?;
    let l_hat = r.pairs.iter().map(|p| p.y_t / p.y0).fold(0.0f64, f64::max);
    ensure(r.l_hat.is_some_and(|l| rel(l, l_hat) < 1e-12), "reported l differs")?;
    ensure(l_hat.is_finite(), "l is not finite")?;
    let delta: Vec<f64> = (0..cfg.m_values.len())
        .map(|j| r.pairs.iter().map(|p| p.z_t[j] / p.y0).fold(0.0f64, f64::max))
        .collect();
    let d_last = *delta.last().unwrap();
    ensure(d_last < 1.0, format!("delta at the largest m is {d_last}"))?;
    let ms: Vec<f64> = cfg.m_values.iter().map(|&m| m as f64).collect();
    let rho = spearman_oracle(&ms, &delta);
    ensure(rho <= -0.8, format!("rank correlation {rho}"))?;
    let dim = dimension_bound(48, l_hat.max(1.0), d_last).map_err(|e| e.to_string())?;
    ensure(dim.is_finite() && dim > 0.0, format!("dimension bound {dim}"))?;
    within(Duration::from_secs(600), start, "squeezing")?;
    Ok(format!(
        "l = {l_hat:.3}, delta(400) = {d_last:.3}, rank correlation {rho:.3}, dimension bound {dim:.1}, {:.1?}",
        start.elapsed()
    ))
}

/// `ln(e^a + e^b)`.
fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    if lo == f64::NEG_INFINITY {
        hi
    } else {
        hi + (lo - hi).exp().ln_1p()
    }
}

struct OracleBounds {
    ln_a: f64,
    ln_b: f64,
    ln_a1: f64,
    ln_m: f64,
    ln_n: f64,
}

fn bounds_oracle(p: &PhysParams, la: f64, l2: f64, la1: f64, lbf: f64) -> OracleBounds {
    let (nu, ka, al, be) = (p.nu.ln(), p.kappa.ln(), p.alpha, p.beta);
    let ln_a = la.ln() - ka;
    let ln_b = p.nu + p.kappa.ln_1p() - 3.0 * nu - 3.0 * ka + 2.0 * l2.ln();
    let ln_a1 = la1.ln() - ka;
    let ln_inv_nu = -nu;
    let ln_bt = -(2.0 * al + 1.0) / (2.0 * al - 1.0) * nu + 4.0 * al / (2.0 * al - 1.0) * ln_b;
    let m1a = log_add(-(2.0 * be + 1.0) / (2.0 * be - 1.0) * ka + 4.0 * be / (2.0 * be - 1.0) * log_add(ln_a, ln_b), ln_inv_nu);
    let m1b = log_add(-(2.0 * be + 1.0) / (2.0 * be - 1.0) * nu + 4.0 * be / (2.0 * be - 1.0) * ln_a, ln_bt);
    let mut ln_m = m1a.max(m1b);
    let d = 3.0 * al - be;
    if d > 0.0 {
        let ab = al + be - 1.0;
        let m2a = log_add(-(al + be) / ab * ka + 2.0 * (al + be) / ab * log_add(ln_a1, ln_b), ln_inv_nu);
        let m2b = log_add(-(be - al) / d * nu + 2.0 * al / d * ln_a1, ln_bt);
        ln_m = ln_m.max(m2a).max(m2b);
    }
    let ln_n = 2.0 * p.kappa.ln_1p() + 2.0 * p.nu + 2.0 * lbf.ln() + 2.0 * ln_m.exp() - 3.0 * ka - 2.0 * nu;
    OracleBounds { ln_a, ln_b, ln_a1, ln_m, ln_n }
}

fn sorted_lattice(cut: i64) -> Vec<f64> {
    let mut v: Vec<f64> = (-cut..=cut)
        .flat_map(|a| (-cut..=cut).map(move |b| (a, b)))
        .filter(|&(a, b)| a != 0 || b != 0)
        .map(|(a, b)| ((a * a + b * b) as f64).sqrt())
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

fn criterion_9() -> Check {
    let grid = GridSpec::new(64).unwrap();
    let index = EigenIndex::new(grid);
    let lattice = sorted_lattice(grid.dealias_cut() as i64);
    let mut rng = rng_for(2024, 0);
    let mut worst = 0.0f64;
    let (mut overflows, mut resolved) = (0, 0);
    let mut check = |what: &str, got: f64, want: f64| -> Result<(), String> {
        let e = rel(got, want);
        worst = worst.max(e);
        ensure(e <= 1e-9, format!("{what}: {got} vs {want}"))
    };
    for trial in 0..20 {
        let params = PhysParams::new(
            rng.random_range(0.3..4.0),
            rng.random_range(0.3..4.0),
            rng.random_range(0.55..0.95),
            rng.random_range(0.55..0.95),
            false,
        )
        .unwrap();
        let amp = 10f64.powf(rng.random_range(-4.0..0.5));
        let k = [rng.random_range(1..4i64), rng.random_range(-3..4i64)];
        let spec = ForcingSpec { modes: vec![ForcingMode { k, amplitude: amp, phase: Phase::Sin }] };
        let forcing = make_forcing(grid, &spec, &params, 1.0).map_err(|e| e.to_string())?;
        let (la, la1) = (forcing.norm_l_a.unwrap(), forcing.norm_l_a1.unwrap());
        let o = bounds_oracle(&params, la, forcing.norm_l2, la1, forcing.norm_lambda_beta);
        let agg = compute_aggregates(&forcing, &params).map_err(|e| e.to_string())?;
        check("A", agg.a, o.ln_a.exp())?;
        check("B", agg.b, o.ln_b.exp())?;
        check("A1", agg.a1, o.ln_a1.exp())?;
        let ex = compute_m(&params, &agg);
        let n = compute_n(&params, forcing.norm_lambda_beta, ex.m);
        let oracle_overflow = o.ln_n >= f64::MAX.ln();
        ensure(n.overflow == oracle_overflow, format!("trial {trial}: overflow flag {} vs {oracle_overflow}", n.overflow))?;
        if o.ln_m < f64::MAX.ln() {
            check("M", ex.m, o.ln_m.exp())?;
        } else {
            ensure(ex.m == f64::INFINITY, format!("trial {trial}: M = {} should overflow", ex.m))?;
        }
        let c_free = rng.random_range(0.01..2.0);
        let th = determining_threshold(&params, n.value, c_free, &index).map_err(|e| e.to_string())?;
        if oracle_overflow {
            overflows += 1;
            ensure(th.m_star.is_none(), format!("trial {trial}: overflowed N resolved"))?;
        } else {
            let nv = o.ln_n.exp();
            check("N", n.value, nv)?;
            let base = 2.0 * c_free * (params.kappa * nv.sqrt() + nv + 1.0) / (params.kappa * params.nu);
            check("threshold", th.base, base)?;
            let lambda = (base.ln() / (params.alpha - 0.5)).exp();
            check("threshold lambda", th.lambda, lambda)?;
            let below = lattice.iter().filter(|&&l| l < lambda).count();
            let want = (below < index.len()).then_some(below);
            ensure(th.m_star == want, format!("trial {trial}: m* {:?} vs {want:?}", th.m_star))?;
            resolved += usize::from(want.is_some());
        }
        for m in [1, 2, 5, 17, 100, index.len()] {
            let lm = lattice[m - 1];
            let want = 0.5 * f64::min(params.nu * lm.powf(params.alpha), params.kappa * lm.powf(params.beta));
            check("rho_m", rho_m(&params, index.eigenvalue_of(m).map_err(|e| e.to_string())?), want)?;
        }
        let codim = rng.random_range(1..2000u64);
        let l = rng.random_range(1.0..50.0);
        let delta = rng.random_range(0.01..0.99);
        let g = gauss_oracle();
        let want = codim as f64 * (8.0 * g * g * l * l / (1.0 - delta * delta)).ln() / (2.0 / (1.0 + delta * delta)).ln();
        check("dimension bound", dimension_bound(codim, l, delta).map_err(|e| e.to_string())?, want)?;
    }
    ensure(dimension_bound(10, 2.0, 0.0).is_err() && dimension_bound(10, 0.5, 0.5).is_err(), "invalid inputs accepted")?;
    Ok(format!("20 parameter sets, {overflows} overflowed, {resolved} resolved, worst relative error {worst:.1e}"))
}

const DETERMINISM_CONFIG: &str = r#"
[run]
seed = 17

[grid]
n = 16

[params]
viscosity = 0.2
diffusivity = 0.2
alpha = 0.75
beta = 0.75

[forcing]
modes = "sin 1 0 0.5; cos 1 1 0.5"

[integrator]
dt = 0.01
t_end = 0.5

[experiment]
t_spin = 0.5
horizon = 0.3
m_values = [0, 8, 24]
pairs = 2

[inequalities]
samples = 40
pair_samples = 6
gronwall_instances = 4
"#;

fn run_twice(dir: &Path, config: &Path, command: &str) -> Result<(), String> {
    let mut manifests = Vec::new();
    for round in 0..2 {
        let out = dir.join(format!("{command}-{round}"));
        let status = Command::new(BIN)
            .arg(command)
            .arg("--config")
            .arg(config)
            .arg("--out")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?
            .status;
        ensure(matches!(status.code(), Some(0) | Some(4)), format!("{command} exited with {status}"))?;
        let manifest = std::fs::read_to_string(out.join("MANIFEST")).map_err(|e| format!("{command}: {e}"))?;
        ensure(!manifest.is_empty(), format!("{command}: empty manifest"))?;
        manifests.push(manifest);
    }
    ensure(manifests[0] == manifests[1], format!("{command}: manifests differ"))
}

fn criterion_10() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("run.toml");
    std::fs::write(&config, DETERMINISM_CONFIG).map_err(|e| e.to_string())?;
    let commands = ["simulate", "squeeze", "determine", "bounds", "inequalities", "gauss"];
    for c in commands {
        run_twice(dir.path(), &config, c)?;
    }
    Ok(format!("identical manifests for {}", commands.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("Gauss constant", criterion_1),
        ("sharp Sobolev constant", criterion_2),
        ("exact linear decay", criterion_3),
        ("energy budget order", criterion_4),
        ("Poincare and interpolation", criterion_5),
        ("projection algebra and slaving", criterion_6),
        ("determining modes", criterion_7),
        ("squeezing", criterion_8),
        ("bound calculators", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
