//! Subcommand dispatch.

use std::fmt::Write as _;

use boussinesq_core::random::{random_field, rng_for};
use boussinesq_core::{
    bound_report, check_commutator, check_interpolation, check_kato_ponce, check_poincare, check_sobolev,
    check_uniform_gronwall, courant_number, dimension_bound, gauss_constant, make_forcing, monitor_apriori,
    norm_record, random_gronwall_instance, random_samples, read_checkpoint, run_determining_modes, run_squeezing,
    write_checkpoint, AprioriMargins, BudgetTracker, DeterminingMode, Dynamics, EigenIndex, FlowState,
    InequalityReport, Model, NormRecord, SqueezePair, Stepper,
};
use serde::Serialize;

use crate::config::{format_forcing, Command, RunConfig};
use crate::error::CliError;
use crate::manifest::Artifacts;

pub const RESOLVED_CONFIG: &str = "config.resolved.toml";
pub const ERROR_RECORD: &str = "error.json";

/// Result of a subcommand before anything is written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub artifacts: Artifacts,
    pub stdout: String,
    /// Failure reported after the outputs are written.
    pub deferred: Option<CliError>,
}

impl Outcome {
    fn new() -> Self {
        Self { artifacts: Artifacts::new(), stdout: String::new(), deferred: None }
    }
}

/// Runs the subcommand and returns its outputs without touching the disk.
pub fn execute(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut out = match cfg.command {
        Command::Simulate => simulate(cfg)?,
        Command::Squeeze => squeeze(cfg)?,
        Command::Determine => determine(cfg)?,
        Command::Bounds => bounds(cfg)?,
        Command::Inequalities => inequalities(cfg)?,
        Command::Gauss => gauss(cfg),
    };
    out.artifacts.add_text(RESOLVED_CONFIG, cfg.resolved_text());
    Ok(out)
}

/// Whether the run writes files at all; `gauss` only does with an explicit
/// output directory.
pub fn writes_files(cfg: &RunConfig) -> bool {
    cfg.command != Command::Gauss || cfg.file.run.out.is_some()
}

/// Executes and writes outputs plus `MANIFEST`. A deferred failure is
/// returned inside the outcome after its error record is written; immediate
/// failures leave only the resolved config and the error record.
pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    match execute(cfg) {
        Ok(mut out) => {
            if let Some(e) = &out.deferred {
                out.artifacts.add_text(ERROR_RECORD, e.to_json() + "\n");
            }
            if writes_files(cfg) {
                out.artifacts.write_to(&cfg.out_dir)?;
            }
            Ok(out)
        }
        Err(e) => {
            if writes_files(cfg) {
                let mut a = Artifacts::new();
                a.add_text(RESOLVED_CONFIG, cfg.resolved_text());
                a.add_text(ERROR_RECORD, e.to_json() + "\n");
                a.write_to(&cfg.out_dir)?;
            }
            Err(e)
        }
    }
}

fn csv_float(v: f64) -> String {
    format!("{v:?}")
}

fn initial_state(cfg: &RunConfig) -> Result<FlowState, CliError> {
    let grid = cfg.grid;
    if let Some(path) = &cfg.file.initial.checkpoint {
        let mut file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("checkpoint {path}: {e}")))?;
        let (params, state) = read_checkpoint(&mut file)?;
        if state.grid() != grid {
            return Err(CliError::Config(format!(
                "checkpoint grid n = {} differs from [grid] n = {}",
                state.grid().n(),
                grid.n()
            )));
        }
        if params != cfg.params {
            return Err(CliError::Config("checkpoint parameters differ from [params]".into()));
        }
        return Ok(state);
    }
    let seed = cfg.seed.expect("seed validated for random initial data");
    let mut rng = rng_for(seed, 0);
    let init = &cfg.file.initial;
    let th = random_field(grid, &mut rng, init.spectral_decay, grid.dealias_cut());
    let om = random_field(grid, &mut rng, init.spectral_decay, grid.dealias_cut());
    let unit = |f: boussinesq_core::SpectralField| {
        let n = f.l2_norm();
        if n > 0.0 {
            f.scale(init.amplitude / n)
        } else {
            f
        }
    };
    Ok(FlowState::new(unit(th), unit(om), 0.0)?)
}

#[derive(Serialize)]
struct SimulateSummary {
    t_final: f64,
    steps: usize,
    dt: f64,
    scheme: boussinesq_core::Scheme,
    forcing: String,
    max_abs_budget_defect: f64,
    max_courant: f64,
    mean_removals: usize,
    apriori: Option<AprioriMargins>,
    final_norms: NormRecord,
}

fn simulate(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let o = &cfg.file.output;
    let forcing = make_forcing(cfg.grid, &cfg.forcing, &cfg.params, o.s1)?;
    let model = Model::new(cfg.grid, cfg.params, &forcing, Dynamics::default())?;
    let stepper = Stepper::new(model, cfg.integrator.dt, cfg.integrator.scheme)?;
    let transform = stepper.model().transform().clone();
    let mut state = initial_state(cfg)?;
    let dt = cfg.integrator.dt;
    let mut max_courant = courant_number(&state, dt);
    if max_courant > 1.0 {
        return Err(CliError::Numerical(format!("initial Courant number {max_courant} exceeds 1; reduce dt")));
    }
    let n = stepper.steps_for(cfg.integrator.t_end);
    let mut tracker = BudgetTracker::new(&stepper, &state);
    let mut max_defect = 0.0f64;
    let mut records = vec![norm_record(&state, &cfg.params, o.s1, o.s2, &o.lp, &transform)?];
    let mut defects = vec![0.0];
    let mut courants = vec![max_courant];
    for i in 1..=n {
        state = stepper.step(&state)?;
        let defect = tracker.update(&state);
        max_defect = max_defect.max(defect.abs());
        let recheck = cfg.integrator.recheck_every > 0 && i % cfg.integrator.recheck_every == 0;
        let sample = i % o.sample_every == 0 || i == n;
        if recheck || sample {
            let c = courant_number(&state, dt);
            max_courant = max_courant.max(c);
            if c > 1.0 {
                return Err(boussinesq_core::Error::CflViolation { t: state.t, courant: c }.into());
            }
            if sample {
                records.push(norm_record(&state, &cfg.params, o.s1, o.s2, &o.lp, &transform)?);
                defects.push(defect);
                courants.push(c);
            }
        }
    }

    let mut out = Outcome::new();
    let mut csv = String::from(
        "t,theta,lambda_beta_theta,lambda_2beta_theta,lambda_s1_theta,u,lambda_alpha_u,lambda_2alpha_u,lambda_s2_u",
    );
    for p in &o.lp {
        write!(csv, ",theta_l{p}").unwrap();
    }
    csv.push_str(",budget_defect,courant\n");
    for ((r, d), c) in records.iter().zip(&defects).zip(&courants) {
        let cols = [
            r.t,
            r.theta,
            r.lambda_beta_theta,
            r.lambda_2beta_theta,
            r.lambda_s1_theta,
            r.u,
            r.lambda_alpha_u,
            r.lambda_2alpha_u,
            r.lambda_s2_u,
        ];
        let row: Vec<String> = cols
            .iter()
            .copied()
            .chain(r.lp_theta.iter().map(|x| x.1))
            .chain([*d, *c])
            .map(csv_float)
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    out.artifacts.add_text("norms.csv", csv);
    for (name, field) in [("spectrum_theta.csv", &state.theta), ("spectrum_omega.csv", &state.omega)] {
        let mut buf = Vec::new();
        field.write_csv(&mut buf)?;
        out.artifacts.add(name, buf);
    }
    let mut ckpt = Vec::new();
    write_checkpoint(&mut ckpt, &state, &cfg.params)?;
    out.artifacts.add("checkpoint.bin", ckpt);
    let apriori = bound_report(&forcing, &cfg.params, cfg.file.bounds.c_free, &EigenIndex::new(cfg.grid), &[], None)
        .ok()
        .and_then(|rep| monitor_apriori(&records, &rep).ok());
    let summary = SimulateSummary {
        t_final: state.t,
        steps: n,
        dt,
        scheme: cfg.integrator.scheme,
        forcing: format_forcing(&cfg.forcing),
        max_abs_budget_defect: max_defect,
        max_courant,
        mean_removals: transform.mean_removals(),
        apriori,
        final_norms: records.last().cloned().expect("initial record"),
    };
    out.artifacts.add_json("summary.json", &summary);
    writeln!(out.stdout, "simulated {n} steps to t = {}", state.t).unwrap();
    writeln!(out.stdout, "max |budget defect| = {max_defect:e}, max Courant = {max_courant:.4}").unwrap();
    Ok(out)
}

#[derive(Serialize)]
struct PairSummary {
    pair: usize,
    plateau: bool,
    y0: f64,
    y_t: f64,
    z0: Vec<f64>,
    z_t: Vec<f64>,
}

impl From<&SqueezePair> for PairSummary {
    fn from(p: &SqueezePair) -> Self {
        Self { pair: p.pair, plateau: p.plateau, y0: p.y0, y_t: p.y_t, z0: p.z0.clone(), z_t: p.z_t.clone() }
    }
}

#[derive(Serialize)]
struct DimensionEntry {
    m: usize,
    delta_hat: f64,
    bound: f64,
}

#[derive(Serialize)]
struct SqueezeSummary {
    m_values: Vec<usize>,
    l_hat: Option<f64>,
    delta_hat: Vec<Option<f64>>,
    rank_correlation: Option<f64>,
    /// Dimension bound with codimension `m` wherever `δ̂(m) ∈ (0,1)` and `l̂ ≥ 1`.
    dimension_bounds: Vec<DimensionEntry>,
    pairs: Vec<PairSummary>,
    failures: Vec<(usize, String)>,
}

fn squeeze(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = run_squeezing(&cfg.experiment)?;
    if r.pairs.is_empty() {
        let msgs: Vec<String> = r.failures.iter().map(|(p, m)| format!("pair {p}: {m}")).collect();
        return Err(CliError::Numerical(format!("every pair failed: {}", msgs.join("; "))));
    }
    let mut out = Outcome::new();
    let mut csv = String::from("pair,t,y");
    for m in &r.m_values {
        write!(csv, ",z_m{m}").unwrap();
    }
    csv.push('\n');
    for p in &r.pairs {
        for s in &p.series {
            let mut row = vec![p.pair.to_string(), csv_float(s.t), csv_float(s.y)];
            row.extend(s.z.iter().map(|&z| csv_float(z)));
            csv.push_str(&row.join(","));
            csv.push('\n');
        }
    }
    out.artifacts.add_text("squeeze.csv", csv);
    let dimension_bounds = r
        .m_values
        .iter()
        .zip(&r.delta_hat)
        .filter_map(|(&m, d)| {
            let (l, d) = (r.l_hat?, (*d)?);
            dimension_bound(m as u64, l, d).ok().map(|bound| DimensionEntry { m, delta_hat: d, bound })
        })
        .collect();
    let summary = SqueezeSummary {
        m_values: r.m_values.clone(),
        l_hat: r.l_hat,
        delta_hat: r.delta_hat.clone(),
        rank_correlation: r.rank_correlation,
        dimension_bounds,
        pairs: r.pairs.iter().map(PairSummary::from).collect(),
        failures: r.failures.clone(),
    };
    out.artifacts.add_json("squeeze.json", &summary);
    writeln!(out.stdout, "l_hat = {:?}", r.l_hat).unwrap();
    for (m, d) in r.m_values.iter().zip(&r.delta_hat) {
        writeln!(out.stdout, "m = {m:>6}  delta_hat = {d:?}").unwrap();
    }
    writeln!(out.stdout, "rank correlation = {:?}", r.rank_correlation).unwrap();
    Ok(out)
}

#[derive(Serialize)]
struct ModeSummary {
    m: usize,
    d0: f64,
    d_end: f64,
    ratio: Option<f64>,
    rate: Option<f64>,
    rate_infinite: bool,
    synchronized: bool,
    non_determining: bool,
}

impl From<&DeterminingMode> for ModeSummary {
    fn from(m: &DeterminingMode) -> Self {
        Self {
            m: m.m,
            d0: m.d0,
            d_end: m.d_end,
            ratio: m.ratio,
            rate: m.rate,
            rate_infinite: m.rate_infinite,
            synchronized: m.synchronized,
            non_determining: m.non_determining,
        }
    }
}

#[derive(Serialize)]
struct DetermineSummary {
    plateau: bool,
    m_star_observed: Option<usize>,
    rank_correlation: Option<f64>,
    modes: Vec<ModeSummary>,
}

fn determine(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let r = run_determining_modes(&cfg.experiment)?;
    let mut out = Outcome::new();
    let mut csv = String::from("m,t,d\n");
    for m in &r.modes {
        for &(t, d) in &m.series {
            writeln!(csv, "{},{},{}", m.m, csv_float(t), csv_float(d)).unwrap();
        }
    }
    out.artifacts.add_text("determine.csv", csv);
    let summary = DetermineSummary {
        plateau: r.plateau,
        m_star_observed: r.m_star_observed,
        rank_correlation: r.rank_correlation,
        modes: r.modes.iter().map(ModeSummary::from).collect(),
    };
    out.artifacts.add_json("determine.json", &summary);
    for m in &r.modes {
        writeln!(
            out.stdout,
            "m = {:>6}  d(T)/d(0) = {:<24}  rate = {:<24}  synchronized = {}",
            m.m,
            format!("{:?}", m.ratio),
            if m.rate_infinite { "inf".to_string() } else { format!("{:?}", m.rate) },
            m.synchronized
        )
        .unwrap();
    }
    writeln!(out.stdout, "observed m* = {:?}, rank correlation = {:?}", r.m_star_observed, r.rank_correlation)
        .unwrap();
    Ok(out)
}

fn bounds(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let b = &cfg.file.bounds;
    let forcing = make_forcing(cfg.grid, &cfg.forcing, &cfg.params, b.s1)?;
    let squeeze = match (b.squeeze_l, b.squeeze_delta) {
        (Some(l), Some(d)) => Some((l, d)),
        (None, None) => None,
        _ => return Err(CliError::Config("[bounds] squeeze_l and squeeze_delta must be given together".into())),
    };
    let report = bound_report(&forcing, &cfg.params, b.c_free, &EigenIndex::new(cfg.grid), &b.rho_at, squeeze)?;
    let mut out = Outcome::new();
    out.artifacts.add_json("bounds.json", &report);
    out.stdout = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if report.unresolved {
        out.deferred = Some(CliError::Unresolved(format!(
            "determining-mode threshold lambda = {:e} is not resolved at n = {}{}",
            report.threshold_lambda,
            cfg.grid.n(),
            if report.n_overflow { " (N overflowed)" } else { "" }
        )));
    }
    Ok(out)
}

fn merge_reports(id: &str, reports: &[InequalityReport]) -> InequalityReport {
    InequalityReport {
        id: id.to_string(),
        samples: reports.iter().map(|r| r.samples).sum(),
        worst_margin: reports.iter().map(|r| r.worst_margin).fold(f64::NEG_INFINITY, f64::max),
        worst_relative_margin: reports.iter().map(|r| r.worst_relative_margin).fold(f64::NEG_INFINITY, f64::max),
        fitted_constant: None,
        reference_constant: None,
        scaling_defect: None,
        violations: reports.iter().map(|r| r.violations).sum(),
        passed: reports.iter().all(|r| r.passed),
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(csv_float).unwrap_or_default()
}

fn inequalities(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let q = &cfg.file.inequalities;
    let seed = cfg.seed.expect("seed validated");
    let support = if q.support == 0 { cfg.grid.dealias_cut() } else { q.support };
    let wants = |id: &str| q.checks.iter().any(|c| c == id);
    let singles = random_samples(cfg.grid, seed, q.samples, q.gamma, support);
    let pairs = || {
        (
            random_samples(cfg.grid, seed.wrapping_add(1), q.pair_samples, q.gamma, support),
            random_samples(cfg.grid, seed.wrapping_add(2), q.pair_samples, q.gamma, support),
        )
    };
    let mut reports = Vec::new();
    if wants("poincare") {
        reports.push(check_poincare(&singles, q.s1, q.s2)?);
    }
    if wants("interpolation") {
        reports.push(check_interpolation(&singles, q.s1, q.s, q.s2)?);
    }
    if wants("sobolev") {
        reports.push(check_sobolev(&singles, q.sobolev_s)?);
    }
    if wants("kato_ponce") || wants("commutator") {
        let (g, h) = pairs();
        if wants("kato_ponce") {
            reports.push(check_kato_ponce(&g, &h, q.kato_ponce_s, RunConfig::holder(q.kato_ponce_exponents))?);
        }
        if wants("commutator") {
            reports.push(check_commutator(&g, &h, q.commutator_s, RunConfig::holder(q.commutator_exponents))?);
        }
    }
    if wants("uniform_gronwall") {
        let each = (0..q.gronwall_instances as u64)
            .map(|i| {
                let inst = random_gronwall_instance(seed, i, q.gronwall_intervals, q.gronwall_dt)?;
                check_uniform_gronwall(&inst, q.gronwall_window)
            })
            .collect::<Result<Vec<_>, _>>()?;
        reports.push(merge_reports("uniform_gronwall", &each));
    }

    let mut out = Outcome::new();
    let mut csv = String::from(
        "id,samples,worst_margin,worst_relative_margin,fitted_constant,reference_constant,scaling_defect,violations,passed\n",
    );
    let mut table = format!(
        "{:<18} {:>8} {:>24} {:>24} {:>12} {:>10} {:>6}\n",
        "inequality", "samples", "worst margin", "worst rel. margin", "fitted C", "violations", "pass"
    );
    for r in &reports {
        writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            r.id,
            r.samples,
            csv_float(r.worst_margin),
            csv_float(r.worst_relative_margin),
            opt(r.fitted_constant),
            opt(r.reference_constant),
            opt(r.scaling_defect),
            r.violations,
            r.passed
        )
        .unwrap();
        writeln!(
            table,
            "{:<18} {:>8} {:>24e} {:>24e} {:>12} {:>10} {:>6}",
            r.id,
            r.samples,
            r.worst_margin,
            r.worst_relative_margin,
            r.fitted_constant.map(|c| format!("{c:.6}")).unwrap_or_else(|| "-".into()),
            r.violations,
            if r.passed { "yes" } else { "NO" }
        )
        .unwrap();
    }
    out.artifacts.add_text("inequalities.csv", csv);
    out.artifacts.add_json("inequalities.json", &reports);
    out.stdout = table;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    if !failed.is_empty() {
        out.deferred = Some(CliError::CheckFailed(format!("failed: {}", failed.join(", "))));
    }
    Ok(out)
}

#[derive(Serialize)]
struct GaussOutput {
    value: f64,
    digits: usize,
    text: String,
}

fn gauss(cfg: &RunConfig) -> Outcome {
    let value = gauss_constant();
    let digits = cfg.file.gauss.digits;
    let text = format!("{value:.digits$}");
    let mut out = Outcome::new();
    out.stdout = format!("{text}\n");
    out.artifacts.add_json("gauss.json", &GaussOutput { value, digits, text });
    out
}
