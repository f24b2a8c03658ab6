//! Sectioned `key = value` run configuration (TOML syntax, flat sections).
//!
//! ```toml
//! [run]
//! seed = 7
//!
//! [grid]
//! n = 32
//!
//! [params]
//! viscosity = 0.1
//! diffusivity = 0.1
//! alpha = 0.75
//! beta = 0.75
//!
//! [forcing]
//! modes = "sin 1 0 1.0; cos 0 2 0.5"
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use boussinesq_core::{
    ExperimentConfig, ForcingMode, ForcingSpec, GridSpec, HolderExponents, IntegratorConfig, Phase, PhysParams, Scheme,
};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Simulate,
    Squeeze,
    Determine,
    Bounds,
    Inequalities,
    Gauss,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Squeeze => "squeeze",
            Command::Determine => "determine",
            Command::Bounds => "bounds",
            Command::Inequalities => "inequalities",
            Command::Gauss => "gauss",
        }
    }

    pub const ALL: [Command; 6] =
        [Command::Simulate, Command::Squeeze, Command::Determine, Command::Bounds, Command::Inequalities, Command::Gauss];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn is_randomized(self) -> bool {
        matches!(self, Command::Simulate | Command::Squeeze | Command::Determine | Command::Inequalities)
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "simulate" => Ok(Command::Simulate),
            "squeeze" => Ok(Command::Squeeze),
            "determine" => Ok(Command::Determine),
            "bounds" => Ok(Command::Bounds),
            "inequalities" => Ok(Command::Inequalities),
            "gauss" => Ok(Command::Gauss),
            other => Err(CliError::Config(format!("unknown subcommand `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSection {
    #[serde(alias = "nu")]
    pub viscosity: f64,
    #[serde(alias = "kappa")]
    pub diffusivity: f64,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default)]
    pub allow_out_of_range: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForcingSection {
    /// `phase k1 k2 amplitude` terms separated by `;`.
    pub modes: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegratorSection {
    pub dt: f64,
    pub scheme: Scheme,
    pub cfl_safety: f64,
    pub t_end: f64,
    pub dt_max: f64,
    pub recheck_every: usize,
}

impl Default for IntegratorSection {
    fn default() -> Self {
        let d = IntegratorConfig::default();
        Self {
            dt: d.dt,
            scheme: d.scheme,
            cfl_safety: d.cfl_safety,
            t_end: d.t_end,
            dt_max: d.dt_max,
            recheck_every: d.recheck_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialSection {
    /// L² size of the random initial temperature and vorticity.
    pub amplitude: f64,
    pub spectral_decay: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
}

impl Default for InitialSection {
    fn default() -> Self {
        Self { amplitude: 1.0, spectral_decay: 2.0, checkpoint: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputSection {
    pub sample_every: usize,
    pub lp: Vec<f64>,
    pub s1: f64,
    pub s2: f64,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { sample_every: 10, lp: vec![4.0, f64::INFINITY], s1: 1.0, s2: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub t_spin: f64,
    pub horizon: f64,
    pub epsilon: f64,
    pub m_values: Vec<usize>,
    pub pairs: usize,
    pub s1: f64,
    pub s2: f64,
    pub sync_tol: f64,
    pub init_amplitude: f64,
    pub spectral_decay: f64,
    pub plateau_threshold: f64,
    pub sample_every: usize,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        let params = PhysParams { nu: 1.0, kappa: 1.0, alpha: 0.75, beta: 0.75 };
        let d = ExperimentConfig::new(32, params, ForcingSpec::default());
        Self {
            t_spin: d.t_spin,
            horizon: d.horizon,
            epsilon: d.epsilon,
            m_values: d.m_values,
            pairs: d.pairs,
            s1: d.s1,
            s2: d.s2,
            sync_tol: d.sync_tol,
            init_amplitude: d.init_amplitude,
            spectral_decay: d.spectral_decay,
            plateau_threshold: d.plateau_threshold,
            sample_every: d.sample_every,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BoundsSection {
    pub c_free: f64,
    pub rho_at: Vec<usize>,
    pub s1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeeze_l: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub squeeze_delta: Option<f64>,
}

impl Default for BoundsSection {
    fn default() -> Self {
        Self { c_free: 1.0, rho_at: vec![1], s1: 1.0, squeeze_l: None, squeeze_delta: None }
    }
}

pub const INEQUALITY_CHECKS: [&str; 6] =
    ["poincare", "interpolation", "sobolev", "kato_ponce", "commutator", "uniform_gronwall"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InequalitySection {
    pub checks: Vec<String>,
    pub samples: usize,
    pub pair_samples: usize,
    pub gamma: f64,
    /// Largest `max(|k₁|,|k₂|)` of sample fields; 0 means the dealias cut.
    pub support: usize,
    pub s1: f64,
    pub s: f64,
    pub s2: f64,
    pub sobolev_s: f64,
    pub kato_ponce_s: f64,
    /// `[p₁, p₂, q₁, q₂]`
    pub kato_ponce_exponents: [f64; 4],
    pub commutator_s: f64,
    pub commutator_exponents: [f64; 4],
    pub gronwall_instances: usize,
    pub gronwall_intervals: usize,
    pub gronwall_dt: f64,
    pub gronwall_window: usize,
}

impl Default for InequalitySection {
    fn default() -> Self {
        Self {
            checks: INEQUALITY_CHECKS.iter().map(|s| s.to_string()).collect(),
            samples: 1000,
            pair_samples: 200,
            gamma: 2.0,
            support: 0,
            s1: 0.0,
            s: 0.5,
            s2: 1.0,
            sobolev_s: 0.5,
            kato_ponce_s: 0.75,
            kato_ponce_exponents: [2.0, f64::INFINITY, 2.0, f64::INFINITY],
            commutator_s: 0.5,
            commutator_exponents: [4.0, 4.0, 4.0, 4.0],
            gronwall_instances: 100,
            gronwall_intervals: 500,
            gronwall_dt: 0.01,
            gronwall_window: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GaussSection {
    pub digits: usize,
}

impl Default for GaussSection {
    fn default() -> Self {
        Self { digits: 7 }
    }
}

/// The file as written, with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub run: RunSection,
    pub grid: GridSection,
    pub params: ParamsSection,
    #[serde(default)]
    pub forcing: ForcingSection,
    #[serde(default)]
    pub integrator: IntegratorSection,
    #[serde(default)]
    pub initial: InitialSection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    #[serde(default)]
    pub inequalities: InequalitySection,
    #[serde(default)]
    pub gauss: GaussSection,
}

const KNOWN_KEYS: &[(&str, &[&str])] = &[
    ("run", &["command", "seed", "out", "threads"]),
    ("grid", &["n"]),
    ("params", &["viscosity", "nu", "diffusivity", "kappa", "alpha", "beta", "allow_out_of_range"]),
    ("forcing", &["modes"]),
    ("integrator", &["dt", "scheme", "cfl_safety", "t_end", "dt_max", "recheck_every"]),
    ("initial", &["amplitude", "spectral_decay", "checkpoint"]),
    ("output", &["sample_every", "lp", "s1", "s2"]),
    (
        "experiment",
        &[
            "t_spin",
            "horizon",
            "epsilon",
            "m_values",
            "pairs",
            "s1",
            "s2",
            "sync_tol",
            "init_amplitude",
            "spectral_decay",
            "plateau_threshold",
            "sample_every",
        ],
    ),
    ("bounds", &["c_free", "rho_at", "s1", "squeeze_l", "squeeze_delta"]),
    (
        "inequalities",
        &[
            "checks",
            "samples",
            "pair_samples",
            "gamma",
            "support",
            "s1",
            "s",
            "s2",
            "sobolev_s",
            "kato_ponce_s",
            "kato_ponce_exponents",
            "commutator_s",
            "commutator_exponents",
            "gronwall_instances",
            "gronwall_intervals",
            "gronwall_dt",
            "gronwall_window",
        ],
    ),
    ("gauss", &["digits"]),
];

fn closest<'a>(word: &str, candidates: impl IntoIterator<Item = &'a str>) -> Option<&'a str> {
    candidates
        .into_iter()
        .map(|c| (strsim::normalized_damerau_levenshtein(word, c), c))
        .filter(|(score, _)| *score >= 0.5)
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(_, c)| c)
}

/// Rejects unknown sections and keys with a did-you-mean suggestion.
fn check_keys(table: &toml::Table) -> Result<(), CliError> {
    for (section, value) in table {
        let Some((_, keys)) = KNOWN_KEYS.iter().find(|(s, _)| s == section) else {
            let hint = closest(section, KNOWN_KEYS.iter().map(|(s, _)| *s))
                .map(|s| format!("; did you mean [{s}]?"))
                .unwrap_or_default();
            return Err(CliError::Config(format!("unknown section [{section}]{hint}")));
        };
        let Some(inner) = value.as_table() else {
            return Err(CliError::Config(format!("`{section}` must be a section, not a value")));
        };
        for key in inner.keys() {
            if !keys.contains(&key.as_str()) {
                let hint = closest(key, keys.iter().copied())
                    .map(|k| format!("; did you mean `{k}`?"))
                    .unwrap_or_default();
                return Err(CliError::Config(format!("unknown key `{key}` in [{section}]{hint}")));
            }
        }
    }
    Ok(())
}

/// Parses `phase k1 k2 amplitude; ...`.
pub fn parse_forcing(text: &str) -> Result<ForcingSpec, CliError> {
    let mut modes = Vec::new();
    for term in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let parts: Vec<&str> = term.split_whitespace().collect();
        let bad = || CliError::Config(format!("forcing term `{term}` must read `sin|cos k1 k2 amplitude`"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let phase = match parts[0] {
            "sin" => Phase::Sin,
            "cos" => Phase::Cos,
            _ => return Err(bad()),
        };
        let k1 = parts[1].parse().map_err(|_| bad())?;
        let k2 = parts[2].parse().map_err(|_| bad())?;
        let amplitude = parts[3].parse().map_err(|_| bad())?;
        modes.push(ForcingMode { k: [k1, k2], amplitude, phase });
    }
    Ok(ForcingSpec { modes })
}

/// Inverse of [`parse_forcing`].
pub fn format_forcing(spec: &ForcingSpec) -> String {
    spec.modes
        .iter()
        .map(|m| {
            let phase = match m.phase {
                Phase::Sin => "sin",
                Phase::Cos => "cos",
            };
            format!("{phase} {} {} {:?}", m.k[0], m.k[1], m.amplitude)
        })
        .collect::<Vec<_>>()
        .join("; ")
}

/// Overrides from the command line.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub allow_out_of_range: bool,
    pub digits: Option<usize>,
}

/// Fully validated configuration for one subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub grid: GridSpec,
    pub params: PhysParams,
    pub forcing: ForcingSpec,
    pub integrator: IntegratorConfig,
    pub experiment: ExperimentConfig,
    pub file: ConfigFile,
    pub out_dir: PathBuf,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl RunConfig {
    /// The resolved configuration as written alongside the outputs.
    /// The effective configuration, without the output directory and thread
    /// count, which do not affect results.
    pub fn resolved_text(&self) -> String {
        let mut file = self.file.clone();
        file.run.out = None;
        file.run.threads = None;
        toml::to_string(&file).expect("config serializes")
    }

    pub fn holder(e: [f64; 4]) -> HolderExponents {
        HolderExponents { p1: e[0], p2: e[1], q1: e[2], q2: e[3] }
    }
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{name} = {v} must be positive and finite")))
    }
}

/// Parses and validates the configuration text for `command`.
pub fn parse_config(text: &str, command: Command, ov: &Overrides) -> Result<RunConfig, CliError> {
    let table: toml::Table = toml::from_str(text).map_err(|e| CliError::Config(format!("malformed config: {e}")))?;
    check_keys(&table)?;
    let mut file: ConfigFile =
        toml::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {}", e.message())))?;
    if let Some(c) = file.run.command {
        if c != command {
            return Err(CliError::Config(format!("config is for `{c}` but `{command}` was requested")));
        }
    }
    file.run.command = Some(command);
    if ov.seed.is_some() {
        file.run.seed = ov.seed;
    }
    if let Some(out) = &ov.out {
        file.run.out = Some(out.display().to_string());
    }
    if ov.threads.is_some() {
        file.run.threads = ov.threads;
    }
    if ov.allow_out_of_range {
        file.params.allow_out_of_range = true;
    }
    if let Some(d) = ov.digits {
        file.gauss.digits = d;
    }
    resolve(file)
}

fn resolve(file: ConfigFile) -> Result<RunConfig, CliError> {
    let command = file.run.command.expect("command set before resolving");
    let grid = GridSpec::new(file.grid.n).map_err(|e| CliError::Config(format!("[grid] {e}")))?;
    let p = &file.params;
    let params = PhysParams::new(p.viscosity, p.diffusivity, p.alpha, p.beta, p.allow_out_of_range)
        .map_err(|e| CliError::Config(format!("[params] {e}")))?;
    let forcing = parse_forcing(&file.forcing.modes)?;
    boussinesq_core::make_forcing(grid, &forcing, &params, file.bounds.s1)
        .map_err(|e| CliError::Config(format!("[forcing] {e}")))?;

    let i = &file.integrator;
    let integrator = IntegratorConfig {
        dt: i.dt,
        scheme: i.scheme,
        cfl_safety: i.cfl_safety,
        t_end: i.t_end,
        dt_max: i.dt_max,
        recheck_every: i.recheck_every,
    };
    integrator.validate().map_err(|e| CliError::Config(format!("[integrator] {e}")))?;
    if integrator.dt > integrator.dt_max {
        return Err(CliError::Config(format!(
            "[integrator] dt = {} exceeds dt_max = {}",
            integrator.dt, integrator.dt_max
        )));
    }

    let x = &file.experiment;
    let experiment = ExperimentConfig {
        n: grid.n(),
        params,
        forcing: forcing.clone(),
        dt: integrator.dt,
        scheme: integrator.scheme,
        t_spin: x.t_spin,
        horizon: x.horizon,
        epsilon: x.epsilon,
        m_values: x.m_values.clone(),
        pairs: x.pairs,
        seed: file.run.seed.unwrap_or(0),
        s1: x.s1,
        s2: x.s2,
        sync_tol: x.sync_tol,
        init_amplitude: x.init_amplitude,
        spectral_decay: x.spectral_decay,
        plateau_threshold: x.plateau_threshold,
        sample_every: x.sample_every,
    };
    if matches!(command, Command::Squeeze | Command::Determine) {
        experiment.validate().map_err(|e| CliError::Config(format!("[experiment] {e}")))?;
        if x.epsilon.is_nan() || x.epsilon <= 0.0 {
            return Err(CliError::Config(format!("[experiment] epsilon = {} must be positive", x.epsilon)));
        }
    }
    if command == Command::Squeeze && x.m_values.is_empty() {
        return Err(CliError::Config("[experiment] m_values must not be empty".into()));
    }
    if file.output.sample_every == 0 {
        return Err(CliError::Config("[output] sample_every must be at least 1".into()));
    }
    let amp = file.initial.amplitude;
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(CliError::Config(format!("[initial] amplitude = {amp} must be nonnegative and finite")));
    }
    positive("[bounds] c_free", file.bounds.c_free)?;
    for c in &file.inequalities.checks {
        if !INEQUALITY_CHECKS.contains(&c.as_str()) {
            let hint = closest(c, INEQUALITY_CHECKS).map(|k| format!("; did you mean `{k}`?")).unwrap_or_default();
            return Err(CliError::Config(format!("[inequalities] unknown check `{c}`{hint}")));
        }
    }
    if !(1..=15).contains(&file.gauss.digits) {
        return Err(CliError::Config(format!("[gauss] digits = {} must lie in 1..=15", file.gauss.digits)));
    }
    if command.is_randomized() && file.run.seed.is_none() {
        let needs = !(command == Command::Simulate && file.initial.checkpoint.is_some());
        if needs {
            return Err(CliError::Config(format!(
                "a seed is required for `{command}`: set [run] seed or pass --seed"
            )));
        }
    }
    let out_dir = PathBuf::from(file.run.out.clone().unwrap_or_else(|| "out".into()));
    Ok(RunConfig {
        command,
        grid,
        params,
        forcing,
        integrator,
        experiment,
        seed: file.run.seed,
        threads: file.run.threads,
        out_dir,
        file,
    })
}

/// Configuration for `gauss` when no file is given.
pub fn gauss_only(ov: &Overrides) -> Result<RunConfig, CliError> {
    let text = "[grid]\nn = 8\n[params]\nviscosity = 1.0\ndiffusivity = 1.0\nalpha = 0.75\nbeta = 0.75\n";
    parse_config(text, Command::Gauss, ov)
}
