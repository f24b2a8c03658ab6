//! Python module `boussinesq`: the solver, bound calculators and the
//! subcommand runner.

use std::collections::BTreeMap;

use boussinesq_cli::config::parse_forcing;
use boussinesq_cli::{execute, parse_config, CliError, Command, Overrides};
use boussinesq_core::random::{random_field, rng_for};
use boussinesq_core::{
    bound_report, make_forcing, norm_record, Dynamics, EigenIndex, FlowState, Forcing, GridSpec, Model, PhysParams,
    Scheme, SpectralField, Stepper, Transform,
};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use serde::Serialize;

fn core_err(e: boussinesq_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn cli_err(e: CliError) -> PyErr {
    match e {
        CliError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

/// Converts a serializable value to Python objects through `json`.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn scheme(name: &str) -> PyResult<Scheme> {
    match name {
        "rk2" | "if-rk2" => Ok(Scheme::IfRk2),
        "rk4" | "if-rk4" => Ok(Scheme::IfRk4),
        _ => Err(PyValueError::new_err(format!("unknown scheme {name:?}; use rk2 or rk4"))),
    }
}

fn forcing(grid: GridSpec, modes: &str, params: &PhysParams, s1: f64) -> PyResult<Forcing> {
    let spec = parse_forcing(modes).map_err(cli_err)?;
    make_forcing(grid, &spec, params, s1).map_err(core_err)
}

/// Physical parameters `ν, κ, α, β`.
#[pyclass(name = "Params", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyParams {
    inner: PhysParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (nu, kappa, alpha, beta, allow_out_of_range = false))]
    fn new(nu: f64, kappa: f64, alpha: f64, beta: f64, allow_out_of_range: bool) -> PyResult<Self> {
        Ok(Self { inner: PhysParams::new(nu, kappa, alpha, beta, allow_out_of_range).map_err(core_err)? })
    }

    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.inner.kappa
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    fn __repr__(&self) -> String {
        let p = self.inner;
        format!("Params(nu={}, kappa={}, alpha={}, beta={})", p.nu, p.kappa, p.alpha, p.beta)
    }
}

/// A forced flow advanced by the integrating-factor scheme.
#[pyclass(name = "Simulation")]
struct PySimulation {
    stepper: Stepper,
    transform: Transform,
    state: FlowState,
}

#[pymethods]
impl PySimulation {
    /// `forcing` uses the config syntax, e.g. `"sin 1 0 0.5; cos 0 2 0.5"`.
    #[new]
    #[pyo3(signature = (n, params, forcing = "", dt = 0.01, scheme = "rk4", seed = 0, amplitude = 1.0))]
    fn new(n: usize, params: PyParams, forcing: &str, dt: f64, scheme: &str, seed: u64, amplitude: f64) -> PyResult<Self> {
        let grid = GridSpec::new(n).map_err(core_err)?;
        let f = self::forcing(grid, forcing, &params.inner, 1.0)?;
        let model = Model::new(grid, params.inner, &f, Dynamics::default()).map_err(core_err)?;
        let stepper = Stepper::new(model, dt, self::scheme(scheme)?).map_err(core_err)?;
        let mut rng = rng_for(seed, 0);
        let mut unit = || {
            let f = random_field(grid, &mut rng, 2.0, grid.dealias_cut());
            let norm = f.l2_norm();
            if norm > 0.0 {
                f.scale(amplitude / norm)
            } else {
                f
            }
        };
        let (th, om) = (unit(), unit());
        let state = FlowState::new(th, om, 0.0).map_err(core_err)?;
        Ok(Self { stepper, transform: Transform::new(grid), state })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.state.t
    }

    #[getter]
    fn n(&self) -> usize {
        self.state.grid().n()
    }

    /// Advances `steps` time steps.
    #[pyo3(signature = (steps = 1))]
    fn step(&mut self, py: Python<'_>, steps: usize) -> PyResult<()> {
        let stepper = &self.stepper;
        let mut state = self.state.clone();
        py.detach(|| {
            for _ in 0..steps {
                state = stepper.step(&state)?;
            }
            Ok::<_, boussinesq_core::Error>(())
        })
        .map_err(core_err)?;
        self.state = state;
        Ok(())
    }

    /// Monitored norms of the current state.
    #[pyo3(signature = (s1 = 1.0, s2 = 1.0, lp = vec![4.0]))]
    fn norms<'py>(&self, py: Python<'py>, s1: f64, s2: f64, lp: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        let r = norm_record(&self.state, self.stepper.model().params(), s1, s2, &lp, &self.transform).map_err(core_err)?;
        to_py(py, &r)
    }

    /// Temperature on the `n × n` grid, row-major.
    fn theta(&self) -> Vec<Vec<f64>> {
        self.physical(&self.state.theta)
    }

    /// Vorticity on the `n × n` grid, row-major.
    fn omega(&self) -> Vec<Vec<f64>> {
        self.physical(&self.state.omega)
    }

    /// Difference norm `‖Λ^{s} θ‖` of the temperature.
    #[pyo3(signature = (s = 0.0))]
    fn theta_sobolev_norm(&self, s: f64) -> f64 {
        self.state.theta.sobolev_norm(s)
    }
}

impl PySimulation {
    fn physical(&self, f: &SpectralField) -> Vec<Vec<f64>> {
        let n = self.state.grid().n();
        self.transform.from_spectral(f).chunks(n).map(<[f64]>::to_vec).collect()
    }
}

/// Gauss's constant `(2/π)∫₀¹ dx/√(1−x⁴)`.
#[pyfunction]
fn gauss_constant() -> f64 {
    boussinesq_core::gauss_constant()
}

/// Sharp Sobolev constant `C_s` for `0 < s < 1`.
#[pyfunction]
fn sobolev_constant(s: f64) -> PyResult<f64> {
    boussinesq_core::sobolev_constant(s).map_err(core_err)
}

/// Fractal-dimension bound for codimension `n`, growth `l` and contraction `delta`.
#[pyfunction]
fn dimension_bound(n: u64, l: f64, delta: f64) -> PyResult<f64> {
    boussinesq_core::dimension_bound(n, l, delta).map_err(core_err)
}

/// `ρ_m` at eigenvalue `lambda_m`.
#[pyfunction]
fn rho_m(params: PyParams, lambda_m: f64) -> f64 {
    boussinesq_core::rho_m(&params.inner, lambda_m)
}

/// Closed-form bounds for a forcing on an `n × n` grid, as a dict.
#[pyfunction]
#[pyo3(signature = (n, params, forcing, c_free = 1.0, rho_at = vec![1]))]
fn bounds<'py>(
    py: Python<'py>,
    n: usize,
    params: PyParams,
    forcing: &str,
    c_free: f64,
    rho_at: Vec<usize>,
) -> PyResult<Bound<'py, PyAny>> {
    let grid = GridSpec::new(n).map_err(core_err)?;
    let f = self::forcing(grid, forcing, &params.inner, 1.0)?;
    let index = EigenIndex::new(grid);
    let r = bound_report(&f, &params.inner, c_free, &index, &rho_at, None).map_err(core_err)?;
    to_py(py, &r)
}

/// Runs a subcommand on a TOML config and returns `{file name: bytes}`
/// plus the printed summary under `"stdout"`.
#[pyfunction]
#[pyo3(signature = (command, config, seed = None))]
fn run<'py>(py: Python<'py>, command: &str, config: &str, seed: Option<u64>) -> PyResult<(String, BTreeMap<String, Bound<'py, PyBytes>>)> {
    let command = Command::from_name(command).ok_or_else(|| PyValueError::new_err(format!("unknown command {command:?}")))?;
    let ov = Overrides { seed, ..Overrides::default() };
    let cfg = parse_config(config, command, &ov).map_err(cli_err)?;
    let out = py.detach(|| execute(&cfg)).map_err(cli_err)?;
    if let Some(e) = out.deferred {
        return Err(cli_err(e));
    }
    let files = out
        .artifacts
        .names()
        .map(|name| (name.to_string(), PyBytes::new(py, out.artifacts.get(name).unwrap_or_default())))
        .collect();
    Ok((out.stdout, files))
}

#[pymodule]
fn boussinesq(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PySimulation>()?;
    m.add_function(wrap_pyfunction!(gauss_constant, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_constant, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_bound, m)?)?;
    m.add_function(wrap_pyfunction!(rho_m, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
