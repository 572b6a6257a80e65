//! Python bindings: models, grids, flows, foliations, stability and barrier
//! certificates. Reports come back as plain dicts.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use stcmc_core::background::{self, NullConeModel, Perturbation};
use stcmc_core::barriers;
use stcmc_core::base::BaseGrid;
use stcmc_core::cli::verify_suite;
use stcmc_core::flow::{self, FlowOptions, Prescription};
use stcmc_core::foliation::{self, FoliationOptions};
use stcmc_core::graph::GraphSurface;
use stcmc_core::stability::{self, EigenOptions};
use stcmc_core::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Config(_) | Error::Input(_) | Error::Domain(_) | Error::Precondition(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Null cone background model.
#[pyclass(name = "Model", frozen)]
struct PyModel {
    inner: NullConeModel,
}

#[pymethods]
impl PyModel {
    #[staticmethod]
    #[pyo3(signature = (n=2, r0=1.0, extent=NullConeModel::DEFAULT_LAMBDA))]
    fn minkowski(n: usize, r0: f64, extent: f64) -> PyResult<Self> {
        let inner = background::make_minkowski_on(n, r0, extent).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (mass=1.0, r0=None, extent=NullConeModel::DEFAULT_LAMBDA))]
    fn schwarzschild(mass: f64, r0: Option<f64>, extent: f64) -> PyResult<Self> {
        let inner = background::make_schwarzschild_on(mass, r0.unwrap_or(2.0 * mass), extent).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Axisymmetric perturbation of this model; keyword names follow the
    /// perturbation coefficients (`ricci0`, `shear1`, `zeta`, ...).
    #[pyo3(signature = (table_n_theta=64, **coefficients))]
    fn perturbed(&self, table_n_theta: usize, coefficients: Option<&Bound<'_, PyDict>>) -> PyResult<Self> {
        let mut p = Perturbation::default();
        if let Some(d) = coefficients {
            for (k, v) in d.iter() {
                let key: String = k.extract()?;
                let v: f64 = v.extract()?;
                let slot = match key.as_str() {
                    "ricci0" => &mut p.ricci0,
                    "ricci1" => &mut p.ricci1,
                    "ricci_abs" => &mut p.ricci_abs,
                    "shear0" => &mut p.shear0,
                    "shear1" => &mut p.shear1,
                    "theta_cos" => &mut p.theta_cos,
                    "rc_lnu0" => &mut p.rc_lnu0,
                    "rc_lnu1" => &mut p.rc_lnu1,
                    "weyl0" => &mut p.weyl0,
                    "weyl1" => &mut p.weyl1,
                    "zeta" => &mut p.zeta,
                    _ => return Err(PyValueError::new_err(format!("unknown coefficient {key:?}"))),
                };
                *slot = v;
            }
        }
        let inner = background::make_perturbed_axisymmetric(&self.inner, p, table_n_theta).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn extent(&self) -> f64 {
        self.inner.lambda()
    }

    fn area_radius(&self, s: f64) -> f64 {
        self.inner.area_radius(s)
    }

    fn s_of_radius(&self, r: f64) -> f64 {
        self.inner.s_of_radius(r)
    }

    #[pyo3(signature = (s, theta=0.0))]
    fn theta_bar(&self, s: f64, theta: f64) -> PyResult<f64> {
        self.inner.theta_bar(s, theta).map_err(py_err)
    }

    /// `|H⃗|²` of the coordinate slice `{s = const}`.
    #[pyo3(signature = (s, theta=0.0))]
    fn slice_hvec2(&self, s: f64, theta: f64) -> PyResult<f64> {
        self.inner.slice_hvec2(s, theta).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Model(dim={}, extent={})", self.inner.dim(), self.inner.lambda())
    }
}

/// Grid on the polar angle (or a single node for symmetric graphs).
#[pyclass(name = "Grid", frozen)]
struct PyGrid {
    inner: BaseGrid,
}

#[pymethods]
impl PyGrid {
    #[staticmethod]
    #[pyo3(signature = (dim=2))]
    fn symmetric(dim: usize) -> PyResult<Self> {
        Ok(Self {
            inner: BaseGrid::symmetric(dim).map_err(py_err)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (dim=2, n_theta=BaseGrid::DEFAULT_N_THETA))]
    fn axisymmetric(dim: usize, n_theta: usize) -> PyResult<Self> {
        Ok(Self {
            inner: BaseGrid::axisymmetric(dim, n_theta).map_err(py_err)?,
        })
    }

    fn nodes(&self) -> Vec<f64> {
        self.inner.nodes().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

fn surface(model: &PyModel, grid: &PyGrid, omega: &[f64]) -> PyResult<GraphSurface> {
    GraphSurface::new(&model.inner, &grid.inner, omega).map_err(py_err)
}

/// `|H⃗|²` of the graph `ω` at each node.
#[pyfunction]
fn hvec2(model: &PyModel, grid: &PyGrid, omega: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(surface(model, grid, &omega)?.hvec2().to_vec())
}

/// Runs the `λ`-STCMC flow from `omega` to a stationary graph.
#[pyfunction]
#[pyo3(signature = (model, grid, lam, omega, tol=None, max_steps=200_000, require_descending=true))]
fn flow_stcmc<'py>(
    py: Python<'py>,
    model: &PyModel,
    grid: &PyGrid,
    lam: f64,
    omega: Vec<f64>,
    tol: Option<f64>,
    max_steps: usize,
    require_descending: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let presc = Prescription::stcmc(lam).map_err(py_err)?;
    let opts = FlowOptions {
        tol,
        max_steps,
        require_descending,
        ..Default::default()
    };
    let run = py
        .detach(|| flow::run_to_stationary(&model.inner, &grid.inner, &presc, &omega, &opts))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("status", run.status.to_string())?;
    d.set_item("converged", run.converged())?;
    d.set_item("omega", run.state.omega().to_vec())?;
    d.set_item("t", run.state.t)?;
    d.set_item("sup_abs_f", run.state.sup_abs_f())?;
    d.set_item("accepted", run.accepted)?;
    d.set_item("rejected", run.rejected)?;
    d.set_item("history", to_py(py, &run.state.history)?)?;
    Ok(d)
}

/// STCMC foliation sweep starting from the MOTS `mots_omega`.
#[pyfunction]
#[pyo3(signature = (model, grid, mots_omega, lambda_max, dlambda))]
fn foliate<'py>(
    py: Python<'py>,
    model: &PyModel,
    grid: &PyGrid,
    mots_omega: Vec<f64>,
    lambda_max: f64,
    dlambda: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let res = py
        .detach(|| {
            foliation::sweep(&model.inner, &grid.inner, &mots_omega, lambda_max, dlambda, &FoliationOptions::default())
        })
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("lambdas", res.lambdas.clone())?;
    d.set_item("eigenvalues", res.eigenvalues())?;
    d.set_item("termination", res.termination.to_string())?;
    d.set_item("sigma_estimate", res.sigma_estimate)?;
    d.set_item("region_top", res.region_top)?;
    let leaves: Vec<Vec<f64>> = res.leaves.iter().map(|l| l.omega().to_vec()).collect();
    d.set_item("leaves", leaves)?;
    d.set_item("monotone", foliation::monotonicity_check(&res).ok)?;
    Ok(d)
}

/// Principal eigenpair of the stability operator on a `λ`-STCMC graph.
#[pyfunction]
#[pyo3(signature = (model, grid, omega, lam, stcmc_tol=1e-8))]
fn stability_report<'py>(
    py: Python<'py>,
    model: &PyModel,
    grid: &PyGrid,
    omega: Vec<f64>,
    lam: f64,
    stcmc_tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let s = surface(model, grid, &omega)?;
    let rep = stability::analyze(&model.inner, &s, lam, stcmc_tol, &EigenOptions::default()).map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (n, c_r=0.0, c_chi=0.0, d_c=0.0))]
fn discriminant<'py>(py: Python<'py>, n: usize, c_r: f64, c_chi: f64, d_c: f64) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &barriers::discriminant(n, c_r, c_chi, d_c).map_err(py_err)?)
}

#[pyfunction]
fn closed_form_discriminant(n: usize, c_r: f64) -> f64 {
    barriers::closed_form_discriminant(n, c_r)
}

#[pyfunction]
fn height_bound(n: usize, c_r: f64, script_d: f64) -> f64 {
    barriers::height_bound(n, c_r, script_d)
}

/// Barrier certificate on `interval` with automatic `δ, η`, plus the
/// sampled test-function check.
#[pyfunction]
#[pyo3(signature = (n, interval, c_r=0.0, c_chi=0.0, d_c=0.0, samples=200))]
fn certificate<'py>(
    py: Python<'py>,
    n: usize,
    interval: (f64, f64),
    c_r: f64,
    c_chi: f64,
    d_c: f64,
    samples: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let rep = barriers::discriminant_checked(n, c_r, c_chi, d_c).map_err(py_err)?;
    let cert = barriers::auto_certificate(&rep, interval).map_err(py_err)?;
    let chk = barriers::test_function(&cert, interval, samples).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("certificate", to_py(py, &cert)?)?;
    d.set_item("positive", chk.positive)?;
    d.set_item("slope_sign_ok", chk.slope_sign_ok)?;
    d.set_item("max_residual", chk.max_residual)?;
    Ok(d)
}

/// Convergence checks of the evolution equations.
#[pyfunction]
#[pyo3(signature = (steps=vec![0.2, 0.1, 0.05, 0.025], n_theta=32))]
fn verify<'py>(py: Python<'py>, steps: Vec<f64>, n_theta: usize) -> PyResult<Bound<'py, PyAny>> {
    let reports = py.detach(|| verify_suite(&steps, n_theta)).map_err(py_err)?;
    to_py(py, &reports)
}

#[pymodule]
fn stcmc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_class::<PyGrid>()?;
    m.add_function(wrap_pyfunction!(hvec2, m)?)?;
    m.add_function(wrap_pyfunction!(flow_stcmc, m)?)?;
    m.add_function(wrap_pyfunction!(foliate, m)?)?;
    m.add_function(wrap_pyfunction!(stability_report, m)?)?;
    m.add_function(wrap_pyfunction!(discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_discriminant, m)?)?;
    m.add_function(wrap_pyfunction!(height_bound, m)?)?;
    m.add_function(wrap_pyfunction!(certificate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
