//! Python bindings for `stepprop`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use stepprop::classical::{BoundarySpec, ClassicalSaddle};
use stepprop::propagator::QuadratureConfig;
use stepprop::spectroscopy::OmegaWindow;
use stepprop::wkb::SaddleSet;
use stepprop::Family;

create_exception!(stepprop_py, NumericalError, PyRuntimeError);

fn to_py(e: stepprop::Error) -> PyErr {
    if e.is_numerical() {
        NumericalError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn bvp(x0: f64, x1: f64, t: f64) -> PyResult<BoundarySpec> {
    BoundarySpec::new(x0, x1, t).map_err(to_py)
}

fn saddle_set(s: &str) -> PyResult<SaddleSet> {
    s.parse().map_err(to_py)
}

#[pyclass(name = "StepModel", module = "stepprop_py", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyStepModel {
    inner: stepprop::StepModel,
}

#[pymethods]
impl PyStepModel {
    #[new]
    #[pyo3(signature = (family = "woodssaxon", m = 1.0, v0 = 1.0, alpha = 1.0, hbar = 1.0))]
    fn new(family: &str, m: f64, v0: f64, alpha: f64, hbar: f64) -> PyResult<Self> {
        let inner = match family {
            "woodssaxon" | "woods-saxon" | "ws" => stepprop::StepModel::woods_saxon(m, v0, alpha, hbar),
            "heaviside" => stepprop::StepModel::heaviside(m, v0, hbar),
            _ => return Err(PyValueError::new_err(format!("unknown family {family:?}"))),
        };
        inner.validate().map_err(to_py)?;
        Ok(PyStepModel { inner })
    }

    #[getter]
    fn family(&self) -> &'static str {
        self.inner.family.name()
    }

    #[getter]
    fn m(&self) -> f64 {
        self.inner.m
    }

    #[getter]
    fn v0(&self) -> f64 {
        self.inner.v0
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    fn with_hbar(&self, hbar: f64) -> PyResult<Self> {
        let inner = self.inner.with_hbar(hbar);
        inner.validate().map_err(to_py)?;
        Ok(PyStepModel { inner })
    }

    /// V(x) on the real line.
    fn potential(&self, x: f64) -> f64 {
        self.inner.v(x)
    }

    fn __repr__(&self) -> String {
        let m = &self.inner;
        match m.family {
            Family::Heaviside => format!("StepModel('heaviside', m={}, v0={}, hbar={})", m.m, m.v0, m.hbar),
            Family::WoodsSaxon => format!("StepModel('woodssaxon', m={}, v0={}, alpha={}, hbar={})", m.m, m.v0, m.alpha, m.hbar),
        }
    }
}

#[pyclass(name = "Saddle", module = "stepprop_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
pub struct PySaddle {
    kind: &'static str,
    energy: Complex64,
    action: Complex64,
    van_vleck: Complex64,
    relevant: bool,
    reflected: bool,
}

impl From<ClassicalSaddle> for PySaddle {
    fn from(s: ClassicalSaddle) -> Self {
        PySaddle { kind: s.kind.name(), energy: s.e, action: s.s, van_vleck: s.vv, relevant: s.relevant, reflected: s.reflected }
    }
}

#[pymethods]
impl PySaddle {
    fn __repr__(&self) -> String {
        format!("Saddle({}, E={}, S={}, relevant={})", self.kind, self.energy, self.action, self.relevant)
    }
}

/// (|R|², |T|²) at momentum k.
#[pyfunction]
fn rates(model: &PyStepModel, k: f64) -> PyResult<(f64, f64)> {
    stepprop::eigenstates::rates(&model.inner, k).map_err(to_py)
}

/// G(x1, x0; T) and its error estimate.
#[pyfunction]
#[pyo3(signature = (model, x0, x1, t, theta = 0.1, rel_tol = 1e-8))]
fn propagate(py: Python<'_>, model: &PyStepModel, x0: f64, x1: f64, t: f64, theta: f64, rel_tol: f64) -> PyResult<(Complex64, f64)> {
    let cfg = QuadratureConfig { theta, rel_tol, ..QuadratureConfig::default() };
    let m = model.inner;
    let s = py.detach(|| stepprop::propagator::propagate(&m, x0, x1, t, &cfg)).map_err(to_py)?;
    Ok((s.g, s.est_error))
}

#[pyfunction]
fn free_propagator(m: f64, hbar: f64, x0: f64, x1: f64, t: f64) -> Complex64 {
    stepprop::propagator::free_propagator(m, hbar, x0, x1, t)
}

/// K(x1, x0; E).
#[pyfunction]
fn energy_propagator(py: Python<'_>, model: &PyStepModel, x0: f64, x1: f64, e: f64) -> PyResult<Complex64> {
    let m = model.inner;
    py.detach(|| stepprop::propagator::energy_propagator(&m, x0, x1, e, &QuadratureConfig::default())).map_err(to_py)
}

/// Saddles of a boundary value problem for "real", "real+caustic" or
/// "real+caustic+topological".
#[pyfunction]
#[pyo3(signature = (model, x0, x1, t, saddles = "real+caustic+topological"))]
fn classical_saddles(model: &PyStepModel, x0: f64, x1: f64, t: f64, saddles: &str) -> PyResult<Vec<PySaddle>> {
    let b = bvp(x0, x1, t)?;
    let out = stepprop::wkb::collect_saddles(&model.inner, &b, saddle_set(saddles)?).map_err(to_py)?;
    Ok(out.into_iter().map(Into::into).collect())
}

/// WKB propagator at the model's ℏ.
#[pyfunction]
#[pyo3(signature = (model, x0, x1, t, saddles = "real+caustic"))]
fn wkb(model: &PyStepModel, x0: f64, x1: f64, t: f64, saddles: &str) -> PyResult<Complex64> {
    stepprop::wkb::wkb_at(&model.inner, &bvp(x0, x1, t)?, saddle_set(saddles)?).map_err(to_py)
}

/// Caustic points (x0, x1) at fixed T.
#[pyfunction]
fn caustic_curve(py: Python<'_>, model: &PyStepModel, t: f64, x0_grid: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let m = model.inner;
    let pts = py.detach(|| stepprop::caustics::caustic_curve(&m, t, &x0_grid)).map_err(to_py)?;
    Ok(pts.into_iter().map(|p| (p.x0, p.x1)).collect())
}

#[pyfunction]
fn cusps(py: Python<'_>, model: &PyStepModel, t: f64, x0_grid: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let m = model.inner;
    py.detach(|| stepprop::caustics::cusps(&m, t, &x0_grid)).map_err(to_py)
}

#[pyfunction]
fn stokes_lines(py: Python<'_>, model: &PyStepModel, t: f64, x0s: Vec<f64>, x1s: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    let m = model.inner;
    py.detach(|| stepprop::caustics::stokes_lines(&m, t, &x0s, &x1s)).map_err(to_py)
}

/// Fourier spectrum |F(τ)|² of G in ω = 1/ℏ over [a, b]; returns
/// (values, peak actions).
#[pyfunction]
#[pyo3(signature = (model, x0, x1, t, tau, a = 1.0, b = 12.0, n_omega = 2048))]
#[allow(clippy::too_many_arguments)]
fn fourier_spectrum(
    py: Python<'_>,
    model: &PyStepModel,
    x0: f64,
    x1: f64,
    t: f64,
    tau: Vec<f64>,
    a: f64,
    b: f64,
    n_omega: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let w = OmegaWindow::new(a, b, n_omega).map_err(to_py)?;
    let bv = bvp(x0, x1, t)?;
    let m = model.inner;
    let s = py
        .detach(|| stepprop::spectroscopy::fourier_spectrum(&m, &bv, w, &tau, &QuadratureConfig::default()))
        .map_err(to_py)?;
    let actions = s.peak_actions();
    Ok((s.values, actions))
}

/// Laplace spectrum |L(s)|².
#[pyfunction]
#[pyo3(signature = (model, x0, x1, t, s, a = 1.0, b = 12.0, n_omega = 2048))]
#[allow(clippy::too_many_arguments)]
fn laplace_spectrum(py: Python<'_>, model: &PyStepModel, x0: f64, x1: f64, t: f64, s: Vec<f64>, a: f64, b: f64, n_omega: usize) -> PyResult<Vec<f64>> {
    let w = OmegaWindow::new(a, b, n_omega).map_err(to_py)?;
    let bv = bvp(x0, x1, t)?;
    let m = model.inner;
    let l = py
        .detach(|| stepprop::spectroscopy::laplace_spectrum(&m, &bv, w, &s, &QuadratureConfig::default()))
        .map_err(to_py)?;
    Ok(l.values)
}

/// Crank-Nicolson evolution of a Gaussian packet; returns (x, ψ_T).
#[pyfunction]
#[pyo3(signature = (model, center, width, p0, t, x_min = -60.0, x_max = 60.0, n_x = 12001, dt = 0.005))]
#[allow(clippy::too_many_arguments)]
fn evolve_gaussian(
    py: Python<'_>,
    model: &PyStepModel,
    center: f64,
    width: f64,
    p0: f64,
    t: f64,
    x_min: f64,
    x_max: f64,
    n_x: usize,
    dt: f64,
) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
    use stepprop::oracle::{evolve_packet, gaussian_packet, GridSpec};
    let grid = GridSpec::new(x_min, x_max, n_x, dt).map_err(to_py)?;
    let m = model.inner;
    let psi = py
        .detach(|| {
            let psi0 = gaussian_packet(&grid, center, width, p0, m.hbar)?;
            evolve_packet(&m, &psi0, &grid, t)
        })
        .map_err(to_py)?;
    Ok((grid.xs(), psi))
}

#[pymodule]
fn stepprop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyStepModel>()?;
    m.add_class::<PySaddle>()?;
    m.add("NumericalError", m.py().get_type::<NumericalError>())?;
    m.add_function(wrap_pyfunction!(rates, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(free_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(energy_propagator, m)?)?;
    m.add_function(wrap_pyfunction!(classical_saddles, m)?)?;
    m.add_function(wrap_pyfunction!(wkb, m)?)?;
    m.add_function(wrap_pyfunction!(caustic_curve, m)?)?;
    m.add_function(wrap_pyfunction!(cusps, m)?)?;
    m.add_function(wrap_pyfunction!(stokes_lines, m)?)?;
    m.add_function(wrap_pyfunction!(fourier_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(laplace_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_gaussian, m)?)?;
    Ok(())
}
