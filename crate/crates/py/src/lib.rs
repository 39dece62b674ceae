//! Python bindings for helicore.
//!
//! Fields are exposed as `VectorField` objects holding spectral coefficients;
//! physical samples move in and out as `(n, n, n)` float64 numpy arrays.

use std::path::PathBuf;

use helicore::{curvature, dynamics, fields, forms, io, operators, suite};
use helicore::{Error, GridSpec, Helicity, SpectralVectorField, WaveVector};
use numpy::{PyArray1, PyArray3, PyArrayMethods, PyReadonlyArray3};
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn helicity(sign: &str) -> PyResult<Helicity> {
    sign.parse().map_err(PyValueError::new_err)
}

/// Periodic grid `[0, 2π)³` with `n` points per axis.
#[pyclass(name = "Grid", module = "helicore_py", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
pub struct PyGrid(GridSpec);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize) -> PyResult<Self> {
        GridSpec::new(n).map(Self).map_err(to_py)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn volume(&self) -> f64 {
        self.0.volume()
    }

    #[getter]
    fn dealias_cutoff(&self) -> i64 {
        self.0.dealias_cutoff()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={})", self.0.n())
    }
}

type Samples<'py> = (
    Bound<'py, PyArray3<f64>>,
    Bound<'py, PyArray3<f64>>,
    Bound<'py, PyArray3<f64>>,
);

/// Real vector field on the torus.
#[pyclass(
    name = "VectorField",
    module = "helicore_py",
    frozen,
    skip_from_py_object
)]
#[derive(Clone)]
pub struct PyField(SpectralVectorField);

#[pymethods]
impl PyField {
    #[staticmethod]
    #[pyo3(signature = (grid, a=1.0, b=1.0, c=1.0))]
    fn abc(grid: PyGrid, a: f64, b: f64, c: f64) -> Self {
        Self(fields::abc_field(grid.0, a, b, c))
    }

    #[staticmethod]
    #[pyo3(signature = (grid, k, sign, amplitude=1.0))]
    fn helical(grid: PyGrid, k: [i64; 3], sign: &str, amplitude: f64) -> PyResult<Self> {
        fields::helical_mode(grid.0, WaveVector::from(k), helicity(sign)?, amplitude)
            .map(Self)
            .map_err(to_py)
    }

    /// Random exact field on `max |k_j| <= band`, deterministic in `seed`.
    #[staticmethod]
    #[pyo3(signature = (grid, seed, band, amplitude=1.0))]
    fn random(grid: PyGrid, seed: u64, band: usize, amplitude: f64) -> PyResult<Self> {
        fields::random_exact_field(grid.0, seed, band, amplitude)
            .map(Self)
            .map_err(to_py)
    }

    /// Random curl eigenfield on the shell `|k|² = shell`.
    #[staticmethod]
    #[pyo3(signature = (grid, seed, shell, sign, amplitude=1.0))]
    fn beltrami(grid: PyGrid, seed: u64, shell: i64, sign: &str, amplitude: f64) -> PyResult<Self> {
        fields::random_beltrami_field(grid.0, seed, shell, helicity(sign)?, amplitude)
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_samples(
        grid: PyGrid,
        x: PyReadonlyArray3<'_, f64>,
        y: PyReadonlyArray3<'_, f64>,
        z: PyReadonlyArray3<'_, f64>,
    ) -> PyResult<Self> {
        let owned = [x, y, z].map(|a| a.as_array().iter().copied().collect::<Vec<f64>>());
        SpectralVectorField::from_samples(grid.0, [&owned[0], &owned[1], &owned[2]])
            .map(Self)
            .map_err(to_py)
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        io::load_field(&path).map(Self).map_err(to_py)
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        io::save_field(&path, &self.0).map_err(to_py)
    }

    /// Grid samples as three `(n, n, n)` arrays indexed `[i1, i2, i3]`.
    fn samples<'py>(&self, py: Python<'py>) -> PyResult<Samples<'py>> {
        let n = self.0.grid().n();
        let [a, b, c] = self.0.to_samples();
        let shape = |v: Vec<f64>| PyArray1::from_vec(py, v).reshape([n, n, n]);
        Ok((shape(a)?, shape(b)?, shape(c)?))
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    fn curl(&self) -> Self {
        Self(operators::curl(&self.0))
    }

    fn curl_inv(&self) -> PyResult<Self> {
        operators::curl_inv(&self.0).map(Self).map_err(to_py)
    }

    fn leray(&self) -> Self {
        Self(fields::leray_project(&self.0))
    }

    fn divergence_residual(&self) -> f64 {
        self.0.divergence_residual()
    }

    fn is_exact(&self) -> bool {
        self.0.is_exact()
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        if self.0.grid() != other.0.grid() {
            return Err(PyValueError::new_err("fields live on different grids"));
        }
        Ok(Self(&self.0 + &other.0))
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.__add__(&other.__neg__())
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn __mul__(&self, a: f64) -> Self {
        Self(self.0.scaled(a))
    }

    fn __rmul__(&self, a: f64) -> Self {
        self.__mul__(a)
    }

    fn __repr__(&self) -> String {
        format!("VectorField(n={})", self.0.grid().n())
    }
}

#[pyfunction]
fn lie_bracket(x: &PyField, y: &PyField) -> PyResult<PyField> {
    operators::lie_bracket(&x.0, &y.0)
        .map(PyField)
        .map_err(to_py)
}

#[pyfunction]
fn cross(x: &PyField, y: &PyField) -> PyResult<PyField> {
    operators::cross(&x.0, &y.0).map(PyField).map_err(to_py)
}

#[pyfunction]
fn l2_inner(x: &PyField, y: &PyField) -> PyResult<f64> {
    forms::l2_inner(&x.0, &y.0).map_err(to_py)
}

/// `⟨X, Y⟩ = (X, curl⁻¹ Y)`.
#[pyfunction]
fn biinvariant_form(x: &PyField, y: &PyField) -> PyResult<f64> {
    forms::biinvariant_form(&x.0, &y.0).map_err(to_py)
}

#[pyfunction]
fn energy(v: &PyField) -> f64 {
    forms::energy(&v.0)
}

#[pyfunction]
fn helicity_of(v: &PyField) -> PyResult<f64> {
    forms::helicity(&v.0).map_err(to_py)
}

#[pyfunction]
fn stationarity_residual(x: &PyField) -> PyResult<f64> {
    dynamics::stationarity_residual(&x.0).map_err(to_py)
}

/// Signed partial sum over the curl spectrum with `max |k_j| <= kmax`.
#[pyfunction]
#[pyo3(signature = (s, kmax, n=None))]
fn eta_partial<'py>(
    py: Python<'py>,
    s: f64,
    kmax: usize,
    n: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = GridSpec::new(n.unwrap_or((2 * kmax).max(helicore::grid::MIN_RESOLUTION)))
        .map_err(to_py)?;
    let r = forms::eta_partial(s, kmax, &grid).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("eta", r.eta_partial)?;
    d.set_item("positive", r.positive_count)?;
    d.set_item("negative", r.negative_count)?;
    let shells: Vec<(i64, usize)> = r
        .multiplicity_table
        .iter()
        .map(|m| (m.norm_sq, m.lattice_count))
        .collect();
    d.set_item("shells", shells)?;
    Ok(d)
}

/// RK4 integration of the vorticity equation. Returns the final vorticity
/// and the diagnostics rows as dicts.
#[pyfunction]
#[pyo3(signature = (x0, dt, steps, record_every=1))]
fn evolve<'py>(
    py: Python<'py>,
    x0: &PyField,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> PyResult<(PyField, Vec<Bound<'py, PyDict>>)> {
    let cfg = dynamics::EvolveConfig::new(dt, steps).record_every(record_every);
    let x = x0.0.clone();
    let out = py
        .detach(move || dynamics::evolve(&x, &cfg))
        .map_err(to_py)?;
    let mut rows = Vec::with_capacity(out.series.rows.len());
    for r in &out.series.rows {
        let d = PyDict::new(py);
        d.set_item("step", r.step)?;
        d.set_item("t", r.t)?;
        d.set_item("energy", r.energy)?;
        d.set_item("helicity", r.helicity)?;
        d.set_item("stationarity_residual", r.stationarity_residual)?;
        d.set_item("max_divergence", r.max_divergence)?;
        rows.push(d);
    }
    Ok((PyField(out.final_field), rows))
}

/// Both evaluations `(¼⟨[X,Y],[X,Y]⟩, ¼∫g([X,Y], Y×X))` of the bi-invariant
/// sectional curvature.
#[pyfunction]
#[pyo3(signature = (x, y, normalize=false))]
fn sectional_biinv(x: &PyField, y: &PyField, normalize: bool) -> PyResult<(f64, f64)> {
    let k = curvature::sectional_biinv(&x.0, &y.0, normalize).map_err(to_py)?;
    Ok((k.form_value, k.cross_value))
}

/// The five terms of the right-invariant sectional curvature.
#[pyfunction]
fn sectional_rightinv(x: &PyField, y: &PyField) -> PyResult<Vec<f64>> {
    Ok(curvature::sectional_rightinv(&x.0, &y.0)
        .map_err(to_py)?
        .terms
        .to_vec())
}

/// `(name, residual, threshold, passed)` for every identity.
#[pyfunction]
#[pyo3(signature = (n=32, seed=7, band=2))]
fn identity_suite(
    py: Python<'_>,
    n: usize,
    seed: u64,
    band: usize,
) -> PyResult<Vec<(String, f64, f64, bool)>> {
    let checks = py
        .detach(move || suite::run_identity_suite(n, seed, band))
        .map_err(to_py)?;
    Ok(checks
        .into_iter()
        .map(|c| (c.name.to_string(), c.residual, c.threshold, c.passed()))
        .collect())
}

#[pymodule]
fn helicore_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_function(wrap_pyfunction!(lie_bracket, m)?)?;
    m.add_function(wrap_pyfunction!(cross, m)?)?;
    m.add_function(wrap_pyfunction!(l2_inner, m)?)?;
    m.add_function(wrap_pyfunction!(biinvariant_form, m)?)?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add("helicity", wrap_pyfunction!(helicity_of, m)?)?;
    m.add_function(wrap_pyfunction!(stationarity_residual, m)?)?;
    m.add_function(wrap_pyfunction!(eta_partial, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(sectional_biinv, m)?)?;
    m.add_function(wrap_pyfunction!(sectional_rightinv, m)?)?;
    m.add_function(wrap_pyfunction!(identity_suite, m)?)?;
    Ok(())
}
