//! Python bindings: sampled functions, scaling systems, projectors and the
//! Littlewood-Paley checks. Reports come back as plain dicts.

use std::path::PathBuf;

use lpmra::czd::{cz_decompose, verify_cz};
use lpmra::lpverify::{
    self, khintchine_check_with, sharp_khintchine_constants, DetailBank, KhintchineMode, SignMode,
};
use lpmra::scaling::{biorthogonality_defect, validate_conditions};
use lpmra::{
    Complex, DetailPath, Grid1D, GridND, MultiIndex, ProjectorContext, SampledFunction, ScalingSpec, ScalingSystem,
    SignPattern, TensorContext,
};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;

fn err(e: lpmra::Error) -> PyErr {
    match e {
        lpmra::Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_i64(), n.as_f64()) {
            (Some(i), _) => i.into_bound_py_any(py),
            (None, Some(f)) => f.into_bound_py_any(py),
            _ => n.to_string().into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, item) in map {
                dict.set_item(k, json_to_py(py, item)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn to_dict<'py>(py: Python<'py>, value: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    // non-finite floats come back as None
    let v = serde_json::to_value(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    json_to_py(py, &v)
}

fn unit_box(resolution: u32, lo_x: i64, hi_x: i64) -> PyResult<Grid1D> {
    Grid1D::from_unit_bounds(resolution, lo_x, hi_x).map_err(err)
}

/// Samples of a function on a cube `[lo_x, hi_x)^dim` at resolution `J`,
/// one value per cell midpoint, last axis fastest.
#[pyclass(name = "Function", module = "pylpmra", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFunction {
    inner: SampledFunction,
}

impl PyFunction {
    fn wrap(inner: SampledFunction) -> Self {
        Self { inner }
    }
}

#[pymethods]
impl PyFunction {
    #[new]
    #[pyo3(signature = (resolution, lo_x, hi_x, values, dim = 1))]
    fn new(resolution: u32, lo_x: i64, hi_x: i64, values: Vec<Complex>, dim: usize) -> PyResult<Self> {
        let grid = GridND::new(unit_box(resolution, lo_x, hi_x)?, dim).map_err(err)?;
        SampledFunction::from_samples(grid, values).map(Self::wrap).map_err(err)
    }

    /// `chi_[a, b)` on `[lo_x, hi_x)`.
    #[staticmethod]
    fn indicator(resolution: u32, lo_x: i64, hi_x: i64, a: f64, b: f64) -> PyResult<Self> {
        Ok(Self::wrap(SampledFunction::indicator(unit_box(resolution, lo_x, hi_x)?, a, b)))
    }

    #[staticmethod]
    fn tensor_product(factors: Vec<PyRef<'_, PyFunction>>) -> PyResult<Self> {
        let refs: Vec<&SampledFunction> = factors.iter().map(|f| &f.inner).collect();
        SampledFunction::tensor_product(&refs).map(Self::wrap).map_err(err)
    }

    #[staticmethod]
    fn read(path: PathBuf) -> PyResult<Self> {
        let file = std::fs::File::open(path)?;
        SampledFunction::read_from(std::io::BufReader::new(file)).map(Self::wrap).map_err(err)
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(path, self.inner.to_text())?;
        Ok(())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn resolution(&self) -> u32 {
        self.inner.grid().resolution()
    }

    /// `(left, right)` edges of the box along every axis.
    #[getter]
    fn bounds(&self) -> (f64, f64) {
        let axis = self.inner.axis();
        (axis.left_edge(), axis.right_edge())
    }

    fn values(&self) -> Vec<Complex> {
        self.inner.samples().to_vec()
    }

    fn real(&self) -> Vec<f64> {
        self.inner.samples().iter().map(|z| z.re).collect()
    }

    fn lp_norm(&self, p: f64) -> PyResult<f64> {
        lpmra::lp_norm(&self.inner, p).map_err(err)
    }

    fn inner_product(&self, other: &PyFunction) -> PyResult<Complex> {
        lpmra::inner_product(&self.inner, &other.inner).map_err(err)
    }

    fn sup_distance(&self, other: &PyFunction) -> PyResult<f64> {
        self.inner.sup_distance(&other.inner).map_err(err)
    }

    fn __add__(&self, other: &PyFunction) -> PyResult<Self> {
        self.inner.add(&other.inner).map(Self::wrap).map_err(err)
    }

    fn __sub__(&self, other: &PyFunction) -> PyResult<Self> {
        self.inner.sub(&other.inner).map(Self::wrap).map_err(err)
    }

    fn __mul__(&self, factor: Complex) -> Self {
        Self::wrap(self.inner.scale(factor))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        let (a, b) = self.bounds();
        format!("Function(J={}, box=[{a}, {b})^{}, samples={})", self.resolution(), self.dim(), self.inner.len())
    }
}

/// A scaling function and its dual: `haar`, `dbN` or `file:PATH`.
#[pyclass(name = "ScalingSystem", module = "pylpmra", frozen)]
struct PyScalingSystem {
    inner: ScalingSystem,
}

#[pymethods]
impl PyScalingSystem {
    /// Haar is sampled on `[lo_x, hi_x)`; other kinds keep their own support.
    #[new]
    #[pyo3(signature = (spec, resolution, lo_x = 0, hi_x = 1))]
    fn new(spec: &str, resolution: u32, lo_x: i64, hi_x: i64) -> PyResult<Self> {
        let spec: ScalingSpec = spec.parse().map_err(err)?;
        let inner = spec.build(resolution, unit_box(resolution, lo_x, hi_x)?).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn resolution(&self) -> u32 {
        self.inner.resolution()
    }

    #[getter]
    fn orthonormal(&self) -> bool {
        self.inner.orthonormal()
    }

    #[getter]
    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn phi(&self) -> PyFunction {
        PyFunction::wrap(self.inner.phi().clone())
    }

    fn phi_dual(&self) -> PyFunction {
        PyFunction::wrap(self.inner.phi_dual().clone())
    }

    /// Decay-condition report plus the biorthogonality defect.
    #[pyo3(signature = (shift_range = 3))]
    fn validate<'py>(&self, py: Python<'py>, shift_range: u32) -> PyResult<Bound<'py, PyAny>> {
        let report = to_dict(py, &validate_conditions(&self.inner))?;
        let dict = report.cast::<PyDict>()?;
        dict.set_item("valid", validate_conditions(&self.inner).valid())?;
        dict.set_item(
            "biorthogonality_defect",
            biorthogonality_defect(&self.inner, shift_range).map_err(err)?,
        )?;
        Ok(report)
    }

    fn write(&self, path: PathBuf) -> PyResult<()> {
        std::fs::write(path, self.inner.to_text())?;
        Ok(())
    }
}

/// `E_kappa` and `D_kappa` on the line, restricted to `[lo_x, hi_x)`.
#[pyclass(name = "Projector", module = "pylpmra", frozen)]
struct PyProjector {
    inner: ProjectorContext,
}

#[pymethods]
impl PyProjector {
    #[new]
    fn new(system: &PyScalingSystem, lo_x: i64, hi_x: i64) -> PyResult<Self> {
        let domain = unit_box(system.inner.resolution(), lo_x, hi_x)?;
        let inner = ProjectorContext::new(system.inner.clone(), domain).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn kappa_max(&self) -> u32 {
        self.inner.kappa_max()
    }

    fn project(&self, f: &PyFunction, kappa: u32) -> PyResult<PyFunction> {
        self.inner.project(&f.inner, kappa).map(PyFunction::wrap).map_err(err)
    }

    fn detail(&self, f: &PyFunction, kappa: u32) -> PyResult<PyFunction> {
        self.inner.detail(&f.inner, kappa).map(PyFunction::wrap).map_err(err)
    }

    /// `[(nu, c_nu)]` over the active translates.
    fn coefficients(&self, f: &PyFunction, kappa: u32) -> PyResult<Vec<(i64, Complex)>> {
        Ok(self.inner.coefficients(&f.inner, kappa).map_err(err)?.iter().collect())
    }
}

/// Tensor-product projectors on a cube, one scaling system per axis.
#[pyclass(name = "Tensor", module = "pylpmra", frozen)]
struct PyTensor {
    inner: TensorContext,
}

fn sign_pattern(signs: Vec<Vec<i8>>) -> PyResult<SignPattern> {
    SignPattern::new(signs).map_err(err)
}

#[pymethods]
impl PyTensor {
    #[new]
    fn new(systems: Vec<PyRef<'_, PyScalingSystem>>, lo_x: i64, hi_x: i64) -> PyResult<Self> {
        let Some(first) = systems.first() else {
            return Err(PyValueError::new_err("need at least one scaling system"));
        };
        let domain = unit_box(first.inner.resolution(), lo_x, hi_x)?;
        let systems = systems.iter().map(|s| s.inner.clone()).collect();
        Ok(Self { inner: TensorContext::new(systems, domain).map_err(err)? })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn kappa_max(&self) -> Vec<u32> {
        self.inner.kappa_max().components().to_vec()
    }

    fn project(&self, f: &PyFunction, kappa: Vec<u32>) -> PyResult<PyFunction> {
        self.inner.project_nd(&f.inner, &MultiIndex::new(kappa)).map(PyFunction::wrap).map_err(err)
    }

    /// `path` is `"factored"` or `"inclusion-exclusion"`.
    #[pyo3(signature = (f, kappa, path = "factored"))]
    fn detail(&self, f: &PyFunction, kappa: Vec<u32>, path: &str) -> PyResult<PyFunction> {
        let path = match path {
            "factored" => DetailPath::Factored,
            "inclusion-exclusion" => DetailPath::InclusionExclusion,
            other => return Err(PyValueError::new_err(format!("unknown detail path {other:?}"))),
        };
        self.inner
            .detail_nd_with(&f.inner, &MultiIndex::new(kappa), path)
            .map(PyFunction::wrap)
            .map_err(err)
    }

    fn partial_sum(&self, f: &PyFunction, k_cap: Vec<u32>) -> PyResult<PyFunction> {
        self.inner.partial_sum(&f.inner, &MultiIndex::new(k_cap)).map(PyFunction::wrap).map_err(err)
    }

    fn reconstruction_error(&self, f: &PyFunction, k_cap: Vec<u32>, p: f64) -> PyResult<f64> {
        self.inner.reconstruction_error(&f.inner, &MultiIndex::new(k_cap), p).map_err(err)
    }

    fn square_function(&self, f: &PyFunction, k_cap: Vec<u32>) -> PyResult<PyFunction> {
        lpverify::square_function(&self.inner, &f.inner, &MultiIndex::new(k_cap))
            .map(PyFunction::wrap)
            .map_err(err)
    }

    #[pyo3(signature = (f, p, k_cap, f_id = "f"))]
    fn lp_ratio<'py>(
        &self,
        py: Python<'py>,
        f: &PyFunction,
        p: f64,
        k_cap: Vec<u32>,
        f_id: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let rec = lpverify::lp_ratio(&self.inner, &f.inner, f_id, p, &MultiIndex::new(k_cap)).map_err(err)?;
        to_dict(py, &rec)
    }

    /// `sum sigma_kappa D_kappa f` with `signs[j][k]` the sign of scale `k`
    /// along axis `j`.
    fn sign_sum(&self, f: &PyFunction, signs: Vec<Vec<i8>>, k_cap: Vec<u32>) -> PyResult<PyFunction> {
        lpverify::sign_sum(&self.inner, &f.inner, &sign_pattern(signs)?, &MultiIndex::new(k_cap))
            .map(PyFunction::wrap)
            .map_err(err)
    }

    #[pyo3(signature = (f, p, k_cap, trials = 100, seed = 0, free = false))]
    #[allow(clippy::too_many_arguments)]
    fn sign_sweep<'py>(
        &self,
        py: Python<'py>,
        f: &PyFunction,
        p: f64,
        k_cap: Vec<u32>,
        trials: usize,
        seed: u64,
        free: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let bank = DetailBank::new(&self.inner, &f.inner, &MultiIndex::new(k_cap)).map_err(err)?;
        let mode = if free { SignMode::Free } else { SignMode::Tensor };
        let report = lpverify::sign_sweep(&bank, &f.inner, p, trials, seed, mode).map_err(err)?;
        to_dict(py, &report)
    }

    /// The peak of `alpha mes{|T f| > alpha} / ||f||_1` (one dimension only).
    fn weak11_sup<'py>(
        &self,
        py: Python<'py>,
        f: &PyFunction,
        signs: Vec<i8>,
        k_cap: u32,
    ) -> PyResult<Bound<'py, PyAny>> {
        let point = lpverify::weak11_sup(&self.inner, &f.inner, &sign_pattern(vec![signs])?, k_cap).map_err(err)?;
        to_dict(py, &point)
    }
}

/// `||sum a_k r_k||_p` against `|a|_2` with the sharp constants. Exhaustive
/// up to 12 terms unless `samples` asks for Monte Carlo.
#[pyfunction]
#[pyo3(signature = (a, p, samples = None, seed = 0))]
fn khintchine<'py>(
    py: Python<'py>,
    a: Vec<f64>,
    p: f64,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = match samples {
        Some(samples) => KhintchineMode::MonteCarlo { samples, seed },
        None => KhintchineMode::auto(a.len()),
    };
    to_dict(py, &khintchine_check_with(&a, p, mode).map_err(err)?)
}

#[pyfunction]
fn khintchine_constants(p: f64) -> (f64, f64) {
    sharp_khintchine_constants(p)
}

/// Calderón-Zygmund decomposition at level `alpha`, with the property checks.
#[pyfunction]
fn cz<'py>(py: Python<'py>, f: &PyFunction, alpha: f64) -> PyResult<Bound<'py, PyDict>> {
    let dec = cz_decompose(&f.inner, alpha).map_err(err)?;
    let report = verify_cz(&dec, &f.inner).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("alpha", dec.alpha)?;
    let selected: Vec<(i32, i64)> = dec.selected.iter().map(|q| (q.kappa, q.nu)).collect();
    out.set_item("selected", selected)?;
    out.set_item("good", PyFunction::wrap(dec.good.clone()))?;
    let bad: Vec<PyFunction> = dec.bad_parts.iter().cloned().map(PyFunction::wrap).collect();
    out.set_item("bad_parts", bad)?;
    out.set_item("checks", to_dict(py, &report.checks)?)?;
    out.set_item("all_passed", report.all_passed())?;
    Ok(out)
}

#[pymodule]
fn pylpmra(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_class::<PyScalingSystem>()?;
    m.add_class::<PyProjector>()?;
    m.add_class::<PyTensor>()?;
    m.add_function(wrap_pyfunction!(khintchine, m)?)?;
    m.add_function(wrap_pyfunction!(khintchine_constants, m)?)?;
    m.add_function(wrap_pyfunction!(cz, m)?)?;
    Ok(())
}
