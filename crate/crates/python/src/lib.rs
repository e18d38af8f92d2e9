//! Python bindings. Reports come back as frozen objects; every one can also
//! be dumped to the CLI's JSON via `to_json()`.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use zetaglue::cli::{self, RunConfig};
use zetaglue::cylinder::{self, BoundaryCondition, CylinderSpec};
use zetaglue::gluing::{self, GluingConfig};
use zetaglue::interface_ops::{self, InterfaceGeometry};
use zetaglue::oracle::{self, SecularProblem};
use zetaglue::report::Term;
use zetaglue::series::Precision;
use zetaglue::spectra::{self, CrossSection};
use zetaglue::zreg;

create_exception!(zetaglue_py, ZetaglueError, PyException);
create_exception!(zetaglue_py, NonConvergenceError, ZetaglueError);
create_exception!(zetaglue_py, InadmissibleError, ZetaglueError);

fn py_err(e: zetaglue::Error) -> PyErr {
    match e.exit_code() {
        3 => NonConvergenceError::new_err(e.to_string()),
        4 => InadmissibleError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> PyResult<String> {
    serde_json::to_string(v).map_err(|e| ZetaglueError::new_err(e.to_string()))
}

type TermTuple = (String, String, f64, i64);

fn tuples(terms: &[Term]) -> Vec<TermTuple> {
    terms.iter().map(|t| (t.name.clone(), t.source.clone(), t.value, t.phase)).collect()
}

fn precision(target: f64, cutoff_scale: f64) -> PyResult<Precision> {
    let p = Precision { target, cutoff_scale, ..Precision::default() };
    p.validate().map_err(py_err)?;
    Ok(p)
}

/// `"d"`, `"n"` or `"r"`; `r` takes `alpha`.
fn boundary(code: &str, alpha: f64) -> PyResult<BoundaryCondition> {
    match code.to_ascii_lowercase().as_str() {
        "d" | "dirichlet" => Ok(BoundaryCondition::Dirichlet),
        "n" | "neumann" => Ok(BoundaryCondition::Neumann),
        "r" | "robin" => Ok(BoundaryCondition::Robin(alpha)),
        other => Err(PyValueError::new_err(format!("unknown boundary condition {other:?}"))),
    }
}

#[pyclass(name = "CrossSection", frozen, from_py_object)]
#[derive(Clone)]
struct PyCrossSection {
    inner: CrossSection,
}

#[pymethods]
impl PyCrossSection {
    #[staticmethod]
    fn point() -> Self {
        Self { inner: CrossSection::point() }
    }

    #[staticmethod]
    fn circle(circumference: f64) -> PyResult<Self> {
        Ok(Self { inner: CrossSection::circle(circumference).map_err(py_err)? })
    }

    #[staticmethod]
    fn flat_torus(l1: f64, l2: f64) -> PyResult<Self> {
        Ok(Self { inner: CrossSection::flat_torus(l1, l2).map_err(py_err)? })
    }

    /// Same document format as `explicit:path` on the command line.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: CrossSection::from_explicit_json(text).map_err(py_err)? })
    }

    /// `(eigenvalue, multiplicity)` for every eigenvalue up to `cutoff`.
    fn spectrum(&self, cutoff: f64) -> PyResult<Vec<(f64, u64)>> {
        let s = spectra::enumerate_spectrum(&self.inner, cutoff).map_err(py_err)?;
        Ok(s.into_iter().map(|e| (e.eigenvalue, e.multiplicity)).collect())
    }

    fn kernel_dim(&self) -> u64 {
        spectra::kernel_dim(&self.inner)
    }

    fn heat_trace(&self, t: f64) -> PyResult<f64> {
        spectra::heat_trace(&self.inner, t).map_err(py_err)
    }

    fn zeta(&self, s: f64, include_zero: bool) -> PyResult<(f64, f64)> {
        let z = zreg::zeta_point(&self.inner, s, include_zero).map_err(py_err)?;
        Ok((z.value, z.residue))
    }

    fn log_det_star(&self) -> PyResult<f64> {
        Ok(zreg::log_det_star(&self.inner).map_err(py_err)?.log_modulus)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyclass(name = "DetReport", frozen)]
struct PyDetReport {
    inner: cylinder::DetReport,
}

#[pymethods]
impl PyDetReport {
    #[getter]
    fn log_det(&self) -> f64 {
        self.inner.log_det
    }
    #[getter]
    fn phase(&self) -> i64 {
        self.inner.phase_multiple
    }
    #[getter]
    fn kernel_dim(&self) -> u64 {
        self.inner.kernel_dim
    }
    #[getter]
    fn truncation(&self) -> f64 {
        self.inner.truncation
    }
    /// `(name, formula, value, phase)` per term.
    #[getter]
    fn terms(&self) -> Vec<TermTuple> {
        tuples(&self.inner.terms)
    }
    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }
    fn __repr__(&self) -> String {
        format!("DetReport({}, log_det={:.16e}, phase={})", self.inner.boundary, self.inner.log_det, self.inner.phase_multiple)
    }
}

#[pyclass(name = "GluingReport", frozen)]
struct PyGluingReport {
    inner: gluing::GluingReport,
}

#[pymethods]
impl PyGluingReport {
    #[getter]
    fn lhs(&self) -> f64 {
        self.inner.lhs
    }
    #[getter]
    fn rhs(&self) -> f64 {
        self.inner.rhs
    }
    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }
    #[getter]
    fn phase_match(&self) -> bool {
        self.inner.phase_match
    }
    #[getter]
    fn lhs_terms(&self) -> Vec<TermTuple> {
        tuples(&self.inner.lhs_terms)
    }
    #[getter]
    fn rhs_terms(&self) -> Vec<TermTuple> {
        tuples(&self.inner.rhs_terms)
    }
    fn to_json(&self) -> PyResult<String> {
        json(&self.inner)
    }
    fn __repr__(&self) -> String {
        format!("GluingReport(residual={:.3e}, phase_match={})", self.inner.residual, self.inner.phase_match)
    }
}

/// `ln Det` on `[0, L] × Y`; `left`/`right` are `"d"`, `"n"` or `"r"`.
#[pyfunction]
#[pyo3(signature = (cross, length, left, right, alpha = 0.0, target = 1e-10, cutoff_scale = 1.0))]
fn log_det_cylinder(
    cross: &PyCrossSection,
    length: f64,
    left: &str,
    right: &str,
    alpha: f64,
    target: f64,
    cutoff_scale: f64,
) -> PyResult<PyDetReport> {
    let spec = CylinderSpec::new(cross.inner.clone(), length, boundary(left, alpha)?, boundary(right, alpha)?).map_err(py_err)?;
    let r = cylinder::log_det_cylinder_with(&spec, &precision(target, cutoff_scale)?).map_err(py_err)?;
    Ok(PyDetReport { inner: r })
}

/// Gluing check across the cut at `a`; `alpha = 0` is the Neumann case.
#[pyfunction]
#[pyo3(signature = (cross, length, a, alpha = 0.0, target = 1e-10, cutoff_scale = 1.0))]
fn glue_check(cross: &PyCrossSection, length: f64, a: f64, alpha: f64, target: f64, cutoff_scale: f64) -> PyResult<PyGluingReport> {
    let cfg = GluingConfig::new(cross.inner.clone(), length, a, alpha).map_err(py_err)?;
    let r = gluing::glue_check(&cfg, &precision(target, cutoff_scale)?).map_err(py_err)?;
    Ok(PyGluingReport { inner: r })
}

/// Geometry as the JSON object `{"kind": "both_ends", "length": 1.0}` etc.
fn geometry(text: &str) -> PyResult<InterfaceGeometry> {
    serde_json::from_str(text).map_err(|e| PyValueError::new_err(format!("geometry: {e}")))
}

/// `(eigenvalue, multiplicity)` of the interface operator up to `cutoff`,
/// with the number of exact zero modes.
#[pyfunction]
fn interface_spectrum(cross: &PyCrossSection, geometry_json: &str, alpha: f64, cutoff: f64) -> PyResult<(Vec<(f64, u64)>, u64)> {
    let s = interface_ops::spec_interface(&cross.inner, geometry(geometry_json)?, alpha, cutoff).map_err(py_err)?;
    Ok((s.entries.iter().map(|e| (e.eigenvalue, e.multiplicity)).collect(), s.zero_modes))
}

/// `(ln |Det|, phase)` of the interface operator.
#[pyfunction]
#[pyo3(signature = (cross, geometry_json, alpha, target = 1e-10))]
fn interface_log_det(cross: &PyCrossSection, geometry_json: &str, alpha: f64, target: f64) -> PyResult<(f64, i64)> {
    let d = interface_ops::log_det_interface(&cross.inner, geometry(geometry_json)?, alpha, &precision(target, 1.0)?)
        .map_err(py_err)?;
    let v = d.log_value();
    Ok((v.re, v.phase))
}

#[pyfunction]
fn qd_det_segment(lambda: f64, alpha: f64, length: f64) -> f64 {
    interface_ops::qd_det_segment(lambda.into(), alpha, length).re
}

/// First `n` eigenvalues of `-d²/du²` on `[0, L]`.
#[pyfunction]
#[pyo3(signature = (length, left, right, n, alpha = 0.0))]
fn segment_eigenvalues(length: f64, left: &str, right: &str, n: usize, alpha: f64) -> PyResult<Vec<f64>> {
    let p = SecularProblem::new(length, boundary(left, alpha)?, boundary(right, alpha)?).map_err(py_err)?;
    oracle::segment_eigenvalues(&p, n).map_err(py_err)
}

/// `(ln Det*, error estimate)` from `n` secular-equation eigenvalues.
#[pyfunction]
#[pyo3(signature = (length, left, right, n = 10_000, alpha = 0.0))]
fn oracle_log_det(length: f64, left: &str, right: &str, n: usize, alpha: f64) -> PyResult<(f64, f64)> {
    let p = SecularProblem::new(length, boundary(left, alpha)?, boundary(right, alpha)?).map_err(py_err)?;
    let d = oracle::oracle_log_det(&p, n).map_err(py_err)?;
    Ok((d.log_det, d.error_estimate))
}

/// Runs a command-line config (JSON) and returns the JSON report.
#[pyfunction]
fn run(config_json: &str) -> PyResult<String> {
    let cfg: RunConfig = serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(format!("config: {e}")))?;
    let r = cli::run(&cfg).map_err(py_err)?;
    Ok(cli::to_json(&r))
}

#[pymodule]
pub fn zetaglue_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCrossSection>()?;
    m.add_class::<PyDetReport>()?;
    m.add_class::<PyGluingReport>()?;
    m.add("ZetaglueError", m.py().get_type::<ZetaglueError>())?;
    m.add("NonConvergenceError", m.py().get_type::<NonConvergenceError>())?;
    m.add("InadmissibleError", m.py().get_type::<InadmissibleError>())?;
    m.add_function(wrap_pyfunction!(log_det_cylinder, m)?)?;
    m.add_function(wrap_pyfunction!(glue_check, m)?)?;
    m.add_function(wrap_pyfunction!(interface_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(interface_log_det, m)?)?;
    m.add_function(wrap_pyfunction!(qd_det_segment, m)?)?;
    m.add_function(wrap_pyfunction!(segment_eigenvalues, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_log_det, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
