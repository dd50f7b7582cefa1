//! Python bindings: coefficient sources, the characteristic function, the
//! spectrum finder, second-kind quantities and the identity checks.

use jacobi_spectral::charfn::{charfn_ratio, CharFn, CharFnValue, Method};
use jacobi_spectral::identities::{identity_suite, IdentityGrid};
use jacobi_spectral::precision::Precision;
use jacobi_spectral::qseries::{proposition_asc2, qpoch, QCount, QParams};
use jacobi_spectral::recurrence::eval_phat;
use jacobi_spectral::second_kind::{trace_inverse, weyl, SeriesOptions};
use jacobi_spectral::spectrum::{find_spectrum, section_eigenvalues, SpectrumOptions};
use jacobi_spectral::verify::{run_suite, VerifyConfig};
use jacobi_spectral::{CoefficientSource, Complex64, Error, Family};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

type IdentityRowTuple = (&'static str, f64, usize, f64, bool);
type CheckTuple = (&'static str, f64, f64, bool, bool);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Uncertified { .. } | Error::NonConvergence { .. } => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Coefficient source of a semi-infinite Jacobi matrix.
#[pyclass(name = "CoefficientSource", module = "pyjacobi", frozen, from_py_object)]
#[derive(Clone)]
pub struct PySource(CoefficientSource);

#[pymethods]
impl PySource {
    /// Al-Salam–Carlitz II family with parameters `q`, `a`, shifted by `shift`.
    #[staticmethod]
    #[pyo3(signature = (q, a, shift = 0.0))]
    fn asc2(q: f64, a: f64, shift: f64) -> PyResult<Self> {
        Ok(PySource(CoefficientSource::asc2(q, a).map_err(to_py)?.with_shift(shift)))
    }

    /// Explicit finite table.
    #[staticmethod]
    #[pyo3(signature = (alphas, betas, shift = 0.0))]
    fn table(alphas: Vec<f64>, betas: Vec<f64>, shift: f64) -> PyResult<Self> {
        Ok(PySource(CoefficientSource::table(alphas, betas).map_err(to_py)?.with_shift(shift)))
    }

    /// `(alpha_n, beta_n - shift)`.
    fn coeffs(&self, n: usize) -> PyResult<(f64, f64)> {
        self.0.coeffs(n).map_err(to_py)
    }

    #[getter]
    fn shift(&self) -> f64 {
        self.0.shift()
    }

    #[getter]
    fn is_infinite(&self) -> bool {
        self.0.is_infinite()
    }

    fn __repr__(&self) -> String {
        match self.0.family() {
            Family::Asc2 { q, a } => format!("CoefficientSource.asc2(q={q}, a={a}, shift={})", self.0.shift()),
            Family::Table { betas, .. } => format!("CoefficientSource.table(<{} rows>, shift={})", betas.len(), self.0.shift()),
        }
    }
}

/// One evaluation of the characteristic function.
#[pyclass(name = "CharFnValue", module = "pyjacobi", frozen, get_all)]
pub struct PyCharFnValue {
    z: Complex64,
    value: Complex64,
    tail_bound: f64,
    rounding_bound: f64,
    method: &'static str,
    terms_used: usize,
    certified: bool,
}

impl From<CharFnValue> for PyCharFnValue {
    fn from(v: CharFnValue) -> Self {
        PyCharFnValue {
            z: v.z,
            value: v.value,
            tail_bound: v.tail_bound,
            rounding_bound: v.rounding_bound,
            method: match v.method {
                Method::PartialSum => "partial_sum",
                Method::RatioLimit => "ratio_limit",
            },
            terms_used: v.terms_used,
            certified: v.certified,
        }
    }
}

#[pymethods]
impl PyCharFnValue {
    fn total_bound(&self) -> f64 {
        self.tail_bound + self.rounding_bound
    }

    fn __repr__(&self) -> String {
        format!("CharFnValue(value={}, bound={:e}, certified={})", self.value, self.total_bound(), self.certified)
    }
}

/// Characteristic function with a cached kappa table.
#[pyclass(name = "CharFn", module = "pyjacobi")]
pub struct PyCharFn(CharFn);

#[pymethods]
impl PyCharFn {
    #[new]
    #[pyo3(signature = (src, max_terms = 8192))]
    fn new(src: &PySource, max_terms: usize) -> PyResult<Self> {
        Ok(PyCharFn(CharFn::new(&src.0, max_terms).map_err(to_py)?))
    }

    /// Certified partial sum with absolute truncation target `atol`.
    #[pyo3(signature = (z, atol = 1e-12))]
    fn partial_sum(&mut self, z: Complex64, atol: f64) -> PyResult<PyCharFnValue> {
        Ok(self.0.partial_sum(z, atol).map_err(to_py)?.into())
    }

    /// `P_n(z) / P_n(0)` at `n = n_max` (heuristic bound).
    #[pyo3(signature = (z, n_max = 200))]
    fn ratio(&self, z: Complex64, n_max: usize) -> PyResult<PyCharFnValue> {
        Ok(charfn_ratio(self.0.source(), z, n_max).map_err(to_py)?.into())
    }

    /// `tr J^{-1}` upper estimate from the cached table.
    #[getter]
    fn kappa_total(&self) -> f64 {
        self.0.kappa_total()
    }
}

/// A located eigenvalue.
#[pyclass(name = "Eigenvalue", module = "pyjacobi", frozen, get_all)]
pub struct PyEigenvalue {
    index: usize,
    value: f64,
    residual: f64,
    tail_bound: f64,
    bracket: (f64, f64),
    oracle_value: f64,
    oracle_gap: f64,
    sign_change: bool,
}

#[pymethods]
impl PyEigenvalue {
    fn __repr__(&self) -> String {
        format!("Eigenvalue(index={}, value={})", self.index, self.value)
    }
}

/// Smallest `k` eigenvalues; returns `(eigenvalues, unresolved_indices)`.
#[pyfunction]
#[pyo3(signature = (src, k, tol = 1e-10))]
fn spectrum(src: &PySource, k: usize, tol: f64) -> PyResult<(Vec<PyEigenvalue>, Vec<usize>)> {
    let opts = SpectrumOptions { tol, ..SpectrumOptions::default() };
    let res = find_spectrum(&src.0, k, &opts).map_err(to_py)?;
    let eigs = res
        .eigenvalues
        .into_iter()
        .map(|e| PyEigenvalue {
            index: e.index,
            value: e.lambda,
            residual: e.residual,
            tail_bound: e.tail_bound,
            bracket: e.bracket,
            oracle_value: e.oracle_value,
            oracle_gap: e.oracle_gap,
            sign_change: e.sign_change,
        })
        .collect();
    Ok((eigs, res.unresolved))
}

/// `k` smallest eigenvalues of the `n x n` leading section.
#[pyfunction]
#[pyo3(signature = (src, n, k, tol = 0.0))]
fn section_eigenvalues_py(src: &PySource, n: usize, k: usize, tol: f64) -> PyResult<Vec<f64>> {
    section_eigenvalues(&src.0, n, k, tol).map_err(to_py)
}

/// `P_n(z)`; may overflow to infinity for large `n`.
#[pyfunction]
fn phat(src: &PySource, z: Complex64, n: usize) -> PyResult<Complex64> {
    Ok(eval_phat(&src.0, z, n).map_err(to_py)?.value())
}

/// `(tr J^{-1}, error_bound)`.
#[pyfunction]
#[pyo3(signature = (src, atol = 1e-12, max_terms = 100_000))]
fn trace(src: &PySource, atol: f64, max_terms: usize) -> PyResult<(f64, f64)> {
    let t = trace_inverse(&src.0, atol, max_terms).map_err(to_py)?;
    Ok((t.value, t.error_bound))
}

/// Weyl function `w(z)` for real `z < gamma`; returns `(value, tail_bound)`.
#[pyfunction]
#[pyo3(signature = (src, z, gamma, atol = 1e-14))]
fn weyl_function(src: &PySource, z: f64, gamma: f64, atol: f64) -> PyResult<(f64, f64)> {
    let w = weyl(&src.0, z, gamma, SeriesOptions { atol, ..SeriesOptions::default() }).map_err(to_py)?;
    Ok((w.value, w.tail_bound))
}

/// `(x; q)_n`, or `(x; q)_inf` when `n` is `None`.
#[pyfunction]
#[pyo3(signature = (x, q, n = None))]
fn q_pochhammer(x: Complex64, q: f64, n: Option<usize>) -> PyResult<Complex64> {
    let count = n.map_or(QCount::Infinite, QCount::Finite);
    Ok(qpoch(x, q, count).map_err(to_py)?.value)
}

/// Series and product sides of the ASC-II product identity at `z`:
/// `(series_side, product_side, gap, tail_bound)`.
#[pyfunction]
#[pyo3(signature = (q, a, z, atol = 1e-16))]
fn product_identity(q: f64, a: f64, z: Complex64, atol: f64) -> PyResult<(Complex64, Complex64, f64, f64)> {
    let params = QParams::determinate(q, a).map_err(to_py)?;
    let c = proposition_asc2(params, z, atol).map_err(to_py)?;
    Ok((c.series_side, c.product_side, c.gap, c.tail_bound))
}

/// q-series identity gaps: list of `(identity, q, cases, max_gap, passed)`.
#[pyfunction]
#[pyo3(signature = (q_list = None))]
fn identities(q_list: Option<Vec<f64>>) -> PyResult<Vec<IdentityRowTuple>> {
    let mut grid = IdentityGrid::default();
    if let Some(q) = q_list {
        grid.q_list = q;
    }
    let rows = identity_suite(&grid).map_err(to_py)?;
    Ok(rows.into_iter().map(|r| (r.identity, r.q, r.cases, r.max_gap, r.passed)).collect())
}

/// Structural identity suite: list of `(check, measured, threshold, passed, skipped)`.
#[pyfunction]
#[pyo3(signature = (src, precision_digits = None))]
fn verify(src: &PySource, precision_digits: Option<u32>) -> PyResult<Vec<CheckTuple>> {
    let precision = match precision_digits {
        Some(d) => Precision::from_digits(d).map_err(to_py)?,
        None => Precision::Binary64,
    };
    let rep = run_suite(&src.0, &VerifyConfig { precision, ..VerifyConfig::default() }).map_err(to_py)?;
    Ok(rep.checks.into_iter().map(|c| (c.name, c.measured, c.threshold, c.passed, c.skipped)).collect())
}

#[pymodule]
fn pyjacobi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", jacobi_spectral::VERSION)?;
    m.add_class::<PySource>()?;
    m.add_class::<PyCharFn>()?;
    m.add_class::<PyCharFnValue>()?;
    m.add_class::<PyEigenvalue>()?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(section_eigenvalues_py, m)?)?;
    m.add_function(wrap_pyfunction!(phat, m)?)?;
    m.add_function(wrap_pyfunction!(trace, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_function, m)?)?;
    m.add_function(wrap_pyfunction!(q_pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(product_identity, m)?)?;
    m.add_function(wrap_pyfunction!(identities, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
