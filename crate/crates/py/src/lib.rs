//! Python module `cubesum_py`. Reports are returned as JSON strings.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use rug::{Integer, Rational};
use serde::Serialize;

use cubesum::error::Error;
use cubesum::lseries::{LOptions, LSeries};
use cubesum::{ellcurve::CurveK, gz, x36};

fn err(e: Error) -> PyErr {
    let mut root = &e;
    while let Error::Stage { source, .. } = root {
        root = source;
    }
    match root {
        Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json<T: Serialize>(t: &T) -> PyResult<String> {
    serde_json::to_string(t).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

fn opts(prec: u32) -> LOptions {
    LOptions { prec, ..LOptions::default() }
}

/// Canonical Γ₀(36) class of p/q.
#[pyfunction]
fn cusp_classify(p: i64, q: i64) -> PyResult<String> {
    x36::cusp_classify(&Integer::from(p), &Integer::from(q)).map(|c| c.to_string()).map_err(err)
}

#[pyfunction]
fn normalizer_report() -> PyResult<String> {
    json(&x36::verify_normalizer_table().map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (n, prec = 192))]
fn certify(n: &str, prec: u32) -> PyResult<String> {
    let n: Integer = n.parse().map_err(|_| PyValueError::new_err(format!("'{}' is not an integer", n)))?;
    json(&gz::certify(&n, &opts(prec)).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (primes, signs, prec = 192))]
fn gz_verify(primes: Vec<u64>, signs: Vec<i8>, prec: u32) -> PyResult<String> {
    json(&gz::gz_verify(&primes, &signs, &opts(prec)).map_err(err)?)
}

/// L(1), L'(1) of y² = x³ + k.
#[pyfunction]
#[pyo3(signature = (k, prec = 192))]
fn lvalue(k: &str, prec: u32) -> PyResult<String> {
    let k: Rational = k.parse().map_err(|_| PyValueError::new_err(format!("'{}' is not a rational", k)))?;
    let curve = CurveK::new(k).map_err(err)?;
    let l = LSeries::new(&curve, &opts(prec)).map_err(err)?;
    json(&l.report(&curve).map_err(err)?)
}

#[pymodule]
fn cubesum_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(cusp_classify, m)?)?;
    m.add_function(wrap_pyfunction!(normalizer_report, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(gz_verify, m)?)?;
    m.add_function(wrap_pyfunction!(lvalue, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
