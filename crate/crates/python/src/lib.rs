//! Python bindings. Rationals cross the boundary as strings such as `"-7/2"`;
//! check reports come back as plain dicts.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use qkz_core::algebra::{Rat, Scalar};
use qkz_core::classical::{compare_loop_algebra, BracketTable, expand_rll, jacobi_check, Identification};
use qkz_core::fusion::{qdet_check, rll_sample_check, Relation, RllSample};
use qkz_core::qkz::{CoinvariantVector, LatticePath, QkzSystem as CoreSystem, Step};
use qkz_core::rmatrix::{bare_r as core_bare_r, crossing_check, unitarity_check, ybe_check, Bare, HbarAffine, Normalized, RFamily, RMode};
use qkz_core::Error;

create_exception!(qkz_lab_py, QkzError, PyException);
create_exception!(qkz_lab_py, PoleError, QkzError);
create_exception!(qkz_lab_py, ConfigError, QkzError);

fn py_err(e: Error) -> PyErr {
    let msg = e.to_string();
    if e.is_pole() {
        return PoleError::new_err(msg);
    }
    let mut inner = &e;
    while let Error::AtStep { source, .. } = inner {
        inner = source;
    }
    match inner {
        Error::InvalidConfig(_) | Error::Parse(_) | Error::BadLegIndex { .. } | Error::DimensionMismatch(_) => {
            ConfigError::new_err(msg)
        }
        _ => QkzError::new_err(msg),
    }
}

fn rat(s: &str) -> PyResult<Rat> {
    s.trim().parse().map_err(py_err)
}

fn rats(v: &[String]) -> PyResult<Vec<Rat>> {
    v.iter().map(|s| rat(s)).collect()
}

fn mode(order: Option<usize>) -> PyResult<RMode> {
    match order {
        None => Ok(RMode::Bare),
        Some(order) => RMode::Normalized { order }.validate().map_err(py_err),
    }
}

fn to_py(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| QkzError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn strings<S: ToString>(xs: &[S]) -> Vec<String> {
    xs.iter().map(|x| x.to_string()).collect()
}

/// Bare `R(z)` at numeric ħ as a 4×4 table of strings.
#[pyfunction]
#[pyo3(signature = (z, hbar = "1"))]
fn bare_r(z: &str, hbar: &str) -> PyResult<Vec<Vec<String>>> {
    let r = core_bare_r(&rat(z)?, &rat(hbar)?).map_err(py_err)?;
    Ok(r.rows().iter().map(|row| strings(row)).collect())
}

/// Yang–Baxter check; `order` switches to the normalized R-matrix.
#[pyfunction]
#[pyo3(signature = (u, v, hbar = "1", order = None))]
fn ybe(py: Python<'_>, u: &str, v: &str, hbar: &str, order: Option<usize>) -> PyResult<Py<PyAny>> {
    let rep = ybe_check(mode(order)?, &rat(u)?, &rat(v)?, &rat(hbar)?).map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (z, hbar = "1", order = None))]
fn unitarity(py: Python<'_>, z: &str, hbar: &str, order: Option<usize>) -> PyResult<Py<PyAny>> {
    let rep = unitarity_check(mode(order)?, &rat(z)?, &rat(hbar)?).map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (z, hbar = "1", order = None))]
fn crossing(py: Python<'_>, z: &str, hbar: &str, order: Option<usize>) -> PyResult<Py<PyAny>> {
    let rep = crossing_check(mode(order)?, &rat(z)?, &rat(hbar)?).map_err(py_err)?;
    to_py(py, &rep)
}

#[pyfunction]
#[pyo3(signature = (hbar = "1", order = None))]
fn qdet(py: Python<'_>, hbar: &str, order: Option<usize>) -> PyResult<Py<PyAny>> {
    let rep = qdet_check(mode(order)?, &rat(hbar)?).map_err(py_err)?;
    to_py(py, &rep)
}

/// Order-ħ² bracket comparisons (all relations by default), plus Jacobi on
/// the merged table when it closes any triple.
#[pyfunction]
#[pyo3(signature = (relation = None, cutoff = 2, identification = "signed"))]
fn classical(py: Python<'_>, relation: Option<&str>, cutoff: i64, identification: &str) -> PyResult<Py<PyAny>> {
    let rels = match relation {
        None => Relation::ALL.to_vec(),
        Some(r) => vec![r.parse().map_err(py_err)?],
    };
    let id = match identification {
        "signed" => Identification::Signed,
        "transposed" => Identification::Transposed,
        "direct" => Identification::Direct,
        other => return Err(ConfigError::new_err(format!("unknown identification {other:?}"))),
    };
    let tables = rels.iter().map(|&r| expand_rll(r, cutoff)).collect::<qkz_core::Result<Vec<_>>>().map_err(py_err)?;
    let mut reps: Vec<_> = tables.iter().map(|t| compare_loop_algebra(t, id)).collect();
    let jac = jacobi_check(&BracketTable::merge(&tables.iter().collect::<Vec<_>>()));
    if jac.details["triples_checked"] != 0 {
        reps.push(jac);
    }
    to_py(py, &reps)
}

#[derive(Clone)]
enum Inner {
    Bare(CoreSystem<Bare>),
    Normalized(CoreSystem<Normalized>),
}

macro_rules! with_sys {
    ($inner:expr, |$s:ident| $body:expr) => {
        match $inner {
            Inner::Bare($s) => $body,
            Inner::Normalized($s) => $body,
        }
    };
}

/// qKZ difference operators for points `z_1..z_n` at level `k`.
#[pyclass(frozen)]
struct QkzSystem {
    inner: Inner,
}

fn transport_strings<F: RFamily>(
    sys: &CoreSystem<F>,
    path: &LatticePath,
    vector: &[Rat],
) -> qkz_core::Result<(Vec<String>, Vec<String>)> {
    let v = CoinvariantVector::new(vector.iter().map(F::S::from_rat).collect(), sys.n())?;
    let (w, end) = sys.transport(path, &v)?;
    Ok((strings(w.components()), strings(end.points())))
}

#[pymethods]
impl QkzSystem {
    #[new]
    #[pyo3(signature = (points, level = "0", hbar = "1", order = None))]
    fn new(points: Vec<String>, level: &str, hbar: &str, order: Option<usize>) -> PyResult<Self> {
        let (points, level) = (rats(&points)?, rat(level)?);
        let inner = match mode(order)? {
            RMode::Bare => Inner::Bare(CoreSystem::from_rats(Bare { hbar: rat(hbar)? }, level, &points).map_err(py_err)?),
            RMode::Normalized { order } => {
                Inner::Normalized(CoreSystem::from_rats(Normalized { order }, level, &points).map_err(py_err)?)
            }
        };
        Ok(QkzSystem { inner })
    }

    #[getter]
    fn n(&self) -> usize {
        with_sys!(&self.inner, |s| s.n())
    }

    #[getter]
    fn points(&self) -> Vec<String> {
        with_sys!(&self.inner, |s| strings(s.points()))
    }

    #[getter]
    fn degenerate_step(&self) -> bool {
        with_sys!(&self.inner, |s| s.degenerate_step())
    }

    /// Entries of `A_i` as strings, row-major.
    fn a_matrix(&self, i: usize) -> PyResult<Vec<Vec<String>>> {
        with_sys!(&self.inner, |s| {
            let a = s.build_a(i).map_err(py_err)?;
            Ok(a.rows().iter().map(|row| strings(row)).collect())
        })
    }

    fn flatness(&self, py: Python<'_>, i: usize, j: usize) -> PyResult<Py<PyAny>> {
        let rep = with_sys!(&self.inner, |s| s.flatness_check(i, j)).map_err(py_err)?;
        to_py(py, &rep)
    }

    /// Transports `vector` along signed leg steps; returns `(vector, points)`.
    #[pyo3(signature = (steps, vector))]
    fn transport(&self, steps: Vec<i64>, vector: Vec<String>) -> PyResult<(Vec<String>, Vec<String>)> {
        let steps = steps
            .iter()
            .map(|&k| match k {
                0 => Err(ConfigError::new_err("step 0 is not a leg")),
                k => Ok(Step { i: k.unsigned_abs() as usize, sign: k.signum() as i8 }),
            })
            .collect::<PyResult<Vec<_>>>()?;
        let path = LatticePath::new(steps);
        let vector = rats(&vector)?;
        with_sys!(&self.inner, |s| transport_strings(s, &path, &vector)).map_err(py_err)
    }

    /// One RLL exchange relation at sample spectral parameters.
    #[allow(clippy::too_many_arguments)]
    #[pyo3(signature = (relation, t, t_prime, i = 1, j = None, central = "0"))]
    fn rll(
        &self,
        py: Python<'_>,
        relation: &str,
        t: &str,
        t_prime: &str,
        i: usize,
        j: Option<usize>,
        central: &str,
    ) -> PyResult<Py<PyAny>> {
        let rel: Relation = relation.parse().map_err(py_err)?;
        let rep = with_sys!(&self.inner, |s| {
            let sample = RllSample {
                points: s.points().to_vec(),
                t: HbarAffine::constant(rat(t)?),
                t_prime: HbarAffine::constant(rat(t_prime)?),
                i,
                j: j.unwrap_or(s.n()),
                central: rat(central)?,
                misorder: false,
            };
            rll_sample_check(s.family(), rel, &sample)
        })
        .map_err(py_err)?;
        to_py(py, &rep)
    }

    fn __repr__(&self) -> String {
        with_sys!(&self.inner, |s| format!("QkzSystem(points=[{}], level={})", strings(s.points()).join(", "), s.level()))
    }
}

#[pymodule]
fn qkz_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("QkzError", py.get_type::<QkzError>())?;
    m.add("PoleError", py.get_type::<PoleError>())?;
    m.add("ConfigError", py.get_type::<ConfigError>())?;
    m.add_class::<QkzSystem>()?;
    m.add_function(wrap_pyfunction!(bare_r, m)?)?;
    m.add_function(wrap_pyfunction!(ybe, m)?)?;
    m.add_function(wrap_pyfunction!(unitarity, m)?)?;
    m.add_function(wrap_pyfunction!(crossing, m)?)?;
    m.add_function(wrap_pyfunction!(qdet, m)?)?;
    m.add_function(wrap_pyfunction!(classical, m)?)?;
    Ok(())
}
