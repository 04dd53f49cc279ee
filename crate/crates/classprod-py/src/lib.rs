//! Python bindings: fields, matrices by literal or nested list, groups with
//! exact eta / min-scan, and the certified trace-set bound. Reports come
//! back as plain dicts mirroring the CLI's JSON.

use classprod::bounds;
use classprod::canonical;
use classprod::classgroup::{Group, GroupData, GroupFamily, DEFAULT_BUDGET};
use classprod::field::Field;
use classprod::matrices::Mat;
use classprod::polyring::{self, Poly};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use std::str::FromStr;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        Value::Number(n) => {
            if let Some(u) = n.as_u64() {
                u.into_pyobject(py)?.unbind().into()
            } else if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.as_f64().unwrap().into_pyobject(py)?.unbind().into()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.unbind().into()
        }
    })
}

fn report_to_py<T: serde::Serialize>(py: Python<'_>, report: &T) -> PyResult<Py<PyAny>> {
    let value = serde_json::to_value(report).map_err(|e| PyRuntimeError::new_err(e.to_string()));
    json_to_py(py, &value?)
}

/// GF(p^m) with exact table-driven arithmetic on integer encodings.
#[pyclass(name = "Field", module = "classprod", from_py_object)]
#[derive(Clone)]
struct PyField {
    inner: Field,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, m = 1))]
    fn new(p: u32, m: u32) -> PyResult<Self> {
        Ok(PyField {
            inner: Field::new(p, m).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn from_literal(literal: &str) -> PyResult<Self> {
        Ok(PyField {
            inner: Field::from_literal(literal).map_err(value_err)?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.p()
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn q(&self) -> u32 {
        self.inner.q()
    }

    /// Modulus as a polynomial literal, low degree first.
    fn modulus(&self) -> String {
        self.inner.modulus_literal()
    }

    fn add(&self, a: u32, b: u32) -> PyResult<u32> {
        let f = &self.inner;
        let (a, b) = (
            f.try_elt(a as u64).map_err(value_err)?,
            f.try_elt(b as u64).map_err(value_err)?,
        );
        Ok(f.add(a, b).encoding())
    }

    fn sub(&self, a: u32, b: u32) -> PyResult<u32> {
        let f = &self.inner;
        let (a, b) = (
            f.try_elt(a as u64).map_err(value_err)?,
            f.try_elt(b as u64).map_err(value_err)?,
        );
        Ok(f.sub(a, b).encoding())
    }

    fn mul(&self, a: u32, b: u32) -> PyResult<u32> {
        let f = &self.inner;
        let (a, b) = (
            f.try_elt(a as u64).map_err(value_err)?,
            f.try_elt(b as u64).map_err(value_err)?,
        );
        Ok(f.mul(a, b).encoding())
    }

    fn neg(&self, a: u32) -> PyResult<u32> {
        let f = &self.inner;
        Ok(f.neg(f.try_elt(a as u64).map_err(value_err)?).encoding())
    }

    fn inv(&self, a: u32) -> PyResult<u32> {
        let f = &self.inner;
        let a = f.try_elt(a as u64).map_err(value_err)?;
        Ok(f.inv(a).map_err(value_err)?.encoding())
    }

    fn pow(&self, a: u32, e: u64) -> PyResult<u32> {
        let f = &self.inner;
        Ok(f.pow(f.try_elt(a as u64).map_err(value_err)?, e).encoding())
    }

    fn is_square(&self, a: u32) -> PyResult<bool> {
        let f = &self.inner;
        Ok(f.is_square(f.try_elt(a as u64).map_err(value_err)?))
    }

    fn sqrt(&self, a: u32) -> PyResult<Option<u32>> {
        let f = &self.inner;
        Ok(f.sqrt(f.try_elt(a as u64).map_err(value_err)?)
            .map(|r| r.encoding()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Field(GF({}), modulus {})",
            self.inner.literal(),
            self.inner.modulus_literal()
        )
    }
}

fn parse_matrix(field: &Field, any: &Bound<'_, PyAny>) -> PyResult<Mat> {
    if let Ok(literal) = any.extract::<String>() {
        return Mat::parse(field, &literal).map_err(value_err);
    }
    let rows: Vec<Vec<u32>> = any.extract().map_err(|_| {
        PyValueError::new_err("matrix must be a literal string like \"1,1;0,1\" or a list of rows")
    })?;
    let mut felt_rows = Vec::with_capacity(rows.len());
    for row in rows {
        let mut out = Vec::with_capacity(row.len());
        for e in row {
            out.push(field.try_elt(e as u64).map_err(value_err)?);
        }
        felt_rows.push(out);
    }
    Mat::from_rows(felt_rows).map_err(value_err)
}

/// GL(n,q) or SL(n,q). Exact operations enumerate the group once and cache
/// the class partition; the certified bound never enumerates.
#[pyclass(name = "Group", module = "classprod")]
struct PyGroup {
    group: Group,
    budget: u64,
    data: Option<GroupData>,
}

impl PyGroup {
    fn data(&mut self) -> PyResult<&GroupData> {
        if self.data.is_none() {
            let data = GroupData::build(&self.group, self.budget)
                .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
            self.data = Some(data);
        }
        Ok(self.data.as_ref().unwrap())
    }
}

#[pymethods]
impl PyGroup {
    #[new]
    #[pyo3(signature = (family, n, field, budget = DEFAULT_BUDGET))]
    fn new(family: &str, n: usize, field: &PyField, budget: u64) -> PyResult<Self> {
        let family = GroupFamily::from_str(family).map_err(value_err)?;
        let group = Group::new(family, n, field.inner.clone()).map_err(value_err)?;
        Ok(PyGroup {
            group,
            budget,
            data: None,
        })
    }

    #[getter]
    fn order(&self) -> u128 {
        self.group.order()
    }

    #[getter]
    fn n(&self) -> usize {
        self.group.n()
    }

    fn is_member(&self, py: Python<'_>, a: Py<PyAny>) -> PyResult<bool> {
        let a = parse_matrix(self.group.field(), a.bind(py))?;
        Ok(self.group.is_member(&a))
    }

    fn is_central(&self, py: Python<'_>, a: Py<PyAny>) -> PyResult<bool> {
        let a = parse_matrix(self.group.field(), a.bind(py))?;
        Ok(self.group.is_central(&a))
    }

    /// Conjugacy classes as dicts with rep, size, key, central.
    fn classes(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let group = self.group.clone();
        let data = self.data()?;
        let list = PyList::empty(py);
        for c in data.classes() {
            let dict = PyDict::new(py);
            dict.set_item("rep", group.decode(c.rep).to_string())?;
            dict.set_item("size", c.size())?;
            dict.set_item("key", report_to_py(py, &c.key)?)?;
            dict.set_item("central", c.central)?;
            list.append(dict)?;
        }
        Ok(list.unbind().into())
    }

    /// Exact eta(A^G B^G) as a report dict.
    fn eta_exact(&mut self, py: Python<'_>, a: Py<PyAny>, b: Py<PyAny>) -> PyResult<Py<PyAny>> {
        let group = self.group.clone();
        let a = parse_matrix(group.field(), a.bind(py))?;
        let b = parse_matrix(group.field(), b.bind(py))?;
        let data = self.data()?;
        let report = group.eta_exact(data, &a, &b).map_err(value_err)?;
        report_to_py(py, &report)
    }

    /// Certified trace-set lower bound (no enumeration); report dict has
    /// lower_bound, bound_path, trace_set_size, and the witness list.
    fn certified_lower_bound(
        &self,
        py: Python<'_>,
        a: Py<PyAny>,
        b: Py<PyAny>,
    ) -> PyResult<Py<PyAny>> {
        let field = self.group.field();
        let a = parse_matrix(field, a.bind(py))?;
        let b = parse_matrix(field, b.bind(py))?;
        let bound = bounds::certified_lower_bound(&self.group, &a, &b).map_err(value_err)?;
        let dict = PyDict::new(py);
        dict.set_item("report", report_to_py(py, &bound.eta_report)?)?;
        dict.set_item("trace_set", report_to_py(py, &bound.trace_report)?)?;
        dict.set_item("lower_bound", bound.eta_report.lower_bound)?;
        Ok(dict.unbind().into())
    }

    /// Minimum eta over all non-central class pairs, with the full table.
    fn min_scan(&mut self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        let group = self.group.clone();
        let data = self.data()?;
        let report = group.min_scan(data).map_err(value_err)?;
        report_to_py(py, &report)
    }

    fn __repr__(&self) -> String {
        format!("Group({})", self.group)
    }
}

/// Invariant factors of a square matrix, as coefficient-encoding lists.
#[pyfunction]
fn class_id(py: Python<'_>, field: &PyField, a: Py<PyAny>) -> PyResult<Vec<Vec<u32>>> {
    let a = parse_matrix(&field.inner, a.bind(py))?;
    Ok(canonical::class_id(&field.inner, &a).encodings())
}

/// Companion matrix of a monic polynomial given by coefficient encodings
/// (low degree first), returned as nested lists.
#[pyfunction]
fn companion(field: &PyField, coeffs: Vec<u32>) -> PyResult<Vec<Vec<u32>>> {
    let f = &field.inner;
    let mut felts = Vec::with_capacity(coeffs.len());
    for c in coeffs {
        felts.push(f.try_elt(c as u64).map_err(value_err)?);
    }
    let poly = Poly::from_coeffs(f, felts);
    let m = Mat::companion(f, &poly).map_err(value_err)?;
    Ok((0..m.n())
        .map(|i| (0..m.n()).map(|j| m.get(i, j).encoding()).collect())
        .collect())
}

/// Smallest w with x^2 - wx + 1 irreducible over an even field of order >= 4.
#[pyfunction]
fn find_w_irreducible(field: &PyField) -> PyResult<u32> {
    Ok(polyring::find_w_irreducible(&field.inner)
        .map_err(value_err)?
        .encoding())
}

#[pymodule]
#[pyo3(name = "classprod")]
fn classprod_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyGroup>()?;
    m.add_function(wrap_pyfunction!(class_id, m)?)?;
    m.add_function(wrap_pyfunction!(companion, m)?)?;
    m.add_function(wrap_pyfunction!(find_w_irreducible, m)?)?;
    Ok(())
}
