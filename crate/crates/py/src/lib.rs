//! Python bindings for the numonoid library.
//!
//! The module exposes the `NumericalMonoid` class plus module-level functions
//! for the closed forms, family generation, the Dirichlet prime search, the
//! formula falsifier, and exact degree certificates. Structured results
//! (records, datasets, certificates, falsification outcomes) are returned as
//! plain dictionaries mirroring the library's canonical JSON documents;
//! exact rationals cross the boundary as `fractions.Fraction` values or as
//! `"p/q"` strings.

use std::fmt::Display;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;

use numonoid::families::GenerateOptions;
use numonoid::invariants::{catenary_of_element, invariant_report};
use numonoid::{falsifier, families, DirichletQuery, FormulaKind, InvariantKind, StrataDataset};

fn value_error(e: impl Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Exact rational from an integer or `p/q` string; floats are rejected.
fn parse_rational(text: &str) -> PyResult<BigRational> {
    let t = text.trim();
    let (n, d) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let numer: BigInt = n
        .parse()
        .map_err(|_| value_error(format!("not an exact rational: {text:?}")))?;
    let denom: BigInt = d
        .parse()
        .map_err(|_| value_error(format!("not an exact rational: {text:?}")))?;
    if denom.is_zero() {
        return Err(value_error("zero denominator"));
    }
    Ok(BigRational::new(numer, denom))
}

fn parse_invariant(name: &str) -> PyResult<InvariantKind> {
    match name {
        "catenary" => Ok(InvariantKind::Catenary),
        "tame" => Ok(InvariantKind::Tame),
        "elasticity" => Ok(InvariantKind::Elasticity),
        other => Err(value_error(format!(
            "unknown invariant {other:?}; expected catenary, tame, or elasticity"
        ))),
    }
}

fn parse_kind(name: &str) -> PyResult<FormulaKind> {
    match name {
        "explicit" => Ok(FormulaKind::Explicit),
        "implicit" => Ok(FormulaKind::Implicit),
        other => Err(value_error(format!(
            "unknown formula kind {other:?}; expected explicit or implicit"
        ))),
    }
}

/// Recursively converts a JSON value into dicts/lists/ints/strings.
fn json_to_py(py: Python<'_>, v: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    match v {
        Value::Null => Ok(py.None()),
        Value::Bool(b) => b.into_py_any(py),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_py_any(py)
            } else if let Some(u) = n.as_u64() {
                u.into_py_any(py)
            } else {
                n.as_f64()
                    .expect("JSON number is integral or float")
                    .into_py_any(py)
            }
        }
        Value::String(s) => s.into_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_py_any(py)
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.into_py_any(py)
        }
    }
}

/// Serializes any library document and hands it to Python as a dict tree.
fn document(py: Python<'_>, value: &impl Serialize) -> PyResult<Py<PyAny>> {
    let json = serde_json::to_value(value).map_err(value_error)?;
    json_to_py(py, &json)
}

/// Exact rational as a `fractions.Fraction`.
fn fraction(py: Python<'_>, r: &BigRational) -> PyResult<Py<PyAny>> {
    let fractions = py.import("fractions")?;
    let ctor = fractions.getattr("Fraction")?;
    ctor.call1((r.numer().clone(), r.denom().clone()))?
        .into_py_any(py)
}

/// A numerical monoid: the additive submonoid of the nonnegative integers
/// generated by a finite gcd-1 set, carrying its factorization invariants.
#[pyclass(name = "NumericalMonoid", frozen)]
struct PyMonoid {
    inner: numonoid::NumericalMonoid,
}

#[pymethods]
impl PyMonoid {
    /// NumericalMonoid(generators): generators are positive integers with
    /// gcd 1; they are reduced to the unique minimal generating set.
    #[new]
    fn new(generators: Vec<i64>) -> PyResult<Self> {
        Ok(PyMonoid {
            inner: numonoid::NumericalMonoid::new(&generators).map_err(value_error)?,
        })
    }

    /// The minimal generating set, ascending.
    fn atoms(&self) -> Vec<i64> {
        self.inner.atoms().to_vec()
    }

    /// The largest integer not in the monoid (-1 when every n >= 0 is in).
    fn frobenius(&self) -> i64 {
        self.inner.frobenius()
    }

    /// Membership test.
    fn contains(&self, n: i64) -> bool {
        self.inner.contains(n)
    }

    /// Apéry set with respect to `modulus` (default: the smallest atom):
    /// entry r is the least element congruent to r mod the modulus.
    #[pyo3(signature = (modulus=None))]
    fn apery_set(&self, modulus: Option<i64>) -> PyResult<Vec<i64>> {
        let m = modulus.unwrap_or(self.inner.atoms()[0]);
        self.inner.apery_set(m).map_err(value_error)
    }

    /// Every factorization of `n` as an exponent vector over the atoms.
    fn factorizations(&self, n: i64) -> Vec<Vec<i64>> {
        self.inner
            .factorizations(n)
            .iter()
            .map(|z| z.exponents().to_vec())
            .collect()
    }

    /// Number of factorizations of `n`.
    fn factorization_count(&self, n: i64) -> u64 {
        self.inner.factorization_count(n)
    }

    /// Catenary degree of the monoid.
    fn catenary(&self) -> i64 {
        numonoid::catenary(&self.inner)
    }

    /// Catenary degree of the single element `n`.
    fn catenary_of(&self, n: i64) -> PyResult<i64> {
        catenary_of_element(&self.inner, n).map_err(value_error)
    }

    /// Tame degree of the monoid.
    fn tame(&self) -> i64 {
        numonoid::tame(&self.inner)
    }

    /// Tame degree relative to the atom `u`.
    fn tame_local(&self, u: i64) -> PyResult<i64> {
        numonoid::invariants::tame_local(&self.inner, u).map_err(value_error)
    }

    /// Elasticity as an exact `fractions.Fraction` (max atom / min atom).
    fn elasticity(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        fraction(py, &numonoid::elasticity(&self.inner))
    }

    /// Elements whose factorization graph is disconnected, ascending.
    fn betti_elements(&self) -> Vec<i64> {
        numonoid::betti_elements(&self.inner)
    }

    /// Full invariant report as a dict; `scan_bound` optionally extends the
    /// element-level catenary scan.
    #[pyo3(signature = (scan_bound=None))]
    fn invariant_report(&self, py: Python<'_>, scan_bound: Option<i64>) -> PyResult<Py<PyAny>> {
        document(py, &invariant_report(&self.inner, scan_bound))
    }

    fn __repr__(&self) -> String {
        let atoms: Vec<String> = self.inner.atoms().iter().map(|a| a.to_string()).collect();
        format!("NumericalMonoid(<{}>)", atoms.join(", "))
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .cast::<PyMonoid>()
            .is_ok_and(|o| o.get().inner == self.inner)
    }
}

/// Catenary degree of a two-atom monoid (equals its larger atom).
#[pyfunction]
fn cat2(m: &PyMonoid) -> PyResult<i64> {
    numonoid::cat2(&m.inner).map_err(value_error)
}

/// Certified closed form for a three-atom pairwise-coprime monoid: dict with
/// atoms, minimal multipliers c, representation table r, and the value
/// (catenary = tame degree).
#[pyfunction]
fn cat3(py: Python<'_>, m: &PyMonoid) -> PyResult<Py<PyAny>> {
    let form = numonoid::cat3(&m.inner).map_err(value_error)?;
    document(py, &form)
}

/// The six lambda values and the predicted degree for the stratum point
/// (h1, k, h2, h3); raises when a precondition fails.
#[pyfunction]
fn comp3_lambdas(h1: i64, k: i64, h2: i64, h3: i64) -> PyResult<(Vec<i64>, i64)> {
    let (lambda, predicted) = numonoid::comp3_lambdas(h1, k, h2, h3).map_err(value_error)?;
    Ok((lambda.to_vec(), predicted))
}

/// First audited record of the (h1, k) stratum as a dict; `h2_min` forces
/// the prime search to start higher.
#[pyfunction]
#[pyo3(signature = (h1, k, h2_min=None))]
fn comp3_generate(py: Python<'_>, h1: i64, k: i64, h2_min: Option<i64>) -> PyResult<Py<PyAny>> {
    let mut opts = GenerateOptions::default();
    if let Some(floor) = h2_min {
        opts.h2_min = floor;
    }
    let record = families::comp3_generate(h1, k, &opts).map_err(value_error)?;
    document(py, &record)
}

/// Dataset covering every stratum of `h1` with `per_stratum` records each,
/// as a dict; `crosscheck` is the exact fraction (e.g. "1/10") of records
/// per stratum to verify against the brute-force oracles.
#[pyfunction]
#[pyo3(signature = (h1, per_stratum, crosscheck="0"))]
fn strata_dataset(
    py: Python<'_>,
    h1: i64,
    per_stratum: usize,
    crosscheck: &str,
) -> PyResult<Py<PyAny>> {
    let frac = parse_rational(crosscheck)?;
    let dataset = families::strata_dataset(h1, per_stratum, &frac).map_err(value_error)?;
    document(py, &dataset)
}

/// Same dataset rendered as canonical CSV text.
#[pyfunction]
#[pyo3(signature = (h1, per_stratum, crosscheck="0"))]
fn strata_dataset_csv(h1: i64, per_stratum: usize, crosscheck: &str) -> PyResult<String> {
    let frac = parse_rational(crosscheck)?;
    let dataset = families::strata_dataset(h1, per_stratum, &frac).map_err(value_error)?;
    Ok(dataset.to_csv())
}

/// Smallest prime `x ≡ i (mod p)` with a coprime `y ≡ j (mod p)` such that
/// `|alpha - y/x| < epsilon`; `alpha` and `epsilon` are exact `p/q` strings.
#[pyfunction]
#[pyo3(signature = (alpha, epsilon, p, i, j, max_candidates=10_000))]
fn dirichlet_find(
    alpha: &str,
    epsilon: &str,
    p: i64,
    i: i64,
    j: i64,
    max_candidates: usize,
) -> PyResult<(i64, i64)> {
    let query = DirichletQuery {
        alpha: parse_rational(alpha)?,
        epsilon: parse_rational(epsilon)?,
        p,
        i,
        j,
        max_candidates,
    };
    families::dirichlet_find(&query).map_err(value_error)
}

/// Evaluates a candidate formula on one monoid: dict with the per-branch
/// values or residual, the actual invariant value, and whether it fits.
#[pyfunction]
#[pyo3(signature = (formula, invariant, m, kind="implicit"))]
fn eval_formula(
    py: Python<'_>,
    formula: &str,
    invariant: &str,
    m: &PyMonoid,
    kind: &str,
) -> PyResult<Py<PyAny>> {
    let candidate = falsifier::parse_formula(formula, parse_kind(kind)?).map_err(value_error)?;
    let (values, actual, fits) =
        falsifier::eval_candidate_values(&candidate, &m.inner, parse_invariant(invariant)?)
            .map_err(value_error)?;
    let out = PyDict::new(py);
    out.set_item("candidate_values", document(py, &values)?)?;
    out.set_item("actual", actual.to_string())?;
    out.set_item("fits", fits)?;
    out.into_py_any(py)
}

/// Searches the deterministic monoid corpus for a counterexample to the
/// formula; dict is either the counterexample or the survival report.
#[pyfunction]
#[pyo3(signature = (formula, invariant, kind="implicit", budget=100))]
fn falsify(
    py: Python<'_>,
    formula: &str,
    invariant: &str,
    kind: &str,
    budget: usize,
) -> PyResult<Py<PyAny>> {
    let candidate = falsifier::parse_formula(formula, parse_kind(kind)?).map_err(value_error)?;
    let outcome =
        falsifier::falsify(&candidate, parse_invariant(invariant)?, budget).map_err(value_error)?;
    document(py, &outcome)
}

/// Exact-linear-algebra certificate that no nonzero polynomial of total
/// degree <= `degree` in (h2, h3, value) fits the stratified data of `h1`.
/// Supply `dataset_csv` to certify external data, else a dataset with
/// `points_per_stratum` records per stratum is generated.
#[pyfunction]
#[pyo3(signature = (h1, degree, points_per_stratum, dataset_csv=None))]
fn degree_certificate(
    py: Python<'_>,
    h1: i64,
    degree: u32,
    points_per_stratum: usize,
    dataset_csv: Option<&str>,
) -> PyResult<Py<PyAny>> {
    let dataset = match dataset_csv {
        Some(text) => {
            let parsed = StrataDataset::from_csv(text).map_err(value_error)?;
            parsed.validate().map_err(value_error)?;
            parsed
        }
        None => families::strata_dataset(h1, points_per_stratum, &BigRational::zero())
            .map_err(value_error)?,
    };
    let cert = falsifier::degree_certificate(h1, degree, points_per_stratum, &dataset)
        .map_err(value_error)?;
    document(py, &cert)
}

/// Exact factorization invariants of numerical monoids.
#[pymodule]
pub fn numonoid_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMonoid>()?;
    m.add_function(wrap_pyfunction!(cat2, m)?)?;
    m.add_function(wrap_pyfunction!(cat3, m)?)?;
    m.add_function(wrap_pyfunction!(comp3_lambdas, m)?)?;
    m.add_function(wrap_pyfunction!(comp3_generate, m)?)?;
    m.add_function(wrap_pyfunction!(strata_dataset, m)?)?;
    m.add_function(wrap_pyfunction!(strata_dataset_csv, m)?)?;
    m.add_function(wrap_pyfunction!(dirichlet_find, m)?)?;
    m.add_function(wrap_pyfunction!(eval_formula, m)?)?;
    m.add_function(wrap_pyfunction!(falsify, m)?)?;
    m.add_function(wrap_pyfunction!(degree_certificate, m)?)?;
    Ok(())
}
