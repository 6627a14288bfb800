//! Exercises the Python bindings through an embedded interpreter: the module
//! is registered on the interpreter's import table and driven from Python
//! source, covering the same surface an installed extension would expose.

use std::ffi::CStr;
use std::sync::Once;

use numonoid_py::numonoid_py;
use pyo3::prelude::*;
use pyo3::types::PyDict;

static REGISTER: Once = Once::new();

/// Runs a Python snippet with the extension module importable.
fn run_python(body: &CStr) {
    REGISTER.call_once(|| pyo3::append_to_inittab!(numonoid_py));
    Python::attach(|py| {
        let globals = PyDict::new(py);
        if let Err(e) = py.run(body, Some(&globals), None) {
            panic!("python assertion failed: {e}");
        }
    });
}

#[test]
fn monoid_class_reports_the_worked_invariants() {
    run_python(cr#"
import numonoid_py
import fractions

m = numonoid_py.NumericalMonoid([3, 5, 7])
assert m.atoms() == [3, 5, 7]
assert m.frobenius() == 4
assert m.catenary() == 4
assert m.tame() == 4
assert m.tame_local(7) == 4
assert m.betti_elements() == [10, 12, 14]
assert m.contains(10) and not m.contains(4)
assert m.apery_set() == [0, 7, 5]
assert m.factorizations(10) == [[0, 2, 0], [1, 0, 1]]
assert m.factorization_count(10) == 2
assert m.catenary_of(10) == 2
assert m.elasticity() == fractions.Fraction(7, 3)

report = m.invariant_report()
assert report["catenary"] == 4
assert report["elasticity"] == {"num": 7, "den": 3}

assert m == numonoid_py.NumericalMonoid([3, 5, 7])
assert m != numonoid_py.NumericalMonoid([3, 5])
assert repr(m) == "NumericalMonoid(<3, 5, 7>)"
"#);
}

#[test]
fn closed_forms_and_families_round_trip() {
    run_python(cr#"
import numonoid_py

pair = numonoid_py.NumericalMonoid([2, 3])
assert numonoid_py.cat2(pair) == 3

big = numonoid_py.NumericalMonoid([7, 29, 160])
form = numonoid_py.cat3(big)
assert form["value"] == 30
assert form["atoms"] == [7, 29, 160]

lam, predicted = numonoid_py.comp3_lambdas(7, 2, 29, 146)
assert lam == [25, 6, 2, 2, 5, 26] and predicted == 26

record = numonoid_py.comp3_generate(7, 2)
assert (record["h2"], record["h3"], record["predicted"]) == (29, 146, 26)

dataset = numonoid_py.strata_dataset(7, 2)
assert dataset["h1"] == 7
assert len(dataset["records"]) == 4

csv_text = numonoid_py.strata_dataset_csv(7, 2)
assert csv_text.splitlines()[0].startswith("h1,k,h2,h3,lambda1")

assert numonoid_py.dirichlet_find("11/2", "1/10", 7, 1, 6) == (29, 160)
"#);
}

#[test]
fn falsifier_and_certificate_surface_work_from_python() {
    run_python(cr#"
import numonoid_py

outcome = numonoid_py.falsify("Y - 4", "catenary", budget=50)
assert outcome["outcome"] == "counterexample"
assert outcome["atoms"] == [7, 29, 146]

survival = numonoid_py.falsify("X3 - X1*Y", "elasticity", budget=25)
assert survival == {"outcome": "not_found_within_budget", "examined": 25}

m = numonoid_py.NumericalMonoid([3, 5, 7])
ev = numonoid_py.eval_formula("X3 - X1*Y", "elasticity", m)
assert ev["fits"] and ev["actual"] == "7/3"
assert ev["candidate_values"]["residual"] == "0"

cert = numonoid_py.degree_certificate(7, 1, 4)
assert cert["outcome"]["status"] in ("certified", "certified_after_falsification")
assert cert["matrix_cols"] == 4

csv_text = numonoid_py.strata_dataset_csv(7, 4)
cert2 = numonoid_py.degree_certificate(7, 1, 4, dataset_csv=csv_text)
assert cert2["rank"] == cert["rank"]

try:
    numonoid_py.falsify("Y - 4", "notaninvariant")
except ValueError:
    pass
else:
    raise AssertionError("unknown invariant must raise")
"#);
}
