//! Python bindings: suite runs, local factors, Hecke cosets, norm decisions, torsion orders and
//! the analytic kernels.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use picard::analytic::{self, ResidueVector, UHPoint};
use picard::boundary::{torsion_order as lattice_torsion, LatticeE};
use picard::hecke::{mab_representatives, pairwise_distinct, ramified_place};
use picard::localzeta::{lfactor_inert, lfactor_ramified, lfactor_split, SatakeData};
use picard::quadfield::{self, parse_rational, Discriminant, FieldElem};
use picard::suites::{run_all, run_suite, suite_by_key, SuiteConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_python<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Run one suite ("all" for every suite) and return its report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, seed = 42, digits = 30))]
fn verify<'py>(py: Python<'py>, suite: &str, seed: u64, digits: u32) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SuiteConfig { seed, digits, ..SuiteConfig::default() };
    let reports = if suite == "all" {
        run_all(&cfg, 1)
    } else {
        let s = suite_by_key(suite).ok_or_else(|| err(format!("unknown suite '{suite}'")))?;
        vec![run_suite(s, &cfg)]
    };
    let pass = reports.iter().all(|r| r.pass);
    to_python(py, &serde_json::json!({ "pass": pass, "config": cfg, "reports": reports }))
}

/// Closed-form local factor as (numerator, denominator) strings.
#[pyfunction]
fn lfactor(place: &str) -> PyResult<(String, String)> {
    let rf = match place {
        "inert" => lfactor_inert(&SatakeData::symbolic_inert().strict().map_err(err)?).map_err(err)?,
        "split" => lfactor_split(&SatakeData::symbolic_split().strict().map_err(err)?).map_err(err)?,
        "ramified" => lfactor_ramified(),
        other => return Err(err(format!("unknown place '{other}'"))),
    };
    Ok((rf.num().to_string(), rf.den().to_string()))
}

/// (number of representatives, pairwise distinct) for K t K at the ramified prime p of E.
#[pyfunction]
#[pyo3(name = "hecke_cosets")]
fn hecke_cosets_py(p: u64, disc: u64) -> PyResult<(usize, bool)> {
    let d = Discriminant::new(disc).map_err(err)?;
    let reps = mab_representatives(p, d).map_err(err)?;
    let place = ramified_place(p, d).map_err(err)?;
    Ok((reps.len(), pairwise_distinct(&reps, &place).map_err(err)?))
}

/// Whether the rational "n/d" is a norm from Q(sqrt(-D)).
#[pyfunction]
fn is_norm(q: &str, disc: u64) -> PyResult<bool> {
    let d = Discriminant::new(disc).map_err(err)?;
    quadfield::is_norm(&parse_rational(q).map_err(err)?, d).map_err(err)
}

fn elem(s: &str, d: Discriminant) -> PyResult<FieldElem> {
    let (a, b) = s.split_once(',').unwrap_or((s, "0"));
    Ok(FieldElem::new(parse_rational(a).map_err(err)?, parse_rational(b).map_err(err)?, d))
}

/// Least n with n u in the lattice; elements are written "a,b" for a + b sqrt(-D).
#[pyfunction]
fn torsion_order(u: &str, lattice: Vec<String>, disc: u64) -> PyResult<String> {
    let d = Discriminant::new(disc).map_err(err)?;
    let gens = lattice.iter().map(|g| elem(g, d)).collect::<PyResult<Vec<_>>>()?;
    let l = LatticeE::from_generators(&gens, d);
    Ok(lattice_torsion(&elem(u, d)?, &l).map_err(err)?.to_string())
}

/// E_{w,N}(x + iy, s).
#[pyfunction]
fn eisenstein(x: f64, y: f64, s: Complex64, level: u64, w: (i64, i64)) -> PyResult<Complex64> {
    let z = UHPoint::new(x, y).map_err(err)?;
    let rv = ResidueVector::new(level, w.0, w.1).map_err(err)?;
    analytic::eisenstein(&z, s, &rv).map_err(err)
}

/// The Whittaker function W_{0,0}(y).
#[pyfunction]
fn whittaker_w00(y: f64) -> PyResult<f64> {
    Ok(analytic::whittaker_w00(y).map_err(err)?.value)
}

#[pymodule]
fn pypicard(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(lfactor, m)?)?;
    m.add_function(wrap_pyfunction!(hecke_cosets_py, m)?)?;
    m.add_function(wrap_pyfunction!(is_norm, m)?)?;
    m.add_function(wrap_pyfunction!(torsion_order, m)?)?;
    m.add_function(wrap_pyfunction!(eisenstein, m)?)?;
    m.add_function(wrap_pyfunction!(whittaker_w00, m)?)?;
    Ok(())
}
