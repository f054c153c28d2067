//! Python bindings: typing judgments, the let-eliminating translation,
//! context permutation, lemma lifting and bounded verification.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ctxlift_core::ctx::perm as ctx_perm;
use ctxlift_core::ctx::Ctx;
use ctxlift_core::ctxspec::suite::engine_reports;
use ctxlift_core::ctxspec::{lift_lemma, parse_lemma_file, parse_spec_file, CheckOpts};
use ctxlift_core::gen::GenBounds;
use ctxlift_core::parse::{parse_atom_ctx, parse_term, parse_ty, parse_ty_ctx, ty_ctx_names};
use ctxlift_core::typing::{judge, System, TyJudgment};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn system(name: &str) -> PyResult<System> {
    match name {
        "stlc" => Ok(System::Stlc),
        "linear" => Ok(System::Linear),
        "ml" => Ok(System::Ml),
        _ => Err(PyValueError::new_err(format!("unknown system `{name}`"))),
    }
}

/// Decides `ctx |- term : ty` in the given system.
#[pyfunction]
#[pyo3(signature = (ctx, term, ty, system_name = "linear", algo = false))]
fn check(ctx: &str, term: &str, ty: &str, system_name: &str, algo: bool) -> PyResult<bool> {
    let ctx = parse_ty_ctx(ctx).map_err(value_error)?;
    let term = parse_term(term, &ty_ctx_names(&ctx)).map_err(value_error)?;
    let ty = parse_ty(ty).map_err(value_error)?;
    Ok(judge(system(system_name)?, algo, &TyJudgment { ctx, term, ty }))
}

/// Translates a closed term, replacing each `let` by an application.
#[pyfunction]
fn translate(term: &str) -> PyResult<String> {
    let src = parse_term(term, &Default::default()).map_err(value_error)?;
    ctxlift_core::translation::translate(&Ctx::Empty, &src)
        .map(|t| t.to_string())
        .map_err(value_error)
}

/// Whether two contexts of atoms hold the same elements.
#[pyfunction]
fn perm(a: &str, b: &str) -> PyResult<bool> {
    let a = parse_atom_ctx(a).map_err(value_error)?;
    let b = parse_atom_ctx(b).map_err(value_error)?;
    Ok(ctx_perm(&a, &b))
}

/// The multiset statements of the list lemmas in `lemmas`.
#[pyfunction]
fn lift(spec: &str, lemmas: &str) -> PyResult<Vec<String>> {
    let specs = parse_spec_file(spec).map_err(value_error)?;
    let stmts = parse_lemma_file(lemmas, &specs).map_err(value_error)?;
    stmts
        .iter()
        .map(|l| {
            let s = specs
                .iter()
                .find(|s| s.name == l.spec)
                .expect("parsed lemmas name known specs");
            lift_lemma(s, l).map(|m| m.to_string()).map_err(value_error)
        })
        .collect()
}

/// Runs distributivity and lemma checks; one dict per report.
#[pyfunction]
#[pyo3(signature = (spec, lemmas = "", ctx_elems = None, union_depth = None))]
fn verify<'py>(
    py: Python<'py>,
    spec: &str,
    lemmas: &str,
    ctx_elems: Option<usize>,
    union_depth: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let specs = parse_spec_file(spec).map_err(value_error)?;
    let stmts = parse_lemma_file(lemmas, &specs).map_err(value_error)?;
    let mut b = GenBounds::default();
    b.ctx_elems = ctx_elems.unwrap_or(b.ctx_elems);
    b.union_depth = union_depth.unwrap_or(b.union_depth);
    let reports = py
        .detach(|| engine_reports(&specs, &stmts, &b, CheckOpts::default()))
        .map_err(value_error)?;
    reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("name", &r.name)?;
            d.set_item("cases", r.cases)?;
            d.set_item("verdict", r.verdict.to_string().to_lowercase())?;
            let cex: Option<Vec<(String, String)>> = r
                .counterexample
                .as_ref()
                .map(|c| c.0.iter().map(|b| (b.var.clone(), b.value.clone())).collect());
            d.set_item("counterexample", cex)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn ctxlift(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(translate, m)?)?;
    m.add_function(wrap_pyfunction!(perm, m)?)?;
    m.add_function(wrap_pyfunction!(lift, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
