//! Python bindings: `import alcove_sheaves_py`.
//!
//! Polynomials cross the boundary as `{exponent: coefficient}` dicts.

use alcove_sheaves::cli::{self, Format, GraphKind, GraphSpec, KlFlavor, Report, RunConfig};
use alcove_sheaves::hecke::Hecke;
use alcove_sheaves::sheaf::{ambient_for, bm_build, RingMode};
use alcove_sheaves::{Error, Laurent, MomentGraph, RootDatum};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::collections::BTreeMap;
use std::sync::Arc;

pub type Poly = BTreeMap<i32, i64>;

fn poly(p: &Laurent) -> Poly {
    p.terms().map(|(e, _)| (e, p.coeff_i64(e))).collect()
}

fn datum(type_label: &str) -> Result<Arc<RootDatum>, Error> {
    Ok(Arc::new(RootDatum::from_label(type_label)?))
}

fn config(config_json: Option<&str>) -> Result<RunConfig, Error> {
    let cfg = match config_json {
        Some(s) => RunConfig::from_json(s)?,
        None => RunConfig::default(),
    };
    cfg.validate()?;
    Ok(cfg)
}

/// `h_{y,x}` for two words.
pub fn kl_polynomial(type_label: &str, y: &str, x: &str, budget: i64) -> Result<Poly, Error> {
    let rd = datum(type_label)?;
    let (y, x) = (cli::parse_element(&rd, y)?, cli::parse_element(&rd, x)?);
    Ok(poly(&Hecke::with_budget(rd, budget).kl_h(&y, &x)?))
}

/// `(vertex, length, grk of the stalk)` of `B(top)` on the Bruhat interval below `top`.
pub fn bm_stalks(type_label: &str, top: &str, budget: i64) -> Result<Vec<(String, i64, Poly)>, Error> {
    let rd = datum(type_label)?;
    let x = cli::parse_element(&rd, top)?;
    let g = Arc::new(MomentGraph::bruhat_interval(rd, &x, budget)?);
    let b = bm_build(g.clone(), ambient_for(&g, RingMode::Labels)?, g.vertex(&x)?)?;
    Ok((0..g.len()).map(|v| (g.vertex_name(v), g.length(v), poly(&b.stalk_grk(v)))).collect())
}

pub fn kl_report(top: &str, flavor: &str, config_json: Option<&str>) -> Result<Report, Error> {
    cli::cmd_kl(&config(config_json)?, top, flavor.parse::<KlFlavor>()?)
}

pub fn export(kind: &str, top: &str, config_json: Option<&str>) -> Result<Report, Error> {
    let spec = GraphSpec { kind: GraphKind::Bruhat, top: Some(top.to_string()) };
    cli::cmd_export(&config(config_json)?, &spec, kind.parse::<Format>()?)
}

pub fn check(instances: usize, config_json: Option<&str>) -> Result<Report, Error> {
    cli::cmd_check(&config(config_json)?, instances)
}

fn py_err(e: Error) -> PyErr {
    let msg = format!("{}: {}", e.kind(), e);
    if e.is_resource() { PyRuntimeError::new_err(msg) } else { PyValueError::new_err(msg) }
}

#[pyfunction(name = "kl_polynomial")]
#[pyo3(signature = (y, x, type_label = "A1", budget = 10))]
fn py_kl_polynomial(y: &str, x: &str, type_label: &str, budget: i64) -> PyResult<Poly> {
    kl_polynomial(type_label, y, x, budget).map_err(py_err)
}

#[pyfunction(name = "bm_stalks")]
#[pyo3(signature = (top, type_label = "A1", budget = 10))]
fn py_bm_stalks(top: &str, type_label: &str, budget: i64) -> PyResult<Vec<(String, i64, Poly)>> {
    bm_stalks(type_label, top, budget).map_err(py_err)
}

/// Text of `alcove kl`; the config is a RunConfig JSON string.
#[pyfunction(name = "kl_report")]
#[pyo3(signature = (top, flavor = "regular", config = None))]
fn py_kl_report(top: &str, flavor: &str, config: Option<&str>) -> PyResult<(String, bool)> {
    kl_report(top, flavor, config).map(|r| (r.text, r.ok)).map_err(py_err)
}

#[pyfunction(name = "export")]
#[pyo3(signature = (kind, top, config = None))]
fn py_export(kind: &str, top: &str, config: Option<&str>) -> PyResult<String> {
    export(kind, top, config).map(|r| r.text).map_err(py_err)
}

#[pyfunction(name = "check")]
#[pyo3(signature = (instances = 20, config = None))]
fn py_check(instances: usize, config: Option<&str>) -> PyResult<(String, bool)> {
    check(instances, config).map(|r| (r.text, r.ok)).map_err(py_err)
}

#[pymodule]
fn alcove_sheaves_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(py_kl_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(py_bm_stalks, m)?)?;
    m.add_function(wrap_pyfunction!(py_kl_report, m)?)?;
    m.add_function(wrap_pyfunction!(py_export, m)?)?;
    m.add_function(wrap_pyfunction!(py_check, m)?)?;
    Ok(())
}
