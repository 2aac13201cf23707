//! Python bindings. Reports and bodies cross the boundary as JSON strings;
//! test functions and bodies use the same `name:key=value` specs as the
//! command-line tool.

use std::sync::Arc;

use affine_hls_cli::chains::{run_chain, Chain};
use affine_hls_cli::config::{default_grid, BodySpec, FamilySpec, RunConfig};
use affine_hls_cli::error::CliError;
use affine_hls_cli::export::export_body;
use clap::ValueEnum;
use hls::geometry::SphereGrid;
use hls::specialfns::{self, Concavity};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: CliError) -> PyErr {
    match e.exit_code() {
        1 => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn core_err(e: hls::Error) -> PyErr {
    py_err(CliError::Core(e))
}

fn config(text: &str) -> PyResult<RunConfig> {
    RunConfig::from_toml(text).and_then(RunConfig::resolve).map_err(py_err)
}

fn grid(n: usize, resolution: usize) -> PyResult<Arc<SphereGrid>> {
    let r = if resolution == 0 { default_grid(n) } else { resolution };
    Ok(Arc::new(SphereGrid::new(n, r).map_err(core_err)?))
}

#[pyfunction]
fn gamma(x: f64) -> PyResult<f64> {
    specialfns::gamma_fn(x).map_err(core_err)
}

#[pyfunction]
fn ln_gamma(x: f64) -> PyResult<f64> {
    specialfns::ln_gamma(x).map_err(core_err)
}

#[pyfunction]
fn beta(p: f64, q: f64) -> PyResult<f64> {
    specialfns::beta_fn(p, q).map_err(core_err)
}

#[pyfunction]
fn unit_ball_volume(n: usize) -> PyResult<f64> {
    specialfns::unit_ball_volume(n).map_err(core_err)
}

#[pyfunction]
fn hls_sharp_constant(n: usize, alpha: f64) -> PyResult<f64> {
    specialfns::hls_sharp_constant(n, alpha).map_err(core_err)
}

#[pyfunction]
fn reverse_constant_logconcave(n: usize, alpha: f64) -> PyResult<f64> {
    specialfns::reverse_constant_logconcave(n, alpha).map_err(core_err)
}

/// Γ(α+1)^{1/α}, or the s-concave constant when `s` is given.
#[pyfunction]
#[pyo3(signature = (alpha, n, s=None))]
fn inclusion_constant(alpha: f64, n: usize, s: Option<f64>) -> PyResult<f64> {
    let class = s.map_or(Concavity::Log, |s| Concavity::S { s });
    specialfns::inclusion_constant(alpha, class, n).map_err(core_err)
}

/// Runs a chain on a TOML run configuration and returns the report as JSON.
#[pyfunction]
#[pyo3(signature = (chain, config_toml=""))]
fn verify(py: Python<'_>, chain: &str, config_toml: &str) -> PyResult<String> {
    let chain = Chain::from_str(chain, false).map_err(PyValueError::new_err)?;
    let cfg = config(config_toml)?;
    let rep = py.detach(|| run_chain(chain, &cfg)).map_err(py_err)?;
    rep.to_json().map_err(core_err)
}

/// The sampled body of a TOML run configuration, as JSON.
#[pyfunction]
fn body_export(py: Python<'_>, config_toml: &str) -> PyResult<String> {
    let cfg = config(config_toml)?;
    let doc = py.detach(|| export_body(&cfg)).map_err(py_err)?;
    serde_json::to_string(&doc).map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// Grid directions and radii of S_α(f,h).
#[pyfunction]
#[pyo3(signature = (f, h, n, alpha, resolution=0))]
fn s_alpha_radii(
    py: Python<'_>,
    f: &str,
    h: &str,
    n: usize,
    alpha: f64,
    resolution: usize,
) -> PyResult<(Vec<Vec<f64>>, Vec<f64>)> {
    let f = FamilySpec::parse(f).and_then(|s| s.build(n, Some(alpha))).map_err(py_err)?;
    let h = FamilySpec::parse(h).and_then(|s| s.build(n, Some(alpha))).map_err(py_err)?;
    let g = grid(n, resolution)?;
    let cfg = hls::functions::QuadConfig::default();
    let body = py.detach(|| hls::salpha::s_alpha_body(&f, &h, alpha, g.clone(), &cfg)).map_err(core_err)?;
    let nodes = g.nodes().iter().map(|u| u[..n].to_vec()).collect();
    Ok((nodes, body.radii().to_vec()))
}

/// Ṽ_α(K, L) by sphere quadrature.
#[pyfunction]
#[pyo3(signature = (k, l, n, alpha, resolution=0))]
fn dual_mixed_volume(k: &str, l: &str, n: usize, alpha: f64, resolution: usize) -> PyResult<f64> {
    let k = BodySpec::parse(k).and_then(|b| b.build(n)).map_err(py_err)?;
    let l = BodySpec::parse(l).and_then(|b| b.build(n)).map_err(py_err)?;
    hls::geometry::dual_mixed_volume(&k, &l, alpha, &*grid(n, resolution)?).map_err(core_err)
}

#[pymodule]
#[pyo3(name = "affine_hls")]
fn py_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(ln_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(beta, m)?)?;
    m.add_function(wrap_pyfunction!(unit_ball_volume, m)?)?;
    m.add_function(wrap_pyfunction!(hls_sharp_constant, m)?)?;
    m.add_function(wrap_pyfunction!(reverse_constant_logconcave, m)?)?;
    m.add_function(wrap_pyfunction!(inclusion_constant, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(body_export, m)?)?;
    m.add_function(wrap_pyfunction!(s_alpha_radii, m)?)?;
    m.add_function(wrap_pyfunction!(dual_mixed_volume, m)?)?;
    Ok(())
}
