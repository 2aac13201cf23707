//! Sampled bodies for external plotting.

use std::sync::Arc;

use affine_hls::geometry::SphereGrid;
use affine_hls::salpha::{radial_mean_body_fn, s_alpha_body, AlphaBodyResult};
use affine_hls::Error;
use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::config::{ExportBody, RunConfig};
use crate::error::{CliError, Result};

/// Best centred ellipsoid {x : xᵀAx ≤ 1} through the boundary samples, by
/// least squares in the entries of A, and the largest relative radial
/// deviation from it.
pub fn ellipsoid_fit(body: &AlphaBodyResult) -> Option<(Vec<Vec<f64>>, f64)> {
    let grid = body.grid();
    let n = grid.dim();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let rows = grid.len();
    let mut m = DMatrix::zeros(rows, pairs.len());
    for (row, (u, r)) in grid.nodes().iter().zip(body.radii()).enumerate() {
        for (col, (i, j)) in pairs.iter().enumerate() {
            let c = if i == j { 1.0 } else { 2.0 };
            m[(row, col)] = c * r * r * u[*i] * u[*j];
        }
    }
    let coef = m.svd(true, true).solve(&DVector::from_element(rows, 1.0), 1e-14).ok()?;
    let mut a = vec![vec![0.0; n]; n];
    for ((i, j), v) in pairs.iter().zip(coef.iter()) {
        a[*i][*j] = *v;
        a[*j][*i] = *v;
    }
    let mut worst = 0.0f64;
    for (u, r) in grid.nodes().iter().zip(body.radii()) {
        let q: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| a[i][j] * u[i] * u[j]).sum();
        if !(q > 0.0) {
            return Some((a, f64::INFINITY));
        }
        worst = worst.max((r * q.sqrt() - 1.0).abs());
    }
    Some((a, worst))
}

pub fn export_body(cfg: &RunConfig) -> Result<Value> {
    let alpha = cfg.alpha()?;
    let n = cfg.n;
    let f = cfg.f.build(n, Some(alpha))?;
    let h = cfg.h.build(n, Some(alpha))?;
    let grid = Arc::new(SphereGrid::new(n, cfg.grid)?);
    let body = match cfg.export_body {
        ExportBody::SAlpha => s_alpha_body(&f, &h, alpha, grid.clone(), &cfg.quad)?,
        ExportBody::RadialMean => radial_mean_body_fn(&f, &h, alpha, grid.clone(), &cfg.quad)?,
    };
    if let Some(j) = body.radii().iter().position(|r| !r.is_finite()) {
        return Err(CliError::Core(Error::Divergent(format!("radius at node {j} is not finite"))));
    }
    let mut doc = body.to_json();
    let fit = ellipsoid_fit(&body);
    doc["roundness"] = json!({
        "ellipsoid_matrix": fit.as_ref().map(|(a, _)| a.clone()),
        "max_relative_deviation": fit.map(|(_, d)| d),
    });
    doc["kind"] = json!(cfg.export_body);
    doc["volume"] = json!(body.volume()?);
    match n {
        2 => {
            let mut poly: Vec<[f64; 2]> =
                grid.nodes().iter().zip(body.radii()).map(|(u, r)| [r * u[0], r * u[1]]).collect();
            poly.push(poly[0]);
            doc["polyline"] = json!(poly);
        }
        3 => {
            if let Some((cos_theta, phi)) = grid.lat_lon() {
                let radii: Vec<&[f64]> = body.radii().chunks(phi.len()).collect();
                doc["lat_lon"] = json!({ "cos_theta": cos_theta, "phi": phi, "radii": radii });
            }
        }
        _ => {}
    }
    Ok(doc)
}
