//! Quadrature rules on S^{n-1} for n = 1, 2, 3.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::linalg::Point;
use crate::quad::gauss_legendre;

pub const DEFAULT_RESOLUTION_2D: usize = 8192;
pub const DEFAULT_RESOLUTION_3D: usize = 512;

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Atoms,
    Circle,
    /// cos θ rings (increasing) times `m_phi` uniform longitudes
    Product {
        cos: Vec<f64>,
        m_phi: usize,
    },
}

/// Nodes and weights on the unit sphere.
///
/// n = 1 uses the two atoms ±1, n = 2 the uniform trapezoid rule with
/// `resolution` nodes, n = 3 Gauss-Legendre in cos θ on each hemisphere
/// times a uniform rule in φ with `2 * resolution` longitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereGrid {
    dim: usize,
    resolution: usize,
    nodes: Vec<Point>,
    weights: Vec<f64>,
    layout: Layout,
}

impl SphereGrid {
    pub fn new(dim: usize, resolution: usize) -> Result<Self> {
        match dim {
            1 => Ok(Self {
                dim,
                resolution: 2,
                nodes: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]],
                weights: vec![1.0, 1.0],
                layout: Layout::Atoms,
            }),
            2 => {
                if resolution < 4 {
                    return domain("circle grids need at least 4 nodes");
                }
                let m = resolution;
                let h = 2.0 * PI / m as f64;
                let nodes = (0..m)
                    .map(|k| {
                        let t = h * k as f64;
                        [t.cos(), t.sin(), 0.0]
                    })
                    .collect();
                Ok(Self { dim, resolution: m, nodes, weights: vec![h; m], layout: Layout::Circle })
            }
            3 => {
                if resolution < 2 {
                    return domain("sphere grids need at least 2 latitude rings");
                }
                let half = resolution.div_ceil(2);
                let m_theta = 2 * half;
                let m_phi = 2 * m_theta;
                let (x, w) = gauss_legendre(half);
                let mut cos = Vec::with_capacity(m_theta);
                let mut wc = Vec::with_capacity(m_theta);
                for (xi, wi) in x.iter().zip(&w) {
                    cos.push(0.5 * (xi - 1.0));
                    wc.push(0.5 * wi);
                }
                for (xi, wi) in x.iter().zip(&w) {
                    cos.push(0.5 * (xi + 1.0));
                    wc.push(0.5 * wi);
                }
                let hphi = 2.0 * PI / m_phi as f64;
                let mut nodes = Vec::with_capacity(m_theta * m_phi);
                let mut weights = Vec::with_capacity(m_theta * m_phi);
                for (c, wci) in cos.iter().zip(&wc) {
                    let s = (1.0 - c * c).max(0.0).sqrt();
                    for j in 0..m_phi {
                        let phi = hphi * j as f64;
                        nodes.push([s * phi.cos(), s * phi.sin(), *c]);
                        weights.push(wci * hphi);
                    }
                }
                Ok(Self { dim, resolution: m_theta, nodes, weights, layout: Layout::Product { cos, m_phi } })
            }
            _ => Err(Error::Domain(format!("sphere grids exist for n = 1, 2, 3, not {dim}"))),
        }
    }

    pub fn default_for(dim: usize) -> Result<Self> {
        match dim {
            2 => Self::new(2, DEFAULT_RESOLUTION_2D),
            3 => Self::new(3, DEFAULT_RESOLUTION_3D),
            _ => Self::new(dim, 2),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Point] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        match &self.layout {
            Layout::Atoms => 1,
            Layout::Circle => self.resolution - 1,
            Layout::Product { cos, m_phi } => (cos.len() - 1).min(m_phi - 1),
        }
    }

    /// Σ w_j g(ξ_j).
    pub fn integrate(&self, g: impl Fn(&Point) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * g(x)).sum()
    }

    /// Piecewise-linear interpolation of node values at direction `u`
    /// (nearest atom for n = 1, bilinear in (cos θ, φ) for n = 3).
    pub fn interpolate(&self, values: &[f64], u: &Point) -> f64 {
        match &self.layout {
            Layout::Atoms => {
                if u[0] >= 0.0 {
                    values[0]
                } else {
                    values[1]
                }
            }
            Layout::Circle => {
                let m = self.resolution;
                let t = u[1].atan2(u[0]).rem_euclid(2.0 * PI) * m as f64 / (2.0 * PI);
                let k = (t.floor() as usize).min(m - 1);
                let s = t - k as f64;
                (1.0 - s) * values[k] + s * values[(k + 1) % m]
            }
            Layout::Product { cos, m_phi } => {
                let m_phi = *m_phi;
                let c = u[2].clamp(-1.0, 1.0);
                let (i0, i1, a) = bracket(cos, c);
                let t = u[1].atan2(u[0]).rem_euclid(2.0 * PI) * m_phi as f64 / (2.0 * PI);
                let j0 = (t.floor() as usize).min(m_phi - 1);
                let j1 = (j0 + 1) % m_phi;
                let b = t - j0 as f64;
                let ring = |i: usize| (1.0 - b) * values[i * m_phi + j0] + b * values[i * m_phi + j1];
                (1.0 - a) * ring(i0) + a * ring(i1)
            }
        }
    }

    /// Latitude rings and longitudes of a product grid.
    pub fn lat_lon(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        match &self.layout {
            Layout::Product { cos, m_phi } => {
                let phi = (0..*m_phi).map(|j| 2.0 * PI * j as f64 / *m_phi as f64).collect();
                Some((cos.clone(), phi))
            }
            _ => None,
        }
    }

    pub fn to_doc(&self, values: Option<&[f64]>) -> GridDoc {
        GridDoc {
            dim: self.dim,
            resolution: self.resolution,
            nodes: self.nodes.iter().map(|p| p[..self.dim].to_vec()).collect(),
            weights: self.weights.clone(),
            values: values.map(|v| v.to_vec()),
        }
    }

    /// Rebuilds a grid from its document, checking the stored nodes.
    pub fn from_doc(doc: &GridDoc) -> Result<Self> {
        let g = Self::new(doc.dim, doc.resolution)?;
        if doc.nodes.len() != g.len() || doc.weights.len() != g.len() {
            return Err(Error::Parse("grid node count does not match its resolution".into()));
        }
        for (a, b) in doc.nodes.iter().zip(&g.nodes) {
            if a.len() != doc.dim || a.iter().zip(b).any(|(x, y)| (x - y).abs() > 1e-9) {
                return Err(Error::Parse("grid nodes do not match the declared layout".into()));
            }
        }
        Ok(g)
    }
}

/// Serialized form of a grid, optionally carrying per-node values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDoc {
    pub dim: usize,
    pub resolution: usize,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn bracket(sorted: &[f64], c: f64) -> (usize, usize, f64) {
    let n = sorted.len();
    if c <= sorted[0] {
        return (0, 0, 0.0);
    }
    if c >= sorted[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let i1 = sorted.partition_point(|x| *x < c);
    let i0 = i1 - 1;
    let a = (c - sorted[i0]) / (sorted[i1] - sorted[i0]);
    (i0, i1, a)
}

/// Unit vector from spherical angles (n = 3) or an angle (n = 2).
pub fn direction(dim: usize, angles: &[f64]) -> Point {
    match dim {
        1 => [if angles.first().copied().unwrap_or(0.0) >= 0.0 { 1.0 } else { -1.0 }, 0.0, 0.0],
        2 => [angles[0].cos(), angles[0].sin(), 0.0],
        _ => {
            let (t, p) = (angles[0], angles[1]);
            [t.sin() * p.cos(), t.sin() * p.sin(), t.cos()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sphere_area(dim: usize) -> f64 {
        match dim {
            1 => 2.0,
            2 => 2.0 * PI,
            _ => 4.0 * PI,
        }
    }

    #[test]
    fn weights_and_norms() {
        for (dim, res) in [(1, 2), (2, 64), (2, 1000), (3, 16), (3, 33)] {
            let g = SphereGrid::new(dim, res).unwrap();
            let s: f64 = g.weights().iter().sum();
            assert!((s - sphere_area(dim)).abs() < 1e-10 * sphere_area(dim));
            for p in g.nodes() {
                assert!((crate::linalg::norm(p) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn circle_exactness() {
        let g = SphereGrid::new(2, 64).unwrap();
        for k in 1..=16 {
            let c = g.integrate(|p| (k as f64 * p[1].atan2(p[0])).cos());
            let s = g.integrate(|p| (k as f64 * p[1].atan2(p[0])).sin());
            assert!(c.abs() < 1e-12 && s.abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn sphere_exactness() {
        // ∫ z² = 4π/3, ∫ x²y² = 4π/15
        let g = SphereGrid::new(3, 8).unwrap();
        let a = g.integrate(|p| p[2] * p[2]);
        let b = g.integrate(|p| p[0] * p[0] * p[1] * p[1]);
        assert!((a - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((b - 4.0 * PI / 15.0).abs() < 1e-12);
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = SphereGrid::new(3, 6).unwrap();
        let vals: Vec<f64> = g.nodes().iter().map(|p| 1.0 + p[0] + 2.0 * p[2]).collect();
        for (p, v) in g.nodes().iter().zip(&vals) {
            assert!((g.interpolate(&vals, p) - v).abs() < 1e-12);
        }
    }

    #[test]
    fn doc_round_trip() {
        let g = SphereGrid::new(2, 12).unwrap();
        let doc = g.to_doc(None);
        let json = serde_json::to_string(&doc).unwrap();
        let back: GridDoc = serde_json::from_str(&json).unwrap();
        assert_eq!(SphereGrid::from_doc(&back).unwrap(), g);
    }
}
