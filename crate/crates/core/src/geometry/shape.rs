//! Normalised representations of star bodies used by the integrators.
//!
//! A body is a quadric {zᵀQz ≤ 1}, a polytope {a_k·z ≤ 1, c_j·z ≤ 0}, or a
//! sampled radial function seen through an inverse linear map.

use std::sync::Arc;

use crate::linalg::{dot, norm, Matrix, Point};

use super::sphere::SphereGrid;

const CONE_TOL: f64 = 1e-12;

/// Which features of a body-based function produce kinks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Feature {
    /// all dilates of the body (functions of the gauge)
    Gauge,
    /// the boundary of the dilate `level * K` only
    Level(f64),
}

#[derive(Clone, Debug)]
pub(crate) struct Quadric {
    pub q: Matrix,
    pub cov: Matrix,
}

#[derive(Clone, Debug)]
pub(crate) struct Polytope {
    pub facets: Vec<Point>,
    pub cones: Vec<Point>,
    pub vertices: Vec<Point>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug)]
pub(crate) struct Sampled {
    pub inv: Matrix,
    pub map: Matrix,
    pub grid: Arc<SphereGrid>,
    pub values: Arc<Vec<f64>>,
    pub max_value: f64,
}

#[derive(Clone, Debug)]
pub(crate) enum Shape {
    Quadric(Quadric),
    Polytope(Polytope),
    Sampled(Sampled),
}

impl Polytope {
    fn in_cone(&self, z: &Point) -> bool {
        let nz = norm(z);
        self.cones.iter().all(|c| dot(c, z) <= CONE_TOL * norm(c) * nz)
    }

    fn max_facet(&self, z: &Point) -> f64 {
        self.facets.iter().map(|a| dot(a, z)).fold(f64::NEG_INFINITY, f64::max)
    }

    fn argmax(&self, z: &Point) -> usize {
        let mut best = 0;
        let mut v = f64::NEG_INFINITY;
        for (k, a) in self.facets.iter().enumerate() {
            let d = dot(a, z);
            if d > v {
                v = d;
                best = k;
            }
        }
        best
    }
}

impl Shape {
    pub fn gauge(&self, z: &Point) -> f64 {
        match self {
            Shape::Quadric(q) => q.q.quadratic_form(z).max(0.0).sqrt(),
            Shape::Polytope(p) => {
                if !p.in_cone(z) {
                    return f64::INFINITY;
                }
                p.max_facet(z).max(0.0)
            }
            Shape::Sampled(s) => {
                let y = s.inv.apply(z);
                let r = norm(&y);
                if r == 0.0 {
                    return 0.0;
                }
                let u = [y[0] / r, y[1] / r, y[2] / r];
                let rho = s.grid.interpolate(&s.values, &u);
                r / rho
            }
        }
    }

    pub fn map(&self, m: &Matrix, m_inv: &Matrix) -> Shape {
        match self {
            Shape::Quadric(q) => {
                let q2 = m_inv.transpose().mul(&q.q).mul(m_inv);
                let cov = m.mul(&q.cov).mul(&m.transpose());
                Shape::Quadric(Quadric { q: q2, cov })
            }
            Shape::Polytope(p) => {
                let it = m_inv.transpose();
                Shape::Polytope(Polytope {
                    facets: p.facets.iter().map(|a| it.apply(a)).collect(),
                    cones: p.cones.iter().map(|c| it.apply(c)).collect(),
                    vertices: p.vertices.iter().map(|v| m.apply(v)).collect(),
                    edges: p.edges.clone(),
                })
            }
            Shape::Sampled(s) => Shape::Sampled(Sampled {
                inv: s.inv.mul(m_inv),
                map: m.mul(&s.map),
                grid: s.grid.clone(),
                values: s.values.clone(),
                max_value: s.max_value,
            }),
        }
    }

    /// Half-widths of the bounding box of `level * K` along each axis, as
    /// (min, max) coordinate pairs.
    pub fn bounds(&self, level: f64) -> [(f64, f64); 3] {
        let mut out = [(0.0, 0.0); 3];
        match self {
            Shape::Quadric(q) => {
                for (k, o) in out.iter_mut().enumerate() {
                    let h = level * q.cov.0[k][k].max(0.0).sqrt();
                    *o = (-h, h);
                }
            }
            Shape::Polytope(p) => {
                for (k, o) in out.iter_mut().enumerate() {
                    let lo = p.vertices.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                    let hi = p.vertices.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                    *o = (level * lo.min(0.0), level * hi.max(0.0));
                }
            }
            Shape::Sampled(s) => {
                for (k, o) in out.iter_mut().enumerate() {
                    let row = s.map.0[k];
                    let h = level * s.max_value * dot(&row, &row).sqrt();
                    *o = (-h, h);
                }
            }
        }
        out
    }

    /// Parameters t at which the function along z = p + t d may fail to be
    /// smooth, appended to `out`.
    pub fn line_breaks(&self, p: &Point, d: &Point, feature: Feature, out: &mut Vec<f64>) {
        match self {
            Shape::Quadric(q) => {
                let qd = q.q.apply(d);
                let a = dot(d, &qd);
                let b = dot(p, &qd);
                if a <= 0.0 {
                    return;
                }
                match feature {
                    Feature::Gauge => out.push(-b / a),
                    Feature::Level(l) => {
                        let c = q.q.quadratic_form(p) - l * l;
                        let disc = b * b - a * c;
                        if disc > 0.0 {
                            let s = disc.sqrt();
                            // stable quadratic roots
                            let r1 = if b >= 0.0 { (-b - s) / a } else { (-b + s) / a };
                            let r2 = c / (a * r1);
                            out.push(r1);
                            if r2.is_finite() {
                                out.push(r2);
                            }
                        }
                    }
                }
            }
            Shape::Polytope(poly) => {
                let mut cand = Vec::new();
                for c in &poly.cones {
                    let cd = dot(c, d);
                    if cd != 0.0 {
                        cand.push(-dot(c, p) / cd);
                    }
                }
                match feature {
                    Feature::Gauge => {
                        for (i, a) in poly.facets.iter().enumerate() {
                            for b in &poly.facets[i + 1..] {
                                let w = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
                                let wd = dot(&w, d);
                                if wd != 0.0 {
                                    cand.push(-dot(&w, p) / wd);
                                }
                            }
                        }
                    }
                    Feature::Level(l) => {
                        for a in &poly.facets {
                            let ad = dot(a, d);
                            if ad != 0.0 {
                                cand.push((l - dot(a, p)) / ad);
                            }
                        }
                    }
                }
                cand.retain(|t| t.is_finite());
                cand.sort_by(f64::total_cmp);
                cand.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * (1.0 + b.abs()));
                if cand.len() <= 1 {
                    out.extend(cand);
                    return;
                }
                // keep only true kinks: the active piece differs on both sides
                let at = |t: f64| [p[0] + t * d[0], p[1] + t * d[1], p[2] + t * d[2]];
                let state = |t: f64| {
                    let z = at(t);
                    let inside = poly.in_cone(&z);
                    match feature {
                        Feature::Gauge => (inside, poly.argmax(&z)),
                        Feature::Level(l) => (inside, usize::from(poly.max_facet(&z) <= l)),
                    }
                };
                let span = (cand[cand.len() - 1] - cand[0]).max(1.0);
                let mut prev = state(cand[0] - span);
                for (i, t) in cand.iter().enumerate() {
                    let next_t = if i + 1 < cand.len() { 0.5 * (t + cand[i + 1]) } else { t + span };
                    let next = state(next_t);
                    if next != prev {
                        out.push(*t);
                    }
                    prev = next;
                }
            }
            Shape::Sampled(_) => {
                let dd = dot(d, d);
                if dd > 0.0 {
                    out.push(-dot(p, d) / dd);
                }
            }
        }
    }

    /// Coordinates z_k at which the integral over the remaining axes may
    /// fail to be smooth, given the already fixed coordinates `prefix[..k]`.
    pub fn critical(&self, prefix: &Point, k: usize, feature: Feature, out: &mut Vec<f64>) {
        match (self, feature) {
            (Shape::Quadric(q), Feature::Level(l)) => {
                if k == 0 {
                    let h = l * q.cov.0[0][0].max(0.0).sqrt();
                    out.extend([-h, h]);
                } else if k == 1 {
                    // extremes of z1 on the section z0 = c of zᵀQz = l²
                    let m = &q.q.0;
                    let c = prefix[0];
                    let s = m[2][2];
                    let a = m[1][1] - m[1][2] * m[1][2] / s;
                    let b = c * (m[0][1] - m[0][2] * m[1][2] / s);
                    let cc = c * c * (m[0][0] - m[0][2] * m[0][2] / s) - l * l;
                    if a > 0.0 {
                        let disc = b * b - a * cc;
                        if disc >= 0.0 {
                            let s = disc.sqrt();
                            out.extend([(-b - s) / a, (-b + s) / a]);
                        }
                    }
                }
            }
            (Shape::Quadric(q), Feature::Gauge) => {
                if k == 0 {
                    out.push(0.0);
                } else if k == 1 {
                    let m = &q.q.0;
                    let s = m[2][2];
                    let a = m[1][1] - m[1][2] * m[1][2] / s;
                    let b = prefix[0] * (m[0][1] - m[0][2] * m[1][2] / s);
                    if a > 0.0 {
                        out.push(-b / a);
                    }
                }
            }
            (Shape::Polytope(p), Feature::Level(l)) => {
                if k == 0 {
                    out.push(0.0);
                    out.extend(p.vertices.iter().map(|v| l * v[0]));
                } else if k == 1 {
                    let c = prefix[0];
                    for &(i, j) in &p.edges {
                        let (u, v) = (p.vertices[i], p.vertices[j]);
                        let (u0, v0) = (l * u[0], l * v[0]);
                        if (u0 - c) * (v0 - c) <= 0.0 {
                            if u0 == v0 {
                                out.extend([l * u[1], l * v[1]]);
                            } else {
                                let s = (c - u0) / (v0 - u0);
                                out.push(l * (u[1] + s * (v[1] - u[1])));
                            }
                        }
                    }
                }
            }
            (Shape::Polytope(p), Feature::Gauge) => {
                out.push(0.0);
                if k == 1 {
                    let c = prefix[0];
                    for v in &p.vertices {
                        if v[0] != 0.0 && c / v[0] > 0.0 {
                            out.push(c * v[1] / v[0]);
                        }
                    }
                }
            }
            (Shape::Sampled(_), _) => out.push(0.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Shape {
        Shape::Polytope(Polytope {
            facets: vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]],
            cones: vec![],
            vertices: vec![[1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [-1.0, -1.0, 0.0], [1.0, -1.0, 0.0]],
            edges: vec![(0, 1), (1, 2), (2, 3), (3, 0)],
        })
    }

    #[test]
    fn polytope_line_kinks() {
        let s = square();
        let mut out = Vec::new();
        // horizontal line at height 0.5: gauge switches at x = ±0.5
        s.line_breaks(&[0.0, 0.5, 0.0], &[1.0, 0.0, 0.0], Feature::Gauge, &mut out);
        out.sort_by(f64::total_cmp);
        assert_eq!(out.len(), 2);
        assert!((out[0] + 0.5).abs() < 1e-15 && (out[1] - 0.5).abs() < 1e-15);
        out.clear();
        s.line_breaks(&[0.0, 0.5, 0.0], &[1.0, 0.0, 0.0], Feature::Level(2.0), &mut out);
        out.sort_by(f64::total_cmp);
        assert_eq!(out, vec![-2.0, 2.0]);
    }

    #[test]
    fn quadric_section_extremes() {
        // unit ball, plane z0 = 0.6: z1 ∈ [-0.8, 0.8]
        let q = Shape::Quadric(Quadric { q: Matrix::IDENTITY, cov: Matrix::IDENTITY });
        let mut out = Vec::new();
        q.critical(&[0.6, 0.0, 0.0], 1, Feature::Level(1.0), &mut out);
        out.sort_by(f64::total_cmp);
        assert!((out[0] + 0.8).abs() < 1e-14 && (out[1] - 0.8).abs() < 1e-14);
    }
}
