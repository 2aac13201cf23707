//! Nonnegative test functions on R^n: analytic families closed under affine
//! changes of variable, plus lattice-sampled functions.
//!
//! The conformal family is `a (b² + |φ(x - x0)|²)^{-(n+α)/2}`.

mod concavity;
mod config;
pub(crate) mod cubature;
mod lattice;
mod levels;
mod norms;
pub(crate) mod sampling;

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{check_dim, domain, Result};
use crate::geometry::{BodyKind, Feature, SphereGrid, StarBody};
use crate::linalg::{add, norm, sub, Matrix, Point, ORIGIN};
use crate::specialfns::ln_gamma;

pub use concavity::{concavity_check, correlation_class, correlation_concavity_check, ConcavityReport};
pub use config::QuadConfig;
pub use lattice::{Lattice, LatticeHeader};
pub use levels::{schwarz_symmetrize, superlevel_volume, superlevel_volume_mc, RadialProfile};
pub(crate) use norms::correlation_ray_breaks;
pub use norms::{correlation, correlation_numeric, inner_product, integral, lens_volume, lp_norm, power_integral};

pub use crate::specialfns::Concavity;

#[derive(Clone, Debug)]
pub enum Family {
    HlsExtremal { amplitude: f64, b: f64, map: Matrix, center: Point, alpha: f64 },
    SimplexExponential { amplitude: f64, body: StarBody, center: Point },
    SConcavePeak { amplitude: f64, s: f64, body: StarBody, center: Point },
    Gaussian { amplitude: f64, covariance: Matrix, precision: Matrix, center: Point },
    Indicator { body: StarBody, center: Point },
    GridSampled(Arc<Lattice>),
}

/// How fast a function decays at infinity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Decay {
    Compact,
    Exponential,
    /// f(x) = O(|x|^{-p})
    Power(f64),
}

#[derive(Clone, Debug)]
pub struct TestFunction {
    dim: usize,
    family: Family,
}

fn nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be finite and nonnegative, got {v}"))
    }
}

fn check_center(dim: usize, c: &Point) -> Result<()> {
    if c.iter().any(|v| !v.is_finite()) || c[dim..].iter().any(|v| *v != 0.0) {
        return domain("center must be finite with unused coordinates zero");
    }
    Ok(())
}

/// Intrinsic volume of a body: closed form, or quadrature on its own grid.
pub(crate) fn body_volume(body: &StarBody) -> f64 {
    if let Some(v) = body.volume_exact() {
        return v;
    }
    match body.kind() {
        BodyKind::LinearImage { map, inner } => map.det().abs() * body_volume(inner),
        BodyKind::Sampled { grid, .. } => crate::geometry::volume_quadrature(body, grid).unwrap_or(f64::NAN),
        _ => {
            let g = SphereGrid::default_for(body.dim()).expect("valid dimension");
            crate::geometry::volume_quadrature(body, &g).unwrap_or(f64::NAN)
        }
    }
}

impl TestFunction {
    pub fn hls_extremal(dim: usize, a: f64, b: f64, map: Matrix, center: Point, alpha: f64) -> Result<Self> {
        nonneg("amplitude", a)?;
        check_center(dim, &center)?;
        if b == 0.0 || !b.is_finite() {
            return domain("b must be nonzero");
        }
        if !(alpha > 0.0) {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if !map.is_padded(dim) {
            return domain("map has entries outside the dimension");
        }
        map.inverse()?;
        Ok(Self { dim, family: Family::HlsExtremal { amplitude: a, b, map, center, alpha } })
    }

    /// (1 + |x|²)^{-(n+α)/2}
    pub fn hls_standard(dim: usize, alpha: f64) -> Result<Self> {
        Self::hls_extremal(dim, 1.0, 1.0, Matrix::IDENTITY, ORIGIN, alpha)
    }

    pub fn simplex_exponential(a: f64, body: StarBody, center: Point) -> Result<Self> {
        nonneg("amplitude", a)?;
        let dim = body.dim();
        check_center(dim, &center)?;
        Ok(Self { dim, family: Family::SimplexExponential { amplitude: a, body, center } })
    }

    /// e^{-‖x‖_Δ} for the standard simplex Δ = conv{0, e_1, ..., e_n}.
    pub fn simplex_exp_standard(dim: usize) -> Result<Self> {
        Self::simplex_exponential(1.0, StarBody::standard_simplex(dim)?, ORIGIN)
    }

    pub fn sconcave_peak(a: f64, s: f64, body: StarBody, center: Point) -> Result<Self> {
        nonneg("amplitude", a)?;
        if !(s > 0.0 && s.is_finite()) {
            return domain(format!("s must be positive, got {s}"));
        }
        let dim = body.dim();
        check_center(dim, &center)?;
        Ok(Self { dim, family: Family::SConcavePeak { amplitude: a, s, body, center } })
    }

    /// a exp(-½ (x-c)ᵀ Σ⁻¹ (x-c)).
    pub fn gaussian(dim: usize, a: f64, covariance: Matrix, center: Point) -> Result<Self> {
        nonneg("amplitude", a)?;
        check_center(dim, &center)?;
        if !covariance.is_padded(dim) || !covariance.is_symmetric(1e-12) || !covariance.is_positive_definite() {
            return domain("covariance must be symmetric positive definite");
        }
        let precision = covariance.inverse()?;
        Ok(Self { dim, family: Family::Gaussian { amplitude: a, covariance, precision, center } })
    }

    pub fn indicator(body: StarBody, center: Point) -> Result<Self> {
        let dim = body.dim();
        check_center(dim, &center)?;
        Ok(Self { dim, family: Family::Indicator { body, center } })
    }

    /// Indicator of the axis-parallel box [lo, hi].
    pub fn box_indicator(lo: &[f64], hi: &[f64]) -> Result<Self> {
        let dim = lo.len();
        check_dim(dim, hi.len())?;
        if dim == 0 || dim > 3 || lo.iter().zip(hi).any(|(a, b)| !(b > a)) {
            return domain("box needs 1 to 3 coordinates with lo < hi");
        }
        let half: Vec<f64> = lo.iter().zip(hi).map(|(a, b)| 0.5 * (b - a)).collect();
        let mut center = ORIGIN;
        for k in 0..dim {
            center[k] = 0.5 * (lo[k] + hi[k]);
        }
        let body = if half.iter().all(|h| *h == half[0]) {
            StarBody::cube(dim, half[0])?
        } else {
            StarBody::linear_image(Matrix::diagonal(&half), StarBody::cube(dim, 1.0)?)?
        };
        Self::indicator(body, center)
    }

    pub fn ball_indicator(dim: usize, radius: f64, center: Point) -> Result<Self> {
        Self::indicator(StarBody::ball(dim, radius)?, center)
    }

    pub fn grid_sampled(lattice: Lattice) -> Self {
        Self { dim: lattice.dim(), family: Family::GridSampled(Arc::new(lattice)) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn evaluate(&self, x: &Point) -> f64 {
        match &self.family {
            Family::HlsExtremal { amplitude, b, map, center, alpha } => {
                let w = map.apply(&sub(x, center));
                let e = -(self.dim as f64 + alpha) / 2.0;
                amplitude * (b * b + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).powf(e)
            }
            Family::SimplexExponential { amplitude, body, center } => {
                let g = body.gauge(&sub(x, center));
                if g.is_finite() {
                    amplitude * (-g).exp()
                } else {
                    0.0
                }
            }
            Family::SConcavePeak { amplitude, s, body, center } => {
                let g = body.gauge(&sub(x, center));
                if g < 1.0 {
                    amplitude * (1.0 - g).powf(1.0 / s)
                } else {
                    0.0
                }
            }
            Family::Gaussian { amplitude, precision, center, .. } => {
                let z = sub(x, center);
                amplitude * (-0.5 * precision.quadratic_form(&z)).exp()
            }
            Family::Indicator { body, center } => {
                if body.gauge(&sub(x, center)) <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Family::GridSampled(lat) => lat.evaluate(x),
        }
    }

    /// ln f(x), computed without underflow for the analytic families;
    /// −∞ outside the support.
    pub fn ln_evaluate(&self, x: &Point) -> f64 {
        match &self.family {
            Family::HlsExtremal { amplitude, b, map, center, alpha } => {
                let w = map.apply(&sub(x, center));
                let e = -(self.dim as f64 + alpha) / 2.0;
                amplitude.ln() + e * (b * b + w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).ln()
            }
            Family::SimplexExponential { amplitude, body, center } => {
                let g = body.gauge(&sub(x, center));
                if g.is_finite() {
                    amplitude.ln() - g
                } else {
                    f64::NEG_INFINITY
                }
            }
            Family::Gaussian { amplitude, precision, center, .. } => {
                amplitude.ln() - 0.5 * precision.quadratic_form(&sub(x, center))
            }
            _ => self.evaluate(x).ln(),
        }
    }

    /// Checked evaluation from a coordinate slice.
    pub fn evaluate_at(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.evaluate(&crate::linalg::point(x)?))
    }

    pub fn max_value(&self) -> f64 {
        match &self.family {
            Family::HlsExtremal { amplitude, b, alpha, .. } => amplitude * b.abs().powf(-(self.dim as f64 + alpha)),
            Family::SimplexExponential { amplitude, .. }
            | Family::SConcavePeak { amplitude, .. }
            | Family::Gaussian { amplitude, .. } => *amplitude,
            Family::Indicator { .. } => 1.0,
            Family::GridSampled(l) => l.max_value(),
        }
    }

    pub fn decay(&self) -> Decay {
        match &self.family {
            Family::HlsExtremal { alpha, .. } => Decay::Power(self.dim as f64 + alpha),
            Family::SimplexExponential { .. } | Family::Gaussian { .. } => Decay::Exponential,
            _ => Decay::Compact,
        }
    }

    pub fn center(&self) -> Point {
        match &self.family {
            Family::HlsExtremal { center, .. }
            | Family::SimplexExponential { center, .. }
            | Family::SConcavePeak { center, .. }
            | Family::Gaussian { center, .. }
            | Family::Indicator { center, .. } => *center,
            Family::GridSampled(l) => {
                let b = l.bounds();
                [0.5 * (b[0].0 + b[0].1), 0.5 * (b[1].0 + b[1].1), 0.5 * (b[2].0 + b[2].1)]
            }
        }
    }

    /// Bounding box of the support, or `None` for unbounded support.
    pub fn support_box(&self) -> Option<[(f64, f64); 3]> {
        let shifted = |b: [(f64, f64); 3], c: &Point| {
            let mut out = b;
            for k in 0..3 {
                out[k] = (b[k].0 + c[k], b[k].1 + c[k]);
            }
            out
        };
        match &self.family {
            Family::SConcavePeak { body, center, .. } | Family::Indicator { body, center } => {
                Some(shifted(body.bounds(), center))
            }
            Family::GridSampled(l) => Some(l.bounds()),
            _ => None,
        }
    }

    /// Box outside of which at most `tol` of the mass of f lies, from the
    /// family's analytic tail bound.
    pub fn effective_box(&self, tol: f64) -> [(f64, f64); 3] {
        if let Some(b) = self.support_box() {
            return b;
        }
        let n = self.dim as f64;
        let c = self.center();
        let mut out = [(0.0, 0.0); 3];
        match &self.family {
            Family::SimplexExponential { body, .. } => {
                // P(Gamma(n) > u) ≤ tol, with a generous margin
                let u = gamma_tail_level(n, tol);
                let b = body.bounds();
                for k in 0..3 {
                    out[k] = (c[k] + u * b[k].0, c[k] + u * b[k].1);
                }
            }
            Family::Gaussian { covariance, .. } => {
                let u = (2.0 * gamma_tail_level(n / 2.0, tol)).sqrt();
                for k in 0..3 {
                    let h = u * covariance.0[k][k].max(0.0).sqrt();
                    out[k] = (c[k] - h, c[k] + h);
                }
            }
            Family::HlsExtremal { b, map, alpha, .. } => {
                // mass beyond |φz| = R is below (b/R)^α up to a constant
                let r = b.abs() * (tol.powf(-1.0 / alpha)).max(1.0) * 2.0;
                let inv = map.inverse().unwrap_or(Matrix::IDENTITY);
                for k in 0..3 {
                    let row = inv.0[k];
                    let h = r * (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
                    out[k] = (c[k] - h, c[k] + h);
                }
            }
            _ => unreachable!("compact families handled above"),
        }
        for o in out.iter_mut().skip(self.dim) {
            *o = (0.0, 0.0);
        }
        out
    }

    /// Breaks along the line x = p + t e_axis (p[axis] ignored) where the
    /// function may be non-smooth, as values of x_axis.
    pub(crate) fn line_breaks(&self, p: &Point, shift: &Point, axis: usize, out: &mut Vec<f64>) {
        let mut e = [0.0; 3];
        e[axis] = 1.0;
        let mut base = *p;
        base[axis] = 0.0;
        let z = sub(&add(&base, shift), &self.center());
        match &self.family {
            Family::SimplexExponential { body, .. } => body.shape().line_breaks(&z, &e, Feature::Gauge, out),
            Family::SConcavePeak { body, .. } => {
                body.shape().line_breaks(&z, &e, Feature::Gauge, out);
                body.shape().line_breaks(&z, &e, Feature::Level(1.0), out);
            }
            Family::Indicator { body, .. } => body.shape().line_breaks(&z, &e, Feature::Level(1.0), out),
            Family::Gaussian { precision, .. } => {
                let pe = precision.apply(&e);
                out.push(-crate::linalg::dot(&z, &pe) / pe[axis]);
            }
            Family::HlsExtremal { map, .. } => {
                let g = map.transpose().mul(map);
                let ge = g.apply(&e);
                out.push(-crate::linalg::dot(&z, &ge) / ge[axis]);
            }
            Family::GridSampled(l) => out.extend(l.axis_coords(axis).iter().map(|v| v - shift[axis])),
        }
    }

    /// Values of x_axis where the integral over later axes may be
    /// non-smooth, given the earlier coordinates of `p`.
    pub(crate) fn critical(&self, p: &Point, shift: &Point, axis: usize, out: &mut Vec<f64>) {
        let c = self.center();
        let z = sub(&add(p, shift), &c);
        let offset = c[axis] - shift[axis];
        let start = out.len();
        match &self.family {
            Family::SimplexExponential { body, .. } => body.shape().critical(&z, axis, Feature::Gauge, out),
            Family::SConcavePeak { body, .. } => {
                body.shape().critical(&z, axis, Feature::Gauge, out);
                body.shape().critical(&z, axis, Feature::Level(1.0), out);
            }
            Family::Indicator { body, .. } => body.shape().critical(&z, axis, Feature::Level(1.0), out),
            Family::Gaussian { .. } | Family::HlsExtremal { .. } => out.push(0.0),
            Family::GridSampled(l) => {
                out.extend(l.axis_coords(axis).iter().map(|v| v - shift[axis]));
                return;
            }
        }
        for v in &mut out[start..] {
            *v += offset;
        }
    }

    /// x ↦ f(M⁻¹(x - shift)).
    pub fn transform(&self, map: &Matrix, shift: &Point) -> Result<Self> {
        let dim = self.dim;
        if !map.is_padded(dim) {
            return domain("map has entries outside the dimension");
        }
        check_center(dim, shift)?;
        let inv = map.inverse()?;
        let moved = |c: &Point| add(&map.apply(c), shift);
        let family = match &self.family {
            Family::HlsExtremal { amplitude, b, map: phi, center, alpha } => Family::HlsExtremal {
                amplitude: *amplitude,
                b: *b,
                map: phi.mul(&inv),
                center: moved(center),
                alpha: *alpha,
            },
            Family::Gaussian { amplitude, covariance, center, .. } => {
                let cov = map.mul(covariance).mul(&map.transpose());
                return Self::gaussian(dim, *amplitude, cov, moved(center));
            }
            Family::SimplexExponential { amplitude, body, center } => Family::SimplexExponential {
                amplitude: *amplitude,
                body: StarBody::linear_image(*map, body.clone())?,
                center: moved(center),
            },
            Family::SConcavePeak { amplitude, s, body, center } => Family::SConcavePeak {
                amplitude: *amplitude,
                s: *s,
                body: StarBody::linear_image(*map, body.clone())?,
                center: moved(center),
            },
            Family::Indicator { body, center } => {
                Family::Indicator { body: StarBody::linear_image(*map, body.clone())?, center: moved(center) }
            }
            Family::GridSampled(l) => {
                let b = l.bounds();
                let (mut lo, mut hi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
                for corner in 0..(1usize << dim) {
                    let mut p = ORIGIN;
                    for k in 0..dim {
                        p[k] = if corner >> k & 1 == 1 { b[k].1 } else { b[k].0 };
                    }
                    let q = moved(&p);
                    for k in 0..dim {
                        lo[k] = lo[k].min(q[k]);
                        hi[k] = hi[k].max(q[k]);
                    }
                }
                let counts = l.header().counts.iter().copied().max().unwrap_or(2);
                let src = l.clone();
                let lat = Lattice::from_fn(dim, &lo, &hi, counts, |x| src.evaluate(&inv.apply(&sub(x, shift))))?;
                Family::GridSampled(Arc::new(lat))
            }
        };
        Ok(Self { dim, family })
    }

    /// Same function multiplied by `c ≥ 0` (indicators become lattice
    /// functions only if c ≠ 1, so they are rejected instead).
    pub fn scaled(&self, c: f64) -> Result<Self> {
        nonneg("scale", c)?;
        let family = match &self.family {
            Family::HlsExtremal { amplitude, b, map, center, alpha } => {
                Family::HlsExtremal { amplitude: amplitude * c, b: *b, map: *map, center: *center, alpha: *alpha }
            }
            Family::SimplexExponential { amplitude, body, center } => {
                Family::SimplexExponential { amplitude: amplitude * c, body: body.clone(), center: *center }
            }
            Family::SConcavePeak { amplitude, s, body, center } => {
                Family::SConcavePeak { amplitude: amplitude * c, s: *s, body: body.clone(), center: *center }
            }
            Family::Gaussian { amplitude, covariance, precision, center } => Family::Gaussian {
                amplitude: amplitude * c,
                covariance: *covariance,
                precision: *precision,
                center: *center,
            },
            Family::Indicator { .. } if c == 1.0 => self.family.clone(),
            Family::Indicator { .. } => return domain("indicators cannot be rescaled"),
            Family::GridSampled(l) => {
                let vals = l.values().iter().map(|v| v * c).collect();
                Family::GridSampled(Arc::new(Lattice::new(&l.header(), vals)?))
            }
        };
        Ok(Self { dim: self.dim, family })
    }

    /// True when f(-x) = f(x) for the analytic families (checked on the
    /// parameters, not sampled).
    pub fn is_symmetric_about_origin(&self) -> bool {
        let c = self.center();
        norm(&c) == 0.0
            && match &self.family {
                Family::SimplexExponential { body, .. }
                | Family::SConcavePeak { body, .. }
                | Family::Indicator { body, .. } => body_is_symmetric(body),
                Family::GridSampled(_) => false,
                _ => true,
            }
    }

    pub fn describe(&self) -> Value {
        let c = |p: &Point| p[..self.dim].to_vec();
        match &self.family {
            Family::HlsExtremal { amplitude, b, map, center, alpha } => json!({
                "family": "hls_extremal", "dim": self.dim, "amplitude": amplitude, "b": b,
                "map": map.rows(self.dim), "center": c(center), "alpha": alpha
            }),
            Family::SimplexExponential { amplitude, body, center } => json!({
                "family": "simplex_exponential", "dim": self.dim, "amplitude": amplitude,
                "body": body.describe(), "center": c(center)
            }),
            Family::SConcavePeak { amplitude, s, body, center } => json!({
                "family": "sconcave_peak", "dim": self.dim, "amplitude": amplitude, "s": s,
                "body": body.describe(), "center": c(center)
            }),
            Family::Gaussian { amplitude, covariance, center, .. } => json!({
                "family": "gaussian", "dim": self.dim, "amplitude": amplitude,
                "covariance": covariance.rows(self.dim), "center": c(center)
            }),
            Family::Indicator { body, center } => json!({
                "family": "indicator", "dim": self.dim, "body": body.describe(), "center": c(center)
            }),
            Family::GridSampled(l) => json!({"family": "grid_sampled", "lattice": l.header()}),
        }
    }

    /// Half-widths when f is the indicator of an axis-parallel box.
    pub(crate) fn as_box(&self) -> Option<(Point, Point)> {
        let Family::Indicator { body, center } = &self.family else { return None };
        let half = match body.kind() {
            BodyKind::Cube { half_width } => {
                let mut h = [0.0; 3];
                h[..self.dim].fill(*half_width);
                h
            }
            BodyKind::LinearImage { map, inner } => {
                let BodyKind::Cube { half_width } = inner.kind() else { return None };
                let m = map.0;
                let diagonal = (0..3).all(|i| (0..3).all(|j| i == j || m[i][j] == 0.0));
                if !diagonal {
                    return None;
                }
                let mut h = [0.0; 3];
                for k in 0..self.dim {
                    h[k] = m[k][k].abs() * half_width;
                }
                h
            }
            _ => return None,
        };
        Some((*center, half))
    }

    pub(crate) fn as_ball(&self) -> Option<(Point, f64)> {
        match &self.family {
            Family::Indicator { body, center } => match body.kind() {
                BodyKind::Ball { radius } => Some((*center, *radius)),
                _ => None,
            },
            _ => None,
        }
    }
}

fn body_is_symmetric(body: &StarBody) -> bool {
    match body.kind() {
        BodyKind::Ball { .. } | BodyKind::Ellipsoid { .. } | BodyKind::CrossPolytope { .. } | BodyKind::Cube { .. } => {
            true
        }
        BodyKind::LinearImage { inner, .. } => body_is_symmetric(inner),
        _ => false,
    }
}

/// Smallest u with P(Gamma(k, 1) > u) ≤ tol, by bisection on a tail bound.
fn gamma_tail_level(k: f64, tol: f64) -> f64 {
    // P(G > u) ≤ e^{-u} u^{k-1} / Γ(k) · (1 + k/u) for u > 2k
    let lg = ln_gamma(k).unwrap_or(0.0);
    let bound = |u: f64| (-u + (k - 1.0) * u.ln() - lg).exp() * (1.0 + k / u) * 2.0;
    let mut u = 2.0 * k + 1.0;
    while bound(u) > tol {
        u *= 1.25;
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let f = TestFunction::hls_standard(1, 1.0).unwrap();
        assert_eq!(f.evaluate(&ORIGIN), 1.0);
        let g = TestFunction::simplex_exp_standard(2).unwrap();
        assert_eq!(g.evaluate(&[-0.5, 1.0, 0.0]), 0.0);
        assert!((g.evaluate(&[0.5, 1.0, 0.0]) - (-1.5f64).exp()).abs() < 1e-15);
        let i = TestFunction::box_indicator(&[0.0], &[1.0]).unwrap();
        assert_eq!(i.evaluate(&[0.5, 0.0, 0.0]), 1.0);
        assert_eq!(i.evaluate(&[1.5, 0.0, 0.0]), 0.0);
        assert!(i.evaluate_at(&[0.5, 0.5]).is_err());
    }

    #[test]
    fn transform_closure() {
        let f = TestFunction::hls_extremal(2, 1.0, 1.0, Matrix::IDENTITY, [0.2, 0.0, 0.0], 1.0).unwrap();
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![0.0, 0.5]]).unwrap();
        let s = [0.3, -0.4, 0.0];
        let t = f.transform(&m, &s).unwrap();
        assert!(matches!(t.family(), Family::HlsExtremal { .. }));
        let inv = m.inverse().unwrap();
        for x in [[0.1, 0.7, 0.0], [-1.2, 2.0, 0.0]] {
            let want = f.evaluate(&inv.apply(&sub(&x, &s)));
            assert!((t.evaluate(&x) - want).abs() < 1e-14);
        }
        let id = f.transform(&Matrix::IDENTITY, &ORIGIN).unwrap();
        assert_eq!(id.evaluate(&[0.4, 0.1, 0.0]), f.evaluate(&[0.4, 0.1, 0.0]));
        let b = TestFunction::box_indicator(&[0.0, 0.0], &[1.0, 2.0]).unwrap();
        let tb = b.transform(&m, &s).unwrap();
        let x = [0.9, 0.3, 0.0];
        assert_eq!(tb.evaluate(&x), b.evaluate(&inv.apply(&sub(&x, &s))));
    }

    #[test]
    fn box_detection() {
        let b = TestFunction::box_indicator(&[0.0, -1.0], &[1.0, 2.0]).unwrap();
        let (c, h) = b.as_box().unwrap();
        assert_eq!((c[0], c[1], h[0], h[1]), (0.5, 0.5, 0.5, 1.5));
        assert!(TestFunction::ball_indicator(2, 1.0, ORIGIN).unwrap().as_box().is_none());
    }
}
