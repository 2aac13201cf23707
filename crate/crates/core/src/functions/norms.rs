//! Norms, inner products and correlations, in closed form where the
//! families allow it.

use std::f64::consts::PI;

use crate::error::{check_dim, domain, Error, Result};
use crate::linalg::{dot, norm, sub, Matrix, Point, ORIGIN};
use crate::quad::Estimate;
use crate::specialfns::{ln_beta, ln_gamma, unit_ball_volume};

use super::cubature::Cubature;
use super::{body_volume, Family, QuadConfig, TestFunction};

fn closed(v: f64) -> Result<Estimate> {
    Ok(Estimate::exact(v))
}

/// ∫ f^p in closed form, when the family has one.
fn power_integral_closed(f: &TestFunction, p: f64) -> Option<Result<f64>> {
    let n = f.dim() as f64;
    let v = match f.family() {
        Family::Indicator { body, .. } => body_volume(body),
        Family::Gaussian { amplitude, covariance, .. } => {
            amplitude.powf(p) * (2.0 * PI / p).powf(n / 2.0) * covariance.det().sqrt()
        }
        Family::SimplexExponential { amplitude, body, .. } => {
            // ∫ g(‖x‖_K) = n|K| ∫ g(u) u^{n-1} du
            let ln = ln_gamma(n + 1.0).ok()? - n * p.ln();
            amplitude.powf(p) * body_volume(body) * ln.exp()
        }
        Family::SConcavePeak { amplitude, s, body, .. } => {
            let lb = ln_beta(n, p / s + 1.0).ok()?;
            amplitude.powf(p) * n * body_volume(body) * lb.exp()
        }
        Family::HlsExtremal { amplitude, b, map, alpha, .. } => {
            let q = p * (n + alpha) / 2.0;
            if q <= n / 2.0 {
                return Some(Err(Error::Divergent(format!(
                    "∫ f^p diverges for p = {p}: decay exponent {} ≤ n",
                    2.0 * q
                ))));
            }
            let ln =
                ln_gamma(q - n / 2.0).ok()? - ln_gamma(q).ok()? + (n / 2.0) * PI.ln() + (n - 2.0 * q) * b.abs().ln();
            amplitude.powf(p) * ln.exp() / map.det().abs()
        }
        Family::GridSampled(_) => return None,
    };
    Some(Ok(v))
}

/// ∫ f^p, closed form or nested cubature.
pub fn power_integral(f: &TestFunction, p: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if !(p > 0.0) {
        return domain(format!("p must be positive, got {p}"));
    }
    if let Some(v) = power_integral_closed(f, p) {
        return closed(v?);
    }
    let cub = Cubature::new(f.dim(), cfg).factor(f, ORIGIN, true);
    Ok(cub.integrate(&|x: &Point| {
        let v = f.evaluate(x);
        if v == 0.0 {
            0.0
        } else {
            v.powf(p)
        }
    }))
}

/// (∫ f^p)^{1/p}; a quasi-norm for p < 1.
pub fn lp_norm(f: &TestFunction, p: f64, cfg: &QuadConfig) -> Result<Estimate> {
    Ok(power_integral(f, p, cfg)?.powf(1.0 / p))
}

/// ∫ f.
pub fn integral(f: &TestFunction, cfg: &QuadConfig) -> Result<Estimate> {
    power_integral(f, 1.0, cfg)
}

/// ∫ f h.
pub fn inner_product(f: &TestFunction, h: &TestFunction, cfg: &QuadConfig) -> Result<Estimate> {
    correlation(f, h, &ORIGIN, cfg)
}

fn interval_overlap(c1: f64, h1: f64, c2: f64, h2: f64) -> f64 {
    ((c1 + h1).min(c2 + h2) - (c1 - h1).max(c2 - h2)).max(0.0)
}

/// Volume of B(0, a) ∩ B(d e, b) in dimension n.
pub fn lens_volume(dim: usize, a: f64, b: f64, d: f64) -> f64 {
    let d = d.abs();
    if d >= a + b {
        return 0.0;
    }
    let small = a.min(b);
    if d <= (a - b).abs() {
        return unit_ball_volume(dim).unwrap_or(f64::NAN) * small.powi(dim as i32);
    }
    match dim {
        1 => a + b - d,
        2 => {
            let ca = ((d * d + a * a - b * b) / (2.0 * d * a)).clamp(-1.0, 1.0);
            let cb = ((d * d + b * b - a * a) / (2.0 * d * b)).clamp(-1.0, 1.0);
            let k = (-d + a + b) * (d + a - b) * (d - a + b) * (d + a + b);
            a * a * ca.acos() + b * b * cb.acos() - 0.5 * k.max(0.0).sqrt()
        }
        _ => PI * (a + b - d).powi(2) * (d * d + 2.0 * d * (a + b) - 3.0 * (a - b).powi(2)) / (12.0 * d),
    }
}

fn gaussian_correlation(
    dim: usize,
    (a1, s1, c1): (f64, &Matrix, &Point),
    (a2, s2, c2): (f64, &Matrix, &Point),
    y: &Point,
) -> Result<f64> {
    let mut sum = s1.add(s2);
    for k in dim..3 {
        sum.0[k][k] = 1.0;
    }
    let inv = sum.inverse()?;
    let d = sub(&sub(c1, y), c2);
    let n = dim as f64;
    let ln = (n / 2.0) * (2.0 * PI).ln() + 0.5 * (s1.det().ln() + s2.det().ln() - sum.det().ln())
        - 0.5 * inv.quadratic_form(&d);
    Ok(a1 * a2 * ln.exp())
}

fn correlation_closed(f: &TestFunction, h: &TestFunction, y: &Point) -> Option<Result<f64>> {
    if let (Some((cf, hf)), Some((ch, hh))) = (f.as_box(), h.as_box()) {
        let mut v = 1.0;
        for k in 0..f.dim() {
            v *= interval_overlap(cf[k] - y[k], hf[k], ch[k], hh[k]);
        }
        return Some(Ok(v));
    }
    if let (Some((cf, rf)), Some((ch, rh))) = (f.as_ball(), h.as_ball()) {
        let d = norm(&sub(&sub(&cf, y), &ch));
        return Some(Ok(lens_volume(f.dim(), rf, rh, d)));
    }
    if let (
        Family::Gaussian { amplitude: a1, covariance: s1, center: c1, .. },
        Family::Gaussian { amplitude: a2, covariance: s2, center: c2, .. },
    ) = (f.family(), h.family())
    {
        return Some(gaussian_correlation(f.dim(), (*a1, s1, c1), (*a2, s2, c2), y));
    }
    None
}

/// 𝒢(f,h)(y) = ∫ f(x+y) h(x) dx.
pub fn correlation(f: &TestFunction, h: &TestFunction, y: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    check_dim(f.dim(), h.dim())?;
    if let Some(v) = correlation_closed(f, h, y) {
        return closed(v?);
    }
    correlation_numeric(f, h, y, cfg)
}

/// Correlation by nested cubature, ignoring closed forms.
pub fn correlation_numeric(f: &TestFunction, h: &TestFunction, y: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    check_dim(f.dim(), h.dim())?;
    let cub = Cubature::new(f.dim(), cfg).factor(f, *y, true).factor(h, ORIGIN, true);
    Ok(cub.integrate_product())
}

/// Breaks in t of t ↦ 𝒢(f,h)(tξ) for closed-form pairs.
pub(crate) fn correlation_ray_breaks(f: &TestFunction, h: &TestFunction, xi: &Point) -> Vec<f64> {
    let mut out = Vec::new();
    if let (Some((cf, hf)), Some((ch, hh))) = (f.as_box(), h.as_box()) {
        for k in 0..f.dim() {
            if xi[k] != 0.0 {
                for s1 in [-1.0, 1.0] {
                    for s2 in [-1.0, 1.0] {
                        // t ξ_k = (c_f + s1 h_f) - (c_h + s2 h_h)
                        out.push(((cf[k] + s1 * hf[k]) - (ch[k] + s2 * hh[k])) / xi[k]);
                    }
                }
            }
        }
    } else if let (Some((cf, rf)), Some((ch, rh))) = (f.as_ball(), h.as_ball()) {
        // |c_f - c_h - t ξ| ∈ {|r_f - r_h|, r_f + r_h}
        let w = sub(&cf, &ch);
        let b = dot(&w, xi);
        let ww = dot(&w, &w);
        for r in [(rf - rh).abs(), rf + rh] {
            let disc = b * b - (ww - r * r);
            if disc >= 0.0 {
                out.extend([b - disc.sqrt(), b + disc.sqrt()]);
            }
        }
    }
    out.retain(|t| *t > 0.0 && t.is_finite());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarBody;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn closed_norm_examples() {
        let i = TestFunction::box_indicator(&[0.0], &[1.0]).unwrap();
        assert!((lp_norm(&i, 2.0, &cfg()).unwrap().value - 1.0).abs() < 1e-15);
        for n in 1..=3 {
            let f = TestFunction::simplex_exp_standard(n).unwrap();
            assert!((lp_norm(&f, 1.0, &cfg()).unwrap().value - 1.0).abs() < 1e-14);
        }
        let g = TestFunction::gaussian(2, 1.0, Matrix::IDENTITY, ORIGIN).unwrap();
        let c = g.scaled(2.5).unwrap();
        let (a, b) = (lp_norm(&g, 1.3, &cfg()).unwrap().value, lp_norm(&c, 1.3, &cfg()).unwrap().value);
        assert!((b - 2.5 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn closed_forms_match_cubature() {
        let c = cfg();
        let m = Matrix::from_rows(&[vec![1.2, 0.3], vec![-0.1, 0.8]]).unwrap();
        let fams = vec![
            TestFunction::hls_extremal(2, 1.5, 0.7, m, [0.1, 0.2, 0.0], 1.0).unwrap(),
            TestFunction::simplex_exponential(2.0, StarBody::cross_polytope(2, 1.3).unwrap(), [0.3, 0.0, 0.0]).unwrap(),
            TestFunction::simplex_exp_standard(2).unwrap(),
            TestFunction::sconcave_peak(1.0, 0.5, StarBody::standard_simplex(2).unwrap(), ORIGIN).unwrap(),
            TestFunction::gaussian(2, 1.0, Matrix::from_rows(&[vec![1.0, 0.4], vec![0.4, 0.5]]).unwrap(), ORIGIN)
                .unwrap(),
            TestFunction::ball_indicator(2, 0.8, [0.5, 0.5, 0.0]).unwrap(),
        ];
        for f in &fams {
            for p in [1.0, 4.0 / 3.0, 2.0] {
                let exact = power_integral(f, p, &c).unwrap().value;
                let cub = Cubature::new(2, &c).factor(f, ORIGIN, true);
                let num = cub.integrate(&|x: &Point| f.evaluate(x).powf(p)).value;
                assert!((num - exact).abs() < 1e-6 * exact, "{:?} p={p}: {num} vs {exact}", f.describe());
            }
        }
    }

    #[test]
    fn hls_norm_divergence_flagged() {
        let f = TestFunction::hls_standard(2, 1.0).unwrap();
        assert!(matches!(lp_norm(&f, 0.5, &cfg()), Err(Error::Divergent(_))));
    }

    #[test]
    fn correlation_examples() {
        let c = cfg();
        let i = TestFunction::box_indicator(&[0.0], &[1.0]).unwrap();
        assert!((correlation(&i, &i, &[0.25, 0.0, 0.0], &c).unwrap().value - 0.75).abs() < 1e-15);
        let num = correlation_numeric(&i, &i, &[0.25, 0.0, 0.0], &c).unwrap().value;
        assert!((num - 0.75).abs() < 1e-12);
        let far = TestFunction::box_indicator(&[5.0], &[6.0]).unwrap();
        assert_eq!(inner_product(&i, &far, &c).unwrap().value, 0.0);
        for n in 1..=2 {
            let f = TestFunction::simplex_exp_standard(n).unwrap();
            let v = inner_product(&f, &f, &c).unwrap().value;
            assert!((v - 0.5f64.powi(n as i32)).abs() < 1e-9, "n={n}: {v}");
        }
    }

    #[test]
    fn lens_formulas_against_cubature() {
        let c = cfg();
        for dim in 1..=2 {
            let a = TestFunction::ball_indicator(dim, 1.0, ORIGIN).unwrap();
            let c2 = if dim == 1 { [0.3, 0.0, 0.0] } else { [0.3, 0.2, 0.0] };
            let b = TestFunction::ball_indicator(dim, 0.6, c2).unwrap();
            for y in [[0.0, 0.0, 0.0], [0.9, -0.4, 0.0], [1.5, 0.1, 0.0]] {
                let mut y = y;
                if dim == 1 {
                    y[1] = 0.0;
                }
                let exact = correlation(&a, &b, &y, &c).unwrap().value;
                let num = correlation_numeric(&a, &b, &y, &c).unwrap().value;
                assert!((exact - num).abs() < 1e-7, "dim={dim} y={y:?}: {exact} vs {num}");
            }
        }
        // n = 3 lens against the cap formula
        let d = 0.7;
        let v = lens_volume(3, 1.0, 1.0, d);
        let cap = PI * (2.0 - d).powi(2) * (4.0 + d) / 12.0;
        assert!((v - cap).abs() < 1e-14);
    }

    #[test]
    fn gaussian_correlation_matches_cubature() {
        let c = cfg();
        let f = TestFunction::gaussian(
            2,
            1.3,
            Matrix::from_rows(&[vec![1.0, 0.2], vec![0.2, 0.6]]).unwrap(),
            [0.1, 0.0, 0.0],
        )
        .unwrap();
        let h = TestFunction::gaussian(2, 0.7, Matrix::diagonal(&[0.5, 2.0]), [0.0, -0.3, 0.0]).unwrap();
        let y = [0.4, 0.2, 0.0];
        let exact = correlation(&f, &h, &y, &c).unwrap().value;
        let num = correlation_numeric(&f, &h, &y, &c).unwrap().value;
        assert!((exact - num).abs() < 1e-7 * exact, "{exact} vs {num}");
    }
}
