//! The star body S_α(f,h), functional and convex radial mean bodies, and
//! the asymmetric fractional polar projection body.
//!
//! ρ_{S_α(f,h)}(ξ)^α = ∫_0^∞ t^{α-1} 𝒢(f,h)(tξ) dt, where 𝒢 is the
//! correlation of the functions module.

use std::cell::RefCell;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{check_dim, domain, Error, Result};
use crate::functions::{
    correlation, inner_product, integral, Concavity, ConcavityReport, Decay, Family, QuadConfig, TestFunction,
};
use crate::geometry::{volume_quadrature, SphereGrid, StarBody};
use crate::linalg::{add, norm, scale, Point, ORIGIN};
use crate::quad::{integrate_moment, integrate_moment_negative, Estimate};
use crate::report::{ChainReport, Direction};
use crate::specialfns::{beta_fn, gamma_fn, inclusion_constant};

/// A sampled body together with the accuracy of each node.
#[derive(Clone, Debug)]
pub struct AlphaBodyResult {
    pub body: StarBody,
    pub alpha: f64,
    /// Relative error estimate of ρ at each node.
    pub node_errors: Vec<f64>,
    /// Nodes whose error estimate exceeds the relative tolerance.
    pub flagged: Vec<usize>,
    pub config: QuadConfig,
}

impl AlphaBodyResult {
    pub fn grid(&self) -> &SphereGrid {
        match self.body.kind() {
            crate::geometry::BodyKind::Sampled { grid, .. } => grid,
            _ => unreachable!("alpha bodies are sampled"),
        }
    }

    pub fn radii(&self) -> &[f64] {
        match self.body.kind() {
            crate::geometry::BodyKind::Sampled { values, .. } => values,
            _ => unreachable!("alpha bodies are sampled"),
        }
    }

    /// Largest relative node error.
    pub fn max_error(&self) -> f64 {
        self.node_errors.iter().copied().fold(0.0, f64::max)
    }

    /// Volume by sphere quadrature with an error bar from the node errors
    /// and, on the circle, from halving the grid.
    pub fn volume(&self) -> Result<Estimate> {
        let grid = self.grid();
        let n = grid.dim() as f64;
        let v = volume_quadrature(&self.body, grid)?;
        let radii = self.radii();
        let prop: f64 = grid
            .weights()
            .iter()
            .zip(radii)
            .zip(&self.node_errors)
            .map(|((w, r), e)| w * r.powf(n) * n * e)
            .sum::<f64>()
            / n;
        let mut disc = 0.0;
        if grid.dim() == 2 && grid.len() % 2 == 0 {
            let half: f64 =
                grid.weights().iter().zip(radii).step_by(2).map(|(w, r)| 2.0 * w * r * r).sum::<f64>() / 2.0;
            disc = (half - v).abs();
        }
        Ok(Estimate::new(v, prop + disc))
    }

    /// Copy with every radius multiplied by `c`.
    pub fn dilate(&self, c: f64) -> Result<Self> {
        let values = self.radii().iter().map(|r| r * c).collect();
        let grid = Arc::new(self.grid().clone());
        Ok(Self { body: StarBody::sampled(grid, values)?, ..self.clone() })
    }

    /// Sampled-body document plus a metadata block.
    pub fn to_json(&self) -> Value {
        json!({
            "body": self.body.to_doc(),
            "metadata": {
                "alpha": self.alpha,
                "node_errors": self.node_errors,
                "flagged": self.flagged,
                "config": self.config,
            }
        })
    }
}

/// Largest t ≥ 0 with tξ in the difference of the support boxes, when both
/// supports are bounded.
fn ray_t_max(f: &TestFunction, h: &TestFunction, xi: &Point) -> Option<f64> {
    let (bf, bh) = (f.support_box()?, h.support_box()?);
    let mut t = f64::INFINITY;
    for k in 0..f.dim() {
        let (lo, hi) = (bf[k].0 - bh[k].1, bf[k].1 - bh[k].0);
        if xi[k] > 0.0 {
            t = t.min(hi / xi[k]);
        } else if xi[k] < 0.0 {
            t = t.min(lo / xi[k]);
        }
    }
    Some(t.max(0.0))
}

/// Power-law decay exponent of 𝒢(f,h), if any.
fn correlation_decay(f: &TestFunction, h: &TestFunction) -> Option<f64> {
    let d = |g: &TestFunction| match g.decay() {
        Decay::Power(p) => Some(p),
        _ => None,
    };
    match (d(f), d(h)) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    }
}

fn unit(xi: &Point) -> Result<Point> {
    let r = norm(xi);
    if !(r > 0.0 && r.is_finite()) {
        return domain("direction must be nonzero");
    }
    Ok(scale(xi, 1.0 / r))
}

/// Worst relative error among the evaluations that carry weight.
fn inner_rel_error(evals: &[Estimate]) -> f64 {
    let top = evals.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    evals
        .iter()
        .filter(|e| e.value.abs() >= 1e-4 * top && e.value != 0.0)
        .map(|e| e.error / e.value.abs())
        .fold(0.0, f64::max)
}

/// ∫_0^∞ t^{α-1} 𝒢(f,h)(tξ) dt.
pub fn rho_power(f: &TestFunction, h: &TestFunction, alpha: f64, xi: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    check_dim(f.dim(), h.dim())?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let xi = unit(xi)?;
    let t_max = ray_t_max(f, h, &xi);
    if t_max.is_none() {
        if let Some(d) = correlation_decay(f, h) {
            if alpha >= d {
                return Err(Error::Divergent(format!(
                    "the correlation decays like |y|^-{d}, too slowly for the alpha = {alpha} moment"
                )));
            }
        }
    }
    if t_max == Some(0.0) {
        return Ok(Estimate::exact(0.0));
    }
    let seen = RefCell::new(Vec::new());
    let g = |t: f64| {
        let e = correlation(f, h, &scale(&xi, t), cfg).unwrap_or(Estimate::new(f64::NAN, f64::NAN));
        seen.borrow_mut().push(e);
        e.value
    };
    let breaks = crate::functions::correlation_ray_breaks(f, h, &xi);
    let est = integrate_moment(&g, alpha, cfg.t_max, t_max, &breaks, cfg.tol());
    if !est.value.is_finite() {
        return Err(Error::Divergent("ray integral did not converge".into()));
    }
    let inner = inner_rel_error(&seen.borrow());
    Ok(Estimate::new(est.value, est.error + inner * est.value.abs()))
}

/// ρ_{S_α(f,h)}(ξ) with its error estimate.
pub fn rho_s_alpha(f: &TestFunction, h: &TestFunction, alpha: f64, xi: &Point, cfg: &QuadConfig) -> Result<Estimate> {
    Ok(rho_power(f, h, alpha, xi, cfg)?.powf(1.0 / alpha))
}

fn build(
    grid: Arc<SphereGrid>,
    alpha: f64,
    cfg: &QuadConfig,
    node: impl Fn(&Point) -> Result<Estimate> + Sync,
) -> Result<AlphaBodyResult> {
    let ests: Vec<Estimate> = grid.nodes().par_iter().map(&node).collect::<Result<_>>()?;
    let values: Vec<f64> = ests.iter().map(|e| e.value).collect();
    let node_errors: Vec<f64> = ests.iter().map(|e| e.rel_error()).collect();
    let flagged = node_errors.iter().enumerate().filter(|(_, e)| **e > cfg.rel_tol).map(|(i, _)| i).collect();
    Ok(AlphaBodyResult { body: StarBody::sampled(grid, values)?, alpha, node_errors, flagged, config: cfg.clone() })
}

/// S_α(f,h) sampled on `grid`.
pub fn s_alpha_body(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<AlphaBodyResult> {
    check_dim(f.dim(), grid.dim())?;
    build(grid, alpha, cfg, |u| rho_s_alpha(f, h, alpha, u, cfg))
}

fn positive_inner(f: &TestFunction, h: &TestFunction, cfg: &QuadConfig) -> Result<f64> {
    let ip = inner_product(f, h, cfg)?.value;
    if !(ip > 0.0) {
        return domain("radial mean bodies need a nonzero inner product");
    }
    Ok(ip)
}

/// R_α(f,h) = (α/∫fh)^{1/α} S_α(f,h) for α > 0.
pub fn radial_mean_body_fn(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<AlphaBodyResult> {
    let ip = positive_inner(f, h, cfg)?;
    s_alpha_body(f, h, alpha, grid, cfg)?.dilate((alpha / ip).powf(1.0 / alpha))
}

fn is_zero_one(f: &TestFunction) -> bool {
    matches!(f.family(), Family::Indicator { .. })
}

/// ∫_0^∞ t^{α-1} ∫ ((f(x+tξ) - h(x))_-)² dx dt for -1 < α < 0.
pub fn polar_projection_power(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    xi: &Point,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    check_dim(f.dim(), h.dim())?;
    if !(alpha > -1.0 && alpha < 0.0) {
        return domain(format!("alpha must lie in (-1, 0), got {alpha}"));
    }
    let xi = unit(xi)?;
    let indicators = is_zero_one(f) && is_zero_one(h);
    let mass_h = if indicators { integral(h, cfg)?.value } else { 0.0 };
    let d = |t: f64| -> f64 {
        let y = scale(&xi, t);
        if indicators {
            // (1_F - 1_E(· + y))_+ is 1_F minus the overlap
            let c = correlation(f, h, &y, cfg).map(|e| e.value).unwrap_or(f64::NAN);
            return (mass_h - c).max(0.0);
        }
        let cub = crate::functions::cubature::Cubature::new(f.dim(), cfg).factor(h, ORIGIN, true).factor(f, y, false);
        cub.integrate(&|x: &Point| {
            let v = h.evaluate(x) - f.evaluate(&add(x, &y));
            if v > 0.0 {
                v * v
            } else {
                0.0
            }
        })
        .value
    };
    let h2 = crate::functions::power_integral(h, 2.0, cfg)?.value;
    let d0 = d(0.0);
    if d0 > 1e-9 * h2.max(cfg.abs_tol) {
        return Err(Error::Divergent(format!(
            "the t-integral diverges at 0: h exceeds f on a set of positive measure (defect {d0:.3e})"
        )));
    }
    let t_max = ray_t_max(f, h, &xi);
    let plateau = t_max.map(|_| h2);
    let breaks = crate::functions::correlation_ray_breaks(f, h, &xi);
    let est = integrate_moment_negative(&d, alpha, cfg.t_max, t_max, plateau, &breaks, cfg.tol());
    if !est.value.is_finite() {
        return Err(Error::Divergent("ray integral did not converge".into()));
    }
    Ok(est)
}

/// Π^{*,-α/2}_{2,-}(f,h) sampled on `grid`, -1 < α < 0.
pub fn polar_projection_body_neg(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<AlphaBodyResult> {
    check_dim(f.dim(), grid.dim())?;
    build(grid, alpha, cfg, |u| Ok(polar_projection_power(f, h, alpha, u, cfg)?.powf(1.0 / alpha)))
}

/// R_α(f,h) = (|α|/∫fh)^{1/α} Π^{*,-α/2}_{2,-}(f,h) for -1 < α < 0.
pub fn radial_mean_body_fn_neg(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<AlphaBodyResult> {
    let ip = positive_inner(f, h, cfg)?;
    polar_projection_body_neg(f, h, alpha, grid, cfg)?.dilate((alpha.abs() / ip).powf(1.0 / alpha))
}

/// Distance from x to the boundary of the convex body E along ξ.
pub fn ray_exit(e: &StarBody, x: &Point, xi: &Point) -> f64 {
    let mut cand = Vec::new();
    e.shape().line_breaks(x, xi, crate::geometry::Feature::Level(1.0), &mut cand);
    cand.sort_by(|a, b| b.total_cmp(a));
    for t in cand {
        if t > 0.0 && e.gauge(&add(x, &scale(xi, t * (1.0 - 1e-12)))) <= 1.0 + 1e-9 {
            return t;
        }
    }
    // bisection fallback
    let inside = |t: f64| e.gauge(&add(x, &scale(xi, t))) <= 1.0;
    if !inside(0.0) {
        return 0.0;
    }
    let mut hi = 1.0;
    while inside(hi) && hi < 1e12 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Checks F ⊆ E on 10⁴ seeded uniform samples of F.
pub fn check_containment(e: &StarBody, f: &StarBody, seed: u64) -> Result<()> {
    check_dim(e.dim(), f.dim())?;
    let mut r = crate::functions::sampling::rng(seed, 0xc047);
    for _ in 0..10_000 {
        let x = crate::functions::sampling::uniform_in_body(f, &mut r);
        if e.gauge(&x) > 1.0 + 1e-12 {
            return Err(Error::Containment(format!("point {:?} of F lies outside E", &x[..f.dim()])));
        }
    }
    Ok(())
}

/// ρ_{R_α(E,F)}(ξ) for convex F ⊆ E, α > -1, α ≠ 0, by cubature over F of
/// the ray distance to ∂E raised to α.
pub fn radial_mean_body_convex(
    e: &StarBody,
    f: &StarBody,
    alpha: f64,
    xi: &Point,
    cfg: &QuadConfig,
) -> Result<Estimate> {
    check_dim(e.dim(), f.dim())?;
    if !(alpha > -1.0) || alpha == 0.0 {
        return domain(format!("alpha must exceed -1 and differ from 0, got {alpha}"));
    }
    check_containment(e, f, cfg.seed)?;
    let xi = unit(xi)?;
    let ind = TestFunction::indicator(f.clone(), ORIGIN)?;
    let cub = crate::functions::cubature::Cubature::new(f.dim(), cfg).factor(&ind, ORIGIN, true);
    let s = cub.integrate(&|x: &Point| {
        if f.gauge(x) > 1.0 {
            return 0.0;
        }
        let r = ray_exit(e, x, &xi);
        if r > 0.0 {
            r.powf(alpha)
        } else if alpha > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    });
    let vf = crate::functions::body_volume(f);
    Ok(s.scale(1.0 / vf).powf(1.0 / alpha))
}

/// |S_n(f,h)| against ‖f‖₁‖h‖₁/n.
pub fn check_sn_volume_identity(
    f: &TestFunction,
    h: &TestFunction,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<ChainReport> {
    let n = f.dim();
    let body = s_alpha_body(f, h, n as f64, grid.clone(), cfg)?;
    let lhs = body.volume()?;
    let rhs = integral(f, cfg)?.mul(integral(h, cfg)?).scale(1.0 / n as f64);
    let mut rep =
        ChainReport::new("identity-3b").with_tolerances(3.0 * cfg.rel_tol * rhs.value.abs(), 3.0 * cfg.rel_tol);
    let a = rep.term("volume of S_n(f,h)", lhs);
    let b = rep.term("|f|_1 |h|_1 / n", rhs);
    rep.require(a, Direction::Eq, b);
    rep.meta("n", n);
    rep.meta("f", f.describe());
    rep.meta("h", h.describe());
    rep.meta("grid_resolution", grid.resolution());
    rep.meta("config", cfg);
    Ok(rep)
}

/// Convexity diagnostics of a sampled S_α(f,h).
#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub alpha: f64,
    pub pairs: usize,
    pub midpoint_violations: usize,
    /// Largest gauge of a chord midpoint.
    pub worst_midpoint_gauge: f64,
    /// Log-concavity of t ↦ 𝒢(f,h)(tξ) at a few nodes.
    pub ray_reports: Vec<ConcavityReport>,
}

impl ConvexityReport {
    pub fn passed(&self) -> bool {
        self.midpoint_violations == 0 && self.ray_reports.iter().all(|r| r.passed())
    }
}

/// Midpoints of chords between boundary nodes must lie in the body; the
/// correlation must be log-concave along rays.
pub fn check_convexity(
    f: &TestFunction,
    h: &TestFunction,
    alpha: f64,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<ConvexityReport> {
    let body = s_alpha_body(f, h, alpha, grid.clone(), cfg)?;
    let radii = body.radii().to_vec();
    let nodes = grid.nodes();
    let boundary: Vec<Point> = nodes.iter().zip(&radii).map(|(u, r)| scale(u, *r)).collect();
    let stride = (boundary.len() / 64).max(1);
    let mut pairs = 0;
    let mut violations = 0;
    let mut worst = 0.0f64;
    for i in (0..boundary.len()).step_by(stride) {
        for j in (0..boundary.len()).step_by(stride) {
            if i >= j {
                continue;
            }
            let m = scale(&add(&boundary[i], &boundary[j]), 0.5);
            if norm(&m) == 0.0 {
                continue;
            }
            pairs += 1;
            let g = body.body.gauge(&m);
            worst = worst.max(g);
            if g > 1.0 + 1e-6 {
                violations += 1;
            }
        }
    }
    let mut ray_reports = Vec::new();
    for (k, u) in nodes.iter().enumerate().step_by((nodes.len() / 4).max(1)) {
        let reach = radii[k].max(1e-3) * 4.0;
        let g = |t: f64| correlation(f, h, &scale(u, t), cfg).map(|e| e.value).unwrap_or(f64::NAN);
        ray_reports.push(ray_log_concavity(&g, reach, cfg.seed.wrapping_add(k as u64), 200));
    }
    Ok(ConvexityReport { alpha, pairs, midpoint_violations: violations, worst_midpoint_gauge: worst, ray_reports })
}

fn ray_log_concavity(g: &dyn Fn(f64) -> f64, reach: f64, seed: u64, trials: usize) -> ConcavityReport {
    use rand::Rng;
    let mut r = crate::functions::sampling::rng(seed, 0x1a7);
    let mut rep = ConcavityReport {
        class: Concavity::Log,
        trials,
        tested: 0,
        violations: 0,
        worst_violation: 0.0,
        counterexample: None,
    };
    let top = g(0.0).max(f64::MIN_POSITIVE);
    for _ in 0..trials {
        let (a, b, l): (f64, f64, f64) = (r.random(), r.random(), r.random());
        let (a, b) = (a * reach, b * reach);
        let (ga, gb) = (g(a), g(b));
        if !(ga > 0.0 && gb > 0.0) {
            continue;
        }
        rep.tested += 1;
        let gm = g((1.0 - l) * a + l * b);
        // relative slack covers the quadrature error of each value
        let d = (ga.powf(1.0 - l) * gb.powf(l) - gm) / top - 1e-6;
        if d > rep.worst_violation {
            rep.worst_violation = d;
        }
        if d > 1e-9 {
            rep.violations += 1;
            rep.counterexample = Some((vec![a], vec![b], l));
        }
    }
    rep
}

/// Monotonicity of ρ_{R_α}(ξ)/c(α) in α.
#[derive(Clone, Debug, Serialize)]
pub struct InclusionReport {
    pub alphas: Vec<f64>,
    pub class: Concavity,
    pub constants: Vec<f64>,
    /// ρ_{R_α}/c(α) per α and node.
    pub ratios: Vec<Vec<f64>>,
    /// Smallest value of ratio(α) - ratio(β) over consecutive α < β and nodes.
    pub worst_margin: f64,
    /// Largest relative spread over α of the ratio at a node.
    pub max_ratio_spread: f64,
    pub tolerance: f64,
    pub pass: bool,
}

pub fn check_inclusion_monotone(
    f: &TestFunction,
    h: &TestFunction,
    alphas: &[f64],
    class: Concavity,
    grid: Arc<SphereGrid>,
    cfg: &QuadConfig,
) -> Result<InclusionReport> {
    if alphas.is_empty() || alphas.windows(2).any(|w| !(w[1] > w[0])) || alphas[0] <= 0.0 {
        return domain("alphas must be positive and strictly increasing");
    }
    let n = f.dim();
    let mut constants = Vec::new();
    let mut ratios = Vec::new();
    let mut tolerance = 0.0f64;
    for &a in alphas {
        let c = inclusion_constant(a, class, n)?;
        let body = radial_mean_body_fn(f, h, a, grid.clone(), cfg)?;
        tolerance = tolerance.max(body.max_error());
        ratios.push(body.radii().iter().map(|r| r / c).collect::<Vec<_>>());
        constants.push(c);
    }
    let tolerance = 2.0 * tolerance + 10.0 * cfg.rel_tol;
    let mut worst = f64::INFINITY;
    for w in ratios.windows(2) {
        for (a, b) in w[0].iter().zip(&w[1]) {
            worst = worst.min((a - b) / a);
        }
    }
    let mut spread = 0.0f64;
    for j in 0..grid.len() {
        let col: Vec<f64> = ratios.iter().map(|r| r[j]).collect();
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(0.0, f64::max);
        spread = spread.max((hi - lo) / lo);
    }
    Ok(InclusionReport {
        alphas: alphas.to_vec(),
        class,
        constants,
        ratios,
        worst_margin: worst,
        max_ratio_spread: spread,
        tolerance,
        pass: worst >= -tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormPoint {
    pub y: Vec<f64>,
    pub numeric: f64,
    pub closed_form: f64,
    pub rel_error: f64,
}

/// Numerical correlations of the simplex families against their closed forms.
#[derive(Clone, Debug, Serialize)]
pub struct ClosedFormReport {
    pub n: usize,
    pub s: f64,
    pub exponential: Vec<ClosedFormPoint>,
    pub peak: Vec<ClosedFormPoint>,
    pub max_error_exponential: f64,
    pub max_error_peak: f64,
    pub threshold_exponential: f64,
    pub threshold_peak: f64,
}

impl ClosedFormReport {
    pub fn passed(&self) -> bool {
        self.max_error_exponential < self.threshold_exponential && self.max_error_peak < self.threshold_peak
    }
}

fn l1(y: &Point) -> f64 {
    y.iter().map(|v| v.abs()).sum()
}

/// 𝒢 of e^{-‖x‖_Δ} against 2^{-n} e^{-‖y‖₁} on a 5-point lattice, and 𝒢 of
/// (1-‖x‖_Δ)_+^{1/s} against a(1-‖y‖₁/2)^{n+2/s} on {Σy_i = 0}.
pub fn check_correlation_closed_forms(n: usize, s: f64, cfg: &QuadConfig) -> Result<ClosedFormReport> {
    if !(1..=3).contains(&n) {
        return domain("n must be 1, 2 or 3");
    }
    let e = TestFunction::simplex_exp_standard(n)?;
    let p = TestFunction::sconcave_peak(1.0, s, StarBody::standard_simplex(n)?, ORIGIN)?;
    let mut lattice = Vec::new();
    for t in [0.0, 0.1, 0.5, 1.0, -0.7] {
        let mut y = ORIGIN;
        for k in 0..n {
            y[k] = if k % 2 == 0 { t } else { -0.5 * t };
        }
        lattice.push(y);
    }
    let mut ys55 = Vec::new();
    for t in [0.0, 0.1, 0.25, 0.4, 0.6] {
        let mut y = ORIGIN;
        if n >= 2 {
            y[0] = t;
            y[1] = -t;
        }
        ys55.push(y);
    }
    if n == 1 {
        // Σy = 0 leaves only the origin
        ys55.truncate(1);
    }
    let point = |f: &TestFunction, y: &Point, closed: f64| -> Result<ClosedFormPoint> {
        let num = crate::functions::correlation_numeric(f, f, y, cfg)?.value;
        Ok(ClosedFormPoint {
            y: y[..n].to_vec(),
            numeric: num,
            closed_form: closed,
            rel_error: (num - closed).abs() / closed,
        })
    };
    let nf = n as f64;
    let exponential =
        lattice.iter().map(|y| point(&e, y, 0.5f64.powi(n as i32) * (-l1(y)).exp())).collect::<Result<Vec<_>>>()?;
    let a = beta_fn(nf, 1.0 + 2.0 / s)? / gamma_fn(nf)?;
    let peak = ys55
        .iter()
        .map(|y| point(&p, y, a * (1.0 - 0.5 * l1(y)).max(0.0).powf(nf + 2.0 / s)))
        .collect::<Result<Vec<_>>>()?;
    let mx = |v: &[ClosedFormPoint]| v.iter().map(|p| p.rel_error).fold(0.0, f64::max);
    Ok(ClosedFormReport {
        n,
        s,
        max_error_exponential: mx(&exponential),
        max_error_peak: mx(&peak),
        exponential,
        peak,
        threshold_exponential: 5e-3,
        threshold_peak: 2e-2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Matrix;
    use std::f64::consts::PI;

    fn unit_interval() -> TestFunction {
        TestFunction::box_indicator(&[0.0], &[1.0]).unwrap()
    }

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn g1() -> Arc<SphereGrid> {
        Arc::new(SphereGrid::new(1, 1).unwrap())
    }

    #[test]
    fn rho_interval_examples() {
        let f = unit_interval();
        let e = [1.0, 0.0, 0.0];
        assert!((rho_s_alpha(&f, &f, 1.0, &e, &cfg()).unwrap().value - 0.5).abs() < 1e-12);
        let r = rho_s_alpha(&f, &f, 0.5, &e, &cfg()).unwrap().value;
        assert!((r - 16.0 / 9.0).abs() < 1e-9, "{r}");
        let back = rho_s_alpha(&f, &f, 0.5, &[-1.0, 0.0, 0.0], &cfg()).unwrap().value;
        assert!((back - r).abs() < 1e-9);
    }

    #[test]
    fn s_alpha_body_examples() {
        let f = unit_interval();
        let b = s_alpha_body(&f, &f, 1.0, g1(), &cfg()).unwrap();
        assert!((b.volume().unwrap().value - 1.0).abs() < 1e-12);
        let g = Arc::new(SphereGrid::new(2, 64).unwrap());
        let d = TestFunction::ball_indicator(2, 1.0, ORIGIN).unwrap();
        let b = s_alpha_body(&d, &d, 2.0, g, &cfg()).unwrap();
        assert!((b.volume().unwrap().value - PI * PI / 2.0).abs() < 1e-8);
    }

    #[test]
    fn radial_mean_examples() {
        let f = unit_interval();
        for alpha in [0.5, 1.0, 2.0, 3.0] {
            let r = radial_mean_body_fn(&f, &f, alpha, g1(), &cfg()).unwrap();
            let want = (alpha + 1.0f64).powf(-1.0 / alpha);
            for v in r.radii() {
                assert!((v - want).abs() < 1e-9 * want, "alpha={alpha}: {v} vs {want}");
            }
        }
        let r = radial_mean_body_fn(&f, &f, 1.0, g1(), &cfg()).unwrap();
        assert!((r.volume().unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn polar_projection_examples() {
        let f = unit_interval();
        let p = polar_projection_body_neg(&f, &f, -0.5, g1(), &cfg()).unwrap();
        for v in p.radii() {
            assert!((v - 1.0 / 16.0).abs() < 1e-9, "{v}");
        }
        let r = radial_mean_body_fn_neg(&f, &f, -0.5, g1(), &cfg()).unwrap();
        for v in r.radii() {
            assert!((v - 0.25).abs() < 1e-9);
        }
        let big = TestFunction::box_indicator(&[0.0], &[2.0]).unwrap();
        assert!(matches!(polar_projection_power(&f, &big, -0.5, &[1.0, 0.0, 0.0], &cfg()), Err(Error::Divergent(_))));
    }

    #[test]
    fn convex_radial_mean_examples() {
        let e = StarBody::standard_simplex(1).unwrap();
        let r = radial_mean_body_convex(&e, &e, 1.0, &[1.0, 0.0, 0.0], &cfg()).unwrap().value;
        assert!((r - 0.5).abs() < 1e-10);
        let b = StarBody::ball(2, 1.0).unwrap();
        let vals: Vec<f64> = [0.0, 1.0, 2.5]
            .iter()
            .map(|a: &f64| radial_mean_body_convex(&b, &b, 1.0, &[a.cos(), a.sin(), 0.0], &cfg()).unwrap().value)
            .collect();
        assert!((vals[0] - vals[1]).abs() < 1e-6 && (vals[0] - vals[2]).abs() < 1e-6, "{vals:?}");
        let small = StarBody::ball(2, 0.5).unwrap();
        assert!(matches!(
            radial_mean_body_convex(&small, &b, 1.0, &[1.0, 0.0, 0.0], &cfg()),
            Err(Error::Containment(_))
        ));
    }

    #[test]
    fn lemma_6_1_proportionality_nodewise() {
        let e = StarBody::ball(2, 1.0).unwrap();
        let fb = StarBody::ball(2, 0.5).unwrap();
        let ie = TestFunction::indicator(e.clone(), ORIGIN).unwrap();
        let ifb = TestFunction::indicator(fb.clone(), ORIGIN).unwrap();
        let g = Arc::new(SphereGrid::new(2, 8).unwrap());
        for alpha in [0.5, 1.0, 2.0] {
            let s = s_alpha_body(&ie, &ifb, alpha, g.clone(), &cfg()).unwrap();
            let c = (PI * 0.25 / alpha).powf(1.0 / alpha);
            for (u, rs) in g.nodes().iter().zip(s.radii()).step_by(3) {
                let r = radial_mean_body_convex(&e, &fb, alpha, u, &cfg()).unwrap().value;
                assert!((rs - c * r).abs() < 1e-5 * rs, "alpha={alpha}: {rs} vs {}", c * r);
            }
        }
    }

    #[test]
    fn divergence_flagged_for_heavy_tails() {
        let f = TestFunction::hls_standard(1, 0.5).unwrap();
        assert!(matches!(rho_power(&f, &f, 2.0, &[1.0, 0.0, 0.0], &cfg()), Err(Error::Divergent(_))));
        assert!(rho_power(&f, &f, 1.0, &[1.0, 0.0, 0.0], &cfg()).is_ok());
    }

    #[test]
    fn sn_identity_reports() {
        let f = unit_interval();
        assert!(check_sn_volume_identity(&f, &f, g1(), &cfg()).unwrap().pass);
        let d = TestFunction::ball_indicator(2, 1.0, ORIGIN).unwrap();
        let g = Arc::new(SphereGrid::new(2, 32).unwrap());
        let rep = check_sn_volume_identity(&d, &d, g, &cfg()).unwrap();
        assert!(rep.pass, "{}", rep.summary());
    }

    #[test]
    fn homogeneity_and_translation() {
        let f = TestFunction::gaussian(1, 1.0, Matrix::diagonal(&[0.7]), [0.2, 0.0, 0.0]).unwrap();
        let h = TestFunction::box_indicator(&[-0.5], &[1.0]).unwrap();
        let e = [1.0, 0.0, 0.0];
        let a = 1.5;
        let base = rho_s_alpha(&f, &h, a, &e, &cfg()).unwrap().value;
        let tri = rho_s_alpha(&f.scaled(3.0).unwrap(), &h, a, &e, &cfg()).unwrap().value;
        assert!((tri - 3f64.powf(1.0 / a) * base).abs() < 1e-8 * tri);
        let s = [0.9, 0.0, 0.0];
        let moved = rho_s_alpha(
            &f.transform(&Matrix::IDENTITY, &s).unwrap(),
            &h.transform(&Matrix::IDENTITY, &s).unwrap(),
            a,
            &e,
            &cfg(),
        )
        .unwrap()
        .value;
        assert!((moved - base).abs() < 2e-7 * base);
    }

    #[test]
    fn closed_form_correlations() {
        for n in 1..=2 {
            let rep = check_correlation_closed_forms(n, 1.0, &cfg()).unwrap();
            assert!(rep.passed(), "{rep:?}");
        }
    }

    #[test]
    fn inclusion_for_interval_indicators() {
        let f = unit_interval();
        let rep = check_inclusion_monotone(&f, &f, &[0.5, 1.0, 2.0, 4.0], Concavity::Log, g1(), &cfg()).unwrap();
        assert!(rep.pass && rep.worst_margin > 0.0, "{rep:?}");
        assert!((rep.ratios[1][0] - 0.5).abs() < 1e-9);
        assert!((rep.ratios[2][0] - 3f64.powf(-0.5) / 2f64.sqrt()).abs() < 1e-9);
        let e = TestFunction::simplex_exp_standard(1).unwrap();
        let rep = check_inclusion_monotone(&e, &e, &[0.5, 1.0, 2.0, 4.0], Concavity::Log, g1(), &cfg()).unwrap();
        assert!(rep.max_ratio_spread < 1e-2, "{rep:?}");
    }

    #[test]
    fn convexity_of_log_concave_pair() {
        let e = TestFunction::simplex_exp_standard(1).unwrap();
        let rep = check_convexity(&e, &e, 1.0, g1(), &cfg()).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
