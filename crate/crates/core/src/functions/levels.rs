//! Superlevel volumes and Schwarz symmetrization.

use crate::error::{domain, Error, Result};
use crate::quad::{gauss_legendre, integrate_line, Estimate, Tol};
use crate::specialfns::unit_ball_volume;

use super::sampling::{rng, uniform_in_box};
use super::{body_volume, Family, QuadConfig, TestFunction};

const MC_STREAM: u64 = 0x5e1e;

/// |{f ≥ t}| in closed form where available.
fn closed_volume(f: &TestFunction, t: f64) -> Option<f64> {
    let n = f.dim() as f64;
    let m = f.max_value();
    if t > m {
        return Some(0.0);
    }
    let omega = unit_ball_volume(f.dim()).ok()?;
    Some(match f.family() {
        Family::HlsExtremal { amplitude, b, map, alpha, .. } => {
            let r2 = (amplitude / t).powf(2.0 / (n + alpha)) - b * b;
            omega * r2.max(0.0).powf(n / 2.0) / map.det().abs()
        }
        Family::SimplexExponential { amplitude, body, .. } => body_volume(body) * (amplitude / t).ln().max(0.0).powf(n),
        Family::SConcavePeak { amplitude, s, body, .. } => {
            body_volume(body) * (1.0 - (t / amplitude).powf(*s)).max(0.0).powf(n)
        }
        Family::Gaussian { amplitude, covariance, .. } => {
            omega * (2.0 * (amplitude / t).ln()).max(0.0).powf(n / 2.0) * covariance.det().sqrt()
        }
        Family::Indicator { body, .. } => body_volume(body),
        Family::GridSampled(_) => return None,
    })
}

/// Box containing {f ≥ t}.
fn superlevel_box(f: &TestFunction, t: f64) -> [(f64, f64); 3] {
    if let Some(b) = f.support_box() {
        return b;
    }
    let n = f.dim() as f64;
    let c = f.center();
    let mut out = [(0.0, 0.0); 3];
    match f.family() {
        Family::SimplexExponential { amplitude, body, .. } => {
            let u = (amplitude / t).ln().max(0.0);
            let b = body.bounds();
            for k in 0..f.dim() {
                out[k] = (c[k] + u * b[k].0, c[k] + u * b[k].1);
            }
        }
        Family::Gaussian { amplitude, covariance, .. } => {
            let u = (2.0 * (amplitude / t).ln()).max(0.0).sqrt();
            for k in 0..f.dim() {
                let h = u * covariance.0[k][k].sqrt();
                out[k] = (c[k] - h, c[k] + h);
            }
        }
        Family::HlsExtremal { amplitude, b, map, alpha, .. } => {
            let r = ((amplitude / t).powf(2.0 / (n + alpha)) - b * b).max(0.0).sqrt();
            let inv = map.inverse().unwrap_or(crate::linalg::Matrix::IDENTITY);
            for k in 0..f.dim() {
                let row = inv.0[k];
                let h = r * (row[0] * row[0] + row[1] * row[1] + row[2] * row[2]).sqrt();
                out[k] = (c[k] - h, c[k] + h);
            }
        }
        _ => unreachable!("compact families have a support box"),
    }
    out
}

fn box_volume(dim: usize, b: &[(f64, f64); 3]) -> f64 {
    (0..dim).map(|k| b[k].1 - b[k].0).product()
}

/// |{f ≥ t}|, closed form when the family allows it, else Monte Carlo.
pub fn superlevel_volume(f: &TestFunction, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if !(t > 0.0) {
        return domain(format!("level must be positive, got {t}"));
    }
    match closed_volume(f, t) {
        Some(v) => Ok(Estimate::exact(v)),
        None => superlevel_volume_mc(f, t, cfg),
    }
}

/// Monte Carlo estimate of |{f ≥ t}| with its standard error.
pub fn superlevel_volume_mc(f: &TestFunction, t: f64, cfg: &QuadConfig) -> Result<Estimate> {
    if !(t > 0.0) {
        return domain(format!("level must be positive, got {t}"));
    }
    if t > f.max_value() {
        return Ok(Estimate::exact(0.0));
    }
    let (vols, _) = mc_volumes(f, &[t], &superlevel_box(f, t), cfg);
    Ok(vols[0])
}

/// Volumes of several superlevel sets from one sample set.
fn mc_volumes(f: &TestFunction, levels: &[f64], b: &[(f64, f64); 3], cfg: &QuadConfig) -> (Vec<Estimate>, usize) {
    let dim = f.dim();
    let total = box_volume(dim, b);
    let mut r = rng(cfg.seed, MC_STREAM);
    let mut vals: Vec<f64> = (0..cfg.mc_samples).map(|_| f.evaluate(&uniform_in_box(dim, b, &mut r))).collect();
    vals.sort_by(f64::total_cmp);
    let n = vals.len() as f64;
    let out = levels
        .iter()
        .map(|&t| {
            let below = vals.partition_point(|v| *v < t);
            let frac = (vals.len() - below) as f64 / n;
            Estimate::new(total * frac, total * (frac * (1.0 - frac) / n).sqrt())
        })
        .collect();
    (out, vals.len())
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Tail {
    /// V grows like u^γ
    Power(f64),
    /// V grows like e^{q u}
    Exponential(f64),
}

/// Radially symmetric decreasing function given by its superlevel radii:
/// f*(x) = sup{t_k : r_k ≥ |x|}.
///
/// Between levels the volume V(u) = |{f ≥ M e^{-u}}| is interpolated by
/// local cubics in (ln u, ln V), which `evaluate` and `lp_norm` use.
#[derive(Clone, Debug)]
pub struct RadialProfile {
    dim: usize,
    max: f64,
    levels: Vec<f64>,
    radii: Vec<f64>,
    volumes: Vec<f64>,
    // model nodes, positive volumes only
    xs: Vec<f64>,
    ys: Vec<f64>,
    top: f64,
    tail: Tail,
}

impl RadialProfile {
    /// Builds a profile from decreasing levels below `max` and the volumes
    /// of the corresponding superlevel sets.
    pub fn from_volumes(dim: usize, max: f64, levels: Vec<f64>, volumes: Vec<f64>) -> Result<Self> {
        let omega = unit_ball_volume(dim)?;
        if levels.len() != volumes.len() || levels.is_empty() {
            return domain("levels and volumes must have equal, nonzero length");
        }
        if !(max > 0.0) || levels.iter().any(|t| !(*t > 0.0 && *t <= max)) {
            return domain("levels must lie in (0, max]");
        }
        if levels.windows(2).any(|w| !(w[1] < w[0])) {
            return domain("levels must be strictly decreasing");
        }
        if volumes.iter().any(|v| !(*v >= 0.0 && v.is_finite())) || volumes.windows(2).any(|w| w[1] < w[0]) {
            return domain("superlevel volumes must be finite and nonincreasing in the level");
        }
        let radii: Vec<f64> = volumes.iter().map(|v| (v / omega).powf(1.0 / dim as f64)).collect();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for (t, v) in levels.iter().zip(&volumes) {
            let u = (max / t).ln();
            if *v > 0.0 && u > 0.0 {
                xs.push(u.ln());
                ys.push(v.ln());
            }
        }
        let m = xs.len();
        let top = if m >= 2 { ((ys[1] - ys[0]) / (xs[1] - xs[0])).max(0.0) } else { 0.0 };
        let tail = if m >= 3 {
            let (u0, u1, u2) = (xs[m - 3].exp(), xs[m - 2].exp(), xs[m - 1].exp());
            let s1 = (ys[m - 2] - ys[m - 3]) / (xs[m - 2] - xs[m - 3]);
            let s2 = (ys[m - 1] - ys[m - 2]) / (xs[m - 1] - xs[m - 2]);
            let d1 = (ys[m - 2] - ys[m - 3]) / (u1 - u0);
            let d2 = (ys[m - 1] - ys[m - 2]) / (u2 - u1);
            let power_change = (s2 - s1).abs() / s2.abs().max(1e-300);
            let exp_change = (d2 - d1).abs() / d2.abs().max(1e-300);
            if d2 > 0.0 && exp_change < power_change {
                Tail::Exponential(d2)
            } else {
                Tail::Power(s2.max(0.0))
            }
        } else {
            Tail::Power(0.0)
        };
        Ok(Self { dim, max, levels, radii, volumes, xs, ys, top, tail })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_value(&self) -> f64 {
        self.max
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// Local cubic through up to four nodes around segment `k`.
    fn cubic(&self, k: usize, x: f64) -> f64 {
        let m = self.xs.len();
        let lo = k.saturating_sub(1).min(m.saturating_sub(4));
        let hi = (lo + 4).min(m);
        let mut acc = 0.0;
        for i in lo..hi {
            let mut w = 1.0;
            for j in lo..hi {
                if j != i {
                    w *= (x - self.xs[j]) / (self.xs[i] - self.xs[j]);
                }
            }
            acc += w * self.ys[i];
        }
        acc
    }

    /// Model of ln V at u > 0.
    fn ln_volume(&self, u: f64) -> f64 {
        let m = self.xs.len();
        if m == 0 {
            return f64::NEG_INFINITY;
        }
        let x = u.ln();
        if x <= self.xs[0] {
            return self.ys[0] + self.top * (x - self.xs[0]);
        }
        if x >= self.xs[m - 1] {
            return self.ys[m - 1]
                + match self.tail {
                    Tail::Power(g) => g * (x - self.xs[m - 1]),
                    Tail::Exponential(q) => q * (u - self.xs[m - 1].exp()),
                };
        }
        let k = self.xs.partition_point(|v| *v <= x) - 1;
        self.cubic(k, x)
    }

    /// Modelled |{f* ≥ t}|.
    pub fn volume_at(&self, t: f64) -> f64 {
        if t > self.max {
            return 0.0;
        }
        if t == self.max {
            return if self.top == 0.0 && !self.ys.is_empty() { self.ys[0].exp() } else { 0.0 };
        }
        self.ln_volume((self.max / t).ln()).exp()
    }

    /// Value of f* at distance `r` from the origin, from the interpolated model.
    pub fn evaluate(&self, r: f64) -> f64 {
        let r = r.abs();
        let m = self.xs.len();
        if m == 0 {
            return 0.0;
        }
        let omega = unit_ball_volume(self.dim).unwrap_or(f64::NAN);
        let target = (omega * r.powi(self.dim as i32)).ln();
        if target <= self.ys[0] && self.top == 0.0 {
            return self.max;
        }
        // first u with ln V(u) ≥ target
        let u = if target >= self.ys[m - 1] {
            let x_end = self.xs[m - 1];
            match self.tail {
                Tail::Power(g) if g > 0.0 => (x_end + (target - self.ys[m - 1]) / g).exp(),
                Tail::Exponential(q) => x_end.exp() + (target - self.ys[m - 1]) / q,
                _ if target == self.ys[m - 1] => x_end.exp(),
                _ => return 0.0,
            }
        } else if target <= self.ys[0] {
            (self.xs[0] + (target - self.ys[0]) / self.top).exp()
        } else {
            let (mut a, mut b) = (self.xs[0], self.xs[m - 1]);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if self.ln_volume(mid.exp()) >= target {
                    b = mid;
                } else {
                    a = mid;
                }
                if b - a < 1e-15 * b.abs().max(1.0) {
                    break;
                }
            }
            b.exp()
        };
        self.max * (-u).exp()
    }

    /// Value of f* at distance `r` from the sup rule over the stored levels.
    pub fn evaluate_step(&self, r: f64) -> f64 {
        let r = r.abs();
        self.levels
            .iter()
            .zip(&self.radii)
            .filter(|(_, rad)| **rad >= r && **rad > 0.0)
            .map(|(t, _)| *t)
            .fold(0.0, f64::max)
    }

    /// ∫ (f*)^p through the layer cake over the interpolated volumes.
    pub fn power_integral(&self, p: f64) -> Result<Estimate> {
        if !(p > 0.0) {
            return domain(format!("p must be positive, got {p}"));
        }
        let m = self.xs.len();
        if m == 0 {
            return Ok(Estimate::exact(0.0));
        }
        let c = p * self.max.powf(p);
        // top piece: V = V_0 (u/u_0)^γ on (0, u_0)
        let u0 = self.xs[0].exp();
        let g = self.top;
        let mut total = Estimate::exact(
            self.ys[0].exp() * (u0 / (g + 1.0) - p * u0 * u0 / (g + 2.0) + p * p * u0.powi(3) / (2.0 * (g + 3.0))),
        );
        let (gx, gw) = gauss_legendre(10);
        let (hx, hw) = gauss_legendre(6);
        for k in 0..m.saturating_sub(1) {
            let (a, b) = (self.xs[k], self.xs[k + 1]);
            let seg = |nodes: &[f64], weights: &[f64]| {
                let mut s = 0.0;
                for (z, w) in nodes.iter().zip(weights) {
                    let x = 0.5 * (a + b) + 0.5 * (b - a) * z;
                    let u = x.exp();
                    s += w * (self.cubic(k, x) - p * u).exp() * u;
                }
                0.5 * (b - a) * s
            };
            let fine = seg(&gx, &gw);
            total += Estimate::new(fine, (fine - seg(&hx, &hw)).abs());
        }
        let u_end = self.xs[m - 1].exp();
        let v_end = self.ys[m - 1].exp();
        let tail = match self.tail {
            Tail::Exponential(q) => {
                if q >= p {
                    return Err(Error::Divergent(format!("layer-cake tail e^{{({q:.4} - {p}) u}} is not integrable")));
                }
                v_end * (-p * u_end).exp() / (p - q)
            }
            Tail::Power(g) => {
                let h = |u: f64| (g * (u / u_end).ln() - p * u).exp();
                v_end * integrate_line(&h, u_end, f64::INFINITY, &[], 1.0 / p, 2, Tol::new(0.0, 1e-12)).value
            }
        };
        total += Estimate::new(tail, 0.1 * tail);
        Ok(total.scale(c))
    }

    pub fn lp_norm(&self, p: f64) -> Result<Estimate> {
        Ok(self.power_integral(p)?.powf(1.0 / p))
    }
}

/// Level grid: `cfg.levels` log-spaced levels from max down to
/// `rel_tol · max`, with extra geometric levels near the maximum and below
/// the last one.
fn level_grid(max: f64, cfg: &QuadConfig) -> Vec<f64> {
    let top = (1.0 / cfg.rel_tol).ln();
    let count = cfg.levels.max(2);
    let h = top / (count - 1) as f64;
    let mut us: Vec<f64> = (0..count).map(|j| h * j as f64).collect();
    // below 11h the uniform grid is coarse in ln u
    let mut v = 11.0 * h / 1.1;
    while v > h * 1e-6 {
        us.push(v);
        v /= 1.1;
    }
    // and a sparser continuation so that the tail model starts far out
    let mut v = top * 1.02;
    while v < 4.0 * top {
        us.push(v);
        v *= 1.02;
    }
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| *a - *b < 0.02 * b.min(h));
    us.into_iter().map(|u| max * (-u).exp()).collect()
}

/// Schwarz symmetral f* of f as a radial profile.
pub fn schwarz_symmetrize(f: &TestFunction, cfg: &QuadConfig) -> Result<RadialProfile> {
    let max = f.max_value();
    if !(max > 0.0 && max.is_finite()) {
        return domain("symmetrization needs a function with finite positive maximum");
    }
    let levels = level_grid(max, cfg);
    let volumes: Vec<f64> = if closed_volume(f, max).is_some() {
        levels.iter().map(|t| closed_volume(f, *t).unwrap_or(0.0)).collect()
    } else {
        let b = superlevel_box(f, levels[levels.len() - 1]);
        mc_volumes(f, &levels, &b, cfg).0.into_iter().map(|e| e.value).collect()
    };
    RadialProfile::from_volumes(f.dim(), max, levels, volumes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::lp_norm;
    use crate::geometry::StarBody;
    use crate::linalg::{Matrix, ORIGIN};
    use std::f64::consts::PI;

    #[test]
    fn superlevel_examples() {
        let c = QuadConfig::default();
        let sq = TestFunction::box_indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(superlevel_volume(&sq, 0.5, &c).unwrap().value, 1.0);
        assert_eq!(superlevel_volume(&sq, 1.5, &c).unwrap().value, 0.0);
        for n in 1..=3 {
            let alpha = 0.7;
            let f = TestFunction::hls_standard(n, alpha).unwrap();
            let t: f64 = 0.3;
            let want = unit_ball_volume(n).unwrap() * (t.powf(-2.0 / (n as f64 + alpha)) - 1.0).powf(n as f64 / 2.0);
            assert!((superlevel_volume(&f, t, &c).unwrap().value - want).abs() < 1e-14);
        }
    }

    #[test]
    fn hls_superlevel_against_grid_count() {
        // 2-D grid count of {(1+|x|²)^{-3/2} ≥ 0.2}
        let f = TestFunction::hls_standard(2, 1.0).unwrap();
        let t = 0.2;
        let h = 0.002;
        let mut count = 0usize;
        let steps = (4.0 / h) as i64;
        for i in -steps..steps {
            for j in -steps..steps {
                let x = [(i as f64 + 0.5) * h, (j as f64 + 0.5) * h, 0.0];
                if f.evaluate(&x) >= t {
                    count += 1;
                }
            }
        }
        let grid = count as f64 * h * h;
        let exact = superlevel_volume(&f, t, &QuadConfig::default()).unwrap().value;
        assert!((grid - exact).abs() < 1e-3 * exact, "{grid} vs {exact}");
    }

    #[test]
    fn mc_volumes_agree_with_closed_forms() {
        let c = QuadConfig::default();
        let fams = vec![
            TestFunction::simplex_exp_standard(2).unwrap(),
            TestFunction::gaussian(2, 1.0, Matrix::from_rows(&[vec![1.0, 0.3], vec![0.3, 0.5]]).unwrap(), ORIGIN)
                .unwrap(),
            TestFunction::hls_standard(3, 1.0).unwrap(),
            TestFunction::sconcave_peak(1.0, 2.0, StarBody::cross_polytope(2, 1.0).unwrap(), ORIGIN).unwrap(),
        ];
        for f in &fams {
            let t = 0.25 * f.max_value();
            let exact = superlevel_volume(f, t, &c).unwrap().value;
            let mc = superlevel_volume_mc(f, t, &c).unwrap();
            assert!(
                (mc.value - exact).abs() < 4.0 * mc.error,
                "{}: {} ± {} vs {exact}",
                f.describe(),
                mc.value,
                mc.error
            );
        }
    }

    #[test]
    fn symmetrization_examples() {
        let c = QuadConfig::default();
        let f = TestFunction::hls_standard(2, 1.0).unwrap();
        let p = schwarz_symmetrize(&f, &c).unwrap();
        for r in [0.0, 0.3, 1.0, 2.5, 10.0] {
            let want = f.evaluate(&[r, 0.0, 0.0]);
            assert!((p.evaluate(r) - want).abs() < 1e-3 * want, "r={r}");
        }
        let sq = TestFunction::box_indicator(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        let p = schwarz_symmetrize(&sq, &c).unwrap();
        let r = 1.0 / PI.sqrt();
        assert!((p.radii()[0] - r).abs() < 1e-14);
        assert_eq!(p.evaluate(0.99 * r), 1.0);
        assert_eq!(p.evaluate_step(1.01 * r), 0.0);
        // e^{-‖x‖₁} in the plane symmetrizes to e^{-|x|√(π/2)}
        let l1 = TestFunction::simplex_exponential(1.0, StarBody::cross_polytope(2, 1.0).unwrap(), ORIGIN).unwrap();
        let p = schwarz_symmetrize(&l1, &c).unwrap();
        for r in [0.1, 0.8, 3.0] {
            let want = (-r * (PI / 2.0).sqrt()).exp();
            assert!((p.evaluate(r) - want).abs() < 1e-6 * want);
        }
    }

    #[test]
    fn equimeasurable_norms() {
        let c = QuadConfig::default();
        let m = Matrix::from_rows(&[vec![1.3, 0.4, 0.0], vec![0.0, 0.9, 0.2], vec![0.1, 0.0, 1.1]]).unwrap();
        for n in 1..=3 {
            let mut mm = Matrix::IDENTITY;
            for i in 0..n {
                for j in 0..n {
                    mm.0[i][j] = m.0[i][j];
                }
            }
            let alpha = 0.5;
            let fams = vec![
                TestFunction::hls_extremal(n, 1.0, 0.8, mm, ORIGIN, alpha).unwrap(),
                TestFunction::simplex_exp_standard(n).unwrap(),
                TestFunction::sconcave_peak(2.0, 0.5, StarBody::standard_simplex(n).unwrap(), ORIGIN).unwrap(),
                TestFunction::gaussian(n, 1.0, mm.mul(&mm.transpose()), ORIGIN).unwrap(),
                TestFunction::ball_indicator(n, 0.7, ORIGIN).unwrap(),
            ];
            for f in &fams {
                let prof = schwarz_symmetrize(f, &c).unwrap();
                for p in [1.0, 2.0, 2.0 * n as f64 / (n as f64 + alpha)] {
                    let a = lp_norm(f, p, &c).unwrap().value;
                    let b = prof.lp_norm(p).unwrap().value;
                    assert!((a - b).abs() <= 2.0 * c.rel_tol * a, "n={n} p={p} {}: {a} vs {b}", f.describe());
                }
            }
        }
    }
}
