//! Gamma and Beta functions and the constants built from them.
//!
//! Everything is evaluated through `ln_gamma` and exponentiated at the end.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Tolerance on the scaling relation `1/p + 1/r - alpha/n = 1`.
pub const SCALING_TOL: f64 = 1e-12;

fn lanczos_ln_gamma(x: f64) -> f64 {
    // valid for x >= 0.5
    let z = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return domain(format!("ln_gamma requires a finite x > 0, got {x}"));
    }
    if x < 0.5 {
        Ok(lanczos_ln_gamma(x + 1.0) - x.ln())
    } else {
        Ok(lanczos_ln_gamma(x))
    }
}

pub fn gamma_fn(x: f64) -> Result<f64> {
    if x > 0.0 && x.fract() == 0.0 && x <= 21.0 {
        // exact factorials
        return Ok((1..x as u64).map(|k| k as f64).product());
    }
    Ok(ln_gamma(x)?.exp())
}

pub fn ln_beta(p: f64, q: f64) -> Result<f64> {
    if !(p > 0.0 && q > 0.0) {
        return domain(format!("beta requires p, q > 0, got ({p}, {q})"));
    }
    Ok(ln_gamma(p)? + ln_gamma(q)? - ln_gamma(p + q)?)
}

pub fn beta_fn(p: f64, q: f64) -> Result<f64> {
    Ok(ln_beta(p, q)?.exp())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        domain("dimension must be at least 1")
    } else {
        Ok(())
    }
}

/// ln ω_n, the log volume of the unit ball in R^n.
pub fn ln_unit_ball_volume(n: usize) -> Result<f64> {
    check_n(n)?;
    let h = n as f64 / 2.0;
    Ok(h * PI.ln() - ln_gamma(h + 1.0)?)
}

pub fn unit_ball_volume(n: usize) -> Result<f64> {
    Ok(ln_unit_ball_volume(n)?.exp())
}

/// Surface area of S^{n-1}, equal to n ω_n.
pub fn unit_sphere_area(n: usize) -> Result<f64> {
    Ok(n as f64 * unit_ball_volume(n)?)
}

/// Dimension and exponents of an HLS-type inequality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HlsParams {
    pub n: usize,
    pub alpha: f64,
    pub p: f64,
    pub r: f64,
}

impl HlsParams {
    pub fn new(n: usize, alpha: f64, p: f64, r: f64) -> Result<Self> {
        check_n(n)?;
        if !(alpha > 0.0) || !alpha.is_finite() {
            return domain(format!("alpha must be positive, got {alpha}"));
        }
        if !(p > 0.0 && r > 0.0) {
            return domain(format!("exponents must be positive, got p={p}, r={r}"));
        }
        let lhs = 1.0 / p + 1.0 / r - alpha / n as f64;
        if (lhs - 1.0).abs() > SCALING_TOL {
            return Err(Error::Regime(format!("1/p + 1/r - alpha/n = {lhs}, expected 1")));
        }
        Ok(Self { n, alpha, p, r })
    }

    /// The diagonal exponent p = r = 2n/(n+alpha).
    pub fn diagonal(n: usize, alpha: f64) -> Result<Self> {
        check_n(n)?;
        let p = 2.0 * n as f64 / (n as f64 + alpha);
        Self::new(n, alpha, p, p)
    }

    pub fn is_diagonal(&self) -> bool {
        let d = 2.0 * self.n as f64 / (self.n as f64 + self.alpha);
        (self.p - d).abs() <= SCALING_TOL && (self.r - d).abs() <= SCALING_TOL
    }

    /// 1 < p, r < ∞ and 0 < alpha < n.
    pub fn in_forward_regime(&self) -> bool {
        self.p > 1.0 && self.r > 1.0 && self.alpha < self.n as f64
    }

    /// 0 < p, r < 1 and alpha > n.
    pub fn in_reverse_regime(&self) -> bool {
        self.p < 1.0 && self.r < 1.0 && self.alpha > self.n as f64
    }

    pub fn require_forward(&self) -> Result<()> {
        if self.in_forward_regime() {
            Ok(())
        } else {
            Err(Error::Regime(format!(
                "need 1 < p, r and 0 < alpha < n; got n={}, alpha={}, p={}, r={}",
                self.n, self.alpha, self.p, self.r
            )))
        }
    }

    pub fn require_reverse(&self) -> Result<()> {
        if self.in_reverse_regime() {
            Ok(())
        } else {
            Err(Error::Regime(format!(
                "need 0 < p, r < 1 and alpha > n; got n={}, alpha={}, p={}, r={}",
                self.n, self.alpha, self.p, self.r
            )))
        }
    }
}

/// Upper bound for the best constant in the forward inequality, valid for
/// all admissible (p, r).
pub fn hls_constant_bound(params: &HlsParams) -> Result<f64> {
    params.require_forward()?;
    let HlsParams { n, alpha, p, r } = *params;
    let nf = n as f64;
    let e = 1.0 - alpha / nf;
    let ln_front = (nf / alpha).ln() + e * ln_unit_ball_volume(n)? - (p * r).ln();
    let a = e * (e / (1.0 - 1.0 / p)).ln();
    let b = e * (e / (1.0 - 1.0 / r)).ln();
    Ok(ln_front.exp() * (a.exp() + b.exp()))
}

/// ln of the sharp diagonal constant.
pub fn ln_hls_sharp_constant(n: usize, alpha: f64) -> Result<f64> {
    check_n(n)?;
    if !(alpha > 0.0) {
        return domain(format!("alpha must be positive, got {alpha}"));
    }
    let nf = n as f64;
    Ok(0.5 * (nf - alpha) * PI.ln() + ln_gamma(alpha / 2.0)?
        - ln_gamma((nf + alpha) / 2.0)?
        - (alpha / nf) * (ln_gamma(nf / 2.0)? - ln_gamma(nf)?))
}

/// Sharp constant for p = r = 2n/(n+alpha). For alpha > n it is the sharp
/// constant of the reversed inequality.
pub fn hls_sharp_constant(n: usize, alpha: f64) -> Result<f64> {
    Ok(ln_hls_sharp_constant(n, alpha)?.exp())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        domain(format!("alpha must be positive, got {alpha}"))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s > 0.0 && s.is_finite() {
        Ok(())
    } else {
        domain(format!("s must be positive, got {s}"))
    }
}

/// Γ(n+1)^{α/n} / Γ(α).
pub fn reverse_constant_logconcave(n: usize, alpha: f64) -> Result<f64> {
    check_n(n)?;
    check_alpha(alpha)?;
    let nf = n as f64;
    Ok(((alpha / nf) * ln_gamma(nf + 1.0)? - ln_gamma(alpha)?).exp())
}

/// (n B(n, n+1+2/s))^{α/n} / B(α, n+1+2/s).
pub fn reverse_constant_sconcave(n: usize, alpha: f64, s: f64) -> Result<f64> {
    check_n(n)?;
    check_alpha(alpha)?;
    check_s(s)?;
    let nf = n as f64;
    let m = nf + 1.0 + 2.0 / s;
    Ok(((alpha / nf) * (nf.ln() + ln_beta(nf, m)?) - ln_beta(alpha, m)?).exp())
}

/// Concavity class of a pair of test functions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum Concavity {
    Log,
    S { s: f64 },
}

/// Normalising constant of the radial mean body inclusions.
///
/// `Log` gives Γ(α+1)^{1/α}; `S` gives ((n+2/s) B(α+1, n+2/s))^{1/α}.
pub fn inclusion_constant(alpha: f64, shape: Concavity, n: usize) -> Result<f64> {
    check_n(n)?;
    check_alpha(alpha)?;
    match shape {
        Concavity::Log => Ok((ln_gamma(alpha + 1.0)? / alpha).exp()),
        Concavity::S { s } => {
            check_s(s)?;
            let m = n as f64 + 2.0 / s;
            Ok(((m.ln() + ln_beta(alpha + 1.0, m)?) / alpha).exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_reference_values() {
        assert_eq!(gamma_fn(1.0).unwrap(), 1.0);
        assert_eq!(gamma_fn(5.0).unwrap(), 24.0);
        assert!(rel(gamma_fn(0.5).unwrap(), PI.sqrt()) < 1e-14);
        // reference values from a 30-digit evaluation
        assert!(rel(gamma_fn(0.25).unwrap(), 3.625_609_908_221_908_3) < 1e-13);
        assert!(rel(gamma_fn(0.75).unwrap(), 1.225_416_702_465_177_6) < 1e-13);
        assert!(rel(gamma_fn(0.1).unwrap(), 9.513_507_698_668_731_8) < 1e-13);
        assert!(rel(gamma_fn(7.3).unwrap(), 1_271.423_633_663_908_8) < 1e-12);
    }

    #[test]
    fn gamma_recurrence() {
        for x in [0.1, 0.5, 1.5, 3.7, 10.0] {
            let lhs = gamma_fn(x + 1.0).unwrap();
            let rhs = x * gamma_fn(x).unwrap();
            assert!(rel(lhs, rhs) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn domain_errors() {
        assert!(gamma_fn(0.0).is_err());
        assert!(gamma_fn(-1.5).is_err());
        assert!(beta_fn(0.0, 1.0).is_err());
        assert!(unit_ball_volume(0).is_err());
        assert!(hls_sharp_constant(2, 0.0).is_err());
        assert!(reverse_constant_sconcave(2, 1.0, 0.0).is_err());
        assert!(inclusion_constant(-1.0, Concavity::Log, 2).is_err());
    }

    #[test]
    fn beta_values() {
        assert!(rel(beta_fn(1.0, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(beta_fn(2.0, 3.0).unwrap(), 1.0 / 12.0) < 1e-14);
        assert!(rel(beta_fn(0.5, 0.5).unwrap(), PI) < 1e-13);
        for (p, q) in [(0.3, 2.2), (1.7, 4.0), (5.5, 0.25)] {
            assert_eq!(beta_fn(p, q).unwrap(), beta_fn(q, p).unwrap());
            let lhs = p * beta_fn(p, q + 1.0).unwrap();
            let rhs = q * beta_fn(p + 1.0, q).unwrap();
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn ball_volumes() {
        assert!(rel(unit_ball_volume(1).unwrap(), 2.0) < 1e-14);
        assert!(rel(unit_ball_volume(2).unwrap(), PI) < 1e-14);
        assert!(rel(unit_ball_volume(3).unwrap(), 4.0 * PI / 3.0) < 1e-14);
    }

    #[test]
    fn params_validation() {
        assert!(HlsParams::new(1, 0.5, 4.0 / 3.0, 4.0 / 3.0).is_ok());
        assert!(matches!(HlsParams::new(1, 0.5, 2.0, 2.0), Err(Error::Regime(_))));
        let d = HlsParams::diagonal(3, 1.0).unwrap();
        assert!(d.is_diagonal() && d.in_forward_regime());
        let rev = HlsParams::diagonal(1, 2.0).unwrap();
        assert!(rev.in_reverse_regime());
        assert!(hls_constant_bound(&rev).is_err());
    }

    #[test]
    fn constant_bound_values() {
        let p = HlsParams::new(1, 0.5, 4.0 / 3.0, 4.0 / 3.0).unwrap();
        assert!(rel(hls_constant_bound(&p).unwrap(), 4.5) < 1e-13);

        // second expression tree: n=2, α=1, p=r=4/3
        let q = HlsParams::new(2, 1.0, 4.0 / 3.0, 4.0 / 3.0).unwrap();
        let e: f64 = 0.5;
        let term = (e / (1.0 - 0.75)).powf(e);
        let expect = 2.0 * PI.powf(e) * (9.0 / 16.0) * 2.0 * term;
        assert!(rel(hls_constant_bound(&q).unwrap(), expect) < 1e-13);

        let a = HlsParams::new(3, 1.2, 1.5, 1.0 / (1.0 + 0.4 - 1.0 / 1.5)).unwrap();
        let b = HlsParams::new(3, 1.2, a.r, a.p).unwrap();
        assert!(rel(hls_constant_bound(&a).unwrap(), hls_constant_bound(&b).unwrap()) < 1e-14);
    }

    #[test]
    fn sharp_constant_values() {
        assert!(rel(hls_sharp_constant(2, 1.0).unwrap(), 2.0 * PI.sqrt()) < 1e-13);
        let g14 = 3.625_609_908_221_908_3_f64;
        let g34 = 1.225_416_702_465_177_6_f64;
        let expect = PI.powf(0.25) * g14 / g34 * PI.sqrt().powf(-0.5);
        assert!(rel(hls_sharp_constant(1, 0.5).unwrap(), expect) < 1e-13);
        // reversed regime value used by the n = 1, α = 2 equality case
        assert!(rel(hls_sharp_constant(1, 2.0).unwrap(), 2.0 / (PI * PI)) < 1e-13);
        for n in 1..=3 {
            let v = hls_sharp_constant(n, n as f64 - 1e-9).unwrap();
            assert!(v.is_finite() && v > 0.0);
        }
    }

    #[test]
    fn bound_dominates_sharp_constant() {
        for n in 1..=3usize {
            for k in 1..20 {
                let alpha = n as f64 * k as f64 / 20.0;
                let p = HlsParams::diagonal(n, alpha).unwrap();
                let b = hls_constant_bound(&p).unwrap();
                let s = hls_sharp_constant(n, alpha).unwrap();
                assert!(b >= s * (1.0 - 1e-12), "n={n} alpha={alpha}: {b} < {s}");
            }
        }
    }

    #[test]
    fn reverse_constants() {
        assert!(rel(reverse_constant_logconcave(1, 1.0).unwrap(), 1.0) < 1e-14);
        assert!(rel(reverse_constant_logconcave(2, 1.0).unwrap(), 2f64.sqrt()) < 1e-14);
        assert!(rel(reverse_constant_logconcave(2, 2.0).unwrap(), 2.0) < 1e-14);
        for s in [0.1, 1.0, 7.0] {
            assert!(rel(reverse_constant_sconcave(1, 1.0, s).unwrap(), 1.0) < 1e-13);
        }
        let v = reverse_constant_sconcave(2, 1.0, 2.0).unwrap();
        assert!(rel(v, 4.0 * 0.1f64.sqrt()) < 1e-13);
    }

    #[test]
    fn sconcave_constant_large_s_limit() {
        for (n, alpha) in [(1usize, 0.5), (2, 1.5), (3, 2.0)] {
            let nf = n as f64;
            let limit = (nf * beta_fn(nf, nf + 1.0).unwrap()).powf(alpha / nf) / beta_fn(alpha, nf + 1.0).unwrap();
            let v = reverse_constant_sconcave(n, alpha, 1e8).unwrap();
            assert!(rel(v, limit) < 1e-6);
        }
    }

    #[test]
    fn sconcave_constant_small_s_limit() {
        for (n, alpha) in [(1usize, 0.5), (2, 1.5), (3, 4.0)] {
            let v = reverse_constant_sconcave(n, alpha, 1e-7).unwrap();
            let w = reverse_constant_logconcave(n, alpha).unwrap();
            assert!(rel(v, w) < 1e-5, "n={n} alpha={alpha}: {v} vs {w}");
        }
    }

    #[test]
    fn inclusion_constants() {
        assert!(rel(inclusion_constant(1.0, Concavity::Log, 2).unwrap(), 1.0) < 1e-14);
        assert!(rel(inclusion_constant(2.0, Concavity::Log, 2).unwrap(), 2f64.sqrt()) < 1e-14);
    }

    #[test]
    fn inclusion_constant_small_s_limit() {
        // only ratios across alpha enter the inclusion, so compare
        // (n + 2/s) c_s(α) with the log-concave value
        for n in 1..=3usize {
            for alpha in [0.5, 1.0, 2.5] {
                let s = 1e-6;
                let m = n as f64 + 2.0 / s;
                let cs = inclusion_constant(alpha, Concavity::S { s }, n).unwrap();
                let cl = inclusion_constant(alpha, Concavity::Log, n).unwrap();
                assert!(rel(m * cs, cl) < 1e-3, "n={n} alpha={alpha}");
            }
        }
    }

    #[test]
    fn log_inclusion_constant_by_quadrature() {
        use crate::quad::{integrate_moment, Tol};
        for alpha in [0.3, 1.0, 2.7] {
            let g = |t: f64| (-t).exp();
            let m = integrate_moment(&g, alpha + 1.0, 1.0, None, &[], Tol::new(1e-13, 1e-12)).value;
            let c = m.powf(1.0 / alpha);
            let v = inclusion_constant(alpha, Concavity::Log, 1).unwrap();
            assert!(rel(c, v) < 1e-8, "alpha={alpha}: {c} vs {v}");
        }
    }
}
