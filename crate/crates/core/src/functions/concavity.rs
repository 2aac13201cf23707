//! Randomized checks of log- and s-concavity.

use rand::Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::linalg::{add, scale, Point};

use super::sampling::{rng, uniform_in_box};
use super::{correlation, Concavity, QuadConfig, TestFunction};

const SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct ConcavityReport {
    pub class: Concavity,
    pub trials: usize,
    /// Triples where both endpoint values were positive.
    pub tested: usize,
    pub violations: usize,
    /// Largest excess of the right side over the left, scaled by the maximum.
    pub worst_violation: f64,
    /// (x, y, λ) attaining the worst violation.
    pub counterexample: Option<(Vec<f64>, Vec<f64>, f64)>,
}

impl ConcavityReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Normalized defect of the concavity inequality at one triple; positive
/// means violated.
fn defect(class: Concavity, fx: f64, fy: f64, fm: f64, lambda: f64, max: f64) -> f64 {
    match class {
        Concavity::Log => {
            let rhs = fx.powf(1.0 - lambda) * fy.powf(lambda);
            (rhs - fm) / max
        }
        Concavity::S { s } => {
            let rhs = (1.0 - lambda) * fx.powf(s) + lambda * fy.powf(s);
            (rhs - fm.powf(s)) / max.powf(s)
        }
    }
}

fn run(
    dim: usize,
    class: Concavity,
    trials: usize,
    seed: u64,
    b: [(f64, f64); 3],
    max: f64,
    eval: &dyn Fn(&Point) -> f64,
) -> Result<ConcavityReport> {
    if trials == 0 {
        return domain("trials must be at least 1");
    }
    if let Concavity::S { s } = class {
        if !(s > 0.0) {
            return domain("s must be positive");
        }
    }
    let mut r = rng(seed, 0xc0c4);
    let mut rep = ConcavityReport {
        class,
        trials,
        tested: 0,
        violations: 0,
        worst_violation: f64::NEG_INFINITY,
        counterexample: None,
    };
    for _ in 0..trials {
        let x = uniform_in_box(dim, &b, &mut r);
        let y = uniform_in_box(dim, &b, &mut r);
        let lambda: f64 = r.random();
        let (fx, fy) = (eval(&x), eval(&y));
        if !(fx > 0.0 && fy > 0.0) {
            continue;
        }
        rep.tested += 1;
        let m = add(&scale(&x, 1.0 - lambda), &scale(&y, lambda));
        let d = defect(class, fx, fy, eval(&m), lambda, max);
        if d > SLACK {
            rep.violations += 1;
        }
        if d > rep.worst_violation {
            rep.worst_violation = d;
            if d > SLACK {
                rep.counterexample = Some((x[..dim].to_vec(), y[..dim].to_vec(), lambda));
            }
        }
    }
    if rep.tested == 0 {
        rep.worst_violation = 0.0;
    }
    Ok(rep)
}

/// Samples triples (x, y, λ) in the effective support box of f and tests
/// the concavity inequality of `class` on pairs inside the support.
pub fn concavity_check(f: &TestFunction, class: Concavity, trials: usize, seed: u64) -> Result<ConcavityReport> {
    let b = f.effective_box(1e-3);
    run(f.dim(), class, trials, seed, b, f.max_value(), &|x| f.evaluate(x))
}

/// Class of the correlation of two functions of class `class`.
pub fn correlation_class(class: Concavity, n: usize) -> Concavity {
    match class {
        Concavity::Log => Concavity::Log,
        Concavity::S { s } => Concavity::S { s: s / (n as f64 * s + 2.0) },
    }
}

/// Tests y ↦ 𝒢(f,h)(y) against the class implied by `class` for the inputs.
pub fn correlation_concavity_check(
    f: &TestFunction,
    h: &TestFunction,
    class: Concavity,
    trials: usize,
    cfg: &QuadConfig,
) -> Result<ConcavityReport> {
    crate::error::check_dim(f.dim(), h.dim())?;
    let n = f.dim();
    let (bf, bh) = (f.effective_box(1e-3), h.effective_box(1e-3));
    let mut b = [(0.0, 0.0); 3];
    for k in 0..n {
        // 𝒢(y) ≠ 0 needs x + y ∈ supp f and x ∈ supp h
        b[k] = (bf[k].0 - bh[k].1, bf[k].1 - bh[k].0);
    }
    let g = |y: &Point| correlation(f, h, y, cfg).map(|e| e.value.max(0.0)).unwrap_or(f64::NAN);
    let center = {
        let mut c = [0.0; 3];
        for k in 0..n {
            c[k] = f.center()[k] - h.center()[k];
        }
        c
    };
    let max = g(&center).max(f64::MIN_POSITIVE);
    run(n, correlation_class(class, n), trials, cfg.seed, b, max, &g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::StarBody;
    use crate::linalg::{Matrix, ORIGIN};

    #[test]
    fn families_have_their_classes() {
        let e = TestFunction::simplex_exp_standard(2).unwrap();
        assert!(concavity_check(&e, Concavity::Log, 4000, 1).unwrap().passed());
        for s in [0.5, 1.0, 3.0] {
            let p = TestFunction::sconcave_peak(1.0, s, StarBody::standard_simplex(2).unwrap(), ORIGIN).unwrap();
            let rep = concavity_check(&p, Concavity::S { s }, 4000, 2).unwrap();
            assert!(rep.passed(), "s={s}: {rep:?}");
            assert!(rep.tested > 100);
        }
        let g = TestFunction::gaussian(2, 1.0, Matrix::IDENTITY, ORIGIN).unwrap();
        assert!(concavity_check(&g, Concavity::Log, 4000, 3).unwrap().passed());
    }

    #[test]
    fn violations_are_reported() {
        // (1+x²)^{-1} is not log-concave
        let f = TestFunction::hls_standard(1, 1.0).unwrap();
        let rep = concavity_check(&f, Concavity::Log, 4000, 4).unwrap();
        assert!(rep.violations > 0 && rep.counterexample.is_some());
        // a peak with exponent 1/s is not s'-concave for s' > s
        let p = TestFunction::sconcave_peak(1.0, 0.5, StarBody::ball(1, 1.0).unwrap(), ORIGIN).unwrap();
        assert!(!concavity_check(&p, Concavity::S { s: 2.0 }, 4000, 5).unwrap().passed());
    }

    #[test]
    fn correlation_of_sconcave_peaks() {
        let cfg = QuadConfig::default();
        let s = 1.0;
        let p = TestFunction::sconcave_peak(1.0, s, StarBody::standard_simplex(1).unwrap(), ORIGIN).unwrap();
        let rep = correlation_concavity_check(&p, &p, Concavity::S { s }, 300, &cfg).unwrap();
        assert!(rep.passed(), "{rep:?}");
    }
}
