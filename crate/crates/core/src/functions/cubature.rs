//! Nested adaptive cubature over R^n for products of test functions.
//!
//! Axis 0 is outermost. The innermost axis splits at the exact kinks of
//! each factor along the line; outer axes split at coordinates where the
//! inner integral changes smoothness. Infinite ranges use the tail maps of
//! [`integrate_line`].

use crate::linalg::Point;
use crate::quad::{integrate_line, Estimate, Tol};

use super::{QuadConfig, TestFunction};

struct Factor<'a> {
    f: &'a TestFunction,
    shift: Point,
}

pub(crate) struct Cubature<'a> {
    dim: usize,
    factors: Vec<Factor<'a>>,
    bounds: [(f64, f64); 3],
    scale: f64,
    panels: usize,
    tol: Tol,
}

impl<'a> Cubature<'a> {
    pub fn new(dim: usize, cfg: &QuadConfig) -> Self {
        Self {
            dim,
            factors: Vec::new(),
            bounds: [(f64::NEG_INFINITY, f64::INFINITY); 3],
            scale: cfg.box_radius,
            panels: cfg.nodes_per_axis,
            tol: cfg.tol(),
        }
    }

    /// Registers the factor x ↦ f(x + shift). A `bounding` factor restricts
    /// the domain to its support.
    pub fn factor(mut self, f: &'a TestFunction, shift: Point, bounding: bool) -> Self {
        if bounding {
            if let Some(b) = f.support_box() {
                for k in 0..self.dim {
                    let lo = b[k].0 - shift[k];
                    let hi = b[k].1 - shift[k];
                    self.bounds[k] = (self.bounds[k].0.max(lo), self.bounds[k].1.min(hi));
                }
            }
        }
        self.factors.push(Factor { f, shift });
        self
    }

    pub fn is_empty(&self) -> bool {
        (0..self.dim).any(|k| !(self.bounds[k].1 > self.bounds[k].0))
    }

    fn level(&self, k: usize, p: Point, g: &dyn Fn(&Point) -> f64, tol: &[Tol; 3]) -> Estimate {
        let mut breaks = Vec::new();
        let last = k + 1 == self.dim;
        for fac in &self.factors {
            if last {
                fac.f.line_breaks(&p, &fac.shift, k, &mut breaks);
            } else {
                fac.f.critical(&p, &fac.shift, k, &mut breaks);
            }
        }
        let inner = |x: f64| {
            let mut q = p;
            q[k] = x;
            if last {
                g(&q)
            } else {
                self.level(k + 1, q, g, tol).value
            }
        };
        let (lo, hi) = self.bounds[k];
        integrate_line(&inner, lo, hi, &breaks, self.scale, self.panels, tol[k])
    }

    fn run(&self, g: &dyn Fn(&Point) -> f64, outer: Tol, abs_eff: f64) -> Estimate {
        let mut tols = [outer; 3];
        let mut width = 1.0;
        for k in 1..self.dim {
            let (lo, hi) = self.bounds[k - 1];
            let w = if lo.is_finite() && hi.is_finite() { hi - lo } else { 4.0 * self.scale };
            width *= w.max(1e-300);
            tols[k] =
                Tol { abs: (0.1 * abs_eff / width).max(outer.abs * 0.1), rel: outer.rel * 0.1, limit: outer.limit };
        }
        self.level(0, [0.0; 3], g, &tols)
    }

    /// ∫ g over the domain. A coarse pass sets the absolute tolerance of
    /// the inner integrals relative to the size of the result.
    pub fn integrate(&self, g: &dyn Fn(&Point) -> f64) -> Estimate {
        if self.is_empty() {
            return Estimate::default();
        }
        if self.dim == 1 {
            return self.run(g, self.tol, self.tol.abs);
        }
        let rough_tol = Tol { abs: self.tol.abs, rel: self.tol.rel.max(1e-4), limit: self.tol.limit };
        let rough = self.run(g, rough_tol, self.tol.abs);
        let abs_eff = self.tol.abs.max(self.tol.rel * rough.value.abs());
        if rough_tol.rel == self.tol.rel {
            return rough;
        }
        self.run(g, Tol { abs: abs_eff, ..self.tol }, abs_eff)
    }

    /// ∫ Π_j f_j(x + shift_j).
    pub fn integrate_product(&self) -> Estimate {
        self.integrate(&|x: &Point| {
            let mut v = 1.0;
            for fac in &self.factors {
                if v == 0.0 {
                    break;
                }
                v *= fac.f.evaluate(&crate::linalg::add(x, &fac.shift));
            }
            v
        })
    }
}
