//! Seeded samplers: uniform points in bodies and boxes, and points drawn
//! with density proportional to a test function.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

use crate::error::{domain, Result};
use crate::geometry::StarBody;
use crate::linalg::{add, norm, scale, Matrix, Point, ORIGIN};

use super::{Family, Lattice, TestFunction};

/// Generator for sub-stream `stream` of `seed`.
pub(crate) fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub(crate) fn uniform_direction<R: Rng>(dim: usize, rng: &mut R) -> Point {
    loop {
        let mut p = ORIGIN;
        for v in p.iter_mut().take(dim) {
            *v = rng.sample(StandardNormal);
        }
        let r = norm(&p);
        if r > 1e-300 {
            return scale(&p, 1.0 / r);
        }
    }
}

pub(crate) fn uniform_in_box<R: Rng>(dim: usize, b: &[(f64, f64); 3], rng: &mut R) -> Point {
    let mut p = ORIGIN;
    for k in 0..dim {
        p[k] = b[k].0 + (b[k].1 - b[k].0) * rng.random::<f64>();
    }
    p
}

/// Uniform point in a body, by rejection from its bounding box.
pub(crate) fn uniform_in_body<R: Rng>(body: &StarBody, rng: &mut R) -> Point {
    let b = body.bounds();
    loop {
        let p = uniform_in_box(body.dim(), &b, rng);
        if body.gauge(&p) <= 1.0 {
            return p;
        }
    }
}

enum Kind {
    /// x = c + r U, U uniform in the body, r from the radial law.
    Gauge {
        radial: Radial,
    },
    Uniform,
    Hls {
        beta: Beta<f64>,
        inv: Matrix,
        b: f64,
    },
    Gaussian {
        chol: Matrix,
    },
    Grid {
        cells: Vec<[usize; 3]>,
        index: WeightedAliasIndex<f64>,
    },
}

enum Radial {
    Gamma(Gamma<f64>),
    Beta(Beta<f64>),
}

/// Draws points with density proportional to f.
pub(crate) struct DensitySampler<'a> {
    f: &'a TestFunction,
    kind: Kind,
}

fn cholesky(m: &Matrix, dim: usize) -> Result<Matrix> {
    let mut l = Matrix([[0.0; 3]; 3]);
    for i in 0..dim {
        for j in 0..=i {
            let mut s = m.0[i][j];
            for k in 0..j {
                s -= l.0[i][k] * l.0[j][k];
            }
            if i == j {
                if !(s > 0.0) {
                    return domain("matrix is not positive definite");
                }
                l.0[i][i] = s.sqrt();
            } else {
                l.0[i][j] = s / l.0[j][j];
            }
        }
    }
    Ok(l)
}

impl<'a> DensitySampler<'a> {
    pub fn new(f: &'a TestFunction) -> Result<Self> {
        let n = f.dim() as f64;
        let kind = match f.family() {
            Family::SimplexExponential { .. } => {
                Kind::Gauge { radial: Radial::Gamma(Gamma::new(n + 1.0, 1.0).expect("valid shape")) }
            }
            Family::SConcavePeak { s, .. } => Kind::Gauge {
                radial: Radial::Beta(Beta::new(n + 1.0, 1.0 / s).map_err(|e| crate::Error::Domain(e.to_string()))?),
            },
            Family::Indicator { .. } => Kind::Uniform,
            Family::HlsExtremal { b, map, alpha, .. } => Kind::Hls {
                beta: Beta::new(n / 2.0, alpha / 2.0).map_err(|e| crate::Error::Domain(e.to_string()))?,
                inv: map.inverse()?,
                b: *b,
            },
            Family::Gaussian { covariance, .. } => Kind::Gaussian { chol: cholesky(covariance, f.dim())? },
            Family::GridSampled(l) => {
                let (cells, w): (Vec<_>, Vec<_>) = l.cells().into_iter().filter(|c| c.1 > 0.0).unzip();
                if cells.is_empty() {
                    return domain("cannot sample from a zero function");
                }
                let index = WeightedAliasIndex::new(w).map_err(|e| crate::Error::Domain(e.to_string()))?;
                Kind::Grid { cells, index }
            }
        };
        if f.max_value() == 0.0 {
            return domain("cannot sample from a zero function");
        }
        Ok(Self { f, kind })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Point {
        let dim = self.f.dim();
        let c = self.f.center();
        match (&self.kind, self.f.family()) {
            (Kind::Gauge { radial }, Family::SimplexExponential { body, .. } | Family::SConcavePeak { body, .. }) => {
                let r = match radial {
                    Radial::Gamma(g) => g.sample(rng),
                    Radial::Beta(b) => b.sample(rng),
                };
                add(&c, &scale(&uniform_in_body(body, rng), r))
            }
            (Kind::Uniform, Family::Indicator { body, .. }) => add(&c, &uniform_in_body(body, rng)),
            (Kind::Hls { beta, inv, b }, _) => {
                let u: f64 = beta.sample(rng);
                let rho = b.abs() * (u / (1.0 - u)).sqrt();
                let w = scale(&uniform_direction(dim, rng), rho);
                add(&c, &inv.apply(&w))
            }
            (Kind::Gaussian { chol }, _) => {
                let mut z = ORIGIN;
                for v in z.iter_mut().take(dim) {
                    *v = rng.sample(StandardNormal);
                }
                add(&c, &chol.apply(&z))
            }
            (Kind::Grid { cells, index }, Family::GridSampled(l)) => sample_cell(l, cells[index.sample(rng)], rng),
            _ => unreachable!("sampler kind matches its family"),
        }
    }
}

fn sample_cell<R: Rng>(l: &Lattice, base: [usize; 3], rng: &mut R) -> Point {
    let dim = l.dim();
    let o = l.cell_origin(base);
    let h = l.spacing();
    let mut b = [(0.0, 0.0); 3];
    for k in 0..dim {
        b[k] = (o[k], o[k] + h[k]);
    }
    let mut top: f64 = 0.0;
    for corner in 0..(1usize << dim) {
        let mut p = o;
        for k in 0..dim {
            if corner >> k & 1 == 1 {
                p[k] = b[k].1;
            }
        }
        top = top.max(l.evaluate(&p));
    }
    loop {
        let p = uniform_in_box(dim, &b, rng);
        if rng.random::<f64>() * top <= l.evaluate(&p) {
            return p;
        }
    }
}
