//! Star bodies, radial and gauge functions, volumes and dual mixed volumes.

mod shape;
pub mod sphere;

use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{check_dim, domain, Error, Result};
use crate::linalg::{dot, norm, sub, Matrix, Point, MAX_DIM};
use crate::quad::Estimate;
use crate::report::{ChainReport, Direction};
use crate::specialfns::{ln_unit_ball_volume, unit_ball_volume};

pub(crate) use shape::{Feature, Shape};
pub use sphere::{GridDoc, SphereGrid};

use shape::{Polytope, Quadric, Sampled};

/// Relative spread of ρ_K/ρ_L below which two bodies count as dilates.
pub const DILATE_SPREAD: f64 = 1e-6;

#[derive(Clone, Debug)]
pub enum BodyKind {
    Ball {
        radius: f64,
    },
    /// {x : xᵀA⁻¹x ≤ 1}
    Ellipsoid {
        shape: Matrix,
    },
    /// convex hull of n+1 vertices, origin in the closure
    SimplexGauge {
        vertices: Vec<Point>,
    },
    /// {x : Σ|x_i| ≤ scale}
    CrossPolytope {
        scale: f64,
    },
    /// {x : max |x_i| ≤ half_width}
    Cube {
        half_width: f64,
    },
    LinearImage {
        map: Matrix,
        inner: Box<StarBody>,
    },
    Sampled {
        grid: Arc<SphereGrid>,
        values: Arc<Vec<f64>>,
    },
}

/// A star-shaped set given by its radial function.
#[derive(Clone, Debug)]
pub struct StarBody {
    dim: usize,
    kind: BodyKind,
    shape: Arc<Shape>,
}

fn check_body_dim(dim: usize) -> Result<()> {
    if (1..=MAX_DIM).contains(&dim) {
        Ok(())
    } else {
        domain(format!("dimension must be 1, 2 or 3, got {dim}"))
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        domain(format!("{name} must be positive and finite, got {v}"))
    }
}

fn sign_vectors(dim: usize) -> Vec<Point> {
    (0..1usize << dim)
        .map(|mask| {
            let mut p = [0.0; 3];
            for (i, c) in p.iter_mut().enumerate().take(dim) {
                *c = if mask >> i & 1 == 1 { -1.0 } else { 1.0 };
            }
            p
        })
        .collect()
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

impl StarBody {
    pub fn ball(dim: usize, radius: f64) -> Result<Self> {
        check_body_dim(dim)?;
        positive("radius", radius)?;
        let q = Matrix::scalar(dim, 1.0 / (radius * radius));
        let cov = Matrix::scalar(dim, radius * radius);
        Ok(Self { dim, kind: BodyKind::Ball { radius }, shape: Arc::new(Shape::Quadric(Quadric { q, cov })) })
    }

    /// Ellipsoid {x : xᵀA⁻¹x ≤ 1} for a symmetric positive definite A.
    pub fn ellipsoid(dim: usize, a: Matrix) -> Result<Self> {
        check_body_dim(dim)?;
        if !a.is_padded(dim) || !a.is_symmetric(1e-12 * a.0.iter().flatten().fold(1.0, |m: f64, v| m.max(v.abs()))) {
            return domain("ellipsoid shape matrix must be symmetric");
        }
        if !a.is_positive_definite() {
            return domain("ellipsoid shape matrix must be positive definite");
        }
        let q = a.inverse()?;
        Ok(Self { dim, kind: BodyKind::Ellipsoid { shape: a }, shape: Arc::new(Shape::Quadric(Quadric { q, cov: a })) })
    }

    pub fn cross_polytope(dim: usize, scale: f64) -> Result<Self> {
        check_body_dim(dim)?;
        positive("scale", scale)?;
        let facets = sign_vectors(dim).iter().map(|s| crate::linalg::scale(s, 1.0 / scale)).collect();
        let mut vertices = Vec::new();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut v = [0.0; 3];
                v[i] = s * scale;
                vertices.push(v);
            }
        }
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                // vertices 2k and 2k+1 are antipodal
                if i / 2 != j / 2 {
                    edges.push((i, j));
                }
            }
        }
        let poly = Polytope { facets, cones: vec![], vertices, edges };
        Ok(Self { dim, kind: BodyKind::CrossPolytope { scale }, shape: Arc::new(Shape::Polytope(poly)) })
    }

    pub fn cube(dim: usize, half_width: f64) -> Result<Self> {
        check_body_dim(dim)?;
        positive("half width", half_width)?;
        let mut facets = Vec::new();
        for i in 0..dim {
            for s in [1.0, -1.0] {
                let mut a = [0.0; 3];
                a[i] = s / half_width;
                facets.push(a);
            }
        }
        let vertices: Vec<Point> = sign_vectors(dim).iter().map(|s| crate::linalg::scale(s, half_width)).collect();
        let mut edges = Vec::new();
        for i in 0..vertices.len() {
            for j in i + 1..vertices.len() {
                if (i ^ j).count_ones() == 1 {
                    edges.push((i, j));
                }
            }
        }
        let poly = Polytope { facets, cones: vec![], vertices, edges };
        Ok(Self { dim, kind: BodyKind::Cube { half_width }, shape: Arc::new(Shape::Polytope(poly)) })
    }

    /// Convex hull of n+1 affinely independent vertices. The origin must lie
    /// in the closure; when it is on the boundary the radial function
    /// vanishes outside the tangent cone.
    pub fn simplex(dim: usize, vertices: &[Point]) -> Result<Self> {
        check_body_dim(dim)?;
        if vertices.len() != dim + 1 {
            return domain(format!("a simplex in R^{dim} needs {} vertices", dim + 1));
        }
        let base = vertices[0];
        let edge_mat = {
            let mut m = Matrix::IDENTITY;
            for (j, v) in vertices[1..].iter().enumerate() {
                let e = sub(v, &base);
                for i in 0..dim {
                    m.0[i][j] = e[i];
                }
            }
            m
        };
        let scale = vertices.iter().map(norm).fold(0.0, f64::max).max(1e-300);
        if edge_mat.det().abs() <= 1e-12 * scale.powi(dim as i32) {
            return domain("simplex vertices are affinely dependent");
        }
        let mut facets = Vec::new();
        let mut cones = Vec::new();
        for omit in 0..=dim {
            let pts: Vec<Point> = vertices.iter().enumerate().filter(|(i, _)| *i != omit).map(|(_, v)| *v).collect();
            let mut a = match dim {
                1 => [1.0, 0.0, 0.0],
                2 => {
                    let e = sub(&pts[1], &pts[0]);
                    [-e[1], e[0], 0.0]
                }
                _ => crate::linalg::cross(&sub(&pts[1], &pts[0]), &sub(&pts[2], &pts[0])),
            };
            let mut b = dot(&a, &pts[0]);
            if dot(&a, &vertices[omit]) > b {
                a = crate::linalg::scale(&a, -1.0);
                b = -b;
            }
            let tol = 1e-12 * norm(&a) * scale;
            if b > tol {
                facets.push(crate::linalg::scale(&a, 1.0 / b));
            } else if b >= -tol {
                cones.push(a);
            } else {
                return domain("the origin must lie in the closed simplex");
            }
        }
        let mut edges = Vec::new();
        for i in 0..=dim {
            for j in i + 1..=dim {
                edges.push((i, j));
            }
        }
        let poly = Polytope { facets, cones, vertices: vertices.to_vec(), edges };
        Ok(Self {
            dim,
            kind: BodyKind::SimplexGauge { vertices: vertices.to_vec() },
            shape: Arc::new(Shape::Polytope(poly)),
        })
    }

    /// conv{0, e_1, ..., e_n}, the gauge body of the simplex-exponential family.
    pub fn standard_simplex(dim: usize) -> Result<Self> {
        let mut v = vec![[0.0; 3]];
        for i in 0..dim {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            v.push(e);
        }
        Self::simplex(dim, &v)
    }

    /// The image M K.
    pub fn linear_image(map: Matrix, inner: StarBody) -> Result<Self> {
        let dim = inner.dim;
        if !map.is_padded(dim) {
            return domain("map has entries outside the body's dimension");
        }
        let inv = map.inverse()?;
        let shape = inner.shape.map(&map, &inv);
        Ok(Self { dim, kind: BodyKind::LinearImage { map, inner: Box::new(inner) }, shape: Arc::new(shape) })
    }

    /// Star body with radial function interpolated from node values.
    pub fn sampled(grid: Arc<SphereGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch { expected: grid.len(), found: values.len() });
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return domain(format!("radial values must be positive and finite, found {v}"));
        }
        let max_value = values.iter().copied().fold(0.0, f64::max);
        let values = Arc::new(values);
        let shape = Shape::Sampled(Sampled {
            inv: Matrix::IDENTITY,
            map: Matrix::IDENTITY,
            grid: grid.clone(),
            values: values.clone(),
            max_value,
        });
        Ok(Self { dim: grid.dim(), kind: BodyKind::Sampled { grid, values }, shape: Arc::new(shape) })
    }

    /// Samples `radial` on `grid`.
    pub fn sample(&self, grid: Arc<SphereGrid>) -> Result<Self> {
        check_dim(self.dim, grid.dim())?;
        let values = grid.nodes().iter().map(|u| self.radial_unit(u)).collect();
        Self::sampled(grid, values)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub(crate) fn shape(&self) -> &Shape {
        &self.shape
    }

    /// ‖x‖_K = inf{λ > 0 : x ∈ λK}; zero at the origin, infinite outside
    /// the cone spanned by K.
    pub fn gauge(&self, x: &Point) -> f64 {
        self.shape.gauge(x)
    }

    fn radial_unit(&self, u: &Point) -> f64 {
        if let BodyKind::Ball { radius } = &self.kind {
            return *radius;
        }
        let g = self.shape.gauge(u);
        if g == f64::INFINITY {
            0.0
        } else {
            1.0 / g
        }
    }

    /// ρ_K(ξ) for a nonzero direction ξ (normalised internally).
    pub fn radial(&self, xi: &Point) -> Result<f64> {
        let r = norm(xi);
        if !(r > 0.0) || !r.is_finite() {
            return domain("radial function needs a nonzero direction");
        }
        Ok(self.radial_unit(&crate::linalg::scale(xi, 1.0 / r)))
    }

    pub fn contains(&self, x: &Point) -> bool {
        self.gauge(x) <= 1.0
    }

    /// Closed-form volume when one is known.
    pub fn volume_exact(&self) -> Option<f64> {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => Some(unit_ball_volume(n).ok()? * radius.powi(n as i32)),
            BodyKind::Ellipsoid { shape } => Some(unit_ball_volume(n).ok()? * shape.det().sqrt()),
            BodyKind::CrossPolytope { scale } => Some((2.0 * scale).powi(n as i32) / factorial(n)),
            BodyKind::Cube { half_width } => Some((2.0 * half_width).powi(n as i32)),
            BodyKind::SimplexGauge { vertices } => {
                let mut m = Matrix::IDENTITY;
                for (j, v) in vertices[1..].iter().enumerate() {
                    let e = sub(v, &vertices[0]);
                    for i in 0..n {
                        m.0[i][j] = e[i];
                    }
                }
                Some(m.det().abs() / factorial(n))
            }
            BodyKind::LinearImage { map, inner } => Some(map.det().abs() * inner.volume_exact()?),
            BodyKind::Sampled { .. } => None,
        }
    }

    /// Bounding box of the body.
    pub fn bounds(&self) -> [(f64, f64); 3] {
        self.shape.bounds(1.0)
    }

    pub fn describe(&self) -> Value {
        match &self.kind {
            BodyKind::Ball { radius } => json!({"kind": "ball", "dim": self.dim, "radius": radius}),
            BodyKind::Ellipsoid { shape } => {
                json!({"kind": "ellipsoid", "dim": self.dim, "shape": shape.rows(self.dim)})
            }
            BodyKind::SimplexGauge { vertices } => json!({
                "kind": "simplex",
                "dim": self.dim,
                "vertices": vertices.iter().map(|v| v[..self.dim].to_vec()).collect::<Vec<_>>()
            }),
            BodyKind::CrossPolytope { scale } => {
                json!({"kind": "cross_polytope", "dim": self.dim, "scale": scale})
            }
            BodyKind::Cube { half_width } => {
                json!({"kind": "cube", "dim": self.dim, "half_width": half_width})
            }
            BodyKind::LinearImage { map, inner } => json!({
                "kind": "linear_image",
                "dim": self.dim,
                "map": map.rows(self.dim),
                "inner": inner.describe()
            }),
            BodyKind::Sampled { grid, .. } => json!({
                "kind": "sampled",
                "dim": self.dim,
                "resolution": grid.resolution(),
                "nodes": grid.len()
            }),
        }
    }

    /// JSON document {dim, nodes, weights, values} of a sampled body.
    pub fn to_doc(&self) -> Option<GridDoc> {
        match &self.kind {
            BodyKind::Sampled { grid, values } => Some(grid.to_doc(Some(values))),
            _ => None,
        }
    }

    pub fn from_doc(doc: &GridDoc) -> Result<Self> {
        let grid = SphereGrid::from_doc(doc)?;
        let values = doc.values.clone().ok_or_else(|| Error::Parse("body document has no values".into()))?;
        Self::sampled(Arc::new(grid), values)
    }
}

pub fn radial(body: &StarBody, xi: &Point) -> Result<f64> {
    body.radial(xi)
}

pub fn gauge(body: &StarBody, x: &Point) -> f64 {
    body.gauge(x)
}

pub fn linear_image(map: Matrix, body: &StarBody) -> Result<StarBody> {
    StarBody::linear_image(map, body.clone())
}

/// (1/n) Σ w_j ρ(ξ_j)^n.
pub fn volume_quadrature(body: &StarBody, grid: &SphereGrid) -> Result<f64> {
    check_dim(body.dim, grid.dim())?;
    let n = body.dim as i32;
    Ok(grid.integrate(|u| body.radial_unit(u).powi(n)) / n as f64)
}

/// Volume: closed form when available, otherwise sphere quadrature.
pub fn volume(body: &StarBody, grid: &SphereGrid) -> Result<f64> {
    check_dim(body.dim, grid.dim())?;
    match body.volume_exact() {
        Some(v) => Ok(v),
        None => volume_quadrature(body, grid),
    }
}

/// ρ_K^{n-α} ρ_L^α evaluated in log space.
fn mixed_power(rk: f64, rl: f64, n: f64, alpha: f64) -> f64 {
    let e1 = n - alpha;
    let t1 = if rk == 0.0 {
        if e1 > 0.0 {
            return 0.0;
        } else if e1 < 0.0 {
            f64::INFINITY
        } else {
            0.0
        }
    } else {
        e1 * rk.ln()
    };
    let t2 = if rl == 0.0 {
        if alpha > 0.0 {
            return 0.0;
        } else {
            f64::INFINITY
        }
    } else {
        alpha * rl.ln()
    };
    (t1 + t2).exp()
}

/// Ṽ_α(K, L) = (1/n) Σ w_j ρ_K^{n-α} ρ_L^α.
pub fn dual_mixed_volume(k: &StarBody, l: &StarBody, alpha: f64, grid: &SphereGrid) -> Result<f64> {
    check_dim(k.dim, l.dim)?;
    check_dim(k.dim, grid.dim())?;
    let n = k.dim as f64;
    Ok(grid.integrate(|u| mixed_power(k.radial_unit(u), l.radial_unit(u), n, alpha)) / n)
}

/// Centred ball with the volume of `body`.
pub fn schwarz_symmetral(body: &StarBody, grid: &SphereGrid) -> Result<StarBody> {
    let v = volume(body, grid)?;
    if !v.is_finite() {
        return domain("symmetral needs finite volume");
    }
    let n = body.dim;
    let r = ((v.ln() - ln_unit_ball_volume(n)?) / n as f64).exp();
    StarBody::ball(n, r)
}

/// Relative spread of ρ_K/ρ_L over the grid nodes.
pub fn dilate_spread(k: &StarBody, l: &StarBody, grid: &SphereGrid) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for u in grid.nodes() {
        let r = k.radial_unit(u) / l.radial_unit(u);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if lo > 0.0 && hi.is_finite() {
        (hi - lo) / lo
    } else {
        f64::INFINITY
    }
}

/// Dual mixed volume inequality Ṽ_α(K,L) ≤ |K|^{(n-α)/n}|L|^{α/n} for
/// 0 < α < n, reversed for α > n. Both sides use the same quadrature, so the
/// discrete Hölder inequality holds exactly and dilates give equality up to
/// roundoff.
pub fn check_dual_mixed_inequality(k: &StarBody, l: &StarBody, alpha: f64, grid: &SphereGrid) -> Result<ChainReport> {
    check_dim(k.dim, l.dim)?;
    let n = k.dim as f64;
    if !(alpha > 0.0) || alpha == n {
        return domain(format!("alpha must be positive and different from n, got {alpha}"));
    }
    let v = dual_mixed_volume(k, l, alpha, grid)?;
    let vk = volume_quadrature(k, grid)?;
    let vl = volume_quadrature(l, grid)?;
    let rhs = (((n - alpha) * vk.ln() + alpha * vl.ln()) / n).exp();
    let roundoff = |x: f64| x.abs() * 1e-12;
    let mut report = ChainReport::new("dual-mixed").with_tolerances(1e-12, 1e-8);
    let a = report.term("dual mixed volume", Estimate::new(v, roundoff(v)));
    let b = report.term("volume product", Estimate::new(rhs, roundoff(rhs)));
    let dir = if alpha < n { Direction::Le } else { Direction::Ge };
    report.require(a, dir, b);
    let spread = dilate_spread(k, l, grid);
    report.meta("alpha", alpha);
    report.meta("n", k.dim);
    report.meta("dilates", spread < DILATE_SPREAD);
    report.meta("ratio_spread", spread);
    report.meta("K", k.describe());
    report.meta("L", l.describe());
    report.meta("grid_resolution", grid.resolution());
    Ok(report)
}
