#![allow(dead_code)]

use affine_hls::geometry::StarBody;
use affine_hls::linalg::{Matrix, Point, ORIGIN};
use rand::Rng;

/// Random invertible map with singular values in [0.5, 2].
pub fn random_map<R: Rng>(n: usize, rng: &mut R) -> Matrix {
    loop {
        let mut m = Matrix::IDENTITY;
        for i in 0..n {
            for j in 0..n {
                m.0[i][j] = if i == j { rng.random_range(0.7..1.6) } else { rng.random_range(-0.5..0.5) };
            }
        }
        if m.det().abs() > 0.2 {
            return m;
        }
    }
}

/// A ball, ellipsoid, cross-polytope, cube or linear image of one of them.
pub fn random_body<R: Rng>(n: usize, rng: &mut R) -> StarBody {
    let s = rng.random_range(0.5..2.0);
    match rng.random_range(0..5) {
        0 => StarBody::ball(n, s).unwrap(),
        1 => {
            let m = random_map(n, rng);
            StarBody::ellipsoid(n, m.mul(&m.transpose())).unwrap()
        }
        2 => StarBody::cross_polytope(n, s).unwrap(),
        3 => StarBody::cube(n, s).unwrap(),
        _ => StarBody::linear_image(random_map(n, rng), StarBody::cross_polytope(n, s).unwrap()).unwrap(),
    }
}

pub fn random_point<R: Rng>(n: usize, radius: f64, rng: &mut R) -> Point {
    let mut p = ORIGIN;
    for v in p.iter_mut().take(n) {
        *v = rng.random_range(-radius..radius);
    }
    p
}
