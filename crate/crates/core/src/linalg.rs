//! Small fixed-size vectors and matrices for dimensions 1 to 3.
//!
//! Points always carry three coordinates; unused ones are zero. Matrices are
//! padded with the identity, so determinants and inverses of the padded
//! matrix agree with those of the leading n×n block.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

pub type Point = [f64; 3];

pub const ORIGIN: Point = [0.0; 3];

pub fn point(coords: &[f64]) -> Result<Point> {
    if coords.is_empty() || coords.len() > MAX_DIM {
        return Err(Error::Domain(format!("points need 1 to 3 coordinates, got {}", coords.len())));
    }
    let mut p = ORIGIN;
    p[..coords.len()].copy_from_slice(coords);
    Ok(p)
}

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn norm(a: &Point) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn add(a: &Point, b: &Point) -> Point {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Point, s: f64) -> Point {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// a + s b
#[inline]
pub fn axpy(a: &Point, s: f64, b: &Point) -> Point {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

pub fn cross(a: &Point, b: &Point) -> Point {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix(pub [[f64; 3]; 3]);

impl Matrix {
    pub const IDENTITY: Matrix = Matrix([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);

    /// Builds a padded matrix from `rows`, which must be square of size 1 to 3.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix must be square with size 1 to 3".into()));
        }
        let mut m = Self::IDENTITY;
        for (i, row) in rows.iter().enumerate() {
            m.0[i][..n].copy_from_slice(row);
        }
        Ok(m)
    }

    pub fn diagonal(d: &[f64]) -> Self {
        let mut m = Self::IDENTITY;
        for (i, v) in d.iter().enumerate().take(MAX_DIM) {
            m.0[i][i] = *v;
        }
        m
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        Self::diagonal(&vec![s; dim])
    }

    pub fn rows(&self, dim: usize) -> Vec<Vec<f64>> {
        (0..dim).map(|i| self.0[i][..dim].to_vec()).collect()
    }

    /// True when the entries outside the leading block are the identity padding.
    pub fn is_padded(&self, dim: usize) -> bool {
        (0..MAX_DIM).all(|i| (0..MAX_DIM).all(|j| i < dim && j < dim || self.0[i][j] == if i == j { 1.0 } else { 0.0 }))
    }

    #[inline]
    pub fn apply(&self, x: &Point) -> Point {
        let m = &self.0;
        [
            m[0][0] * x[0] + m[0][1] * x[1] + m[0][2] * x[2],
            m[1][0] * x[0] + m[1][1] * x[1] + m[1][2] * x[2],
            m[2][0] * x[0] + m[2][1] * x[1] + m[2][2] * x[2],
        ]
    }

    pub fn transpose(&self) -> Self {
        let mut t = *self;
        for i in 0..3 {
            for j in 0..3 {
                t.0[i][j] = self.0[j][i];
            }
        }
        t
    }

    pub fn mul(&self, other: &Matrix) -> Self {
        let mut out = [[0.0; 3]; 3];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..3).map(|k| self.0[i][k] * other.0[k][j]).sum();
            }
        }
        Matrix(out)
    }

    pub fn add(&self, other: &Matrix) -> Self {
        let mut out = self.0;
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += other.0[i][j];
            }
        }
        Matrix(out)
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        let scale = self.0.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
        if !d.is_finite() || d.abs() <= 1e-14 * scale.powi(3).max(f64::MIN_POSITIVE) {
            return Err(Error::SingularMatrix);
        }
        let m = &self.0;
        let mut inv = [[0.0; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                // cofactor of m[j][i]
                let (r0, r1) = others(j);
                let (c0, c1) = others(i);
                let minor = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
                *v = sign * minor / d;
            }
        }
        Ok(Matrix(inv))
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        (0..3).all(|i| (0..3).all(|j| (self.0[i][j] - self.0[j][i]).abs() <= tol))
    }

    /// Positive definiteness of the leading block via leading minors.
    pub fn is_positive_definite(&self) -> bool {
        let m = &self.0;
        let d1 = m[0][0];
        let d2 = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        d1 > 0.0 && d2 > 0.0 && self.det() > 0.0
    }

    /// xᵀ M x
    #[inline]
    pub fn quadratic_form(&self, x: &Point) -> f64 {
        dot(x, &self.apply(x))
    }
}

fn others(i: usize) -> (usize, usize) {
    match i {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trip() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.5], vec![0.0, 3.0, -1.0], vec![1.0, 0.0, 1.5]]).unwrap();
        let p = m.mul(&m.inverse().unwrap());
        for i in 0..3 {
            for j in 0..3 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((p.0[i][j] - e).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn padded_block_determinant() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(m.det(), 5.0);
        assert!(m.is_padded(2));
        assert!(m.inverse().unwrap().is_padded(2));
        assert!(Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap().inverse().is_err());
    }
}
