//! Functions sampled on a regular lattice with multilinear interpolation.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Point;

/// Lattice geometry; values are stored separately, last axis fastest.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeHeader {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub spacing: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    dim: usize,
    origin: Point,
    spacing: Point,
    counts: [usize; 3],
    values: Vec<f64>,
    max_value: f64,
}

impl Lattice {
    pub fn new(header: &LatticeHeader, values: Vec<f64>) -> Result<Self> {
        let dim = header.dim;
        if !(1..=3).contains(&dim)
            || header.origin.len() != dim
            || header.spacing.len() != dim
            || header.counts.len() != dim
        {
            return Err(Error::Parse("lattice header lengths must equal dim (1 to 3)".into()));
        }
        let mut origin = [0.0; 3];
        let mut spacing = [1.0; 3];
        let mut counts = [1usize; 3];
        for k in 0..dim {
            if !(header.spacing[k] > 0.0) || header.counts[k] < 2 {
                return Err(Error::Parse("lattice needs positive spacing and 2+ points per axis".into()));
            }
            origin[k] = header.origin[k];
            spacing[k] = header.spacing[k];
            counts[k] = header.counts[k];
        }
        let total: usize = counts.iter().product();
        if values.len() != total {
            return Err(Error::DimensionMismatch { expected: total, found: values.len() });
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Domain("lattice values must be finite and nonnegative".into()));
        }
        let max_value = values.iter().copied().fold(0.0, f64::max);
        Ok(Self { dim, origin, spacing, counts, values, max_value })
    }

    /// Samples `f` on the lattice spanned by `lo`, `hi` with `counts` points per axis.
    pub fn from_fn(dim: usize, lo: &Point, hi: &Point, counts: usize, f: impl Fn(&Point) -> f64) -> Result<Self> {
        let mut header = LatticeHeader { dim, origin: vec![], spacing: vec![], counts: vec![] };
        for k in 0..dim {
            header.origin.push(lo[k]);
            header.spacing.push((hi[k] - lo[k]) / (counts - 1) as f64);
            header.counts.push(counts);
        }
        let mut lat = Self::new(&header, vec![0.0; counts.pow(dim as u32)])?;
        let values: Vec<f64> = (0..lat.values.len()).map(|i| f(&lat.point(i)).max(0.0)).collect();
        lat.max_value = values.iter().copied().fold(0.0, f64::max);
        lat.values = values;
        Ok(lat)
    }

    pub fn header(&self) -> LatticeHeader {
        LatticeHeader {
            dim: self.dim,
            origin: self.origin[..self.dim].to_vec(),
            spacing: self.spacing[..self.dim].to_vec(),
            counts: self.counts[..self.dim].to_vec(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.max_value
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing[..self.dim].iter().product()
    }

    pub fn bounds(&self) -> [(f64, f64); 3] {
        let mut b = [(0.0, 0.0); 3];
        for (k, o) in b.iter_mut().enumerate().take(self.dim) {
            *o = (self.origin[k], self.origin[k] + self.spacing[k] * (self.counts[k] - 1) as f64);
        }
        b
    }

    fn index(&self, i: [usize; 3]) -> usize {
        (i[0] * self.counts[1] + i[1]) * self.counts[2] + i[2]
    }

    pub fn point(&self, idx: usize) -> Point {
        let i2 = idx % self.counts[2];
        let i1 = (idx / self.counts[2]) % self.counts[1];
        let i0 = idx / (self.counts[2] * self.counts[1]);
        let mut p = [0.0; 3];
        for (k, i) in [i0, i1, i2].into_iter().enumerate().take(self.dim) {
            p[k] = self.origin[k] + self.spacing[k] * i as f64;
        }
        p
    }

    /// Lattice coordinates along `axis`.
    pub fn axis_coords(&self, axis: usize) -> Vec<f64> {
        (0..self.counts[axis]).map(|i| self.origin[axis] + self.spacing[axis] * i as f64).collect()
    }

    /// Multilinear interpolation; zero outside the lattice box.
    pub fn evaluate(&self, x: &Point) -> f64 {
        let mut base = [0usize; 3];
        let mut frac = [0.0; 3];
        for k in 0..self.dim {
            let s = (x[k] - self.origin[k]) / self.spacing[k];
            let last = (self.counts[k] - 1) as f64;
            if !(s >= 0.0 && s <= last) {
                return 0.0;
            }
            let i = (s.floor() as usize).min(self.counts[k] - 2);
            base[k] = i;
            frac[k] = s - i as f64;
        }
        let mut acc = 0.0;
        for corner in 0..(1usize << self.dim) {
            let mut w = 1.0;
            let mut idx = base;
            for k in 0..self.dim {
                if corner >> k & 1 == 1 {
                    w *= frac[k];
                    idx[k] += 1;
                } else {
                    w *= 1.0 - frac[k];
                }
            }
            if w != 0.0 {
                acc += w * self.values[self.index(idx)];
            }
        }
        acc
    }

    /// Cells as (lower corner index, integral over the cell).
    pub(crate) fn cells(&self) -> Vec<([usize; 3], f64)> {
        let mut out = Vec::new();
        let ranges: Vec<usize> = (0..3).map(|k| if k < self.dim { self.counts[k] - 1 } else { 1 }).collect();
        let cv = self.cell_volume();
        for i0 in 0..ranges[0] {
            for i1 in 0..ranges[1] {
                for i2 in 0..ranges[2] {
                    let base = [i0, i1, i2];
                    let mut sum = 0.0;
                    for corner in 0..(1usize << self.dim) {
                        let mut idx = base;
                        for (k, ix) in idx.iter_mut().enumerate().take(self.dim) {
                            *ix += corner >> k & 1;
                        }
                        sum += self.values[self.index(idx)];
                    }
                    out.push((base, sum / (1usize << self.dim) as f64 * cv));
                }
            }
        }
        out
    }

    pub(crate) fn cell_origin(&self, base: [usize; 3]) -> Point {
        let mut p = [0.0; 3];
        for k in 0..self.dim {
            p[k] = self.origin[k] + self.spacing[k] * base[k] as f64;
        }
        p
    }

    pub(crate) fn spacing(&self) -> Point {
        self.spacing
    }

    /// Writes one CSV row per lattice point: coordinates then value.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut head: Vec<String> = (0..self.dim).map(|k| format!("x{k}")).collect();
        head.push("value".into());
        wr.write_record(&head)?;
        for (i, v) in self.values.iter().enumerate() {
            let p = self.point(i);
            let mut row: Vec<String> = p[..self.dim].iter().map(|c| format!("{c:.17e}")).collect();
            row.push(format!("{v:.17e}"));
            wr.write_record(&row)?;
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads values written by [`Lattice::write_csv`], checking coordinates
    /// against the header.
    pub fn read_csv<R: Read>(header: &LatticeHeader, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let mut values = Vec::new();
        let mut coords = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            if rec.len() != header.dim + 1 {
                return Err(Error::Parse(format!("expected {} columns", header.dim + 1)));
            }
            let nums: Vec<f64> = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(e.to_string())))
                .collect::<Result<_>>()?;
            coords.push(nums[..header.dim].to_vec());
            values.push(nums[header.dim]);
        }
        let lat = Self::new(header, values)?;
        for (i, c) in coords.iter().enumerate() {
            let p = lat.point(i);
            let scale: f64 = header.spacing.iter().copied().fold(0.0, f64::max);
            if c.iter().zip(&p).any(|(a, b)| (a - b).abs() > 1e-9 * scale.max(1.0)) {
                return Err(Error::Parse(format!("row {i} coordinates do not match the lattice")));
            }
        }
        Ok(lat)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn multilinear_is_exact_on_bilinear_data() {
        let lat = Lattice::from_fn(2, &[0.0, -1.0, 0.0], &[2.0, 1.0, 0.0], 5, |p| {
            1.0 + p[0] + 2.0 * p[1] + p[0] * p[1] + 3.0
        })
        .unwrap();
        let x = [0.37, 0.21, 0.0];
        let want = 1.0 + x[0] + 2.0 * x[1] + x[0] * x[1] + 3.0;
        assert!((lat.evaluate(&x) - want).abs() < 1e-13);
        assert_eq!(lat.evaluate(&[2.5, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn csv_round_trip() {
        let lat = Lattice::from_fn(2, &[0.0; 3], &[1.0, 1.0, 0.0], 4, |p| p[0] + p[1]).unwrap();
        let mut buf = Vec::new();
        lat.write_csv(&mut buf).unwrap();
        let back = Lattice::read_csv(&lat.header(), buf.as_slice()).unwrap();
        assert_eq!(back, lat);
        let bad = LatticeHeader { spacing: vec![0.5, 0.5], ..lat.header() };
        assert!(Lattice::read_csv(&bad, buf.as_slice()).is_err());
    }
}
