//! One-dimensional quadrature: Gauss-Legendre rules and a globally adaptive
//! 7/15-point Gauss-Kronrod integrator with break points and tail maps.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

/// An integral value with an error estimate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn new(value: f64, error: f64) -> Self {
        Self { value, error }
    }

    pub fn exact(value: f64) -> Self {
        Self { value, error: value.abs() * f64::EPSILON * 4.0 }
    }

    pub fn scale(self, s: f64) -> Self {
        Self { value: self.value * s, error: self.error * s.abs() }
    }

    pub fn rel_error(&self) -> f64 {
        if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.error / self.value.abs()
        }
    }

    /// Estimate of `value^e`, with first-order error propagation.
    pub fn powf(self, e: f64) -> Self {
        let v = self.value.powf(e);
        let err = if self.value == 0.0 {
            if self.error == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (v * e * self.error / self.value).abs()
        };
        Self { value: v, error: err }
    }

    /// Product of independent estimates.
    pub fn mul(self, o: Estimate) -> Self {
        let v = self.value * o.value;
        Self { value: v, error: (self.error * o.value).abs() + (o.error * self.value).abs() }
    }
}

impl Add for Estimate {
    type Output = Estimate;
    fn add(self, o: Estimate) -> Estimate {
        Estimate { value: self.value + o.value, error: self.error + o.error }
    }
}

impl AddAssign for Estimate {
    fn add_assign(&mut self, o: Estimate) {
        self.value += o.value;
        self.error += o.error;
    }
}

/// Absolute and relative tolerance plus a subdivision budget.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
    pub limit: usize,
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel, limit: 2000 }
    }

    pub fn with_limit(mut self, limit: usize) -> Self {
        self.limit = limit.max(1);
        self
    }

    pub fn tighten(self, factor: f64) -> Self {
        Self { abs: self.abs * factor, rel: self.rel * factor, limit: self.limit }
    }
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    if n <= 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    let mut abs_k = rk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk += WGK[j] * (f1 + f2);
        abs_k += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            rg += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = rk * 0.5;
    let mut asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = rk * h;
    let asc = asc * h.abs();
    let abs_k = abs_k * h.abs();
    let mut err = ((rk - rg) * h).abs();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    if abs_k > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * abs_k);
    }
    Estimate { value, error: err }
}

/// A finite interval together with the integrand to use on it.
pub struct Piece<'a> {
    pub lo: f64,
    pub hi: f64,
    pub f: &'a dyn Fn(f64) -> f64,
}

struct Cell {
    lo: f64,
    hi: f64,
    piece: usize,
    est: Estimate,
}

impl PartialEq for Cell {
    fn eq(&self, o: &Self) -> bool {
        self.est.error == o.est.error
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Cell {
    fn cmp(&self, o: &Self) -> Ordering {
        self.est.error.total_cmp(&o.est.error)
    }
}

/// Globally adaptive integration over a union of pieces. The interval with
/// the largest error is bisected until the summed error meets `tol` or the
/// subdivision budget runs out.
pub fn integrate_pieces(pieces: &[Piece<'_>], tol: Tol) -> Estimate {
    let mut heap = BinaryHeap::new();
    let mut total = Estimate::default();
    for (i, p) in pieces.iter().enumerate() {
        if p.hi > p.lo {
            let est = gk15(p.f, p.lo, p.hi);
            total += est;
            heap.push(Cell { lo: p.lo, hi: p.hi, piece: i, est });
        }
    }
    let mut splits = 0;
    while splits < tol.limit {
        if total.error <= tol.abs.max(tol.rel * total.value.abs()) || !total.error.is_finite() {
            break;
        }
        let Some(cell) = heap.pop() else { break };
        let mid = 0.5 * (cell.lo + cell.hi);
        if mid <= cell.lo || mid >= cell.hi {
            // no room left to bisect; keep it but stop refining it
            heap.push(Cell { est: Estimate { error: 0.0, ..cell.est }, ..cell });
            total.error -= cell.est.error;
            continue;
        }
        let f = pieces[cell.piece].f;
        let left = gk15(f, cell.lo, mid);
        let right = gk15(f, mid, cell.hi);
        total.value += left.value + right.value - cell.est.value;
        total.error += left.error + right.error - cell.est.error;
        heap.push(Cell { lo: cell.lo, hi: mid, piece: cell.piece, est: left });
        heap.push(Cell { lo: mid, hi: cell.hi, piece: cell.piece, est: right });
        splits += 1;
    }
    // recompute to shed accumulated cancellation in the running sums
    let mut out = Estimate::default();
    for c in heap.iter() {
        out += c.est;
    }
    out
}

fn sorted_breaks(a: f64, b: f64, breaks: &[f64]) -> Vec<f64> {
    let mut pts = vec![a];
    let span = (b - a).abs();
    let mut inner: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite() && *x > a && *x < b).collect();
    inner.sort_by(f64::total_cmp);
    for x in inner {
        if x - pts[pts.len() - 1] > 1e-13 * span.max(x.abs()) {
            pts.push(x);
        }
    }
    if b - pts[pts.len() - 1] <= 1e-13 * span.max(b.abs()) && pts.len() > 1 {
        pts.pop();
    }
    pts.push(b);
    pts
}

/// ∫_a^b f with interior break points. `panels` uniform panels are laid
/// between consecutive breaks when it exceeds one.
pub fn integrate_interval(f: &dyn Fn(f64) -> f64, a: f64, b: f64, breaks: &[f64], panels: usize, tol: Tol) -> Estimate {
    if !(b > a) {
        return Estimate::default();
    }
    let pts = sorted_breaks(a, b, breaks);
    let mut pieces = Vec::with_capacity(pts.len() * panels.max(1));
    let panels = panels.max(1);
    let width = b - a;
    for w in pts.windows(2) {
        // panels proportional to the share of the interval
        let k = ((panels as f64) * (w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / k as f64;
        for j in 0..k {
            let lo = w[0] + h * j as f64;
            let hi = if j + 1 == k { w[1] } else { lo + h };
            pieces.push(Piece { lo, hi, f });
        }
    }
    integrate_pieces(&pieces, tol)
}

/// ∫_lo^hi f where either end may be infinite. Infinite ends are mapped to
/// (0, 1] by x = a ± L(1-s)/s, starting at the outermost break (or at ±L when
/// there are none).
pub fn integrate_line(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    scale: f64,
    panels: usize,
    tol: Tol,
) -> Estimate {
    if lo.is_finite() && hi.is_finite() {
        return integrate_interval(f, lo, hi, breaks, panels, tol);
    }
    if !(hi > lo) {
        return Estimate::default();
    }
    let l = scale.abs().max(1e-300);
    let finite: Vec<f64> = breaks.iter().copied().filter(|x| x.is_finite()).collect();
    let mut anchors = finite.clone();
    if lo.is_finite() {
        anchors.push(lo);
    }
    if hi.is_finite() {
        anchors.push(hi);
    }
    let (amin, amax) = if anchors.is_empty() {
        (-l, l)
    } else {
        anchors.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
    };
    let c_lo = if lo.is_finite() { lo } else { amin.min(amax - l) };
    let c_hi = if hi.is_finite() { hi } else { amax.max(amin + l) };
    let upper = |s: f64| {
        let x = c_hi + l * (1.0 - s) / s;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * l / (s * s)
        }
    };
    let lower = |s: f64| {
        let x = c_lo - l * (1.0 - s) / s;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v * l / (s * s)
        }
    };
    let pts = sorted_breaks(c_lo, c_hi, &finite);
    let panels = panels.max(1);
    let width = c_hi - c_lo;
    let mut pieces = Vec::new();
    for w in pts.windows(2) {
        let k = ((panels as f64) * (w[1] - w[0]) / width).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / k as f64;
        for j in 0..k {
            let a = w[0] + h * j as f64;
            let b = if j + 1 == k { w[1] } else { a + h };
            pieces.push(Piece { lo: a, hi: b, f });
        }
    }
    if !hi.is_finite() {
        pieces.push(Piece { lo: 0.0, hi: 0.5, f: &upper });
        pieces.push(Piece { lo: 0.5, hi: 1.0, f: &upper });
    }
    if !lo.is_finite() {
        pieces.push(Piece { lo: 0.0, hi: 0.5, f: &lower });
        pieces.push(Piece { lo: 0.5, hi: 1.0, f: &lower });
    }
    integrate_pieces(&pieces, tol)
}

/// ∫_0^{t_max} t^{α-1} g(t) dt for α > 0, with `t_max = None` meaning ∞.
///
/// Near zero with α < 1 the substitution t = t0 u^{1/α} removes the
/// singular weight. The infinite tail uses t = T/s.
pub fn integrate_moment(
    g: &dyn Fn(f64) -> f64,
    alpha: f64,
    scale: f64,
    t_max: Option<f64>,
    breaks: &[f64],
    tol: Tol,
) -> Estimate {
    let mut t0 = scale.abs();
    if let Some(m) = t_max {
        t0 = t0.min(m);
    }
    if let Some(b) = breaks.iter().copied().filter(|b| *b > 0.0).min_by(f64::total_cmp) {
        t0 = t0.min(b);
    }
    let head_sub = |u: f64| g(t0 * u.powf(1.0 / alpha)) * t0.powf(alpha) / alpha;
    let weighted = |t: f64| {
        let v = g(t);
        if v == 0.0 {
            0.0
        } else {
            t.powf(alpha - 1.0) * v
        }
    };
    let t_end = match t_max {
        Some(m) => m,
        None => breaks.iter().copied().filter(|b| b.is_finite()).fold(scale.abs().max(t0), f64::max),
    };
    let tail = |s: f64| {
        let v = g(t_end / s);
        if v == 0.0 {
            0.0
        } else {
            v * t_end.powf(alpha) * s.powf(-alpha - 1.0)
        }
    };
    let mut pieces = Vec::new();
    if alpha < 1.0 {
        pieces.push(Piece { lo: 0.0, hi: 1.0, f: &head_sub });
    } else {
        pieces.push(Piece { lo: 0.0, hi: t0, f: &weighted });
    }
    let pts = sorted_breaks(t0, t_end.max(t0), breaks);
    if t_end > t0 {
        for w in pts.windows(2) {
            pieces.push(Piece { lo: w[0], hi: w[1], f: &weighted });
        }
    }
    if t_max.is_none() {
        pieces.push(Piece { lo: 0.0, hi: 1.0, f: &tail });
    }
    integrate_pieces(&pieces, tol)
}

/// ∫_0^∞ t^{α-1} d(t) dt for -1 < α < 0, where d(t) = O(t) at zero.
///
/// When `plateau` is given, d is constant beyond `t_max` and the tail is
/// summed exactly.
pub fn integrate_moment_negative(
    d: &dyn Fn(f64) -> f64,
    alpha: f64,
    scale: f64,
    t_max: Option<f64>,
    plateau: Option<f64>,
    breaks: &[f64],
    tol: Tol,
) -> Estimate {
    let gamma = alpha + 1.0;
    let mut t0 = scale.abs();
    if let Some(m) = t_max {
        t0 = t0.min(m);
    }
    if let Some(b) = breaks.iter().copied().filter(|b| *b > 0.0).min_by(f64::total_cmp) {
        t0 = t0.min(b);
    }
    let head = |u: f64| {
        let t = t0 * u.powf(1.0 / gamma);
        let v = d(t);
        if v == 0.0 {
            0.0
        } else {
            v / t * t0.powf(gamma) / gamma
        }
    };
    let weighted = |t: f64| {
        let v = d(t);
        if v == 0.0 {
            0.0
        } else {
            t.powf(alpha - 1.0) * v
        }
    };
    let t_end = match t_max {
        Some(m) => m.max(t0),
        None => breaks.iter().copied().filter(|b| b.is_finite()).fold(scale.abs().max(t0), f64::max),
    };
    let tail = |v: f64| d(t_end * v.powf(1.0 / alpha)) * t_end.powf(alpha) / alpha.abs();
    let mut pieces = vec![Piece { lo: 0.0, hi: 1.0, f: &head }];
    let pts = sorted_breaks(t0, t_end, breaks);
    if t_end > t0 {
        for w in pts.windows(2) {
            pieces.push(Piece { lo: w[0], hi: w[1], f: &weighted });
        }
    }
    let exact_tail = match (t_max, plateau) {
        (Some(_), Some(c)) => Some(c * t_end.powf(alpha) / alpha.abs()),
        _ => {
            pieces.push(Piece { lo: 0.0, hi: 1.0, f: &tail });
            None
        }
    };
    let mut est = integrate_pieces(&pieces, tol);
    if let Some(c) = exact_tail {
        est.value += c;
    }
    est
}
