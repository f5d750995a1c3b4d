//! Functions on the circle `T = R / 2πZ`.
//!
//! Two carriers are used throughout the crate: [`PiecewiseLinearFunction`],
//! an exact finite-knot representation of every constructed object, and
//! [`GridFunction`], uniform samples used by the FFT-based routines.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TAU: f64 = std::f64::consts::TAU;

/// Reduces an angle into `[0, 2π)`. Inputs are expected to be within a few
/// periods of the range.
pub fn reduce_angle(mut t: f64) -> f64 {
    while t < 0.0 {
        t += TAU;
    }
    while t >= TAU {
        t -= TAU;
    }
    t
}

/// A closed arc `[a, b]` with `0 <= a < b <= 2π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleInterval {
    a: f64,
    b: f64,
}

impl CircleInterval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidInterval { a, b, reason: "endpoints must be finite" });
        }
        if a < 0.0 || b > TAU {
            return Err(Error::InvalidInterval { a, b, reason: "endpoints must lie in [0, 2π]" });
        }
        if a >= b {
            return Err(Error::InvalidInterval { a, b, reason: "need a < b" });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.a + self.b)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.a <= t && t <= self.b
    }
}

/// Continuous piecewise-linear function with explicit knots.
///
/// Between consecutive knots the function is the linear interpolant of the
/// knot values. When `periodic` is set the last segment wraps from
/// `t_{M-1}` to `t_0 + 2π`; otherwise the function is held constant outside
/// `[t_0, t_{M-1}]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PlJson", into = "PlJson")]
pub struct PiecewiseLinearFunction {
    knots: Vec<f64>,
    values: Vec<Complex64>,
    periodic: bool,
}

/// One linear piece `[t0, t1]` of a function, with `t1` possibly past `2π`
/// for the wrap segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub t0: f64,
    pub t1: f64,
    pub v0: Complex64,
    pub v1: Complex64,
}

impl Piece {
    pub fn slope(&self) -> Complex64 {
        (self.v1 - self.v0) / (self.t1 - self.t0)
    }
}

#[inline]
fn lerp(t0: f64, t1: f64, v0: Complex64, v1: Complex64, t: f64) -> Complex64 {
    v0 + (v1 - v0) * ((t - t0) / (t1 - t0))
}

impl PiecewiseLinearFunction {
    pub fn new(knots: Vec<f64>, values: Vec<Complex64>, periodic: bool) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidPl("at least one knot required".into()));
        }
        if knots.len() != values.len() {
            return Err(Error::InvalidPl(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        for (i, &t) in knots.iter().enumerate() {
            if !(0.0..TAU).contains(&t) {
                return Err(Error::InvalidPl(format!("knot {i} = {t} outside [0, 2π)")));
            }
            if i > 0 && knots[i - 1] >= t {
                return Err(Error::InvalidPl(format!("knots not strictly increasing at {i}")));
            }
        }
        if let Some(i) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidPl(format!("non-finite value at knot {i}")));
        }
        Ok(Self { knots, values, periodic })
    }

    pub fn from_real(knots: Vec<f64>, values: &[f64]) -> Result<Self> {
        Self::new(knots, values.iter().map(|&x| Complex64::new(x, 0.0)).collect(), true)
    }

    pub fn constant(c: Complex64) -> Self {
        Self { knots: vec![0.0], values: vec![c], periodic: true }
    }

    pub fn zero() -> Self {
        Self::constant(Complex64::new(0.0, 0.0))
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        let t = reduce_angle(t);
        let m = self.knots.len();
        if m == 1 {
            return self.values[0];
        }
        let idx = self.knots.partition_point(|&k| k <= t);
        if idx == 0 {
            if self.periodic {
                return lerp(
                    self.knots[m - 1] - TAU,
                    self.knots[0],
                    self.values[m - 1],
                    self.values[0],
                    t,
                );
            }
            return self.values[0];
        }
        let i = idx - 1;
        if self.knots[i] == t {
            return self.values[i];
        }
        if i == m - 1 {
            if self.periodic {
                return lerp(
                    self.knots[m - 1],
                    self.knots[0] + TAU,
                    self.values[m - 1],
                    self.values[0],
                    t,
                );
            }
            return self.values[m - 1];
        }
        lerp(self.knots[i], self.knots[i + 1], self.values[i], self.values[i + 1], t)
    }

    /// Real part of the value at `t`.
    pub fn eval_re(&self, t: f64) -> f64 {
        self.eval(t).re
    }

    /// Linear pieces in order. For periodic functions the wrap piece ends at
    /// `t_0 + 2π`; a single-knot function yields one flat piece of length 2π.
    pub fn pieces(&self) -> Vec<Piece> {
        let m = self.knots.len();
        let mut out = Vec::with_capacity(m);
        for i in 0..m.saturating_sub(1) {
            out.push(Piece {
                t0: self.knots[i],
                t1: self.knots[i + 1],
                v0: self.values[i],
                v1: self.values[i + 1],
            });
        }
        if self.periodic {
            out.push(Piece {
                t0: self.knots[m - 1],
                t1: self.knots[0] + TAU,
                v0: self.values[m - 1],
                v1: self.values[0],
            });
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    pub fn require_real(&self) -> Result<()> {
        match self.values.iter().position(|v| v.im != 0.0) {
            Some(index) => Err(Error::NotReal { index, imag: self.values[index].im }),
            None => Ok(()),
        }
    }

    pub fn require_periodic(&self) -> Result<()> {
        if self.periodic {
            Ok(())
        } else {
            Err(Error::NotPeriodic)
        }
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map_values(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            knots: self.knots.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            periodic: self.periodic,
        }
    }

    pub fn real_part(&self) -> Self {
        self.map_values(|v| Complex64::new(v.re, 0.0))
    }

    pub fn imag_part(&self) -> Self {
        self.map_values(|v| Complex64::new(v.im, 0.0))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_values(|v| v * c)
    }

    /// Pointwise sum on the merged knot set.
    pub fn add(&self, other: &Self) -> Self {
        let knots = merge_knots(&self.knots, &other.knots);
        let values = knots.iter().map(|&t| self.eval(t) + other.eval(t)).collect();
        Self { knots, values, periodic: self.periodic && other.periodic }
    }

    /// `re + i·im` for two real functions.
    pub fn complexify(re: &Self, im: &Self) -> Self {
        re.add(&im.scale(Complex64::new(0.0, 1.0)))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_re(&self) -> f64 {
        self.values.iter().map(|v| v.re).fold(f64::INFINITY, f64::min)
    }

    /// Drops knots lying on the segment joining their neighbours (within
    /// `tol` relative to `max(1, sup|f|)`).
    pub fn simplify(&self, tol: f64) -> Self {
        let m = self.knots.len();
        if m <= 1 {
            return self.clone();
        }
        let scale = self.sup_norm().max(1.0);
        let thresh = tol * scale;
        let collinear = |tp: f64, vp: Complex64, t: f64, v: Complex64, tn: f64, vn: Complex64| {
            (v - lerp(tp, tn, vp, vn, t)).norm() <= thresh
        };

        let mut kept: Vec<usize> = vec![0];
        for i in 1..m - 1 {
            let p = *kept.last().unwrap();
            if !collinear(
                self.knots[p],
                self.values[p],
                self.knots[i],
                self.values[i],
                self.knots[i + 1],
                self.values[i + 1],
            ) {
                kept.push(i);
            }
        }
        kept.push(m - 1);

        if self.periodic {
            // Wrap neighbours: keep trimming both ends while they are redundant.
            loop {
                let k = kept.len();
                if k <= 1 {
                    break;
                }
                let (first, last) = (kept[0], kept[k - 1]);
                if k == 2 {
                    if (self.values[first] - self.values[last]).norm() <= thresh {
                        kept.pop();
                    }
                    break;
                }
                let prev = kept[k - 2];
                if collinear(
                    self.knots[prev],
                    self.values[prev],
                    self.knots[last],
                    self.values[last],
                    self.knots[first] + TAU,
                    self.values[first],
                ) {
                    kept.pop();
                    continue;
                }
                let next = kept[1];
                if collinear(
                    self.knots[last] - TAU,
                    self.values[last],
                    self.knots[first],
                    self.values[first],
                    self.knots[next],
                    self.values[next],
                ) {
                    kept.remove(0);
                    continue;
                }
                break;
            }
        } else if kept.len() == 2 && (self.values[0] - self.values[m - 1]).norm() <= thresh {
            kept.pop();
        }

        Self {
            knots: kept.iter().map(|&i| self.knots[i]).collect(),
            values: kept.iter().map(|&i| self.values[i]).collect(),
            periodic: self.periodic,
        }
    }

    /// Total variation of a real-valued function, including the wrap segment
    /// when periodic.
    pub fn total_variation(&self) -> Result<f64> {
        self.require_real()?;
        let m = self.knots.len();
        let mut tv: f64 = self.values.windows(2).map(|w| (w[1].re - w[0].re).abs()).sum();
        if self.periodic && m > 1 {
            tv += (self.values[0].re - self.values[m - 1].re).abs();
        }
        Ok(tv)
    }

    /// Slope jumps `(x_j, s_j - s_{j-1})` of a periodic function, one per knot
    /// (zeros included). The second derivative is `Σ J_j δ_{x_j}`.
    pub fn slope_jumps(&self) -> Result<Vec<(f64, Complex64)>> {
        self.require_periodic()?;
        let pieces = self.pieces();
        let m = self.knots.len();
        if m == 1 {
            return Ok(vec![]);
        }
        let slopes: Vec<Complex64> = pieces.iter().map(Piece::slope).collect();
        Ok((0..m)
            .map(|i| {
                let prev = if i == 0 { slopes[m - 1] } else { slopes[i - 1] };
                (self.knots[i], slopes[i] - prev)
            })
            .collect())
    }

    /// Samples on the uniform grid `t_j = 2πj/N`.
    pub fn sample(&self, n: usize) -> Result<GridFunction> {
        check_grid_size(n)?;
        let samples = (0..n).map(|j| self.eval(TAU * j as f64 / n as f64)).collect();
        GridFunction::new(samples)
    }
}

/// Sorted union of two strictly increasing knot lists.
pub(crate) fn merge_knots(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        if out.last() != Some(&next) {
            out.push(next);
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct PlJson {
    knots: Vec<f64>,
    re: Vec<f64>,
    im: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    periodic: Option<bool>,
}

impl TryFrom<PlJson> for PiecewiseLinearFunction {
    type Error = Error;

    fn try_from(j: PlJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::InvalidPl("re and im lengths differ".into()));
        }
        let values = j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Self::new(j.knots, values, j.periodic.unwrap_or(true))
    }
}

impl From<PiecewiseLinearFunction> for PlJson {
    fn from(f: PiecewiseLinearFunction) -> Self {
        PlJson {
            re: f.values.iter().map(|v| v.re).collect(),
            im: f.values.iter().map(|v| v.im).collect(),
            knots: f.knots,
            periodic: if f.periodic { None } else { Some(false) },
        }
    }
}

/// Unit tent supported on `I`: zero outside, 1 at the centre, linear on each
/// half. `I` must lie strictly inside `(0, 2π)`.
pub fn triangle(interval: CircleInterval) -> Result<PiecewiseLinearFunction> {
    let (a, b) = (interval.a(), interval.b());
    if a <= 0.0 || b >= TAU {
        return Err(Error::InvalidInterval { a, b, reason: "triangle support must lie inside (0, 2π)" });
    }
    let c = interval.center();
    PiecewiseLinearFunction::from_real(vec![0.0, a, c, b], &[0.0, 0.0, 1.0, 0.0])
}

pub(crate) fn check_grid_size(n: usize) -> Result<()> {
    if n >= 2 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGridSize(n))
    }
}

/// Samples at `t_j = 2πj/N`, `N` a power of two.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    samples: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_grid_size(samples.len())?;
        if samples.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidPl("non-finite grid sample".into()));
        }
        Ok(Self { samples })
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|j| f(TAU * j as f64 / n as f64)).collect())
    }

    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn angle(&self, j: usize) -> f64 {
        TAU * j as f64 / self.samples.len() as f64
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { samples: self.samples.iter().map(|&v| v * c).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tri(a: f64, b: f64) -> PiecewiseLinearFunction {
        triangle(CircleInterval::new(a, b).unwrap()).unwrap()
    }

    #[test]
    fn triangle_values() {
        let f = tri(1.0, 2.0);
        assert_eq!(f.eval_re(1.5), 1.0);
        assert_eq!(f.eval_re(1.0), 0.0);
        assert_eq!(f.eval_re(2.0), 0.0);
        assert_abs_diff_eq!(f.eval_re(1.25), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(f.eval_re(1.75), 0.5, epsilon = 1e-15);
        assert_eq!(f.eval_re(5.0), 0.0);
        assert_eq!(f.eval_re(0.5), 0.0);
    }

    #[test]
    fn triangle_rejects_boundary() {
        assert!(triangle(CircleInterval::new(0.0, 1.0).unwrap()).is_err());
        assert!(triangle(CircleInterval::new(1.0, TAU).unwrap()).is_err());
        assert!(CircleInterval::new(2.0, 1.0).is_err());
        assert!(CircleInterval::new(-0.1, 1.0).is_err());
    }

    #[test]
    fn constant_and_gap() {
        let c = PiecewiseLinearFunction::constant(Complex64::new(3.0, -1.0));
        for t in [0.0, 1.0, 4.0, 6.2] {
            assert_eq!(c.eval(t), Complex64::new(3.0, -1.0));
        }
        let f = tri(1.0, 2.0).add(&tri(3.0, 4.0));
        assert_eq!(f.eval_re(2.5), 0.0);
        assert_eq!(f.eval_re(3.5), 1.0);
    }

    #[test]
    fn wrap_segment_interpolates() {
        let f = PiecewiseLinearFunction::from_real(vec![1.0, 2.0], &[1.0, 3.0]).unwrap();
        // wrap from t=2 (value 3) to t=1+2π (value 1)
        let mid = 0.5 * (2.0 + 1.0 + TAU);
        assert_abs_diff_eq!(f.eval_re(mid), 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.eval_re(mid - TAU), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn exact_at_knots() {
        let knots = vec![0.1, 0.7, 2.3, 5.9];
        let vals = [0.3, -1.7, 2.2, 0.123456789];
        let f = PiecewiseLinearFunction::from_real(knots.clone(), &vals).unwrap();
        for (t, v) in knots.iter().zip(vals) {
            assert_eq!(f.eval_re(*t), v);
        }
    }

    #[test]
    fn sample_grid() {
        let f = tri(PI / 2.0, 3.0 * PI / 2.0);
        let g = f.sample(4).unwrap();
        let expected = [0.0, 0.0, 1.0, 0.0];
        for (s, e) in g.samples().iter().zip(expected) {
            assert_abs_diff_eq!(s.re, e, epsilon = 1e-15);
        }
        let z = PiecewiseLinearFunction::zero().sample(8).unwrap();
        assert!(z.samples().iter().all(|v| *v == Complex64::new(0.0, 0.0)));
        let g2 = f.sample(2).unwrap();
        assert_eq!(g2.samples()[0], f.eval(0.0));
        assert_eq!(g2.samples()[1], f.eval(PI));
        assert!(f.sample(6).is_err());
        assert!(f.sample(1).is_err());
    }

    #[test]
    fn variation() {
        assert_eq!(tri(1.0, 2.0).total_variation().unwrap(), 2.0);
        assert_eq!(PiecewiseLinearFunction::zero().total_variation().unwrap(), 0.0);
        let w = [0.5, 0.25, 0.125];
        let mut u = PiecewiseLinearFunction::zero();
        for (k, wk) in w.iter().enumerate() {
            let a = 1.0 + k as f64;
            u = u.add(&tri(a, a + 0.5).scale(Complex64::new(*wk, 0.0)));
        }
        assert_abs_diff_eq!(u.total_variation().unwrap(), 2.0 * 0.875, epsilon = 1e-15);
        let cplx = tri(1.0, 2.0).scale(Complex64::new(0.0, 1.0));
        assert!(matches!(cplx.total_variation(), Err(Error::NotReal { .. })));
    }

    #[test]
    fn simplify_removes_collinear() {
        let f = tri(1.0, 2.0);
        let with_extra = PiecewiseLinearFunction::from_real(
            vec![0.0, 0.5, 1.0, 1.25, 1.5, 2.0, 4.0],
            &[0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0],
        )
        .unwrap();
        let s = with_extra.simplify(1e-14);
        assert_eq!(s.knots(), &[1.0, 1.5, 2.0]);
        for t in [0.3, 1.1, 1.7, 3.0] {
            assert_abs_diff_eq!(s.eval_re(t), f.eval_re(t), epsilon = 1e-14);
        }
        assert_abs_diff_eq!(
            with_extra.total_variation().unwrap(),
            s.total_variation().unwrap(),
            epsilon = 1e-12
        );
        let c = PiecewiseLinearFunction::from_real(vec![0.0, 1.0, 2.0], &[2.0, 2.0, 2.0]).unwrap();
        assert_eq!(c.simplify(1e-14).len(), 1);
    }

    #[test]
    fn json_roundtrip() {
        let f = tri(1.0, 2.0).scale(Complex64::new(1.0, 2.0));
        let s = serde_json::to_string(&f).unwrap();
        assert!(s.starts_with("{\"knots\""));
        assert!(!s.contains("periodic"));
        let g: PiecewiseLinearFunction = serde_json::from_str(&s).unwrap();
        assert_eq!(f, g);
        let bad = r#"{"knots":[1.0,0.5],"re":[0,0],"im":[0,0]}"#;
        assert!(serde_json::from_str::<PiecewiseLinearFunction>(bad).is_err());
    }

    #[test]
    fn reduce() {
        assert_eq!(reduce_angle(TAU), 0.0);
        assert_abs_diff_eq!(reduce_angle(-1.0), TAU - 1.0);
        assert!(reduce_angle(-1e-20) < TAU);
    }
}
