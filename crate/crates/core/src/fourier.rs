//! Fourier coefficients on the circle with the convention
//! `f̂(k) = (1/2π) ∫₀^{2π} f(t) e^{-ikt} dt`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circle::{check_grid_size, GridFunction, PiecewiseLinearFunction, TAU};
use crate::error::{Error, Result};

/// Two-sided coefficients `f̂(k)` for `k = -kmax ..= kmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectrumJson", into = "SpectrumJson")]
pub struct SpectrumCoeffs {
    kmax: usize,
    coeffs: Vec<Complex64>,
}

impl SpectrumCoeffs {
    pub fn new(kmax: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != 2 * kmax + 1 {
            return Err(Error::InvalidPl(format!(
                "spectrum with kmax {kmax} needs {} coefficients, got {}",
                2 * kmax + 1,
                coeffs.len()
            )));
        }
        Ok(Self { kmax, coeffs })
    }

    pub fn zeros(kmax: usize) -> Self {
        Self { kmax, coeffs: vec![Complex64::new(0.0, 0.0); 2 * kmax + 1] }
    }

    /// Builds a spectrum from `(k, f̂(k))` pairs.
    pub fn from_terms(kmax: usize, terms: &[(i64, Complex64)]) -> Result<Self> {
        let mut s = Self::zeros(kmax);
        for &(k, c) in terms {
            if k.unsigned_abs() as usize > kmax {
                return Err(Error::Aliasing { kmax, n: 2 * kmax });
            }
            *s.get_mut(k) += c;
        }
        Ok(s)
    }

    pub fn kmax(&self) -> usize {
        self.kmax
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `f̂(k)`, zero outside the stored range.
    pub fn get(&self, k: i64) -> Complex64 {
        if k.unsigned_abs() as usize > self.kmax {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k + self.kmax as i64) as usize]
        }
    }

    fn get_mut(&mut self, k: i64) -> &mut Complex64 {
        &mut self.coeffs[(k + self.kmax as i64) as usize]
    }

    /// Iterator over `(k, f̂(k))`.
    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        let off = self.kmax as i64;
        self.coeffs.iter().enumerate().map(move |(i, &c)| (i as i64 - off, c))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { kmax: self.kmax, coeffs: self.coeffs.iter().map(|&v| v * c).collect() }
    }

    pub fn map_coeffs(&self, f: impl Fn(i64, Complex64) -> Complex64) -> Self {
        Self { kmax: self.kmax, coeffs: self.iter().map(|(k, c)| f(k, c)).collect() }
    }

    /// Spectrum of the real part: `(f̂(k) + conj f̂(-k)) / 2`.
    pub fn real_part(&self) -> Self {
        self.map_coeffs(|k, c| 0.5 * (c + self.get(-k).conj()))
    }

    /// Spectrum of the imaginary part: `(f̂(k) - conj f̂(-k)) / 2i`.
    pub fn imag_part(&self) -> Self {
        self.map_coeffs(|k, c| (c - self.get(-k).conj()) / Complex64::new(0.0, 2.0))
    }

    /// Largest deviation from Hermitian symmetry `f̂(-k) = conj f̂(k)`.
    pub fn hermitian_defect(&self) -> f64 {
        self.iter().map(|(k, c)| (self.get(-k) - c.conj()).norm()).fold(0.0, f64::max)
    }
}

#[derive(Serialize, Deserialize)]
struct SpectrumJson {
    kmax: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl TryFrom<SpectrumJson> for SpectrumCoeffs {
    type Error = Error;

    fn try_from(j: SpectrumJson) -> Result<Self> {
        if j.re.len() != j.im.len() {
            return Err(Error::InvalidPl("re and im lengths differ".into()));
        }
        let coeffs = j.re.iter().zip(&j.im).map(|(&r, &i)| Complex64::new(r, i)).collect();
        Self::new(j.kmax, coeffs)
    }
}

impl From<SpectrumCoeffs> for SpectrumJson {
    fn from(s: SpectrumCoeffs) -> Self {
        SpectrumJson {
            kmax: s.kmax,
            re: s.coeffs.iter().map(|c| c.re).collect(),
            im: s.coeffs.iter().map(|c| c.im).collect(),
        }
    }
}

/// Default reported range for an `n`-point grid.
pub fn default_kmax(n: usize) -> usize {
    n / 4
}

/// Discrete approximation `f̂(k) ≈ (1/N) Σ_j g_j e^{-ik t_j}` for `|k| <= kmax`.
pub fn dft_coeffs(g: &GridFunction, kmax: usize) -> Result<SpectrumCoeffs> {
    let n = g.n_samples();
    if 2 * kmax >= n {
        return Err(Error::Aliasing { kmax, n });
    }
    let mut buf = g.samples().to_vec();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let inv_n = 1.0 / n as f64;
    let coeffs = (-(kmax as i64)..=kmax as i64)
        .map(|k| buf[k.rem_euclid(n as i64) as usize] * inv_n)
        .collect();
    SpectrumCoeffs::new(kmax, coeffs)
}

/// Samples `Σ_k f̂(k) e^{ikt}` on an `n`-point grid.
pub fn synthesize(c: &SpectrumCoeffs, n: usize) -> Result<GridFunction> {
    check_grid_size(n)?;
    if 2 * c.kmax() >= n {
        return Err(Error::Aliasing { kmax: c.kmax(), n });
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for (k, v) in c.iter() {
        buf[k.rem_euclid(n as i64) as usize] += v;
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    GridFunction::new(buf)
}

/// Evaluates the trigonometric polynomial at a single angle.
pub fn eval_trig(c: &SpectrumCoeffs, t: f64) -> Complex64 {
    c.iter().map(|(k, v)| v * Complex64::from_polar(1.0, k as f64 * t)).sum()
}

/// Exact `f̂(0)`: the mean of a periodic PL function (trapezoids).
pub fn pl_mean(f: &PiecewiseLinearFunction) -> Result<Complex64> {
    f.require_periodic()?;
    let area: Complex64 = f.pieces().iter().map(|p| 0.5 * (p.v0 + p.v1) * (p.t1 - p.t0)).sum();
    Ok(area / TAU)
}

/// Closed-form coefficient of a continuous periodic PL function.
///
/// With slope jumps `J_j` at knots `x_j` the second derivative is
/// `Σ J_j δ_{x_j}`, so `f̂(k) = -(1/(2πk²)) Σ_j J_j e^{-ik x_j}` for `k != 0`.
pub fn pl_coeffs_closed_form(f: &PiecewiseLinearFunction, k: i64) -> Result<Complex64> {
    if k == 0 {
        return pl_mean(f);
    }
    let jumps = f.slope_jumps()?;
    let kf = k as f64;
    let s: Complex64 = jumps.iter().map(|&(x, j)| j * Complex64::from_polar(1.0, -kf * x)).sum();
    Ok(-s / (TAU * kf * kf))
}

/// All closed-form coefficients up to `kmax`.
///
/// Phases are advanced by repeated multiplication and re-anchored with an
/// exact `from_polar` every 256 steps to bound drift.
pub fn pl_spectrum(f: &PiecewiseLinearFunction, kmax: usize) -> Result<SpectrumCoeffs> {
    let jumps: Vec<(f64, Complex64)> =
        f.slope_jumps()?.into_iter().filter(|(_, j)| j.norm() > 0.0).collect();
    let mean = pl_mean(f)?;
    let zero = Complex64::new(0.0, 0.0);
    let mut pos = vec![zero; kmax + 1];
    let mut neg = vec![zero; kmax + 1];
    let mut phase = vec![Complex64::new(1.0, 0.0); jumps.len()];
    let step: Vec<Complex64> = jumps.iter().map(|&(x, _)| Complex64::from_polar(1.0, -x)).collect();
    for k in 1..=kmax {
        let (mut sp, mut sn) = (zero, zero);
        for (i, &(x, j)) in jumps.iter().enumerate() {
            phase[i] = if k % 256 == 0 {
                Complex64::from_polar(1.0, -(k as f64) * x)
            } else {
                phase[i] * step[i]
            };
            sp += j * phase[i];
            sn += j * phase[i].conj();
        }
        let denom = -TAU * (k as f64) * (k as f64);
        pos[k] = sp / denom;
        neg[k] = sn / denom;
    }
    let mut coeffs = Vec::with_capacity(2 * kmax + 1);
    coeffs.extend((1..=kmax).rev().map(|k| neg[k]));
    coeffs.push(mean);
    coeffs.extend(pos.into_iter().skip(1));
    SpectrumCoeffs::new(kmax, coeffs)
}

/// Fejér means `(1 - |k|/N) f̂(k)` for `|k| < N`, zero beyond.
pub fn fejer_sum(c: &SpectrumCoeffs, order: usize) -> SpectrumCoeffs {
    let n = order.max(1) as f64;
    c.map_coeffs(|k, v| {
        let ak = k.unsigned_abs() as f64;
        if ak < n {
            v * (1.0 - ak / n)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{triangle, CircleInterval};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn tri(a: f64, b: f64) -> PiecewiseLinearFunction {
        triangle(CircleInterval::new(a, b).unwrap()).unwrap()
    }

    /// Composite Gauss-Legendre quadrature of `(1/2π)∫ f e^{-ikt}`, used as an
    /// oracle independent of both the DFT and the slope-jump formula.
    fn quad_coeff(f: &PiecewiseLinearFunction, k: i64) -> Complex64 {
        let nodes = [-0.906_179_845_938_664, -0.538_469_310_105_683, 0.0, 0.538_469_310_105_683, 0.906_179_845_938_664];
        let weights = [0.236_926_885_056_189, 0.478_628_670_499_366, 0.568_888_888_888_889, 0.478_628_670_499_366, 0.236_926_885_056_189];
        let mut acc = Complex64::new(0.0, 0.0);
        for p in f.pieces() {
            let cells = 64;
            let h = (p.t1 - p.t0) / cells as f64;
            for c in 0..cells {
                let lo = p.t0 + c as f64 * h;
                for (x, w) in nodes.iter().zip(weights) {
                    let t = lo + 0.5 * h * (x + 1.0);
                    let v = p.v0 + (p.v1 - p.v0) * ((t - p.t0) / (p.t1 - p.t0));
                    acc += v * Complex64::from_polar(1.0, -(k as f64) * t) * (0.5 * h * w);
                }
            }
        }
        acc / TAU
    }

    #[test]
    fn single_harmonic() {
        let g = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, 3.0 * t)).unwrap();
        let c = dft_coeffs(&g, 8).unwrap();
        for (k, v) in c.iter() {
            let expect = if k == 3 { 1.0 } else { 0.0 };
            assert_abs_diff_eq!(v.re, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-12);
        }
        let five = GridFunction::from_fn(16, |_| Complex64::new(5.0, 0.0)).unwrap();
        let c = dft_coeffs(&five, 4).unwrap();
        assert_abs_diff_eq!(c.get(0).re, 5.0, epsilon = 1e-12);
        assert!(c.iter().filter(|(k, _)| *k != 0).all(|(_, v)| v.norm() < 1e-12));
        assert!(dft_coeffs(&five, 8).is_err());
    }

    #[test]
    fn closed_form_matches_quadrature() {
        let f = tri(PI - 1.0, PI + 1.0);
        for k in [-7, -1, 1, 2, 5, 13] {
            let a = pl_coeffs_closed_form(&f, k).unwrap();
            let b = quad_coeff(&f, k);
            assert_abs_diff_eq!(a.re, b.re, epsilon = 1e-12);
            assert_abs_diff_eq!(a.im, b.im, epsilon = 1e-12);
        }
        // mean = area / 2π = (|I|/2) / 2π
        assert_abs_diff_eq!(pl_coeffs_closed_form(&f, 0).unwrap().re, 1.0 / TAU, epsilon = 1e-15);
    }

    #[test]
    fn closed_form_triangle_formula() {
        // (2/L) (e^{-ika} - 2e^{-ikc} + e^{-ikb}) with an overall minus sign
        let (a, b) = (0.7, 2.1);
        let (c, l) = (0.5 * (a + b), b - a);
        let f = tri(a, b);
        for k in 1..6i64 {
            let kf = k as f64;
            let e = |x: f64| Complex64::from_polar(1.0, -kf * x);
            let expect = -(2.0 / l) * (e(a) - 2.0 * e(c) + e(b)) / (TAU * kf * kf);
            let got = pl_coeffs_closed_form(&f, k).unwrap();
            assert_abs_diff_eq!((got - expect).norm(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn dft_matches_closed_form() {
        let f = tri(PI - 1.0, PI + 1.0);
        let exact = pl_spectrum(&f, 128).unwrap();
        let approx = dft_coeffs(&f.sample(1 << 14).unwrap(), 128).unwrap();
        for k in -128..=128 {
            assert!((exact.get(k) - approx.get(k)).norm() < 1e-6, "k={k}");
        }
    }

    #[test]
    fn dft_error_quarters_when_grid_doubles() {
        let f = tri(1.0, 2.3);
        let exact = pl_spectrum(&f, 16).unwrap();
        let err = |n: usize| {
            let d = dft_coeffs(&f.sample(n).unwrap(), 16).unwrap();
            (-16..=16).map(|k| (d.get(k) - exact.get(k)).norm()).fold(0.0, f64::max)
        };
        // the per-doubling ratio oscillates with knot/grid alignment; the
        // geometric mean over four doublings is close to 4
        let rate = (err(1 << 10) / err(1 << 14)).powf(0.25);
        assert!((3.0..5.0).contains(&rate), "{rate}");
    }

    #[test]
    fn pl_spectrum_matches_pointwise_and_is_hermitian() {
        let f = PiecewiseLinearFunction::from_real(vec![0.2, 1.1, 2.9, 4.4, 6.0], &[0.3, -1.0, 2.0, 0.5, 0.0])
            .unwrap();
        let s = pl_spectrum(&f, 600).unwrap();
        for k in [-600, -257, -3, 0, 1, 255, 256, 599] {
            let direct = pl_coeffs_closed_form(&f, k).unwrap();
            assert!((s.get(k) - direct).norm() < 1e-14, "k={k}");
        }
        assert!(s.hermitian_defect() < 1e-15);
        let g = f.add(&f.scale(Complex64::new(0.0, 0.5)).map_values(|v| v * v));
        let sg = pl_spectrum(&g, 300).unwrap();
        for k in [-300, -17, 0, 17, 300] {
            let direct = pl_coeffs_closed_form(&g, k).unwrap();
            assert!((sg.get(k) - direct).norm() < 1e-14, "k={k}");
        }
    }

    #[test]
    fn constant_has_no_harmonics() {
        let c = PiecewiseLinearFunction::constant(Complex64::new(2.0, 0.0));
        assert_eq!(pl_coeffs_closed_form(&c, 3).unwrap(), Complex64::new(0.0, 0.0));
        assert_abs_diff_eq!(pl_coeffs_closed_form(&c, 0).unwrap().re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn fejer_basics() {
        let s = SpectrumCoeffs::from_terms(
            5,
            &[(0, Complex64::new(2.0, 0.0)), (1, Complex64::new(1.0, 1.0)), (-4, Complex64::new(3.0, 0.0))],
        )
        .unwrap();
        let f1 = fejer_sum(&s, 1);
        assert_eq!(f1.get(0), Complex64::new(2.0, 0.0));
        assert!(f1.iter().filter(|(k, _)| *k != 0).all(|(_, v)| v == Complex64::new(0.0, 0.0)));
        let harmonic = SpectrumCoeffs::from_terms(8, &[(6, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(fejer_sum(&harmonic, 6).coeffs().iter().all(|v| v.norm() == 0.0));
        let f3 = fejer_sum(&s, 3);
        assert_abs_diff_eq!(f3.get(1).re, 2.0 / 3.0, epsilon = 1e-15);
        for n in 1..10 {
            let f = fejer_sum(&s, n);
            for k in -5..=5 {
                assert!(f.get(k).norm() <= s.get(k).norm());
            }
        }
    }

    #[test]
    fn synth_roundtrip() {
        let s = SpectrumCoeffs::from_terms(
            6,
            &[(-6, Complex64::new(0.5, 0.1)), (0, Complex64::new(1.0, 0.0)), (3, Complex64::new(0.0, -2.0))],
        )
        .unwrap();
        let g = synthesize(&s, 32).unwrap();
        let back = dft_coeffs(&g, 6).unwrap();
        for k in -6..=6 {
            assert!((back.get(k) - s.get(k)).norm() < 1e-12);
        }
        let one = SpectrumCoeffs::from_terms(1, &[(1, Complex64::new(1.0, 0.0))]).unwrap();
        let g = synthesize(&one, 8).unwrap();
        for (j, v) in g.samples().iter().enumerate() {
            assert!((v - Complex64::from_polar(1.0, g.angle(j))).norm() < 1e-14);
        }
        assert!(synthesize(&s, 12).is_err());
        assert!(synthesize(&s, 8).is_err());
    }

    #[test]
    fn fejer_converges_uniformly_on_triangle() {
        let f = tri(1.0, 2.0);
        let spec = pl_spectrum(&f, 512).unwrap();
        let err = |order: usize| {
            let g = synthesize(&fejer_sum(&spec, order), 4096).unwrap();
            g.samples()
                .iter()
                .enumerate()
                .map(|(j, v)| (v - f.eval(g.angle(j))).norm())
                .fold(0.0, f64::max)
        };
        assert!(err(512) < err(64));
    }

    #[test]
    fn parseval_bandlimited() {
        let s = SpectrumCoeffs::from_terms(
            10,
            &[(-10, Complex64::new(0.3, 0.0)), (2, Complex64::new(1.0, -1.0)), (7, Complex64::new(0.0, 0.25))],
        )
        .unwrap();
        let g = synthesize(&s, 64).unwrap();
        let lhs: f64 = g.samples().iter().map(|v| v.norm_sqr()).sum::<f64>() / 64.0;
        let rhs: f64 = s.coeffs().iter().map(|v| v.norm_sqr()).sum();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn spectrum_json_shape() {
        let s = SpectrumCoeffs::from_terms(1, &[(1, Complex64::new(1.0, 2.0))]).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kmax":1,"re":[0.0,0.0,1.0],"im":[0.0,0.0,2.0]}"#);
        let back: SpectrumCoeffs = serde_json::from_str(&j).unwrap();
        assert_eq!(back, s);
    }
}
