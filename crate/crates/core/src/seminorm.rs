//! Seminorms of `W₂^s` on the circle and moduli of continuity.
//!
//! Two forms of the `W₂^{1/2}` seminorm are provided: the spectral sum
//! `(Σ |f̂(k)|² |k|)^{1/2}` and the difference-quotient double integral
//! `(∫₀^{2π} θ^{-2} ∫₀^{2π} |f(t+θ) - f(t)|² dt dθ)^{1/2}`. The two are
//! equivalent up to absolute constants; [`equivalence_scan`] measures the
//! ratio empirically. For piecewise-linear inputs the spectral form can be
//! evaluated without truncation, see [`crate::halfnorm`].

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::circle::{GridFunction, PiecewiseLinearFunction, TAU};
use crate::error::{Error, Result};
use crate::fourier::{synthesize, SpectrumCoeffs};

/// A modulus of continuity `ω`: nondecreasing, subadditive, `ω(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ModulusSpec {
    /// `ω(δ) = δ^α`, `0 < α <= 1`.
    Power { alpha: f64 },
    /// Piecewise-linear interpolation of `(δ, ω)` pairs through the origin,
    /// held constant past the last point.
    Table { points: Vec<(f64, f64)> },
}

impl ModulusSpec {
    pub fn power(alpha: f64) -> Result<Self> {
        let m = ModulusSpec::Power { alpha };
        m.validate()?;
        Ok(m)
    }

    pub fn table(points: Vec<(f64, f64)>) -> Result<Self> {
        let m = ModulusSpec::Table { points };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModulusSpec::Power { alpha } => {
                if !(*alpha > 0.0 && *alpha <= 1.0) {
                    return Err(Error::InvalidModulus(format!("power exponent {alpha} not in (0, 1]")));
                }
            }
            ModulusSpec::Table { points } => {
                if points.is_empty() {
                    return Err(Error::InvalidModulus("empty table".into()));
                }
                let mut prev = (0.0, 0.0);
                for &(d, w) in points {
                    if !(d.is_finite() && w.is_finite()) || d <= prev.0 {
                        return Err(Error::InvalidModulus(format!(
                            "table abscissae must be positive and increasing (at δ = {d})"
                        )));
                    }
                    if w < prev.1 {
                        return Err(Error::InvalidModulus(format!("ω decreases at δ = {d}")));
                    }
                    prev = (d, w);
                }
                for &(x, wx) in points {
                    for &(y, wy) in points {
                        let wxy = self.eval(x + y);
                        if wxy > wx + wy + 1e-12 * (wx + wy).max(1.0) {
                            return Err(Error::InvalidModulus(format!(
                                "not subadditive: ω({x} + {y}) = {wxy} > {wx} + {wy}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        match self {
            ModulusSpec::Power { alpha } => power_eval(delta, *alpha),
            ModulusSpec::Table { points } => {
                let idx = points.partition_point(|&(d, _)| d < delta);
                if idx == points.len() {
                    return points[points.len() - 1].1;
                }
                let (d1, w1) = points[idx];
                if d1 == delta {
                    return w1;
                }
                let (d0, w0) = if idx == 0 { (0.0, 0.0) } else { points[idx - 1] };
                w0 + (w1 - w0) * (delta - d0) / (d1 - d0)
            }
        }
    }

    /// Smallest positive δ the modulus is defined on with nontrivial data.
    pub fn support_min(&self) -> f64 {
        match self {
            ModulusSpec::Power { .. } => f64::MIN_POSITIVE,
            ModulusSpec::Table { points } => points[0].0,
        }
    }
}

/// `δ^α`, exact when `δ` is a power of two and `α log₂ δ` is an integer.
fn power_eval(delta: f64, alpha: f64) -> f64 {
    let e = delta.log2();
    if e == e.round() && 2f64.powi(e as i32) == delta {
        let x = e * alpha;
        if (x - x.round()).abs() < 1e-12 {
            return 2f64.powi(x.round() as i32);
        }
    }
    delta.powf(alpha)
}

/// `(Σ_k |f̂(k)|² |k|^{2s})^{1/2}`.
pub fn sobolev_spectral(c: &SpectrumCoeffs, s: f64) -> f64 {
    c.iter()
        .filter(|(k, _)| *k != 0)
        .map(|(k, v)| v.norm_sqr() * (k.unsigned_abs() as f64).powf(2.0 * s))
        .sum::<f64>()
        .sqrt()
}

/// Discretized difference-quotient seminorm on the sample grid.
///
/// For each grid shift `θ_m = 2πm/N`, `m = 1..N-1`, the inner integral is
/// `2π · mean_j |g_{j+m} - g_j|²`; the outer integral sums these with weight
/// `(2π/N) / θ_m²`. The `θ = 0` cell is omitted. Shift sums are obtained
/// from the circular autocorrelation.
pub fn sobolev_integral(g: &GridFunction) -> f64 {
    sobolev_integral_s(g, 0.5)
}

/// The same construction with weight `θ^{-1-2s}`, `0 < s < 1`.
pub fn sobolev_integral_s(g: &GridFunction, s: f64) -> f64 {
    let n = g.n_samples();
    let energy: f64 = g.samples().iter().map(|v| v.norm_sqr()).sum();
    let mut buf = g.samples().to_vec();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for v in buf.iter_mut() {
        *v = Complex64::new(v.norm_sqr(), 0.0);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    let nf = n as f64;
    let h = TAU / nf;
    let mut acc = 0.0;
    for (m, a) in buf.iter().enumerate().skip(1) {
        let diff_sq = (2.0 * energy - 2.0 * a.re / nf).max(0.0);
        let inner = TAU * diff_sq / nf;
        let theta = h * m as f64;
        acc += inner * theta.powf(-1.0 - 2.0 * s) * h;
    }
    acc.sqrt()
}

/// Same quantity as [`sobolev_integral`] by the plain double loop, `O(N²)`.
pub fn sobolev_integral_direct(g: &GridFunction) -> f64 {
    let s = g.samples();
    let n = s.len();
    let h = TAU / n as f64;
    let mut acc = 0.0;
    for m in 1..n {
        let mean: f64 = (0..n).map(|j| (s[(j + m) % n] - s[j]).norm_sqr()).sum::<f64>() / n as f64;
        let theta = h * m as f64;
        acc += TAU * mean / (theta * theta) * h;
    }
    acc.sqrt()
}

/// `w(k) = ∫₀^{2π} 4 sin²(kθ/2) / θ² dθ`, the squared difference-quotient
/// seminorm of `e^{ikt}` divided by `2π`. Composite Gauss-Legendre with the
/// removable singularity at 0 handled by the series `k²(1 - k²θ²/12)`.
pub fn harmonic_weight(k: u64) -> f64 {
    let kf = k as f64;
    let integrand = |t: f64| {
        let x = 0.5 * kf * t;
        if x.abs() < 1e-4 {
            kf * kf * (1.0 - x * x / 3.0)
        } else {
            let s = x.sin();
            4.0 * s * s / (t * t)
        }
    };
    // nodes and weights of 8-point Gauss-Legendre on [-1, 1]
    const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let cells = 64 * k.max(1) as usize;
    let h = TAU / cells as f64;
    let mut acc = 0.0;
    for c in 0..cells {
        let mid = (c as f64 + 0.5) * h;
        for (x, w) in X.iter().zip(W) {
            acc += w * (integrand(mid - 0.5 * h * x) + integrand(mid + 0.5 * h * x));
        }
    }
    acc * 0.5 * h
}

/// Two seminorms of one function, as written by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeminormReport {
    pub spectral: f64,
    pub integral: f64,
    pub s: f64,
    #[serde(rename = "N")]
    pub n: usize,
}

/// `ω(f, δ) = sup_{|t₁ - t₂| <= δ} |f(t₁) - f(t₂)|`, exact for PL functions.
///
/// The supremum over the strip is attained with one endpoint at a knot and
/// the other at a knot or at distance `δ`; distances are measured on the
/// circle for periodic functions.
pub fn modulus_of_continuity(f: &PiecewiseLinearFunction, delta: f64) -> f64 {
    if delta <= 0.0 || f.len() == 1 {
        return 0.0;
    }
    if f.is_real() {
        WindowExtrema::new(f).modulus(delta)
    } else {
        modulus_complex(f, delta)
    }
}

/// Sparse tables over the knot values, extended by one period on each side.
pub struct WindowExtrema<'a> {
    f: &'a PiecewiseLinearFunction,
    pos: Vec<f64>,
    max_table: Vec<Vec<f64>>,
    min_table: Vec<Vec<f64>>,
}

impl<'a> WindowExtrema<'a> {
    pub fn new(f: &'a PiecewiseLinearFunction) -> Self {
        let copies: &[f64] = if f.periodic() { &[-TAU, 0.0, TAU] } else { &[0.0] };
        let mut pos = Vec::with_capacity(copies.len() * f.len());
        let mut vals = Vec::with_capacity(pos.capacity());
        for &shift in copies {
            for (t, v) in f.knots().iter().zip(f.values()) {
                pos.push(t + shift);
                vals.push(v.re);
            }
        }
        let build = |op: fn(f64, f64) -> f64| {
            let mut table = vec![vals.clone()];
            let mut width = 1;
            while 2 * width <= vals.len() {
                let prev = table.last().unwrap();
                let next: Vec<f64> = (0..=vals.len() - 2 * width).map(|i| op(prev[i], prev[i + width])).collect();
                table.push(next);
                width *= 2;
            }
            table
        };
        Self { f, pos, max_table: build(f64::max), min_table: build(f64::min) }
    }

    fn query(&self, lo: usize, hi: usize) -> (f64, f64) {
        // inclusive range [lo, hi]
        let len = hi - lo + 1;
        let level = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let w = 1 << level;
        (
            self.min_table[level][lo].min(self.min_table[level][hi + 1 - w]),
            self.max_table[level][lo].max(self.max_table[level][hi + 1 - w]),
        )
    }

    pub fn modulus(&self, delta: f64) -> f64 {
        let f = self.f;
        let periodic = f.periodic();
        if periodic && delta >= std::f64::consts::PI {
            return f.max_re() - f.min_re();
        }
        let (lo_bound, hi_bound) = if periodic {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            (f.knots()[0], f.knots()[f.len() - 1])
        };
        let mut best: f64 = 0.0;
        for (t, v) in f.knots().iter().zip(f.values()) {
            let c = v.re;
            let a = (t - delta).max(lo_bound);
            let b = (t + delta).min(hi_bound);
            let mut lo_val = f.eval_re(a).min(f.eval_re(b));
            let mut hi_val = f.eval_re(a).max(f.eval_re(b));
            let i0 = self.pos.partition_point(|&p| p < a);
            let i1 = self.pos.partition_point(|&p| p <= b);
            if i1 > i0 {
                let (mn, mx) = self.query(i0, i1 - 1);
                lo_val = lo_val.min(mn);
                hi_val = hi_val.max(mx);
            }
            best = best.max(c - lo_val).max(hi_val - c);
        }
        best
    }
}

fn modulus_complex(f: &PiecewiseLinearFunction, delta: f64) -> f64 {
    let dist = |a: f64, b: f64| {
        let d = (a - b).abs();
        if f.periodic() {
            d.min(TAU - d)
        } else {
            d
        }
    };
    let mut best: f64 = 0.0;
    for (i, &t) in f.knots().iter().enumerate() {
        let v = f.values()[i];
        for s in [t - delta, t + delta] {
            let s = if f.periodic() { s } else { s.clamp(f.knots()[0], f.knots()[f.len() - 1]) };
            best = best.max((v - f.eval(s)).norm());
        }
        for (j, &u) in f.knots().iter().enumerate() {
            if j != i && dist(t, u) <= delta {
                best = best.max((v - f.values()[j]).norm());
            }
        }
    }
    best
}

/// Geometric grid `2π·2^{-m}`, `m = 1..=20`.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=20).map(|m| TAU * 0.5f64.powi(m)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipSample {
    pub delta: f64,
    pub modulus_f: f64,
    pub modulus_ref: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipReport {
    pub max_ratio: f64,
    pub worst_delta: f64,
    pub samples: Vec<LipSample>,
}

impl LipReport {
    /// `ω(f, δ) <= C ω(δ)` on the whole grid.
    pub fn holds(&self, constant: f64) -> bool {
        self.max_ratio <= constant
    }
}

/// Largest ratio `ω(f, δ) / ω(δ)` over the grid.
pub fn lip_check(f: &PiecewiseLinearFunction, omega: &ModulusSpec, grid: &[f64]) -> Result<LipReport> {
    if grid.is_empty() {
        return Err(Error::Degenerate("empty δ grid".into()));
    }
    if let Some(&d) = grid.iter().find(|&&d| !(d > 0.0 && d <= TAU)) {
        return Err(Error::Degenerate(format!("δ = {d} outside (0, 2π]")));
    }
    let window = f.is_real().then(|| WindowExtrema::new(f));
    let mut samples = Vec::with_capacity(grid.len());
    for &delta in grid {
        let modulus_f = match &window {
            Some(w) => w.modulus(delta),
            None => modulus_complex(f, delta),
        };
        let modulus_ref = omega.eval(delta);
        samples.push(LipSample { delta, modulus_f, modulus_ref, ratio: modulus_f / modulus_ref });
    }
    let worst = samples.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio)).unwrap();
    Ok(LipReport { max_ratio: worst.ratio, worst_delta: worst.delta, samples: samples.clone() })
}

/// Empirical range of `|‖f|‖ / ‖f‖` over a test set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceEstimate {
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub sample_count: usize,
}

/// Ratio of the difference-quotient seminorm (on an `n`-point grid) to the
/// spectral seminorm, for each test function.
pub fn equivalence_ratios(test_set: &[SpectrumCoeffs], n: usize) -> Result<Vec<f64>> {
    if test_set.is_empty() {
        return Err(Error::Degenerate("empty test set".into()));
    }
    test_set
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let spectral = sobolev_spectral(c, 0.5);
            if spectral == 0.0 {
                return Err(Error::Degenerate(format!("test function {i} is constant")));
            }
            Ok(sobolev_integral(&synthesize(c, n)?) / spectral)
        })
        .collect()
}

pub fn equivalence_scan(test_set: &[SpectrumCoeffs], n: usize) -> Result<EquivalenceEstimate> {
    let ratios = equivalence_ratios(test_set, n)?;
    Ok(EquivalenceEstimate {
        ratio_min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        ratio_max: ratios.iter().copied().fold(0.0, f64::max),
        sample_count: ratios.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{triangle, CircleInterval};
    use crate::fourier::dft_coeffs;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn harmonic(k: i64, kmax: usize) -> SpectrumCoeffs {
        SpectrumCoeffs::from_terms(kmax, &[(k, Complex64::new(1.0, 0.0))]).unwrap()
    }

    fn random_trig(rng: &mut ChaCha8Rng, degree: usize) -> SpectrumCoeffs {
        let terms: Vec<(i64, Complex64)> = (-(degree as i64)..=degree as i64)
            .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
            .collect();
        SpectrumCoeffs::from_terms(degree, &terms).unwrap()
    }

    /// Brute-force sup over a fine grid of pairs, for comparison.
    fn modulus_brute(f: &PiecewiseLinearFunction, delta: f64, n: usize) -> f64 {
        let ts: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let mut best: f64 = 0.0;
        for &a in &ts {
            for &b in &ts {
                let d = (a - b).abs();
                if d.min(TAU - d) <= delta {
                    best = best.max((f.eval(a) - f.eval(b)).norm());
                }
            }
        }
        best
    }

    #[test]
    fn spectral_examples() {
        assert_abs_diff_eq!(sobolev_spectral(&harmonic(4, 4), 0.5), 2.0, epsilon = 1e-15);
        assert_eq!(sobolev_spectral(&harmonic(0, 3), 0.5), 0.0);
        for kk in 0..12u32 {
            let terms: Vec<(i64, Complex64)> = (0..=kk)
                .map(|k| (1i64 << k, Complex64::new(2f64.powf(-(k as f64) / 2.0), 0.0)))
                .collect();
            let s = SpectrumCoeffs::from_terms(1 << kk, &terms).unwrap();
            assert_abs_diff_eq!(sobolev_spectral(&s, 0.5).powi(2), kk as f64 + 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn spectral_monotone_in_s() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let c = random_trig(&mut rng, 10).map_coeffs(|k, v| if k == 0 { Complex64::new(0.0, 0.0) } else { v });
        let mut prev = 0.0;
        for s in [0.1, 0.25, 0.5, 0.75, 1.0, 1.5] {
            let v = sobolev_spectral(&c, s);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn integral_fft_matches_double_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = random_trig(&mut rng, 7);
        let g = synthesize(&c, 64).unwrap();
        assert_abs_diff_eq!(sobolev_integral(&g), sobolev_integral_direct(&g), epsilon = 1e-10);
        let tri = triangle(CircleInterval::new(1.0, 2.5).unwrap()).unwrap().sample(128).unwrap();
        assert_abs_diff_eq!(sobolev_integral(&tri), sobolev_integral_direct(&tri), epsilon = 1e-10);
    }

    #[test]
    fn integral_of_first_harmonic_matches_quadrature() {
        let g = synthesize(&harmonic(1, 1), 1 << 14).unwrap();
        let val = sobolev_integral(&g);
        let oracle = (TAU * harmonic_weight(1)).sqrt();
        assert!((val / oracle - 1.0).abs() < 1e-3, "{val} vs {oracle}");
        assert_eq!(sobolev_integral(&GridFunction::from_fn(16, |_| Complex64::new(3.0, 0.0)).unwrap()), 0.0);
    }

    #[test]
    fn harmonic_weight_is_near_pi_k() {
        // ∫₀^∞ 4 sin²(kθ/2)/θ² dθ = πk; the part beyond 2π is O(1)
        for k in [1u64, 4, 16, 64] {
            let w = harmonic_weight(k);
            let tail_max = 4.0 / TAU;
            assert!(w <= std::f64::consts::PI * k as f64 && w >= std::f64::consts::PI * k as f64 - tail_max);
        }
    }

    #[test]
    fn homogeneity_and_real_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = random_trig(&mut rng, 9);
        let g = synthesize(&c, 64).unwrap();
        let seven = Complex64::new(7.0, 0.0);
        assert_abs_diff_eq!(sobolev_spectral(&c.scale(seven), 0.5), 7.0 * sobolev_spectral(&c, 0.5), epsilon = 1e-12);
        assert_abs_diff_eq!(sobolev_integral(&g.scale(seven)), 7.0 * sobolev_integral(&g), epsilon = 1e-10);
        let full = sobolev_spectral(&c, 0.5);
        let re = sobolev_spectral(&c.real_part(), 0.5);
        let im = sobolev_spectral(&c.imag_part(), 0.5);
        assert!(re <= full && im <= full);
        // with even weights |k| the split is in fact Pythagorean
        assert_abs_diff_eq!(re * re + im * im, full * full, epsilon = 1e-10);
    }

    #[test]
    fn modulus_examples() {
        let f = triangle(CircleInterval::new(1.0, 2.0).unwrap()).unwrap();
        assert_abs_diff_eq!(modulus_of_continuity(&f, 0.5), 1.0, epsilon = 1e-15);
        assert_eq!(modulus_of_continuity(&f, 0.0), 0.0);
        assert_abs_diff_eq!(modulus_of_continuity(&f, 0.25), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn modulus_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..5 {
            let mut knots: Vec<f64> = (0..8).map(|_| rng.gen_range(0.0..TAU)).collect();
            knots.sort_by(f64::total_cmp);
            let vals: Vec<Complex64> =
                knots.iter().map(|_| Complex64::new(rng.gen_range(-1.0..1.0), 0.0)).collect();
            let f = PiecewiseLinearFunction::new(knots.clone(), vals.clone(), true).unwrap();
            let g = PiecewiseLinearFunction::new(
                knots,
                vals.iter().map(|v| Complex64::new(v.re, rng.gen_range(-1.0..1.0))).collect(),
                true,
            )
            .unwrap();
            for delta in [0.05, 0.4, 1.3, 3.0, 4.0] {
                for h in [&f, &g] {
                    let exact = modulus_of_continuity(h, delta);
                    let n = 720;
                    let brute = modulus_brute(h, delta, n);
                    // the grid search undershoots by at most one step at the steepest slope
                    let lip = h.pieces().iter().map(|p| p.slope().norm()).fold(0.0, f64::max);
                    assert!(exact >= brute - 1e-12);
                    assert!(exact - brute <= 2.0 * lip * TAU / n as f64, "δ={delta}: {exact} vs {brute}");
                }
            }
        }
    }

    #[test]
    fn lip_constant_is_zero_for_constants() {
        let c = PiecewiseLinearFunction::constant(Complex64::new(1.0, 0.0));
        let omega = ModulusSpec::power(1.0 / 3.0).unwrap();
        let r = lip_check(&c, &omega, &default_delta_grid()).unwrap();
        assert_eq!(r.max_ratio, 0.0);
        assert!(lip_check(&c, &omega, &[]).is_err());
        assert!(lip_check(&c, &omega, &[7.0]).is_err());
    }

    #[test]
    fn modulus_spec_validation() {
        assert!(ModulusSpec::power(0.0).is_err());
        assert!(ModulusSpec::power(1.5).is_err());
        assert!(ModulusSpec::table(vec![(0.1, 0.5), (0.2, 0.4)]).is_err());
        // concave table is subadditive
        let ok = ModulusSpec::table(vec![(0.01, 0.1), (0.1, 0.3), (1.0, 0.9)]).unwrap();
        assert_abs_diff_eq!(ok.eval(0.005), 0.05, epsilon = 1e-15);
        assert_eq!(ok.eval(2.0), 0.9);
        // convex growth violates subadditivity
        assert!(ModulusSpec::table(vec![(0.1, 0.01), (0.2, 0.1)]).is_err());
        let p = ModulusSpec::power(1.0 / 3.0).unwrap();
        assert_eq!(p.eval(2f64.powi(-18)), 2f64.powi(-6));
        assert_eq!(p.eval(0.0), 0.0);
    }

    #[test]
    fn equivalence_on_harmonics() {
        let set: Vec<SpectrumCoeffs> = (1..=32).map(|k| harmonic(k, 32)).collect();
        let est = equivalence_scan(&set, 1 << 12).unwrap();
        assert_eq!(est.sample_count, 32);
        assert!(est.ratio_max / est.ratio_min < 4.0);
        let with_const = vec![harmonic(0, 2)];
        assert!(equivalence_scan(&with_const, 64).is_err());
    }

    #[test]
    fn equivalence_random_trig_is_stable() {
        let scan = |seed: u64| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let set: Vec<SpectrumCoeffs> =
                (0..100).map(|_| { let d = rng.gen_range(1..=64); random_trig(&mut rng, d) }).collect();
            equivalence_scan(&set, 1 << 10).unwrap()
        };
        let (a, b) = (scan(42), scan(43));
        assert!(a.ratio_max / a.ratio_min < 10.0);
        assert!(b.ratio_max / b.ratio_min < 10.0);
        let scaled = {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            let c = random_trig(&mut rng, 20);
            let r1 = equivalence_ratios(&[c.clone()], 256).unwrap()[0];
            let r7 = equivalence_ratios(&[c.scale(Complex64::new(7.0, 0.0))], 256).unwrap()[0];
            (r1, r7)
        };
        assert_abs_diff_eq!(scaled.0, scaled.1, epsilon = 1e-12);
    }

    #[test]
    fn spectral_of_sampled_pl() {
        let f = triangle(CircleInterval::new(1.0, 2.0).unwrap()).unwrap();
        let c = dft_coeffs(&f.sample(1 << 12).unwrap(), 1 << 10).unwrap();
        assert!(c.hermitian_defect() < 1e-10);
    }
}
