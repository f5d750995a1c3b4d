//! Riemann–Stieltjes integrals `∫ x dy` of piecewise-linear functions, the
//! per-interval lower bounds for `∫ v du_n`, and the duality inequality
//! `|(1/2π) ∫ x dy| <= ‖x‖ ‖y‖` in the `W₂^{1/2}` seminorm.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::{merge_knots, PiecewiseLinearFunction, TAU};
use crate::construction::{build_u, build_v, is_active, truncate_un, TriangleSystem};
use crate::error::{Error, Result};
use crate::fourier::SpectrumCoeffs;
use crate::halfnorm::sobolev_half_exact;
use crate::seminorm::sobolev_spectral;

/// `∫₀^{2π} x dy` over one period. On every piece of the merged knot set
/// both functions are linear, so the piece contributes `Δy · (x(p) + x(q))/2`.
pub fn rs_integral(x: &PiecewiseLinearFunction, y: &PiecewiseLinearFunction) -> Result<Complex64> {
    y.require_periodic()?;
    let knots = merge_knots(x.knots(), y.knots());
    let m = knots.len();
    let xs: Vec<Complex64> = knots.iter().map(|&t| x.eval(t)).collect();
    let ys: Vec<Complex64> = knots.iter().map(|&t| y.eval(t)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..m {
        let j = (i + 1) % m;
        acc += (ys[j] - ys[i]) * (xs[i] + xs[j]) * 0.5;
    }
    Ok(acc)
}

/// `∫_lo^hi x dy` for `0 <= lo < hi <= 2π`, without wrapping.
pub fn rs_integral_on(x: &PiecewiseLinearFunction, y: &PiecewiseLinearFunction, lo: f64, hi: f64) -> Result<Complex64> {
    if !(0.0 <= lo && lo < hi && hi <= TAU) {
        return Err(Error::InvalidInterval { a: lo, b: hi, reason: "need 0 <= lo < hi <= 2π" });
    }
    let inner = |k: &[f64]| -> Vec<f64> {
        let i0 = k.partition_point(|&t| t <= lo);
        let i1 = k.partition_point(|&t| t < hi);
        k[i0..i1].to_vec()
    };
    let mut pts = vec![lo];
    pts.extend(merge_knots(&inner(x.knots()), &inner(y.knots())));
    pts.push(hi);
    // evaluation at 2π wraps to 0; take the left limit instead
    let at = |f: &PiecewiseLinearFunction, t: f64| if t == TAU { f.eval(TAU * (1.0 - f64::EPSILON)) } else { f.eval(t) };
    let mut acc = Complex64::new(0.0, 0.0);
    let (mut xp, mut yp) = (at(x, lo), at(y, lo));
    for &t in &pts[1..] {
        let (xq, yq) = (at(x, t), at(y, t));
        acc += (yq - yp) * (xp + xq) * 0.5;
        xp = xq;
        yp = yq;
    }
    Ok(acc)
}

/// `(1/2π) ∫ e^{ikt} dy` computed piece by piece from the slopes of `y`.
pub fn harmonic_stieltjes(k: i64, y: &PiecewiseLinearFunction) -> Result<Complex64> {
    y.require_periodic()?;
    let kf = k as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in y.pieces() {
        let h = p.t1 - p.t0;
        // ∫_{t0}^{t1} e^{ikt} dt = e^{ik·mid} · 2 sin(kh/2)/k
        let integral = if k == 0 {
            Complex64::new(h, 0.0)
        } else {
            Complex64::from_polar(2.0 * (0.5 * kf * h).sin() / kf, 0.5 * kf * (p.t0 + p.t1))
        };
        acc += p.slope() * integral;
    }
    Ok(acc / TAU)
}

/// `(1/2π) ∫ x dy` for a trigonometric polynomial `x`.
pub fn rs_integral_trig(x: &SpectrumCoeffs, y: &PiecewiseLinearFunction) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, c) in x.iter() {
        if c != Complex64::new(0.0, 0.0) {
            acc += c * harmonic_stieltjes(k, y)?;
        }
    }
    Ok(acc)
}

/// Contribution of one left half `J_k` to `∫ v du_n` (`k` is 1-based).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalContribution {
    pub k: usize,
    pub w: f64,
    pub contribution: f64,
    pub lower_bound_term: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StieltjesReport {
    /// `∫_𝕋 v du_n`.
    pub value: Complex64,
    pub per_interval: Vec<IntervalContribution>,
    pub n: u64,
    /// `Σ_{k : w_k >= 3/n} (2/9) w_k²`.
    pub lower_bound: f64,
}

/// Relative slack for inequalities that are proven to hold.
pub const INEQUALITY_SLACK: f64 = 1e-8;

impl StieltjesReport {
    /// One-based indices whose contribution misses its bound, with a reason.
    pub fn violations(&self) -> Vec<(usize, String)> {
        let mut out = Vec::new();
        for c in &self.per_interval {
            let tiny = 1e-15 * c.w * c.w;
            if c.contribution < -tiny {
                out.push((c.k, format!("contribution {} is negative", c.contribution)));
            } else if c.contribution < c.lower_bound_term * (1.0 - INEQUALITY_SLACK) - tiny {
                out.push((c.k, format!("contribution {} below (2/9)w² = {}", c.contribution, c.lower_bound_term)));
            }
        }
        if self.value.re < self.lower_bound * (1.0 - INEQUALITY_SLACK) {
            out.push((0, format!("total {} below certified sum {}", self.value.re, self.lower_bound)));
        }
        out
    }

    pub fn holds(&self) -> bool {
        self.violations().is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,w_k,contribution,lower_bound_term")?;
        for c in &self.per_interval {
            writeln!(out, "{},{:e},{:e},{:e}", c.k, c.w, c.contribution, c.lower_bound_term)?;
        }
        Ok(())
    }
}

/// Evaluates `∫ v du_n` for the system's own `u` and `v`.
pub fn stieltjes_check(sys: &TriangleSystem, n: u64) -> Result<StieltjesReport> {
    stieltjes_check_with(sys, &build_v(sys), n)
}

/// As [`stieltjes_check`] with an explicit integrand `v` (used for mutation
/// tests of the bound).
pub fn stieltjes_check_with(sys: &TriangleSystem, v: &PiecewiseLinearFunction, n: u64) -> Result<StieltjesReport> {
    let un = truncate_un(&build_u(sys), n)?;
    let mut per_interval = Vec::with_capacity(sys.len());
    let mut lower_bound = 0.0;
    for k in 0..sys.len() {
        let (lo, hi) = sys.left_half(k);
        let w = sys.weights()[k];
        let contribution = rs_integral_on(v, &un, lo, hi)?.re;
        let lower_bound_term = if is_active(w, n) { 2.0 / 9.0 * w * w } else { 0.0 };
        lower_bound += lower_bound_term;
        per_interval.push(IntervalContribution { k: k + 1, w, contribution, lower_bound_term });
    }
    let value = if sys.is_empty() { Complex64::new(0.0, 0.0) } else { rs_integral(v, &un)? };
    Ok(StieltjesReport { value, per_interval, n, lower_bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// `|(1/2π) ∫ x dy|` against `‖x‖ · ‖y‖`. The seminorm of `y` is the exact
/// value of the full series, so no truncation tail enters.
pub fn duality_check(x: &SpectrumCoeffs, y: &PiecewiseLinearFunction) -> Result<DualityReport> {
    y.require_real()?;
    let lhs = rs_integral_trig(x, y)?.norm();
    let rhs = sobolev_spectral(x, 0.5) * sobolev_half_exact(y)?;
    Ok(DualityReport { lhs, rhs, holds: lhs <= rhs * (1.0 + INEQUALITY_SLACK) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{triangle, CircleInterval};
    use crate::construction::{build_delta_sequence, n_grid, place_intervals};
    use crate::fourier::pl_spectrum;
    use crate::homeo::{superpose, PLHomeomorphism};
    use crate::seminorm::ModulusSpec;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_pl(rng: &mut ChaCha8Rng, m: usize) -> PiecewiseLinearFunction {
        let mut knots: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
        knots.sort_by(f64::total_cmp);
        knots.dedup();
        let vals: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
        PiecewiseLinearFunction::from_real(knots, &vals).unwrap()
    }

    fn system(blocks: usize) -> TriangleSystem {
        let seq = build_delta_sequence(&ModulusSpec::power(1.0 / 3.0).unwrap(), blocks).unwrap();
        place_intervals(&seq, seq.len()).unwrap()
    }

    #[test]
    fn trivial_integrators() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_pl(&mut rng, 10);
        let y = random_pl(&mut rng, 10);
        let c = PiecewiseLinearFunction::constant(Complex64::new(2.0, 0.0));
        assert_eq!(rs_integral(&x, &c).unwrap(), Complex64::new(0.0, 0.0));
        assert!(rs_integral(&c, &y).unwrap().norm() < 1e-15);
    }

    #[test]
    fn integration_by_parts() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let y = random_pl(&mut rng, 30);
            let spec = pl_spectrum(&y, 64).unwrap();
            for k in -64i64..=64 {
                let lhs = harmonic_stieltjes(k, &y).unwrap();
                let rhs = Complex64::new(0.0, -(k as f64)) * spec.get(-k);
                assert!((lhs - rhs).norm() < 1e-10, "k={k}");
            }
        }
    }

    #[test]
    fn integral_against_dense_pl_harmonic() {
        // the PL interpolant of e^{it} on a fine grid approximates the exact harmonic integral
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let y = random_pl(&mut rng, 12);
        let n = 1 << 14;
        let knots: Vec<f64> = (0..n).map(|j| TAU * j as f64 / n as f64).collect();
        let vals: Vec<Complex64> = knots.iter().map(|&t| Complex64::from_polar(1.0, t)).collect();
        let x = PiecewiseLinearFunction::new(knots, vals, true).unwrap();
        let dense = rs_integral(&x, &y).unwrap() / TAU;
        assert!((dense - harmonic_stieltjes(1, &y).unwrap()).norm() < 1e-6);
    }

    #[test]
    fn bilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (x1, x2, y1, y2) = (random_pl(&mut rng, 8), random_pl(&mut rng, 9), random_pl(&mut rng, 7), random_pl(&mut rng, 6));
        let a = Complex64::new(2.5, -1.0);
        let lhs = rs_integral(&x1.scale(a).add(&x2), &y1.add(&y2)).unwrap();
        let rhs = a * (rs_integral(&x1, &y1).unwrap() + rs_integral(&x1, &y2).unwrap())
            + rs_integral(&x2, &y1).unwrap()
            + rs_integral(&x2, &y2).unwrap();
        assert!((lhs - rhs).norm() < 1e-12);
    }

    #[test]
    fn sub_interval_pieces_add_up() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_pl(&mut rng, 11);
        let y = random_pl(&mut rng, 13);
        let cuts = [0.0, 0.7, 2.0, 2.0001, 5.5, TAU];
        let total: Complex64 = cuts.windows(2).map(|w| rs_integral_on(&x, &y, w[0], w[1]).unwrap()).sum();
        // rs_integral starts at the first merged knot; the sum is over [0, 2π]
        assert!((total - rs_integral(&x, &y).unwrap()).norm() < 1e-12);
        assert!(rs_integral_on(&x, &y, 1.0, 1.0).is_err());
    }

    #[test]
    fn stieltjes_bounds_hold() {
        let sys = system(4);
        for n in n_grid(&sys) {
            let r = stieltjes_check(&sys, n).unwrap();
            assert!(r.holds(), "n={n}: {:?}", r.violations());
            let sum: f64 = r.per_interval.iter().map(|c| c.contribution).sum();
            assert_abs_diff_eq!(sum, r.value.re, epsilon = 1e-12);
            assert_eq!(r.value.im, 0.0);
        }
    }

    #[test]
    fn newest_block_contribution_is_seven_eighteenths() {
        // at n = 3/w the truncation level meets u exactly at a + δ
        let sys = system(3);
        let n = *n_grid(&sys).last().unwrap();
        let r = stieltjes_check(&sys, n).unwrap();
        let last = r.per_interval.last().unwrap();
        assert_abs_diff_eq!(last.contribution, 7.0 / 18.0 * last.w * last.w, epsilon = 1e-14);
        // in general, with level l = 1/n <= w/2, the value is w²/2 - l²
        let first = &r.per_interval[0];
        let level = 1.0 / n as f64;
        let full = 0.5 * first.w * first.w - level * level;
        assert_abs_diff_eq!(first.contribution, full, epsilon = 1e-14);
    }

    #[test]
    fn halved_v_breaks_the_bound() {
        let sys = system(3);
        let n = *n_grid(&sys).last().unwrap();
        let v_half = build_v(&sys.with_scaled_weights(0.5));
        let r = stieltjes_check_with(&sys, &v_half, n).unwrap();
        let bad: Vec<usize> = r.violations().iter().map(|(k, _)| *k).filter(|&k| k > 0).collect();
        assert!(!bad.is_empty());
        // the failing triangles are the newly activated ones
        let newest = sys.weights().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(bad.iter().all(|&k| sys.weights()[k - 1] == newest));
    }

    #[test]
    fn report_csv() {
        let sys = system(1);
        let r = stieltjes_check(&sys, 6).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,w_k,contribution,lower_bound_term\n"));
        assert_eq!(text.lines().count(), 3);
        let json = serde_json::to_value(&r).unwrap();
        assert_eq!(json["per_interval"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn duality_on_first_harmonic() {
        let y = triangle(CircleInterval::new(1.0, 2.0).unwrap()).unwrap();
        let x = SpectrumCoeffs::from_terms(1, &[(1, Complex64::new(1.0, 0.0))]).unwrap();
        let r = duality_check(&x, &y).unwrap();
        let yhat = pl_spectrum(&y, 1).unwrap().get(-1);
        assert_abs_diff_eq!(r.lhs, yhat.norm(), epsilon = 1e-14);
        assert!(r.holds && r.lhs < r.rhs);
        let c = SpectrumCoeffs::from_terms(2, &[(0, Complex64::new(3.0, 0.0))]).unwrap();
        assert_eq!(duality_check(&c, &y).unwrap().lhs, 0.0);
    }

    #[test]
    fn change_of_variable_invariance() {
        let sys = system(2);
        let un = truncate_un(&build_u(&sys), 12).unwrap();
        let v = build_v(&sys);
        let base = rs_integral(&v, &un).unwrap();
        for seed in 0..10 {
            let h = PLHomeomorphism::random(32, 1.5, seed).unwrap();
            let moved = rs_integral(&superpose(&v, &h).unwrap(), &superpose(&un, &h).unwrap()).unwrap();
            assert!((moved - base).norm() < 1e-9);
        }
    }
}
