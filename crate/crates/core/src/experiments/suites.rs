//! Self-checks of the construction, each returning a [`SuiteResult`] that
//! names the property checked and, on failure, the first witness found.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::lacunary::lacunary_fixture;
use crate::circle::{triangle, CircleInterval, PiecewiseLinearFunction, TAU};
use crate::construction::{
    build_delta_sequence, build_u, is_active, n_grid, place_intervals, truncate_un, DeltaSequence, TriangleSystem,
};
use crate::error::Result;
use crate::fourier::{pl_spectrum, SpectrumCoeffs};
use crate::homeo::{superpose, PLHomeomorphism};
use crate::seminorm::{default_delta_grid, equivalence_ratios, harmonic_weight, lip_check, ModulusSpec};
use crate::stieltjes::{duality_check, harmonic_stieltjes, stieltjes_check, stieltjes_check_with, rs_integral};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    /// The inequality or identity under test, in words.
    pub property: String,
    pub passed: bool,
    pub checks: usize,
    pub detail: String,
    pub witness: Option<String>,
    pub elapsed_ms: u128,
}

impl SuiteResult {
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        let mut s = format!("{status} {} ({}): {}", self.name, self.property, self.detail);
        if let Some(w) = &self.witness {
            s.push_str(&format!(" | witness: {w}"));
        }
        s
    }
}

struct Tally {
    name: &'static str,
    property: &'static str,
    start: Instant,
    checks: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(name: &'static str, property: &'static str) -> Self {
        Self { name, property, start: Instant::now(), checks: 0, witness: None }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    fn finish(self, detail: String) -> SuiteResult {
        SuiteResult {
            name: self.name.into(),
            property: self.property.into(),
            passed: self.witness.is_none(),
            checks: self.checks,
            detail,
            witness: self.witness,
            elapsed_ms: self.start.elapsed().as_millis(),
        }
    }
}

/// Defining inequalities of the scale sequence and its block sums.
pub fn suite_sequence(omega: &ModulusSpec, blocks: usize) -> SuiteResult {
    let mut t = Tally::new("scale-sequence", "ε_j < 2^-(j+1), ω(ε_j)²/ε_j >= 2^j, n_j bracketed, block sums >= 1/2, Σδ <= 1");
    let seq = match build_delta_sequence(omega, blocks) {
        Ok(s) => s,
        Err(e) => {
            t.check(false, || e.to_string());
            return t.finish("construction failed".into());
        }
    };
    check_sequence(&mut t, &seq);
    let detail = format!("J={blocks}, {} scales, Σδ={:.6}", seq.len(), seq.total_delta());
    t.finish(detail)
}

fn check_sequence(t: &mut Tally, seq: &DeltaSequence) {
    for (i, (&eps, &n)) in seq.epsilons.iter().zip(&seq.block_sizes).enumerate() {
        let j = i as i32 + 1;
        let w = seq.omega.eval(eps);
        t.check(eps < 0.5f64.powi(j + 1), || format!("block {j}: ε = {eps:e}"));
        t.check(w * w / eps >= 2f64.powi(j) * (1.0 - 1e-12), || format!("block {j}: ω(ε)²/ε = {:e}", w * w / eps));
        let lo = 1.0 / (2f64.powi(j + 1) * eps);
        let hi = 1.0 / (2f64.powi(j) * eps);
        t.check(n as f64 >= lo * (1.0 - 1e-12) && (n as f64) < hi, || format!("block {j}: n = {n} not in [{lo}, {hi})"));
    }
    for (i, s) in seq.block_sums().iter().enumerate() {
        t.check(*s >= 0.5 - 1e-12, || format!("block {}: sum of ω(δ)² = {s}", i + 1));
    }
    let total = seq.total_delta();
    t.check(total <= 1.0, || format!("Σδ = {total}"));
}

/// `|Δ_I(t₁) - Δ_I(t₂)| <= (2/|I|) |t₁ - t₂|` on random triples.
pub fn suite_triangle_bound(samples: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new("triangle-difference", "|Δ_I(t1) - Δ_I(t2)| <= 2|t1 - t2|/|I|");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for i in 0..samples {
        let (a, b) = loop {
            let a = rng.gen_range(0.0..TAU);
            let b = rng.gen_range(0.0..TAU);
            let (a, b) = (a.min(b), a.max(b));
            if a > 0.0 && b - a > 1e-9 {
                break (a, b);
            }
        };
        let tri = triangle(CircleInterval::new(a, b).expect("ordered endpoints")).expect("inside the circle");
        // half of the points are drawn inside I, where the bound is tight
        let draw = |rng: &mut ChaCha8Rng| if i % 2 == 0 { rng.gen_range(a..=b) } else { rng.gen_range(0.0..TAU) };
        let (t1, t2) = (draw(&mut rng), draw(&mut rng));
        let lhs = (tri.eval_re(t1) - tri.eval_re(t2)).abs();
        let rhs = 2.0 / (b - a) * (t1 - t2).abs();
        worst = worst.max(lhs - rhs);
        t.check(lhs <= rhs + 1e-12, || format!("I=[{a}, {b}], t1={t1}, t2={t2}: {lhs} > {rhs}"));
    }
    t.finish(format!("{samples} triples, largest excess {worst:e}"))
}

/// `ω(u, δ) <= C ω(δ)` and the same for `v` on the dyadic δ grid.
pub fn suite_lipschitz(sys: &TriangleSystem, omega: &ModulusSpec, constant: f64) -> SuiteResult {
    let mut t = Tally::new("modulus-bound", "ω(u,δ) <= C ω(δ) and ω(v,δ) <= C ω(δ)");
    let mut ratios = Vec::new();
    for (name, f) in [("u", build_u(sys)), ("v", crate::construction::build_v(sys))] {
        match lip_check(&f, omega, &default_delta_grid()) {
            Ok(r) => {
                t.check(r.holds(constant), || format!("{name}: ratio {} at δ = {:e}", r.max_ratio, r.worst_delta));
                ratios.push(r.max_ratio);
            }
            Err(e) => t.check(false, || format!("{name}: {e}")),
        }
    }
    t.finish(format!("C={constant}, largest ratios {ratios:.4?}"))
}

/// Truncation contracts differences, stays above `u`, and has the expected variation.
pub fn suite_truncation(sys: &TriangleSystem, pairs: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new("truncation", "|u_n(t1) - u_n(t2)| <= |u(t1) - u(t2)|, variation 2Σ(w - 1/n)+");
    let u = build_u(sys);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in n_grid(sys) {
        let un = match truncate_un(&u, n) {
            Ok(f) => f,
            Err(e) => {
                t.check(false, || format!("n={n}: {e}"));
                continue;
            }
        };
        for _ in 0..pairs {
            let (t1, t2) = (rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU));
            let du = (u.eval_re(t1) - u.eval_re(t2)).abs();
            let dun = (un.eval_re(t1) - un.eval_re(t2)).abs();
            t.check(dun <= du + 1e-13, || format!("n={n}, t1={t1}, t2={t2}"));
        }
        let level = 1.0 / n as f64;
        let expected: f64 = sys.weights().iter().filter(|&&w| w > level).map(|w| 2.0 * (w - level)).sum();
        let tv = un.total_variation().unwrap_or(f64::NAN);
        t.check((tv - expected).abs() <= 1e-10 * expected.max(1.0), || format!("n={n}: variation {tv} vs {expected}"));
    }
    t.finish(format!("{} truncation levels", n_grid(sys).len()))
}

/// `∫_{J_k} v du_n >= (2/9) w_k²` for active `k`, `>= 0` always, and the
/// total above the certified sum, at every `n` of the grid.
pub fn suite_stieltjes(sys: &TriangleSystem, v: &PiecewiseLinearFunction) -> SuiteResult {
    let mut t = Tally::new("stieltjes-lower-bound", "∫_{J_k} v du_n >= (2/9) w_k² when w_k >= 3/n, >= 0 always");
    let grid = n_grid(sys);
    let mut active = 0;
    for &n in &grid {
        match stieltjes_check_with(sys, v, n) {
            Ok(r) => {
                active += sys.weights().iter().filter(|&&w| is_active(w, n)).count();
                let bad = r.violations();
                t.check(bad.is_empty(), || {
                    let (k, msg) = &bad[0];
                    format!("n={n}, k={k}: {msg}")
                });
                t.checks += r.per_interval.len();
            }
            Err(e) => t.check(false, || format!("n={n}: {e}")),
        }
    }
    t.finish(format!("K={}, n in {grid:?}, {active} active pairs", sys.len()))
}

/// Largest value over the grid of `∫ v du_n` and of the certified sum,
/// per block count `1..=blocks`.
pub fn sup_by_blocks(omega: &ModulusSpec, blocks: usize) -> Result<Vec<(f64, f64)>> {
    (1..=blocks)
        .map(|j| {
            let seq = build_delta_sequence(omega, j)?;
            let sys = place_intervals(&seq, seq.len())?;
            let mut best = (f64::NEG_INFINITY, f64::NEG_INFINITY);
            for n in n_grid(&sys) {
                let r = stieltjes_check(&sys, n)?;
                best = (best.0.max(r.value.re), best.1.max(r.lower_bound));
            }
            Ok(best)
        })
        .collect()
}

/// Each added block raises the supremum over `n` by at least `1/9`.
pub fn suite_growth(omega: &ModulusSpec, blocks: usize) -> SuiteResult {
    let mut t = Tally::new("block-growth", "sup_n ∫ v du_n and its certified sum grow by >= 1/9 per block");
    let sups = match sup_by_blocks(omega, blocks) {
        Ok(s) => s,
        Err(e) => {
            t.check(false, || e.to_string());
            return t.finish("construction failed".into());
        }
    };
    let mut prev = (0.0, 0.0);
    for (j, &(value, certified)) in sups.iter().enumerate() {
        t.check(value - prev.0 >= 1.0 / 9.0 - 1e-10, || format!("J={}: value step {}", j + 1, value - prev.0));
        t.check(certified - prev.1 >= 1.0 / 9.0 - 1e-10, || format!("J={}: certified step {}", j + 1, certified - prev.1));
        prev = (value, certified);
    }
    let values: Vec<f64> = sups.iter().map(|s| s.0).collect();
    t.finish(format!("sup values {values:.4?}"))
}

fn random_trig(rng: &mut ChaCha8Rng, degree: usize) -> SpectrumCoeffs {
    let terms: Vec<(i64, Complex64)> = (-(degree as i64)..=degree as i64)
        .map(|k| (k, Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
        .collect();
    SpectrumCoeffs::from_terms(degree, &terms).expect("degree within range")
}

/// Real periodic PL function with `m` knots at jittered grid positions.
pub fn random_pl(rng: &mut ChaCha8Rng, m: usize) -> PiecewiseLinearFunction {
    let knots: Vec<f64> = (0..m).map(|i| TAU * (i as f64 + rng.gen_range(0.05..0.95)) / m as f64).collect();
    let vals: Vec<f64> = knots.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PiecewiseLinearFunction::from_real(knots, &vals).expect("increasing knots")
}

/// Duality inequality on random pairs, plus the integration-by-parts
/// identity `(1/2π) ∫ e^{ikt} dy = -ik ŷ(-k)`.
pub fn suite_duality(pairs: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new("duality", "|(1/2π) ∫ x dy| <= ‖x‖ ‖y‖ and (1/2π) ∫ e^{ikt} dy = -ik ŷ(-k)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tightest: f64 = 0.0;
    let mut ibp_err: f64 = 0.0;
    for i in 0..pairs {
        let m = rng.gen_range(2..=64);
        let y = random_pl(&mut rng, m);
        let degree = rng.gen_range(1..=64usize);
        let spec = match pl_spectrum(&y, degree) {
            Ok(s) => s,
            Err(e) => {
                t.check(false, || format!("pair {i}: {e}"));
                continue;
            }
        };
        let mut x = random_trig(&mut rng, degree);
        if i % 10 == 9 {
            // near-extremal: align x with the conjugate of -ik ŷ(-k) / |k|
            x = SpectrumCoeffs::zeros(degree).map_coeffs(|k, _| {
                if k == 0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    (Complex64::new(0.0, -(k as f64)) * spec.get(-k)).conj() / k.unsigned_abs() as f64
                }
            });
        }
        match duality_check(&x, &y) {
            Ok(r) => {
                if r.rhs > 0.0 {
                    tightest = tightest.max(r.lhs / r.rhs);
                }
                t.check(r.holds, || format!("pair {i} (seed {seed}): lhs {} > rhs {}", r.lhs, r.rhs));
            }
            Err(e) => t.check(false, || format!("pair {i}: {e}")),
        }
        for k in -(degree as i64)..=degree as i64 {
            let direct = harmonic_stieltjes(k, &y).unwrap_or(Complex64::new(f64::NAN, 0.0));
            let closed = Complex64::new(0.0, -(k as f64)) * spec.get(-k);
            let err = (direct - closed).norm();
            ibp_err = ibp_err.max(err);
            t.check(err <= 1e-10, || format!("pair {i}, k={k}: |{direct} - {closed}| = {err:e}"));
        }
    }
    t.finish(format!("{pairs} pairs, largest lhs/rhs {tightest:.6}, identity error {ibp_err:e}"))
}

/// Exactness of `f∘h`: variation, extrema, round trip, Stieltjes invariance.
pub fn suite_superposition(pairs: usize, seed: u64) -> SuiteResult {
    let mut t = Tally::new("superposition", "f∘h keeps variation and extrema, (f∘h)∘h⁻¹ = f, ∫ x∘h d(y∘h) = ∫ x dy");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..pairs {
        let (mf, mg) = (rng.gen_range(3..=64), rng.gen_range(3..=64));
        let f = random_pl(&mut rng, mf);
        let g = random_pl(&mut rng, mg);
        let roughness = rng.gen_range(0.0..2.0);
        let h = match PLHomeomorphism::random(rng.gen_range(2..=64), roughness, rng.gen()) {
            Ok(h) => h,
            Err(e) => {
                t.check(false, || format!("pair {i}: {e}"));
                continue;
            }
        };
        let run = || -> Result<(f64, f64, f64, f64)> {
            let fh = superpose(&f, &h)?;
            let gh = superpose(&g, &h)?;
            let tv = (fh.total_variation()? - f.total_variation()?).abs();
            let back = superpose(&fh, &h.invert())?;
            let rt = f.knots().iter().map(|&x| (back.eval_re(x) - f.eval_re(x)).abs()).fold(0.0, f64::max);
            let inv = (rs_integral(&fh, &gh)? - rs_integral(&f, &g)?).norm();
            let ext = (fh.max_re() - f.max_re()).abs() + (fh.min_re() - f.min_re()).abs();
            Ok((tv, rt, inv, ext))
        };
        match run() {
            Ok((tv, rt, inv, ext)) => {
                t.check(tv <= 1e-10, || format!("pair {i}: variation changed by {tv:e}"));
                t.check(rt <= 1e-10, || format!("pair {i}: round trip off by {rt:e}"));
                t.check(inv <= 1e-9, || format!("pair {i}: Stieltjes integral changed by {inv:e}"));
                t.check(ext == 0.0, || format!("pair {i}: extrema moved by {ext:e}"));
            }
            Err(e) => t.check(false, || format!("pair {i}: {e}")),
        }
    }
    t.finish(format!("{pairs} pairs"))
}

/// Squared seminorm of the dyadic partial sums equals `K + 1`.
pub fn suite_lacunary(max_terms: usize) -> SuiteResult {
    let mut t = Tally::new("lacunary", "‖Σ_{k<=K} 2^{-k/2} e^{i2^k t}‖² = K + 1");
    let mut ratios = Vec::new();
    for k in 0..=max_terms {
        match lacunary_fixture(k) {
            Ok(r) => {
                t.check((r.seminorm_sq - r.expected).abs() <= 1e-12, || format!("K={k}: {} vs {}", r.seminorm_sq, r.expected));
                ratios.push(r.lip_half_ratio);
            }
            Err(e) => t.check(false, || format!("K={k}: {e}")),
        }
    }
    let max_ratio = ratios.iter().copied().fold(0.0, f64::max);
    t.finish(format!("K=0..{max_terms}, seminorm² grows by 1 per term, Lip-1/2 ratio <= {max_ratio:.3}"))
}

/// Ratio of the two seminorms on harmonics `1..=harmonics`: bounded spread,
/// and agreement with the scalar quadrature `√(2π w(k)/k)`.
pub fn suite_equivalence(harmonics: usize, grid: usize) -> SuiteResult {
    let mut t = Tally::new("seminorm-equivalence", "integral/spectral ratios on harmonics within max/min < 4, matching quadrature to 1%");
    let set: Vec<SpectrumCoeffs> = (1..=harmonics as i64)
        .map(|k| SpectrumCoeffs::from_terms(harmonics, &[(k, Complex64::new(1.0, 0.0))]).expect("in range"))
        .collect();
    let ratios = match equivalence_ratios(&set, grid) {
        Ok(r) => r,
        Err(e) => {
            t.check(false, || e.to_string());
            return t.finish("scan failed".into());
        }
    };
    let oracle: Vec<f64> = (1..=harmonics as u64).map(|k| (TAU * harmonic_weight(k) / k as f64).sqrt()).collect();
    for (i, (r, o)) in ratios.iter().zip(&oracle).enumerate() {
        t.check((r / o - 1.0).abs() <= 0.01, || format!("k={}: ratio {r} vs quadrature {o}", i + 1));
    }
    let (lo, hi) = min_max(&ratios);
    let (olo, ohi) = min_max(&oracle);
    t.check(hi / lo < 4.0, || format!("spread {}", hi / lo));
    t.check((lo / olo - 1.0).abs() <= 0.01 && (hi / ohi - 1.0).abs() <= 0.01, || {
        format!("interval [{lo}, {hi}] vs quadrature [{olo}, {ohi}]")
    });
    t.finish(format!("N={grid}, ratios in [{lo:.5}, {hi:.5}], quadrature [{olo:.5}, {ohi:.5}]"))
}

fn min_max(xs: &[f64]) -> (f64, f64) {
    xs.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)))
}
