//! Interval systems and the functions `u`, `v`, `f = u + iv` built on them.
//!
//! Blocks `j = 1..J` carry `n_j` copies of a scale `ε_j`; every scale gives a
//! triangle of width `6ε_j` and height `w = ω(ε_j)` for `u`, and a triangle
//! on its left half with the same height for `v`.

use serde::{Deserialize, Serialize};

use crate::circle::{PiecewiseLinearFunction, TAU};
use crate::error::{Error, Result};
use crate::seminorm::ModulusSpec;

/// Scales `ε_j` and block sizes `n_j`, flattened into `δ_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaSequence {
    pub omega: ModulusSpec,
    pub epsilons: Vec<f64>,
    pub block_sizes: Vec<usize>,
    /// `N_0 = 1`, `N_j = N_{j-1} + n_j`; block `j` covers `N_{j-1} <= k < N_j`.
    pub block_starts: Vec<usize>,
    pub deltas: Vec<f64>,
    /// Built without the growth condition on `ω(ε)²/ε`; no bounds are claimed.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub exploratory: bool,
}

impl DeltaSequence {
    pub fn blocks(&self) -> usize {
        self.epsilons.len()
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.deltas.iter().map(|&d| self.omega.eval(d)).collect()
    }

    /// `Σ_{k in block j} ω(δ_k)²`, one entry per block.
    pub fn block_sums(&self) -> Vec<f64> {
        self.epsilons
            .iter()
            .zip(&self.block_sizes)
            .map(|(&e, &n)| {
                let w = self.omega.eval(e);
                n as f64 * w * w
            })
            .collect()
    }

    pub fn total_delta(&self) -> f64 {
        self.epsilons.iter().zip(&self.block_sizes).map(|(&e, &n)| n as f64 * e).sum()
    }

    /// Checks every defining inequality; the message names the block.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Construction(msg));
        if self.block_starts.first() != Some(&1) || self.block_starts.len() != self.blocks() + 1 {
            return fail("block starts must begin at 1 with one entry per block".into());
        }
        for (i, (&eps, &n)) in self.epsilons.iter().zip(&self.block_sizes).enumerate() {
            let j = i as i32 + 1;
            let w = self.omega.eval(eps);
            if !(eps > 0.0 && eps < 0.5f64.powi(j + 1)) {
                return fail(format!("block {j}: ε = {eps:e} not in (0, 2^-{})", j + 1));
            }
            if !self.exploratory && w * w / eps < 2f64.powi(j) * (1.0 - 1e-12) {
                return fail(format!("block {j}: ω(ε)²/ε = {:e} < 2^{j}", w * w / eps));
            }
            let lo = 1.0 / (2f64.powi(j + 1) * eps);
            let hi = 1.0 / (2f64.powi(j) * eps);
            if (n as f64) < lo * (1.0 - 1e-12) || n as f64 >= hi {
                return fail(format!("block {j}: n = {n} outside [{lo}, {hi})"));
            }
            if self.block_starts[i + 1] != self.block_starts[i] + n {
                return fail(format!("block {j}: start index mismatch"));
            }
        }
        if self.deltas.len() != self.block_sizes.iter().sum::<usize>() {
            return fail("flattened length differs from block sizes".into());
        }
        if self.total_delta() > 1.0 + 1e-12 {
            return fail(format!("Σδ = {} exceeds 1", self.total_delta()));
        }
        Ok(())
    }
}

fn ceil_tol(x: f64) -> i64 {
    (x - 1e-9 * x.abs().max(1.0)).ceil() as i64
}

/// Builds `J` blocks for `ω`: the largest admissible scales found by a dyadic
/// scan (refined by bisection for tabulated moduli) and the smallest
/// admissible block sizes.
pub fn build_delta_sequence(omega: &ModulusSpec, blocks: usize) -> Result<DeltaSequence> {
    omega.validate()?;
    if let ModulusSpec::Power { alpha } = omega {
        if *alpha >= 0.5 {
            return Err(Error::Construction(format!(
                "power exponent {alpha} must be below 1/2 for the scales to exist"
            )));
        }
    }
    let mut seq = DeltaSequence {
        omega: omega.clone(),
        epsilons: Vec::with_capacity(blocks),
        block_sizes: Vec::with_capacity(blocks),
        block_starts: vec![1],
        deltas: Vec::new(),
        exploratory: false,
    };
    for j in 1..=blocks as i32 {
        let eps = choose_epsilon(omega, j)?;
        push_block(&mut seq, j, eps)?;
    }
    seq.validate()?;
    Ok(seq)
}

/// Sequence with `ε_j = 2^{-(j+2)}` for any valid `ω`, dropping the growth
/// condition. Block sums then decay; meant for looking at moduli such as
/// `√δ` where the growth condition cannot be met.
pub fn build_delta_sequence_exploratory(omega: &ModulusSpec, blocks: usize) -> Result<DeltaSequence> {
    omega.validate()?;
    let mut seq = DeltaSequence {
        omega: omega.clone(),
        epsilons: Vec::with_capacity(blocks),
        block_sizes: Vec::with_capacity(blocks),
        block_starts: vec![1],
        deltas: Vec::new(),
        exploratory: true,
    };
    for j in 1..=blocks as i32 {
        push_block(&mut seq, j, 0.5f64.powi(j + 2))?;
    }
    seq.validate()?;
    Ok(seq)
}

fn push_block(seq: &mut DeltaSequence, j: i32, eps: f64) -> Result<()> {
    let n = ceil_tol(1.0 / (2f64.powi(j + 1) * eps)).max(1) as usize;
    if n as f64 >= 1.0 / (2f64.powi(j) * eps) {
        return Err(Error::Construction(format!("block {j}: no integer count in bracket for ε = {eps:e}")));
    }
    seq.epsilons.push(eps);
    seq.block_sizes.push(n);
    seq.block_starts.push(seq.block_starts.last().unwrap() + n);
    seq.deltas.extend(std::iter::repeat(eps).take(n));
    Ok(())
}

fn admissible(omega: &ModulusSpec, eps: f64, j: i32) -> bool {
    let w = omega.eval(eps);
    eps < 0.5f64.powi(j + 1) && w * w / eps >= 2f64.powi(j)
}

fn choose_epsilon(omega: &ModulusSpec, j: i32) -> Result<f64> {
    let min_m = j + 2;
    let start = match omega {
        ModulusSpec::Power { alpha } => min_m.max(ceil_tol(j as f64 / (1.0 - 2.0 * alpha)) as i32),
        ModulusSpec::Table { .. } => min_m,
    };
    let floor = omega.support_min();
    for m in start..1070 {
        let eps = 0.5f64.powi(m);
        if eps < floor {
            break;
        }
        if admissible(omega, eps, j) {
            if m == min_m || matches!(omega, ModulusSpec::Power { .. }) {
                return Ok(eps);
            }
            // the admissible set need not be an interval; keep the bisection
            // result only if it checks out
            let (mut good, mut bad) = (eps, 2.0 * eps);
            for _ in 0..60 {
                let mid = 0.5 * (good + bad);
                if admissible(omega, mid, j) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            return Ok(good);
        }
    }
    Err(Error::Construction(format!(
        "block {j}: no representable ε with ε < 2^-{} and ω(ε)²/ε >= 2^{j}",
        j + 1
    )))
}

/// Placement of the first `K` scales as disjoint arcs of length `6δ_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangleSystem {
    a: Vec<f64>,
    b: Vec<f64>,
    deltas: Vec<f64>,
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TriangleJson {
    a: f64,
    b: f64,
    w: f64,
}

#[derive(Serialize, Deserialize)]
struct SystemJson {
    #[serde(rename = "K")]
    k: usize,
    triangles: Vec<TriangleJson>,
}

impl Serialize for TriangleSystem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SystemJson {
            k: self.len(),
            triangles: (0..self.len()).map(|i| TriangleJson { a: self.a[i], b: self.b[i], w: self.weights[i] }).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TriangleSystem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SystemJson::deserialize(d)?;
        if j.k != j.triangles.len() {
            return Err(serde::de::Error::custom("K does not match the number of triangles"));
        }
        TriangleSystem::from_parts(
            j.triangles.iter().map(|t| t.a).collect(),
            j.triangles.iter().map(|t| t.b).collect(),
            j.triangles.iter().map(|t| t.w).collect(),
        )
        .map_err(serde::de::Error::custom)
    }
}

impl TriangleSystem {
    /// Assembles a system from endpoints and weights, `δ_k = (b_k - a_k)/6`.
    pub fn from_parts(a: Vec<f64>, b: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.len() != weights.len() {
            return Err(Error::Construction("endpoint and weight lists differ in length".into()));
        }
        let deltas = a.iter().zip(&b).map(|(a, b)| (b - a) / 6.0).collect();
        let sys = Self { a, b, deltas, weights };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        let mut prev_b = 0.0;
        for k in 0..self.len() {
            let (a, b) = (self.a[k], self.b[k]);
            if !(a > prev_b && b > a && b < TAU) {
                return Err(Error::Construction(format!("interval {} = [{a}, {b}] breaks the ordering", k + 1)));
            }
            if !(self.weights[k] > 0.0 && self.weights[k].is_finite()) {
                return Err(Error::Construction(format!("weight {} is not positive", k + 1)));
            }
            prev_b = b;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn deltas(&self) -> &[f64] {
        &self.deltas
    }

    /// `I_k = [a_k, b_k]` (zero-based `k`).
    pub fn interval(&self, k: usize) -> (f64, f64) {
        (self.a[k], self.b[k])
    }

    /// `J_k`, the left half of `I_k`.
    pub fn left_half(&self, k: usize) -> (f64, f64) {
        (self.a[k], 0.5 * (self.a[k] + self.b[k]))
    }

    /// `J_k* = [a_k + δ_k, a_k + 2δ_k]`.
    pub fn middle_third(&self, k: usize) -> (f64, f64) {
        (self.a[k] + self.deltas[k], self.a[k] + 2.0 * self.deltas[k])
    }

    /// Same intervals with the weights multiplied by `factor`.
    pub fn with_scaled_weights(&self, factor: f64) -> Self {
        Self { weights: self.weights.iter().map(|w| w * factor).collect(), ..self.clone() }
    }
}

/// Packs the first `count` scales left to right with equal gaps
/// `g = (2π - 6Σδ)/(count + 1)`, starting at `a_1 = g`.
pub fn place_intervals(seq: &DeltaSequence, count: usize) -> Result<TriangleSystem> {
    if count > seq.len() {
        return Err(Error::Construction(format!("K = {count} exceeds the {} available scales", seq.len())));
    }
    let deltas = &seq.deltas[..count];
    let occupied = 6.0 * deltas.iter().sum::<f64>();
    if occupied >= TAU {
        return Err(Error::Construction(format!("intervals of total length {occupied} do not fit on the circle")));
    }
    let gap = (TAU - occupied) / (count as f64 + 1.0);
    let mut a = Vec::with_capacity(count);
    let mut b = Vec::with_capacity(count);
    let mut pos = 0.0;
    for &d in deltas {
        pos += gap;
        a.push(pos);
        pos += 6.0 * d;
        b.push(pos);
    }
    let weights = deltas.iter().map(|&d| seq.omega.eval(d)).collect();
    let sys = TriangleSystem { a, b, deltas: deltas.to_vec(), weights };
    sys.validate()?;
    Ok(sys)
}

fn tents(arcs: impl Iterator<Item = (f64, f64, f64)>) -> PiecewiseLinearFunction {
    let mut knots = Vec::new();
    let mut vals = Vec::new();
    for (lo, hi, w) in arcs {
        knots.extend([lo, 0.5 * (lo + hi), hi]);
        vals.extend([0.0, w, 0.0]);
    }
    if knots.is_empty() {
        return PiecewiseLinearFunction::zero();
    }
    PiecewiseLinearFunction::from_real(knots, &vals).expect("ordered arcs give valid knots")
}

/// `u = Σ w_k Δ_{I_k}`.
pub fn build_u(sys: &TriangleSystem) -> PiecewiseLinearFunction {
    tents((0..sys.len()).map(|k| {
        let (a, b) = sys.interval(k);
        (a, b, sys.weights[k])
    }))
}

/// `v = Σ w_k Δ_{J_k}`.
pub fn build_v(sys: &TriangleSystem) -> PiecewiseLinearFunction {
    tents((0..sys.len()).map(|k| {
        let (a, b) = sys.left_half(k);
        (a, b, sys.weights[k])
    }))
}

/// `f = u + iv`.
pub fn build_f(sys: &TriangleSystem) -> PiecewiseLinearFunction {
    PiecewiseLinearFunction::complexify(&build_u(sys), &build_v(sys))
}

/// `max(f, level)` for real periodic `f`, with knots inserted where `f`
/// crosses the level.
pub fn max_with_level(f: &PiecewiseLinearFunction, level: f64) -> Result<PiecewiseLinearFunction> {
    f.require_real()?;
    f.require_periodic()?;
    let m = f.len();
    let vals = f.real_values();
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(2 * m);
    for i in 0..m {
        pts.push((f.knots()[i], vals[i].max(level)));
        let (t0, v0) = (f.knots()[i], vals[i]);
        let (t1, v1) = if i + 1 < m { (f.knots()[i + 1], vals[i + 1]) } else { (f.knots()[0] + TAU, vals[0]) };
        if (v0 - level) * (v1 - level) < 0.0 {
            let t = t0 + (level - v0) / (v1 - v0) * (t1 - t0);
            let t = if t >= TAU { t - TAU } else { t };
            if t > t0 && t < t1 || t < f.knots()[0] {
                pts.push((t, level));
            }
        }
    }
    pts.sort_by(|x, y| x.0.total_cmp(&y.0));
    pts.dedup_by(|x, y| x.0 == y.0);
    let (knots, values): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    PiecewiseLinearFunction::from_real(knots, &values)
}

/// `u_n = max(u, 1/n)`.
pub fn truncate_un(u: &PiecewiseLinearFunction, n: u64) -> Result<PiecewiseLinearFunction> {
    if n == 0 {
        return Err(Error::Construction("truncation index must be positive".into()));
    }
    max_with_level(u, 1.0 / n as f64)
}

/// `n = ⌈3/w⌉`, the first index at which a triangle of height `w` activates.
pub fn activation_index(w: f64) -> u64 {
    ceil_tol(3.0 / w).max(1) as u64
}

/// `w >= 3/n` up to a relative rounding allowance.
pub fn is_active(w: f64, n: u64) -> bool {
    w >= 3.0 / n as f64 * (1.0 - 1e-12)
}

/// Distinct activation indices of the system, increasing.
pub fn n_grid(sys: &TriangleSystem) -> Vec<u64> {
    let mut ns: Vec<u64> = sys.weights.iter().map(|&w| activation_index(w)).collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}
