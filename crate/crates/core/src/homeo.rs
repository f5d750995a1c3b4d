//! Orientation-preserving piecewise-linear homeomorphisms of the circle
//! fixing 0, and exact superposition `f∘h`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{reduce_angle, PiecewiseLinearFunction, TAU};
use crate::error::{Error, Result};

/// Raw increments are clipped to this magnitude so that the smallest
/// softmax share stays far above the spacing of doubles near 2π.
pub const RAW_CLIP: f64 = 12.0;

/// `h` with `h(t_i) = s_i`, linear in between and on `[t_{M-1}, 2π]` towards
/// `h(2π) = 2π`; `t_0 = s_0 = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomeoJson", into = "HomeoJson")]
pub struct PLHomeomorphism {
    t: Vec<f64>,
    s: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct HomeoJson {
    t: Vec<f64>,
    s: Vec<f64>,
}

impl TryFrom<HomeoJson> for PLHomeomorphism {
    type Error = Error;
    fn try_from(j: HomeoJson) -> Result<Self> {
        Self::new(j.t, j.s)
    }
}

impl From<PLHomeomorphism> for HomeoJson {
    fn from(h: PLHomeomorphism) -> Self {
        HomeoJson { t: h.t, s: h.s }
    }
}

fn check_knots(name: &str, xs: &[f64]) -> Result<()> {
    if xs.first() != Some(&0.0) {
        return Err(Error::InvalidHomeo(format!("{name} must start at 0")));
    }
    for w in xs.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::InvalidHomeo(format!("{name} not strictly increasing at {}", w[1])));
        }
    }
    let last = *xs.last().unwrap();
    if !(last < TAU) {
        return Err(Error::InvalidHomeo(format!("{name} must stay below 2π, got {last}")));
    }
    Ok(())
}

/// Linear interpolation through `(xs, ys)` closed by `(2π, 2π)`; exact at knots.
fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&k| k <= x) - 1;
    if xs[i] == x {
        return ys[i];
    }
    let (x1, y1) = if i + 1 < xs.len() { (xs[i + 1], ys[i + 1]) } else { (TAU, TAU) };
    if y1 - ys[i] == x1 - xs[i] {
        return ys[i] + (x - xs[i]);
    }
    ys[i] + (y1 - ys[i]) * (x - xs[i]) / (x1 - xs[i])
}

impl PLHomeomorphism {
    pub fn new(t: Vec<f64>, s: Vec<f64>) -> Result<Self> {
        if t.len() != s.len() {
            return Err(Error::InvalidHomeo(format!("{} input knots but {} output knots", t.len(), s.len())));
        }
        check_knots("input knots", &t)?;
        check_knots("output knots", &s)?;
        Ok(Self { t, s })
    }

    pub fn identity() -> Self {
        Self { t: vec![0.0], s: vec![0.0] }
    }

    /// Uniform input knots `2π i/M`; output increments are the softmax of
    /// `raw` (each entry clipped to `±RAW_CLIP`) scaled to `2π`.
    pub fn from_increments(raw: &[f64]) -> Result<Self> {
        let m = raw.len();
        if m < 2 {
            return Err(Error::InvalidHomeo("need at least two increments".into()));
        }
        let clipped: Vec<f64> = raw.iter().map(|r| r.clamp(-RAW_CLIP, RAW_CLIP)).collect();
        let top = clipped.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let e: Vec<f64> = clipped.iter().map(|r| (r - top).exp()).collect();
        let total: f64 = e.iter().sum();
        let mut cum = 0.0;
        let mut s = Vec::with_capacity(m);
        for x in &e {
            s.push(TAU * (cum / total));
            cum += x;
        }
        let t = (0..m).map(|i| TAU * (i as f64 / m as f64)).collect();
        Self::new(t, s)
    }

    /// Raw increments i.i.d. uniform on `[-r, r]`.
    pub fn random(m: usize, roughness: f64, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Vec<f64> = (0..m).map(|_| rng.gen_range(-roughness..=roughness)).collect();
        Self::from_increments(&raw)
    }

    pub fn knots_in(&self) -> &[f64] {
        &self.t
    }

    pub fn knots_out(&self) -> &[f64] {
        &self.s
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// `h(t)` in `[0, 2π)`.
    pub fn apply(&self, t: f64) -> f64 {
        reduce_angle(interp(&self.t, &self.s, reduce_angle(t)))
    }

    pub fn invert(&self) -> Self {
        Self { t: self.s.clone(), s: self.t.clone() }
    }
}

/// `h1 ∘ h2`.
pub fn compose_homeo(h1: &PLHomeomorphism, h2: &PLHomeomorphism) -> PLHomeomorphism {
    // breakpoints: knots of h2, and preimages under h2 of the knots of h1;
    // the intermediate value h2(x) is exact at both kinds
    let mut pts: Vec<(f64, f64)> = h2.t.iter().copied().zip(h2.s.iter().copied()).collect();
    pts.extend(h1.t.iter().map(|&y| (interp(&h2.s, &h2.t, y), y)));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.dedup_by(|a, b| a.0 == b.0);
    let mut t = Vec::with_capacity(pts.len());
    let mut s = Vec::with_capacity(pts.len());
    for (x, y) in pts {
        let out = interp(&h1.t, &h1.s, y);
        if s.last().is_some_and(|&prev| out <= prev) {
            continue;
        }
        t.push(x);
        s.push(out);
    }
    PLHomeomorphism { t, s }
}

/// Exact PL representation of `f∘h` for periodic `f`.
///
/// Knots are those of `h` together with `h⁻¹` of the knots of `f`; at the
/// latter the value is copied from `f`.
pub fn superpose(f: &PiecewiseLinearFunction, h: &PLHomeomorphism) -> Result<PiecewiseLinearFunction> {
    f.require_periodic()?;
    let mut knots = Vec::with_capacity(f.len() + h.len());
    let mut values: Vec<Complex64> = Vec::with_capacity(knots.capacity());
    let (mut i, mut j) = (0, 0);
    // two sorted streams: h's knots (by input) and f's knots pulled back
    let pulled: Vec<f64> = f.knots().iter().map(|&x| interp(&h.s, &h.t, x)).collect();
    while i < h.len() || j < f.len() {
        let take_f = j < f.len() && (i >= h.len() || pulled[j] <= h.t[i]);
        let (t, v) = if take_f {
            j += 1;
            if i < h.len() && pulled[j - 1] == h.t[i] {
                i += 1;
            }
            (pulled[j - 1], f.values()[j - 1])
        } else {
            i += 1;
            (h.t[i - 1], f.eval(h.s[i - 1]))
        };
        if knots.last().is_some_and(|&prev| t <= prev) {
            continue;
        }
        knots.push(t);
        values.push(v);
    }
    PiecewiseLinearFunction::new(knots, values, true)
}
