//! Exact `W₂^{1/2}` seminorm of a piecewise-linear function.
//!
//! With slope jumps `J_j` at knots `x_j`,
//! `Σ_k |k| |f̂(k)|² = (1/2π²) Σ_{j,l} J_j J_l Cl₃(x_j - x_l)`.
//!
//! Functions built from the triangle construction consist of many small
//! bumps on a common flat level. Every such bump has vanishing zeroth and
//! first jump moments, so distant bumps interact only through the smooth
//! derivatives of `Cl₃`. A binary tree over the bumps evaluates near pairs
//! directly and far pairs through truncated multipole expansions, which
//! keeps the cost near-linear in the number of bumps.

use crate::circle::{Piece, PiecewiseLinearFunction, TAU};
use crate::clausen::{circle_distance, cl3_derivative, cl3_shifted};
use crate::error::Result;

/// Far-field admissibility: centre distance at least this many radii.
const SEPARATION: f64 = 4.0;
const MAX_ORDER: usize = 20;
const EXPANSION_TOL: f64 = 1e-13;

/// `‖f‖_{W₂^{1/2}}` computed without truncating the spectrum.
pub fn sobolev_half_exact(f: &PiecewiseLinearFunction) -> Result<f64> {
    Ok(sobolev_half_exact_sq(f)?.sqrt())
}

/// Squared seminorm. `‖f‖² = ‖Re f‖² + ‖Im f‖²` since the kernel is real.
pub fn sobolev_half_exact_sq(f: &PiecewiseLinearFunction) -> Result<f64> {
    f.require_periodic()?;
    let mut total = real_sq(&f.pieces(), |v| v.re);
    if !f.is_real() {
        total += real_sq(&f.pieces(), |v| v.im);
    }
    Ok(total.max(0.0))
}

/// Reference `O(M²)` evaluation of the same double sum with no clustering.
pub fn sobolev_half_direct_sq(f: &PiecewiseLinearFunction) -> Result<f64> {
    f.require_periodic()?;
    let mut total = 0.0;
    for part in [f.real_part(), f.imag_part()] {
        let jumps: Vec<(f64, f64)> =
            part.slope_jumps()?.into_iter().map(|(x, j)| (x, j.re)).filter(|(_, j)| *j != 0.0).collect();
        let mut acc = 0.0;
        for (a, &(xa, ja)) in jumps.iter().enumerate() {
            for &(xb, jb) in &jumps[a + 1..] {
                acc += ja * jb * cl3_shifted(xa - xb);
            }
        }
        total += 2.0 * acc / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
    }
    Ok(total.max(0.0))
}

struct Cluster {
    pos: Vec<f64>,
    jump: Vec<f64>,
    lo: f64,
    hi: f64,
}

impl Cluster {
    fn from_points(mut pos: Vec<f64>, jump: Vec<f64>) -> Self {
        // keep the centre inside [0, 2π)
        let mid = 0.5 * (pos[0] + pos[pos.len() - 1]);
        let shift = (mid / TAU).floor() * TAU;
        if shift != 0.0 {
            pos.iter_mut().for_each(|p| *p -= shift);
        }
        let lo = pos[0];
        let hi = pos[pos.len() - 1];
        Self { pos, jump, lo, hi }
    }

    fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

fn real_sq(pieces: &[Piece], comp: impl Fn(num_complex::Complex64) -> f64) -> f64 {
    let m = pieces.len();
    if m <= 1 {
        return 0.0;
    }
    let vals: Vec<(f64, f64, f64, f64)> =
        pieces.iter().map(|p| (p.t0, p.t1, comp(p.v0), comp(p.v1))).collect();
    let slope: Vec<f64> = vals.iter().map(|&(t0, t1, v0, v1)| (v1 - v0) / (t1 - t0)).collect();
    // jump at the start knot of piece i
    let jump = |i: usize| slope[i] - slope[(i + m - 1) % m];

    let clusters = match split_clusters(&vals) {
        Some(c) => c,
        None => {
            let mut pos = Vec::new();
            let mut jumps = Vec::new();
            for (i, v) in vals.iter().enumerate() {
                let j = jump(i);
                if j != 0.0 {
                    pos.push(v.0);
                    jumps.push(j);
                }
            }
            if pos.is_empty() {
                return 0.0;
            }
            let c = Cluster { lo: pos[0], hi: pos[pos.len() - 1], pos, jump: jumps };
            return self_direct(&c) / (2.0 * std::f64::consts::PI * std::f64::consts::PI);
        }
    };
    let clusters: Vec<Cluster> = clusters
        .into_iter()
        .filter_map(|idx| {
            let (pos, jumps): (Vec<f64>, Vec<f64>) = idx
                .iter()
                .filter_map(|&(i, unwrap)| {
                    let j = jump(i);
                    (j != 0.0).then_some((vals[i].0 + unwrap, j))
                })
                .unzip();
            (!pos.is_empty()).then(|| Cluster::from_points(pos, jumps))
        })
        .collect();
    if clusters.is_empty() {
        return 0.0;
    }
    let tree = Tree::build(clusters);
    tree.self_sum(tree.root) / (2.0 * std::f64::consts::PI * std::f64::consts::PI)
}

/// Groups knot indices into bumps separated by flat pieces at one common
/// level. Returns `None` when the function has no flat piece or the flat
/// levels differ (bumps would carry a nonzero first moment).
fn split_clusters(vals: &[(f64, f64, f64, f64)]) -> Option<Vec<Vec<(usize, f64)>>> {
    let m = vals.len();
    let flat: Vec<bool> = vals.iter().map(|v| v.2 == v.3).collect();
    let start = flat.iter().position(|&f| f)?;
    let level = vals[start].2;
    if vals.iter().zip(&flat).any(|(v, &f)| f && v.2 != level) {
        return None;
    }
    let mut clusters = Vec::new();
    let mut current: Vec<(usize, f64)> = Vec::new();
    // walk pieces after the first flat one; knot i starts piece i
    for step in 1..=m {
        let i = (start + step) % m;
        let unwrap = if start + step >= m { TAU } else { 0.0 };
        // knot i belongs to the bump that ends at the next flat piece
        current.push((i, unwrap));
        if flat[i] {
            clusters.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        clusters.push(current);
    }
    Some(clusters)
}

fn self_direct(c: &Cluster) -> f64 {
    let mut acc = 0.0;
    for a in 0..c.pos.len() {
        let (xa, ja) = (c.pos[a], c.jump[a]);
        let mut row = 0.0;
        for b in a + 1..c.pos.len() {
            row += c.jump[b] * cl3_shifted(xa - c.pos[b]);
        }
        acc += ja * row;
    }
    2.0 * acc
}

fn cross_direct(a: &Cluster, b: &Cluster) -> f64 {
    let mut acc = 0.0;
    for (&xa, &ja) in a.pos.iter().zip(&a.jump) {
        let mut row = 0.0;
        for (&xb, &jb) in b.pos.iter().zip(&b.jump) {
            row += jb * cl3_shifted(xa - xb);
        }
        acc += ja * row;
    }
    acc
}

struct Node {
    center: f64,
    radius: f64,
    /// `M_p = Σ J (x - center)^p / p!` for `p = 0..=MAX_ORDER` (entries 0 and 1 unused).
    moments: [f64; MAX_ORDER + 1],
    children: Option<(usize, usize)>,
    cluster: Option<usize>,
}

struct Tree {
    clusters: Vec<Cluster>,
    nodes: Vec<Node>,
    root: usize,
}

impl Tree {
    fn build(mut clusters: Vec<Cluster>) -> Self {
        clusters.sort_by(|a, b| a.center().total_cmp(&b.center()));
        let mut tree = Tree { clusters, nodes: Vec::new(), root: 0 };
        let n = tree.clusters.len();
        tree.root = tree.build_range(0, n);
        tree
    }

    fn build_range(&mut self, lo: usize, hi: usize) -> usize {
        if hi - lo == 1 {
            let c = &self.clusters[lo];
            let center = c.center();
            let mut moments = [0.0; MAX_ORDER + 1];
            for (&x, &j) in c.pos.iter().zip(&c.jump) {
                let d = x - center;
                let mut term = j;
                for (p, m) in moments.iter_mut().enumerate() {
                    if p > 0 {
                        term *= d / p as f64;
                    }
                    *m += term;
                }
            }
            self.nodes.push(Node {
                center,
                radius: 0.5 * (c.hi - c.lo),
                moments,
                children: None,
                cluster: Some(lo),
            });
            return self.nodes.len() - 1;
        }
        let mid = (lo + hi) / 2;
        let l = self.build_range(lo, mid);
        let r = self.build_range(mid, hi);
        let (ln, rn) = (&self.nodes[l], &self.nodes[r]);
        let span_lo = (ln.center - ln.radius).min(rn.center - rn.radius);
        let span_hi = (ln.center + ln.radius).max(rn.center + rn.radius);
        let center = 0.5 * (span_lo + span_hi);
        let mut moments = [0.0; MAX_ORDER + 1];
        for child in [ln, rn] {
            let h = child.center - center;
            // M_p = Σ_{i>=2} M_i^{child} h^{p-i} / (p-i)!
            for p in 2..=MAX_ORDER {
                let mut acc = 0.0;
                let mut hp = 1.0;
                for i in (2..=p).rev() {
                    acc += child.moments[i] * hp;
                    hp *= h / (p - i + 1) as f64;
                }
                moments[p] += acc;
            }
        }
        self.nodes.push(Node {
            center,
            radius: 0.5 * (span_hi - span_lo),
            moments,
            children: Some((l, r)),
            cluster: None,
        });
        self.nodes.len() - 1
    }

    fn self_sum(&self, n: usize) -> f64 {
        let node = &self.nodes[n];
        match node.children {
            None => self_direct(&self.clusters[node.cluster.unwrap()]),
            Some((l, r)) => self.self_sum(l) + self.self_sum(r) + 2.0 * self.cross(l, r),
        }
    }

    fn cross(&self, a: usize, b: usize) -> f64 {
        let (na, nb) = (&self.nodes[a], &self.nodes[b]);
        let dist = circle_distance(na.center - nb.center);
        let rad = na.radius + nb.radius;
        if dist > SEPARATION * rad {
            return multipole(na, nb, rad / dist);
        }
        match (na.children, nb.children) {
            (None, None) => {
                cross_direct(&self.clusters[na.cluster.unwrap()], &self.clusters[nb.cluster.unwrap()])
            }
            (Some((l, r)), None) => self.cross(l, b) + self.cross(r, b),
            (None, Some((l, r))) => self.cross(a, l) + self.cross(a, r),
            (Some((al, ar)), Some((bl, br))) => {
                if na.radius >= nb.radius {
                    self.cross(al, b) + self.cross(ar, b)
                } else {
                    self.cross(a, bl) + self.cross(a, br)
                }
            }
        }
    }
}

/// `Σ_{p,q>=2} M_p^A M_q^B (-1)^q Cl₃^{(p+q)}(c_A - c_B)`.
fn multipole(a: &Node, b: &Node, ratio: f64) -> f64 {
    // terms of total order n shrink roughly like ratio^(n-4)
    let mut order = MAX_ORDER;
    if ratio > 0.0 {
        let needed = 4.0 + EXPANSION_TOL.ln() / ratio.ln();
        order = (needed.ceil() as usize / 2 + 1).clamp(2, MAX_ORDER);
    }
    let theta = a.center - b.center;
    let mut deriv = [0.0; 2 * MAX_ORDER + 1];
    for (n, d) in deriv.iter_mut().enumerate().take(2 * order + 1).skip(4) {
        *d = cl3_derivative(n, theta);
    }
    let mut acc = 0.0;
    for p in 2..=order {
        let mut row = 0.0;
        for q in 2..=order {
            let sign = if q % 2 == 0 { 1.0 } else { -1.0 };
            row += sign * b.moments[q] * deriv[p + q];
        }
        acc += a.moments[p] * row;
    }
    acc
}
