//! The Clausen function `Cl₃(θ) = Σ_{k≥1} cos(kθ)/k³` and its derivatives.
//!
//! For `0 <= r <= π`,
//! `Cl₃(r) = ζ(3) - 3r²/4 + (r²/2) ln r - Σ_{n≥1} ζ(2n) r^{2n+2} / (n(2n+1)(2n+2)(2π)^{2n})`,
//! and `Cl₃''' = cot(θ/2)/2`, so every derivative of order three or more is
//! a polynomial in `cot(θ/2)`.

use std::sync::OnceLock;

use crate::circle::TAU;

pub const ZETA3: f64 = 1.202_056_903_159_594_2;

const SERIES_TERMS: usize = 48;

/// Highest derivative order supported by [`cl3_derivative`].
pub const MAX_DERIVATIVE: usize = 48;

fn zeta(s: f64) -> f64 {
    // direct sum plus Euler-Maclaurin tail
    let cut = 2000usize;
    let head: f64 = (1..=cut).rev().map(|k| (k as f64).powf(-s)).sum();
    let n = cut as f64;
    head + n.powf(1.0 - s) / (s - 1.0) - 0.5 * n.powf(-s) + s * n.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * n.powf(-s - 3.0) / 720.0
}

fn series_coeffs() -> &'static [f64; SERIES_TERMS] {
    static COEFFS: OnceLock<[f64; SERIES_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut c = [0.0; SERIES_TERMS];
        for (i, slot) in c.iter_mut().enumerate() {
            let n = (i + 1) as f64;
            *slot = zeta(2.0 * n)
                / (n * (2.0 * n + 1.0) * (2.0 * n + 2.0) * TAU.powf(2.0 * n));
        }
        c
    })
}

/// Non-polynomial part `Cl₃(r) - ζ(3) + 3r²/4` for `r ∈ [0, π]`.
pub fn cl3_log_part(r: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let r2 = r * r;
    let mut acc = 0.5 * r2 * r.ln();
    let mut pow = r2 * r2;
    let floor = 1e-19 * r2;
    for &c in series_coeffs() {
        let term = c * pow;
        acc -= term;
        if term < floor {
            break;
        }
        pow *= r2;
    }
    acc
}

/// Periodic distance to the nearest multiple of 2π, in `[0, π]`.
#[inline]
pub fn circle_distance(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    t.min(TAU - t)
}

/// `Cl₃(θ) - ζ(3)`. The constant is dropped because every caller contracts
/// the kernel against weights summing to zero.
#[inline]
pub fn cl3_shifted(theta: f64) -> f64 {
    let r = circle_distance(theta);
    -0.75 * r * r + cl3_log_part(r)
}

pub fn cl3(theta: f64) -> f64 {
    ZETA3 + cl3_shifted(theta)
}

/// Coefficients of `P_m` with `d^m/dx^m cot x = P_m(cot x)`.
fn cot_derivative_polys() -> &'static Vec<Vec<f64>> {
    static POLYS: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    POLYS.get_or_init(|| {
        let mut polys = vec![vec![0.0, 1.0]];
        for m in 0..MAX_DERIVATIVE {
            let p = &polys[m];
            // derivative in c
            let dp: Vec<f64> = p.iter().enumerate().skip(1).map(|(i, &a)| i as f64 * a).collect();
            // times -(1 + c²)
            let mut next = vec![0.0; dp.len() + 2];
            for (i, &a) in dp.iter().enumerate() {
                next[i] -= a;
                next[i + 2] -= a;
            }
            polys.push(next);
        }
        polys
    })
}

/// `d^n/dθ^n Cl₃(θ)` for `3 <= n <= MAX_DERIVATIVE`, `θ` not a multiple of 2π.
pub fn cl3_derivative(n: usize, theta: f64) -> f64 {
    assert!((3..=MAX_DERIVATIVE).contains(&n), "derivative order {n} out of range");
    let t = theta.rem_euclid(TAU);
    // Cl₃ is even and 2π-periodic: Cl₃^{(n)}(θ) = (-1)^n Cl₃^{(n)}(2π - θ).
    let (t, sign) = if t > std::f64::consts::PI { (TAU - t, if n % 2 == 0 { 1.0 } else { -1.0 }) } else { (t, 1.0) };
    let m = n - 3;
    let c = 1.0 / (0.5 * t).tan();
    let poly = &cot_derivative_polys()[m];
    let val = poly.iter().rev().fold(0.0, |acc, &a| acc * c + a);
    sign * val * 0.5f64.powi(m as i32 + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    /// Direct partial sum; truncation error below 1e-10.
    fn cl3_direct(theta: f64) -> f64 {
        let n = 200_000;
        let s: f64 = (1..=n).rev().map(|k| (k as f64 * theta).cos() / (k as f64).powi(3)).sum();
        s
    }

    #[test]
    fn zeta_values() {
        assert_abs_diff_eq!(zeta(2.0), PI * PI / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(zeta(4.0), PI.powi(4) / 90.0, epsilon = 1e-15);
        assert_abs_diff_eq!(zeta(3.0), ZETA3, epsilon = 1e-14);
    }

    #[test]
    fn cl3_matches_direct_sum() {
        for &t in &[0.0, 1e-4, 0.01, 0.3, 1.0, 2.0, PI - 0.01, PI, 3.5, 5.0, TAU - 0.2, -0.7] {
            assert_abs_diff_eq!(cl3(t), cl3_direct(t), epsilon = 1e-10);
        }
        // Cl₃(π) = -3ζ(3)/4
        assert_abs_diff_eq!(cl3(PI), -0.75 * ZETA3, epsilon = 1e-14);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        // third derivative is cot(θ/2)/2
        for &t in &[0.3, 1.0, 2.5, 4.0] {
            assert_abs_diff_eq!(cl3_derivative(3, t), 0.5 / (0.5 * t).tan(), epsilon = 1e-13);
            // fourth derivative is -csc²(θ/2)/4
            let s = (0.5 * t).sin();
            assert_abs_diff_eq!(cl3_derivative(4, t), -0.25 / (s * s), epsilon = 1e-12);
        }
        let h = 1e-4;
        for n in 3..12 {
            for &t in &[0.7, 1.9, 3.3, 5.1] {
                let fd = (cl3_derivative(n, t + h) - cl3_derivative(n, t - h)) / (2.0 * h);
                let exact = cl3_derivative(n + 1, t);
                assert!((fd - exact).abs() <= 1e-6 * exact.abs().max(1.0), "n={n} t={t}");
            }
        }
    }

    #[test]
    fn small_angle_asymptotics() {
        // Cl₃^{(n)}(θ) ≈ (-1)^{n-1} (n-3)! / θ^{n-2} as θ → 0
        let t: f64 = 1e-3;
        for n in 4..10 {
            let fact: f64 = (1..=(n - 3)).map(|i| i as f64).product();
            let sign: f64 = if n % 2 == 1 { 1.0 } else { -1.0 };
            let lead = sign * fact / t.powi(n as i32 - 2);
            let got = cl3_derivative(n, t);
            assert!(((got - lead) / lead).abs() < 1e-4, "n={n}");
        }
    }
}
