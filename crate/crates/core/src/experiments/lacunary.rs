//! Dyadic lacunary partial sums `Σ_{k=0}^{K} 2^{-k/2} e^{i 2^k t}`.
//!
//! Each term contributes exactly `2^k · 2^{-k} = 1` to the squared `W₂^{1/2}`
//! seminorm, so the square grows like `K + 1`, while the differences of the
//! limit stay `O(δ^{1/2})`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circle::TAU;
use crate::error::{Error, Result};
use crate::fourier::{synthesize, SpectrumCoeffs};
use crate::seminorm::sobolev_spectral;

/// Largest supported `K`; the top frequency is `2^K`.
pub const MAX_TERMS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LacunaryReport {
    pub terms: usize,
    pub seminorm_sq: f64,
    pub expected: f64,
    /// `max_δ sup_t |f(t+δ) - f(t)| / √δ` over dyadic shifts of the sample grid.
    pub lip_half_ratio: f64,
    pub grid: usize,
}

pub fn lacunary_spectrum(terms: usize) -> Result<SpectrumCoeffs> {
    if terms > MAX_TERMS {
        return Err(Error::Degenerate(format!("K = {terms} exceeds the supported {MAX_TERMS}")));
    }
    let coeffs: Vec<(i64, Complex64)> =
        (0..=terms).map(|k| (1i64 << k, Complex64::new(0.5f64.powf(k as f64 / 2.0), 0.0))).collect();
    SpectrumCoeffs::from_terms(1 << terms, &coeffs)
}

pub fn lacunary_fixture(terms: usize) -> Result<LacunaryReport> {
    let spec = lacunary_spectrum(terms)?;
    let seminorm_sq = sobolev_spectral(&spec, 0.5).powi(2);
    // at least 64 samples per period of the top frequency, capped
    let grid = 1usize << (terms + 6).clamp(10, 20);
    let g = synthesize(&spec, grid)?;
    let s = g.samples();
    let mut ratio: f64 = 0.0;
    let mut shift = 1;
    while shift <= grid / 2 {
        let delta = TAU * shift as f64 / grid as f64;
        let sup = (0..grid).map(|j| (s[(j + shift) % grid] - s[j]).norm()).fold(0.0, f64::max);
        ratio = ratio.max(sup / delta.sqrt());
        shift *= 2;
    }
    Ok(LacunaryReport { terms, seminorm_sq, expected: (terms + 1) as f64, lip_half_ratio: ratio, grid })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn seminorm_counts_terms() {
        assert_abs_diff_eq!(lacunary_fixture(0).unwrap().seminorm_sq, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(lacunary_fixture(9).unwrap().seminorm_sq, 10.0, epsilon = 1e-12);
        assert!(lacunary_fixture(MAX_TERMS + 1).is_err());
    }

    #[test]
    fn lipschitz_ratio_stays_bounded() {
        let ratios: Vec<f64> = (2..=10).map(|k| lacunary_fixture(k).unwrap().lip_half_ratio).collect();
        let max = ratios.iter().copied().fold(0.0, f64::max);
        // bounded uniformly in K, while the seminorm grows without bound
        assert!(max < 6.0, "{ratios:?}");
        assert!((ratios[8] - ratios[4]).abs() < 0.5);
    }
}
