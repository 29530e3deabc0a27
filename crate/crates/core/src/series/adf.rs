//! Augmented Dickey–Fuller test with a constant.
//!
//! `Δx_t = μ + γ x_{t−1} + Σ_{j=1..p} δ_j Δx_{t−j} + e_t`; the statistic is the
//! t-ratio on γ. The lag `p` minimizes AIC over `0..=max_lag` on a common
//! sample, then the chosen model is refit on all usable observations.
//! p-values follow MacKinnon's (1994) normal-quantile response surface for
//! the constant-only case; critical values use MacKinnon (2010).

use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::MonthlySeries;
use crate::error::{Error, Result};
use crate::regression::{ols, Design};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdfResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lag: usize,
    pub nobs: usize,
    /// 1%, 5% and 10% critical values at this sample size.
    pub critical_values: [f64; 3],
}

const TAU_MAX: f64 = 2.74;
const TAU_MIN: f64 = -18.83;
const TAU_STAR: f64 = -1.61;
const SMALL_P: [f64; 3] = [2.1659, 1.4412, 3.8269e-2];
const LARGE_P: [f64; 4] = [1.7339, 9.3202e-1, -1.2745e-1, -1.0368e-2];
const CRIT_2010: [[f64; 4]; 3] = [
    [-3.43035, -6.5393, -16.786, -79.433],
    [-2.86154, -2.8903, -4.234, -40.040],
    [-2.56677, -1.5384, -2.809, 0.0],
];

/// Asymptotic p-value of an ADF t-statistic (constant, no trend).
pub fn mackinnon_p_value(tau: f64) -> f64 {
    if tau > TAU_MAX {
        return 1.0;
    }
    if tau < TAU_MIN {
        return 0.0;
    }
    let coefs: &[f64] = if tau <= TAU_STAR { &SMALL_P } else { &LARGE_P };
    let z = coefs.iter().rev().fold(0.0, |acc, c| acc * tau + c);
    Normal::standard().cdf(z)
}

pub fn adf_critical_values(nobs: usize) -> [f64; 3] {
    let n = nobs as f64;
    CRIT_2010.map(|c| c[0] + c[1] / n + c[2] / (n * n) + c[3] / (n * n * n))
}

fn adf_design(x: &[f64], lag: usize, first: usize) -> Design {
    // Rows are t = first..n-1, first ≥ lag + 1.
    let n = x.len();
    let rows = n - first;
    let k = 2 + lag;
    let mut m = DMatrix::zeros(rows, k);
    let mut y = DVector::zeros(rows);
    for (r, t) in (first..n).enumerate() {
        y[r] = x[t] - x[t - 1];
        m[(r, 0)] = 1.0;
        m[(r, 1)] = x[t - 1];
        for j in 1..=lag {
            m[(r, 1 + j)] = x[t - j] - x[t - j - 1];
        }
    }
    let mut names = vec!["const".to_string(), "level(-1)".to_string()];
    names.extend((1..=lag).map(|j| format!("diff(-{j})")));
    Design::new(names, m, y)
}

pub fn adf_test(series: &MonthlySeries, max_lag: usize) -> Result<AdfResult> {
    adf_test_values(series.values(), max_lag)
}

pub fn adf_test_values(x: &[f64], max_lag: usize) -> Result<AdfResult> {
    let n = x.len();
    if n < 25 {
        return Err(Error::invalid(format!(
            "ADF test needs at least 25 observations, got {n}"
        )));
    }
    if n < 2 * max_lag + 6 {
        return Err(Error::invalid(format!(
            "{n} observations too few for max lag {max_lag}"
        )));
    }
    let first = max_lag + 1;
    let mut best: Option<(f64, usize)> = None;
    for lag in 0..=max_lag {
        let fit = ols(&adf_design(x, lag, first))?;
        let rows = fit.n() as f64;
        let aic = rows * (fit.ssr() / rows).ln() + 2.0 * fit.k() as f64;
        if best.is_none_or(|(b, _)| aic < b) {
            best = Some((aic, lag));
        }
    }
    let lag = best.expect("at least one lag").1;
    let fit = ols(&adf_design(x, lag, lag + 1))?;
    let se = fit.std_errors()[1];
    if !(se > 0.0) {
        return Err(Error::numeric("ADF regression has zero residual variance"));
    }
    let statistic = fit.coefficients()[1] / se;
    Ok(AdfResult {
        statistic,
        p_value: mackinnon_p_value(statistic),
        lag,
        nobs: fit.n(),
        critical_values: adf_critical_values(fit.n()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn p_values_at_known_critical_points() {
        // Asymptotic 5% and 1% points of the constant-case distribution.
        assert!((mackinnon_p_value(-2.8623) - 0.05).abs() < 2e-3);
        assert!((mackinnon_p_value(-3.4336) - 0.01).abs() < 1e-3);
        assert_eq!(mackinnon_p_value(3.0), 1.0);
        assert_eq!(mackinnon_p_value(-20.0), 0.0);
        // continuity at the switch point
        let a = mackinnon_p_value(TAU_STAR - 1e-9);
        let b = mackinnon_p_value(TAU_STAR + 1e-9);
        assert!((a - b).abs() < 5e-3);
    }

    #[test]
    fn critical_values_shrink_to_asymptotic() {
        let c = adf_critical_values(100_000);
        assert!((c[1] + 2.86154).abs() < 1e-3);
        let small = adf_critical_values(100);
        assert!(small[0] < c[0]);
    }

    #[test]
    fn invariant_to_added_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut x = vec![0.0];
        for _ in 0..199 {
            let e: f64 = StandardNormal.sample(&mut rng);
            x.push(0.7 * x.last().unwrap() + e);
        }
        let shifted: Vec<f64> = x.iter().map(|v| v + 42.0).collect();
        let a = adf_test_values(&x, 8).unwrap();
        let b = adf_test_values(&shifted, 8).unwrap();
        assert_eq!(a.lag, b.lag);
        assert!((a.statistic - b.statistic).abs() < 1e-8);
    }

    #[test]
    fn too_short() {
        assert!(adf_test_values(&[1.0; 24], 2).is_err());
    }
}
