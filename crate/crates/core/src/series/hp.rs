//! Hodrick–Prescott filter.
//!
//! The trend minimizes `Σ(x_t − τ_t)² + λ Σ(Δ²τ_t)²`. Rather than solving
//! `(I + λD'D)τ = x` directly, whose condition number grows like `16λ`, the
//! cycle is obtained from the equivalent system
//!
//! ```text
//! (I/λ + DD') z = Dx,    cycle = D'z,    trend = x − cycle
//! ```
//!
//! `DD'` is the Toeplitz pentadiagonal matrix `[1, −4, 6, −4, 1]` of order
//! `n − 2` and stays well conditioned for any λ, so the trend is accurate even
//! at λ = 1e12.

use super::MonthlySeries;
use crate::error::{Error, Result};

/// Frequency-adjusted smoothing weight for monthly data, `1600 · 3⁴`.
pub const MONTHLY_LAMBDA: f64 = 129_600.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HpDecomposition {
    pub trend: MonthlySeries,
    pub cycle: MonthlySeries,
}

/// Solves `A x = b` for a symmetric positive definite pentadiagonal `A` with
/// main diagonal `diag`, first super-diagonal `off1` (length n−1) and second
/// super-diagonal `off2` (length n−2), by an `LDLᵀ` factorization.
pub fn solve_spd_pentadiagonal(
    diag: &[f64],
    off1: &[f64],
    off2: &[f64],
    rhs: &[f64],
) -> Result<Vec<f64>> {
    let n = diag.len();
    if rhs.len() != n || off1.len() + 1 != n.max(1) || off2.len() + 2 != n.max(2) {
        return Err(Error::invalid("pentadiagonal band lengths do not match"));
    }
    let mut d = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    for i in 0..n {
        let mut di = diag[i];
        if i >= 1 {
            di -= l1[i - 1] * l1[i - 1] * d[i - 1];
        }
        if i >= 2 {
            di -= l2[i - 2] * l2[i - 2] * d[i - 2];
        }
        if di <= 0.0 || !di.is_finite() {
            return Err(Error::numeric(format!(
                "pentadiagonal matrix not positive definite at row {i}"
            )));
        }
        d[i] = di;
        if i + 1 < n {
            let mut e = off1[i];
            if i >= 1 {
                e -= l1[i - 1] * d[i - 1] * l2[i - 1];
            }
            l1[i] = e / di;
        }
        if i + 2 < n {
            l2[i] = off2[i] / di;
        }
    }

    let mut y = rhs.to_vec();
    for i in 0..n {
        if i >= 1 {
            y[i] -= l1[i - 1] * y[i - 1];
        }
        if i >= 2 {
            y[i] -= l2[i - 2] * y[i - 2];
        }
    }
    for i in 0..n {
        y[i] /= d[i];
    }
    for i in (0..n).rev() {
        if i + 1 < n {
            y[i] -= l1[i] * y[i + 1];
        }
        if i + 2 < n {
            y[i] -= l2[i] * y[i + 2];
        }
    }
    Ok(y)
}

/// Cycle component of `x` for smoothing weight `lambda`.
pub(crate) fn hp_cycle(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    let n = x.len();
    if n < 4 {
        return Err(Error::invalid(format!(
            "HP filter needs at least 4 observations, got {n}"
        )));
    }
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::invalid(format!(
            "HP smoothing weight must be finite and ≥ 0, got {lambda}"
        )));
    }
    if lambda == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let m = n - 2;
    let dx: Vec<f64> = (0..m).map(|i| x[i] - 2.0 * x[i + 1] + x[i + 2]).collect();
    let z = solve_spd_pentadiagonal(
        &vec![6.0 + 1.0 / lambda; m],
        &vec![-4.0; m - 1],
        &vec![1.0; m - 2],
        &dx,
    )?;
    let at = |i: isize| {
        if i >= 0 && (i as usize) < m {
            z[i as usize]
        } else {
            0.0
        }
    };
    Ok((0..n as isize)
        .map(|k| at(k) - 2.0 * at(k - 1) + at(k - 2))
        .collect())
}

pub fn hp_filter(series: &MonthlySeries, lambda: f64) -> Result<HpDecomposition> {
    let x = series.values();
    let cycle = hp_cycle(x, lambda)?;
    let trend: Vec<f64> = x.iter().zip(&cycle).map(|(a, c)| a - c).collect();
    Ok(HpDecomposition {
        trend: MonthlySeries::with_unit(series.start(), trend, series.unit())?,
        cycle: MonthlySeries::with_unit(series.start(), cycle, series.unit())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pentadiagonal_matches_dense_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [1usize, 2, 3, 5, 17, 60] {
            let off1: Vec<f64> = (0..n.saturating_sub(1))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            let off2: Vec<f64> = (0..n.saturating_sub(2))
                .map(|_| rng.random_range(-1.0..1.0))
                .collect();
            // Diagonal dominance guarantees positive definiteness.
            let diag: Vec<f64> = (0..n).map(|_| 4.5 + rng.random_range(0.0..1.0)).collect();
            let b: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let mut a = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                a[(i, i)] = diag[i];
                if i + 1 < n {
                    a[(i, i + 1)] = off1[i];
                    a[(i + 1, i)] = off1[i];
                }
                if i + 2 < n {
                    a[(i, i + 2)] = off2[i];
                    a[(i + 2, i)] = off2[i];
                }
            }
            let dense = a.lu().solve(&DVector::from_vec(b.clone())).unwrap();
            let ours = solve_spd_pentadiagonal(&diag, &off1, &off2, &b).unwrap();
            for (x, y) in ours.iter().zip(dense.iter()) {
                assert!((x - y).abs() < 1e-12, "n={n}");
            }
        }
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let r = solve_spd_pentadiagonal(&[1.0, 1.0, 1.0], &[2.0, 0.0], &[0.0], &[1.0, 1.0, 1.0]);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    /// Dense normal-equation trend for moderate λ, as an independent route.
    fn dense_trend(x: &[f64], lambda: f64) -> Vec<f64> {
        let n = x.len();
        let mut d = DMatrix::<f64>::zeros(n - 2, n);
        for i in 0..n - 2 {
            d[(i, i)] = 1.0;
            d[(i, i + 1)] = -2.0;
            d[(i, i + 2)] = 1.0;
        }
        let a = DMatrix::<f64>::identity(n, n) + d.transpose() * &d * lambda;
        a.lu()
            .solve(&DVector::from_column_slice(x))
            .unwrap()
            .iter()
            .copied()
            .collect()
    }

    #[test]
    fn agrees_with_dense_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let x: Vec<f64> = (0..50)
            .map(|t| (t as f64 * 0.3).sin() * 4.0 + rng.random_range(-1.0..1.0))
            .collect();
        for lambda in [0.5, 100.0, 1600.0] {
            let cycle = hp_cycle(&x, lambda).unwrap();
            let dense = dense_trend(&x, lambda);
            for i in 0..x.len() {
                assert!((x[i] - cycle[i] - dense[i]).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn degenerate_cases() {
        let s =
            MonthlySeries::new("2000-01".parse().unwrap(), vec![1.0, 4.0, 2.0, 8.0, 5.0]).unwrap();
        let hp = hp_filter(&s, 0.0).unwrap();
        assert_eq!(hp.trend.values(), s.values());
        assert!(hp.cycle.values().iter().all(|&c| c == 0.0));
        assert!(hp_filter(&s, -1.0).is_err());
        let short = MonthlySeries::new("2000-01".parse().unwrap(), vec![1.0, 2.0, 3.0]).unwrap();
        assert!(hp_filter(&short, 1.0).is_err());
    }
}
