use nalgebra::{DMatrix, DVector};
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, FisherSnedecor, Normal};

use super::ols::{ols, Design, OlsFit};
use crate::error::{Error, Result};
use crate::series::{common_range, MonthlySeries};

/// Two-sided normal p-value of a t-ratio.
pub fn normal_p_value(t: f64) -> f64 {
    2.0 * Normal::standard().sf(t.abs())
}

pub fn chi2_sf(stat: f64, df: usize) -> f64 {
    ChiSquared::new(df as f64).expect("df ≥ 1").sf(stat)
}

/// Significance stars: `***` p<0.01, `**` p<0.05, `*` p<0.10.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.10 {
        "*"
    } else {
        ""
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaldTest {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Joint test that the coefficients at `indices` are zero, using `cov`.
pub fn wald(coef: &DVector<f64>, cov: &DMatrix<f64>, indices: &[usize]) -> Result<WaldTest> {
    if indices.is_empty() {
        return Err(Error::invalid("Wald test on an empty coefficient block"));
    }
    let q = indices.len();
    let b = DVector::from_iterator(q, indices.iter().map(|&i| coef[i]));
    let v = DMatrix::from_fn(q, q, |r, c| cov[(indices[r], indices[c])]);
    let chol = v
        .cholesky()
        .ok_or_else(|| Error::numeric("coefficient covariance block is singular"))?;
    let statistic = b.dot(&chol.solve(&b));
    Ok(WaldTest {
        statistic,
        df: q,
        p_value: chi2_sf(statistic, q),
    })
}

impl OlsFit {
    /// HAC Wald test on the named coefficients.
    pub fn wald_hac(&self, names: &[&str]) -> Result<WaldTest> {
        let idx = names
            .iter()
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| Error::invalid(format!("no regressor named `{n}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        wald(self.coefficients(), self.cov_hac(), &idx)
    }

    /// HAC t-ratio and two-sided p-value of one coefficient.
    pub fn t_hac(&self, name: &str) -> Result<(f64, f64)> {
        let i = self
            .index_of(name)
            .ok_or_else(|| Error::invalid(format!("no regressor named `{name}`")))?;
        let se = self.hac_std_errors()[i];
        if !(se > 0.0) {
            return Err(Error::numeric(format!(
                "zero HAC standard error for `{name}`"
            )));
        }
        let t = self.coefficients()[i] / se;
        Ok((t, normal_p_value(t)))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanTest {
    pub mean: f64,
    pub se: f64,
    pub t_ratio: f64,
    pub p_value: f64,
    pub n: usize,
}

impl MeanTest {
    /// `0.06*** (3.62)`: estimate, stars and t-ratio.
    pub fn formatted(&self) -> String {
        format!(
            "{:.2}{} ({:.2})",
            self.mean,
            stars(self.p_value),
            self.t_ratio
        )
    }
}

fn constant_fit(values: &[f64]) -> Result<OlsFit> {
    ols(&Design::with_constant(values, &[])?)
}

/// Mean of a series with a HAC standard error, from a regression on a
/// constant.
pub fn mean_test(values: &[f64]) -> Result<MeanTest> {
    if values.len() < 30 {
        return Err(Error::invalid(format!(
            "mean test needs at least 30 observations, got {}",
            values.len()
        )));
    }
    let fit = constant_fit(values)?;
    let se = fit.hac_std_errors()[0];
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(se > 1e-12 * scale) {
        return Err(Error::numeric(
            "series has zero variance; mean test undefined",
        ));
    }
    let mean = fit.coefficients()[0];
    let t = mean / se;
    Ok(MeanTest {
        mean,
        se,
        t_ratio: t,
        p_value: normal_p_value(t),
        n: values.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffMeanTest {
    pub mean_diff: f64,
    pub se: f64,
    /// `None` when the difference is a nonzero constant.
    pub t_ratio: Option<f64>,
    pub p_value: Option<f64>,
    pub n: usize,
    pub warning: Option<String>,
}

fn overlap<'a>(a: &'a MonthlySeries, b: &'a MonthlySeries) -> Result<(Vec<f64>, Vec<f64>)> {
    let (from, to) = common_range(&[a, b])?;
    Ok((
        a.slice(from, to)?.values().to_vec(),
        b.slice(from, to)?.values().to_vec(),
    ))
}

/// Mean of `a − b` over the overlapping months, HAC inference.
pub fn diff_mean_test(a: &MonthlySeries, b: &MonthlySeries) -> Result<DiffMeanTest> {
    let (xa, xb) = overlap(a, b)?;
    let d: Vec<f64> = xa.iter().zip(&xb).map(|(p, q)| p - q).collect();
    if d.len() < 30 {
        return Err(Error::invalid(format!(
            "only {} overlapping months, need 30",
            d.len()
        )));
    }
    let mean = d.iter().sum::<f64>() / d.len() as f64;
    let scale = xa.iter().chain(&xb).fold(0.0f64, |m, v| m.max(v.abs()));
    if d.iter().all(|&v| (v - mean).abs() <= 1e-12 * scale) {
        let (t, p, warning) = if mean.abs() <= 1e-12 * scale {
            (
                Some(0.0),
                Some(1.0),
                "series are identical; t-ratio set to 0",
            )
        } else {
            (None, None, "difference is constant; t-ratio undefined")
        };
        return Ok(DiffMeanTest {
            mean_diff: mean,
            se: 0.0,
            t_ratio: t,
            p_value: p,
            n: d.len(),
            warning: Some(warning.into()),
        });
    }
    let m = mean_test(&d)?;
    Ok(DiffMeanTest {
        mean_diff: m.mean,
        se: m.se,
        t_ratio: Some(m.t_ratio),
        p_value: Some(m.p_value),
        n: m.n,
        warning: None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceRatioTest {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    /// Two-sided.
    pub p_value: f64,
}

fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)
}

/// `F = s²_a / s²_b` over the overlapping months.
pub fn diff_var_test(a: &MonthlySeries, b: &MonthlySeries) -> Result<VarianceRatioTest> {
    let (xa, xb) = overlap(a, b)?;
    if xa.len() < 3 {
        return Err(Error::invalid(
            "variance test needs at least 3 overlapping months",
        ));
    }
    let (va, vb) = (sample_variance(&xa), sample_variance(&xb));
    if !(vb > 0.0) || !(va > 0.0) {
        return Err(Error::numeric("zero variance; variance ratio undefined"));
    }
    let f = va / vb;
    let (df1, df2) = (xa.len() - 1, xb.len() - 1);
    let dist = FisherSnedecor::new(df1 as f64, df2 as f64).expect("positive df");
    let p = (2.0 * dist.cdf(f).min(dist.sf(f))).min(1.0);
    Ok(VarianceRatioTest {
        f,
        df1,
        df2,
        p_value: p,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreuschGodfrey {
    pub lm: f64,
    pub lags: usize,
    pub p_value: f64,
}

/// Breusch–Godfrey LM test: residuals on the original regressors and `lags`
/// lagged residuals (pre-sample lags set to zero), `LM = n R²`.
pub fn breusch_godfrey(fit: &OlsFit, lags: usize) -> Result<BreuschGodfrey> {
    let n = fit.n();
    if lags == 0 {
        return Err(Error::invalid("Breusch–Godfrey needs at least one lag"));
    }
    if lags >= n {
        return Err(Error::invalid(format!("{lags} lags for {n} residuals")));
    }
    // An exact fit leaves only rounding noise in the residuals.
    if fit.relative_ssr() < 1e-20 {
        return Ok(BreuschGodfrey {
            lm: 0.0,
            lags,
            p_value: 1.0,
        });
    }
    let e = fit.residuals();
    let x = fit.design_matrix();
    let k = x.ncols();
    let mut aux = DMatrix::zeros(n, k + lags);
    aux.view_mut((0, 0), (n, k)).copy_from(x);
    for j in 1..=lags {
        for t in j..n {
            aux[(t, k + j - 1)] = e[t - j];
        }
    }
    let mut names = fit.names().to_vec();
    names.extend((1..=lags).map(|j| format!("resid(-{j})")));
    let aux_fit = match ols(&Design::new(names, aux, e.clone())) {
        Ok(f) => f,
        // Too few rows for the auxiliary regression: the lagged residuals
        // explain everything.
        Err(Error::InvalidInput(_)) => {
            return Ok(BreuschGodfrey {
                lm: n as f64,
                lags,
                p_value: chi2_sf(n as f64, lags),
            })
        }
        Err(e) => return Err(e),
    };
    let lm = n as f64 * aux_fit.r_squared();
    Ok(BreuschGodfrey {
        lm,
        lags,
        p_value: chi2_sf(lm, lags),
    })
}

/// Long-run multiplier `β / (1 − Σρ)`.
pub fn long_run(beta: f64, ar: &[f64]) -> Result<f64> {
    let persistence: f64 = ar.iter().sum();
    if persistence >= 1.0 {
        return Err(Error::invalid(format!(
            "sum of autoregressive coefficients {persistence} ≥ 1; long-run effect undefined"
        )));
    }
    Ok(beta / (1.0 - persistence))
}

/// Long-run effect of `target` given the own-lag coefficients `ar_names`.
pub fn long_run_effect(fit: &OlsFit, target: &str, ar_names: &[&str]) -> Result<f64> {
    let beta = fit
        .coefficient(target)
        .ok_or_else(|| Error::invalid(format!("no regressor named `{target}`")))?;
    let ar = ar_names
        .iter()
        .map(|n| {
            fit.coefficient(n)
                .ok_or_else(|| Error::invalid(format!("no regressor named `{n}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    long_run(beta, &ar)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LongRun {
    pub value: f64,
    /// Delta-method standard error from the HAC covariance.
    pub se: f64,
}

/// Long-run effect `Σβ / (1 − Σρ)` of a block of regressors, with its
/// delta-method HAC standard error.
pub fn long_run_block(fit: &OlsFit, targets: &[&str], ar_names: &[&str]) -> Result<LongRun> {
    let index = |n: &&str| {
        fit.index_of(n)
            .ok_or_else(|| Error::invalid(format!("no regressor named `{n}`")))
    };
    let ti = targets.iter().map(index).collect::<Result<Vec<_>>>()?;
    let ai = ar_names.iter().map(index).collect::<Result<Vec<_>>>()?;
    if ti.is_empty() {
        return Err(Error::invalid("long-run effect needs at least one target"));
    }
    let b = fit.coefficients();
    let beta: f64 = ti.iter().map(|&i| b[i]).sum();
    let ar: Vec<f64> = ai.iter().map(|&i| b[i]).collect();
    let value = long_run(beta, &ar)?;
    let denom = 1.0 - ar.iter().sum::<f64>();
    let mut g = DVector::zeros(b.len());
    for &i in &ti {
        g[i] += 1.0 / denom;
    }
    for &i in &ai {
        g[i] += beta / (denom * denom);
    }
    let var = (g.transpose() * fit.cov_hac() * &g)[(0, 0)];
    Ok(LongRun {
        value,
        se: var.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::period::Month;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn noise(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    fn monthly(v: Vec<f64>) -> MonthlySeries {
        MonthlySeries::new(Month::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn stars_convention() {
        assert_eq!(stars(0.005), "***");
        assert_eq!(stars(0.03), "**");
        assert_eq!(stars(0.07), "*");
        assert_eq!(stars(0.5), "");
        let m = MeanTest {
            mean: 0.0612,
            se: 0.0169,
            t_ratio: 3.62,
            p_value: 0.0003,
            n: 300,
        };
        assert_eq!(m.formatted(), "0.06*** (3.62)");
    }

    #[test]
    fn mean_test_location_equivariance() {
        let x = noise(1, 120);
        let a = mean_test(&x).unwrap();
        let shifted: Vec<f64> = x.iter().map(|v| v + 1.0).collect();
        let b = mean_test(&shifted).unwrap();
        assert!((b.mean - a.mean - 1.0).abs() < 1e-12);
        assert!((b.se - a.se).abs() < 1e-12);
        assert!(mean_test(&[2.0; 40]).is_err());
        assert!(mean_test(&x[..10]).is_err());
    }

    #[test]
    fn diff_tests_identity_cases() {
        let x = noise(2, 60);
        let a = monthly(x.clone());
        let same = diff_mean_test(&a, &a).unwrap();
        assert_eq!(same.mean_diff, 0.0);
        assert_eq!(same.t_ratio, Some(0.0));
        assert!(same.warning.is_some());
        assert_eq!(diff_var_test(&a, &a).unwrap().f, 1.0);

        let up = monthly(x.iter().map(|v| v + 0.08).collect());
        let d = diff_mean_test(&up, &a).unwrap();
        assert!((d.mean_diff - 0.08).abs() < 1e-12);

        let far = MonthlySeries::new(Month::new(2030, 1).unwrap(), x).unwrap();
        assert!(diff_mean_test(&a, &far).is_err());
    }

    #[test]
    fn bg_minimal_case() {
        let fit = constant_fit(&[1.0, 3.0, 2.0]).unwrap();
        let bg = breusch_godfrey(&fit, 1).unwrap();
        assert_eq!(bg.lags, 1);
        assert!(bg.lm.is_finite() && (0.0..=1.0).contains(&bg.p_value));
        assert!(breusch_godfrey(&fit, 3).is_err());
    }

    #[test]
    fn bg_detects_ar_residuals() {
        let e = noise(3, 300);
        let mut ar = vec![0.0; 300];
        for t in 1..300 {
            ar[t] = 0.7 * ar[t - 1] + e[t];
        }
        let fit = constant_fit(&ar).unwrap();
        assert!(breusch_godfrey(&fit, 12).unwrap().p_value < 0.01);
    }

    #[test]
    fn long_run_examples() {
        assert!((long_run(5.39, &[0.91]).unwrap() - 59.89).abs() < 0.01);
        assert!((long_run(8.57, &[0.90]).unwrap() - 85.7).abs() < 0.01);
        assert_eq!(long_run(4.0, &[0.0]).unwrap(), 4.0);
        assert!(long_run(1.0, &[0.6, 0.4]).is_err());
    }

    #[test]
    fn wald_reduces_to_t_squared() {
        let x = noise(5, 100);
        let y: Vec<f64> = x
            .iter()
            .zip(noise(6, 100))
            .map(|(a, e)| 0.3 * a + e)
            .collect();
        let fit = ols(&Design::with_constant(&y, &[("x", &x)]).unwrap()).unwrap();
        let (t, p) = fit.t_hac("x").unwrap();
        let w = fit.wald_hac(&["x"]).unwrap();
        assert!((w.statistic - t * t).abs() < 1e-9);
        assert!((w.p_value - p).abs() < 1e-9);
    }

    #[test]
    fn long_run_block_delta_method() {
        let x = noise(8, 300);
        let e = noise(9, 300);
        let mut y = vec![0.0; 300];
        for t in 1..300 {
            y[t] = 0.5 * y[t - 1] + 2.0 * x[t] + e[t];
        }
        let lag: Vec<f64> = std::iter::once(0.0)
            .chain(y[..299].iter().copied())
            .collect();
        let fit =
            ols(&Design::with_constant(&y[1..], &[("x", &x[1..]), ("y(-1)", &lag[1..])]).unwrap())
                .unwrap();
        let lr = long_run_block(&fit, &["x"], &["y(-1)"]).unwrap();
        assert!((lr.value - long_run_effect(&fit, "x", &["y(-1)"]).unwrap()).abs() < 1e-12);
        assert!((lr.value - 4.0).abs() < 3.0 * lr.se);

        let alone = long_run_block(&fit, &["x"], &[]).unwrap();
        let se_x = fit.hac_std_errors()[fit.index_of("x").unwrap()];
        assert!((alone.se - se_x).abs() < 1e-12);
        assert!(long_run_block(&fit, &[], &[]).is_err());
        assert!(long_run_block(&fit, &["z"], &[]).is_err());
    }
}
