//! Quandt likelihood-ratio (sup-F) test for a single intercept shift.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::period::Month;
use crate::series::MonthlySeries;

pub const TRIM: f64 = 0.15;

/// Asymptotic sup-F critical values for one restriction and 15% trimming at
/// the 10%, 5% and 1% levels.
pub const QLR_CRITICAL: [f64; 3] = [7.12, 8.68, 12.16];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakResult {
    /// First month of the post-break regime.
    pub break_month: Month,
    pub sup_f: f64,
    pub profile: Vec<(Month, f64)>,
    /// `sup_f` exceeds the 5% critical value.
    pub significant: bool,
}

pub fn qlr_break(series: &MonthlySeries) -> Result<BreakResult> {
    let n = series.len();
    if n < 40 {
        return Err(Error::invalid(format!(
            "break test needs at least 40 observations, got {n}"
        )));
    }
    let mean = series.mean();
    let y: Vec<f64> = series.values().iter().map(|v| v - mean).collect();
    let mut s1 = vec![0.0; n + 1];
    let mut s2 = vec![0.0; n + 1];
    for (i, v) in y.iter().enumerate() {
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + v * v;
    }
    let ssr_restricted = s2[n] - s1[n] * s1[n] / n as f64;
    let lo = (TRIM * n as f64).ceil() as usize;
    let hi = ((1.0 - TRIM) * n as f64).floor() as usize;
    let scale = s2[n].max(f64::MIN_POSITIVE);
    let mut profile = Vec::with_capacity(hi + 1 - lo);
    for tau in lo..=hi {
        let (a, b) = (tau as f64, (n - tau) as f64);
        let pre = s2[tau] - s1[tau] * s1[tau] / a;
        let post = (s2[n] - s2[tau]) - (s1[n] - s1[tau]).powi(2) / b;
        let ssr_u = (pre + post).max(0.0);
        let gain = (ssr_restricted - ssr_u).max(0.0);
        let f = if gain <= 1e-14 * scale {
            0.0
        } else if ssr_u <= 1e-14 * scale {
            f64::INFINITY
        } else {
            gain / (ssr_u / (n - 2) as f64)
        };
        profile.push((series.start().offset(tau as i64), f));
    }
    let (break_month, sup_f) =
        profile
            .iter()
            .copied()
            .fold((profile[0].0, f64::NEG_INFINITY), |best, cur| {
                if cur.1 > best.1 {
                    cur
                } else {
                    best
                }
            });
    Ok(BreakResult {
        break_month,
        sup_f,
        profile,
        significant: sup_f > QLR_CRITICAL[1],
    })
}

/// Shifts the segment before `break_month` so that its mean equals the mean
/// from `break_month` on.
pub fn level_correct(series: &MonthlySeries, break_month: Month) -> Result<MonthlySeries> {
    let tau = series.start().until(break_month);
    if tau <= 0 || tau >= series.len() as i64 {
        return Err(Error::invalid(format!(
            "break {break_month} is not inside the series"
        )));
    }
    let tau = tau as usize;
    let v = series.values();
    let pre = v[..tau].iter().sum::<f64>() / tau as f64;
    let post = v[tau..].iter().sum::<f64>() / (v.len() - tau) as f64;
    let shift = pre - post;
    let values = v
        .iter()
        .enumerate()
        .map(|(i, &x)| if i < tau { x - shift } else { x })
        .collect();
    MonthlySeries::with_unit(series.start(), values, series.unit())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(v: Vec<f64>) -> MonthlySeries {
        MonthlySeries::new(Month::new(2000, 1).unwrap(), v).unwrap()
    }

    #[test]
    fn constant_series_has_no_break() {
        let r = qlr_break(&ms(vec![3.0; 60])).unwrap();
        assert_eq!(r.sup_f, 0.0);
        assert!(!r.significant);
    }

    #[test]
    fn exact_step_is_located() {
        let v: Vec<f64> = (0..100).map(|i| if i < 37 { 0.0 } else { 10.0 }).collect();
        let r = qlr_break(&ms(v)).unwrap();
        assert_eq!(r.break_month, Month::new(2000, 1).unwrap().offset(37));
        assert!(r.significant);
    }

    #[test]
    fn profile_matches_direct_regression() {
        let v: Vec<f64> = (0..50)
            .map(|i| ((i * 7919) % 13) as f64 + if i > 30 { 4.0 } else { 0.0 })
            .collect();
        let s = ms(v.clone());
        let r = qlr_break(&s).unwrap();
        let (m, f) = r.profile[5];
        let tau = s.start().until(m) as usize;
        let dummy: Vec<f64> = (0..50).map(|i| f64::from(u8::from(i >= tau))).collect();
        let full = crate::regression::ols(
            &crate::regression::Design::with_constant(&v, &[("d", &dummy)]).unwrap(),
        )
        .unwrap();
        let ssr_r: f64 = {
            let mean = v.iter().sum::<f64>() / 50.0;
            v.iter().map(|x| (x - mean).powi(2)).sum()
        };
        let direct = (ssr_r - full.ssr()) / (full.ssr() / 48.0);
        assert!((f - direct).abs() < 1e-8 * direct.max(1.0));
    }

    #[test]
    fn level_correction_aligns_means() {
        let v: Vec<f64> = (0..60)
            .map(|i| {
                if i < 20 {
                    5.0 + (i % 3) as f64
                } else {
                    (i % 3) as f64
                }
            })
            .collect();
        let s = ms(v);
        let b = Month::new(2000, 1).unwrap().offset(20);
        let c = level_correct(&s, b).unwrap();
        let pre: f64 = c.values()[..20].iter().sum::<f64>() / 20.0;
        let post: f64 = c.values()[20..].iter().sum::<f64>() / 40.0;
        assert!((pre - post).abs() < 1e-12);
        assert!(level_correct(&s, Month::new(1999, 1).unwrap()).is_err());
        assert!(qlr_break(&ms(vec![1.0; 39])).is_err());
    }
}
