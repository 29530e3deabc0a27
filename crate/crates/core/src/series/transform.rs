use serde::{Deserialize, Serialize};

use super::{MonthlySeries, QuarterlySeries, Unit};
use crate::error::{Error, Result};
use crate::period::Month;

/// Answer counts of one monthly survey wave. `answers[0]` is A1 (strongly
/// negative) through `answers[5]` = A6 (don't know).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurveyWave {
    pub month: Month,
    pub answers: [u32; 6],
    pub respondents: u32,
}

impl SurveyWave {
    pub fn new(month: Month, answers: [u32; 6]) -> Self {
        SurveyWave {
            month,
            answers,
            respondents: answers.iter().sum(),
        }
    }

    /// Positive (A4+A5) minus negative (A1+A2) answers in percent of
    /// respondents.
    pub fn balance(&self) -> Result<f64> {
        if self.respondents == 0 {
            return Err(Error::invalid(format!(
                "survey wave {} has no respondents",
                self.month
            )));
        }
        let total: u32 = self.answers.iter().sum();
        if total != self.respondents {
            return Err(Error::invalid(format!(
                "survey wave {}: answers sum to {total}, respondent total is {}",
                self.month, self.respondents
            )));
        }
        let [a1, a2, _, a4, a5, _] = self.answers.map(f64::from);
        Ok(100.0 * (a4 + a5 - a1 - a2) / self.respondents as f64)
    }
}

pub fn survey_balance(waves: &[SurveyWave]) -> Result<MonthlySeries> {
    let first = waves
        .first()
        .ok_or_else(|| Error::invalid("no survey waves"))?;
    let mut values = Vec::with_capacity(waves.len());
    for (i, w) in waves.iter().enumerate() {
        if w.month != first.month.offset(i as i64) {
            return Err(Error::invalid(format!(
                "survey waves not contiguous at {}",
                w.month
            )));
        }
        values.push(w.balance()?);
    }
    MonthlySeries::with_unit(first.month, values, Unit::Percent)
}

/// Places each quarterly value on the quarter's middle month and
/// interpolates linearly between those anchors. The first and last month are
/// held flat at the nearest anchor.
pub fn interpolate_q_to_m(series: &QuarterlySeries) -> Result<MonthlySeries> {
    let q = series.values();
    if q.len() < 2 {
        return Err(Error::invalid("need at least two quarters to interpolate"));
    }
    let months = q.len() * 3;
    let mut out = Vec::with_capacity(months);
    // Month i has anchor position (i - 1) / 3 in quarter units.
    for i in 0..months {
        let pos = (i as f64 - 1.0) / 3.0;
        let v = if pos <= 0.0 {
            q[0]
        } else if pos >= (q.len() - 1) as f64 {
            q[q.len() - 1]
        } else {
            let lo = pos.floor() as usize;
            let step = (i - 1 - lo * 3) as f64 / 3.0;
            q[lo] + (q[lo + 1] - q[lo]) * step
        };
        out.push(v);
    }
    MonthlySeries::new(series.start().first_month(), out)
}

/// `100 · (x_t / x_{t−12} − 1)`, starting twelve months in.
pub fn yoy_pct_change(series: &MonthlySeries) -> Result<MonthlySeries> {
    let v = series.values();
    if v.len() < 13 {
        return Err(Error::invalid(
            "year-on-year change needs at least 13 months",
        ));
    }
    let mut out = Vec::with_capacity(v.len() - 12);
    for t in 12..v.len() {
        if v[t - 12] <= 0.0 {
            return Err(Error::invalid(format!(
                "nonpositive base value at {}",
                series.start().offset(t as i64 - 12)
            )));
        }
        out.push(100.0 * (v[t] / v[t - 12] - 1.0));
    }
    MonthlySeries::with_unit(series.start().offset(12), out, Unit::Percent)
}

/// Real values: `nominal / cpi × 100`. Both series must cover the same months.
pub fn deflate(nominal: &MonthlySeries, cpi: &MonthlySeries) -> Result<MonthlySeries> {
    if nominal.start() != cpi.start() || nominal.len() != cpi.len() {
        return Err(Error::invalid(format!(
            "nominal {}..{} and CPI {}..{} are not aligned",
            nominal.start(),
            nominal.end(),
            cpi.start(),
            cpi.end()
        )));
    }
    let mut out = Vec::with_capacity(nominal.len());
    for (m, (&x, &p)) in nominal
        .months()
        .zip(nominal.values().iter().zip(cpi.values()))
    {
        if p <= 0.0 {
            return Err(Error::invalid(format!("nonpositive CPI at {m}")));
        }
        out.push(x / p * 100.0);
    }
    MonthlySeries::with_unit(nominal.start(), out, nominal.unit())
}

/// Subtracts the pre-break mean before `break_month` and the post-break mean
/// from `break_month` on.
pub fn regime_demean(series: &MonthlySeries, break_month: Month) -> Result<MonthlySeries> {
    let split = series.start().until(break_month);
    if split <= 0 || split as usize >= series.len() {
        return Err(Error::invalid(format!(
            "break {break_month} not strictly inside {}..{}",
            series.start(),
            series.end()
        )));
    }
    let (pre, post) = series.values().split_at(split as usize);
    let mean = |x: &[f64]| x.iter().sum::<f64>() / x.len() as f64;
    let (mp, mq) = (mean(pre), mean(post));
    let values = pre
        .iter()
        .map(|v| v - mp)
        .chain(post.iter().map(|v| v - mq))
        .collect();
    MonthlySeries::with_unit(series.start(), values, series.unit())
}

/// Centered moving average. An even window `w` uses the 2×w form with half
/// weights on the two outermost terms; an odd window is a plain centered
/// mean. Months without full support are dropped.
pub fn centered_ma(series: &MonthlySeries, window: usize) -> Result<MonthlySeries> {
    if window < 2 {
        return Err(Error::invalid("moving-average window must be at least 2"));
    }
    let half = window / 2;
    let span = 2 * half + 1;
    let v = series.values();
    if v.len() < span {
        return Err(Error::invalid(format!(
            "series of {} months too short for a {window}-month centered average",
            v.len()
        )));
    }
    let weights: Vec<f64> = if window.is_multiple_of(2) {
        (0..span)
            .map(|j| if j == 0 || j == span - 1 { 0.5 } else { 1.0 } / window as f64)
            .collect()
    } else {
        vec![1.0 / window as f64; span]
    };
    let out = v
        .windows(span)
        .map(|w| w.iter().zip(&weights).map(|(x, k)| x * k).sum())
        .collect();
    MonthlySeries::with_unit(series.start().offset(half as i64), out, series.unit())
}
