//! Monthly and quarterly series with the survey and macro transforms.

mod adf;
mod hp;
mod table;
mod transform;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::period::{Month, Quarter};

pub use adf::{adf_critical_values, adf_test, mackinnon_p_value, AdfResult};
pub use hp::{hp_filter, solve_spd_pentadiagonal, HpDecomposition, MONTHLY_LAMBDA};
pub use table::{
    read_quarterly_csv, read_series_csv, read_series_table, read_waves_csv, write_quarterly_csv,
    write_series_csv, write_series_table,
};
pub use transform::{
    centered_ma, deflate, interpolate_q_to_m, regime_demean, survey_balance, yoy_pct_change,
    SurveyWave,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unit {
    Percent,
    Index,
    Ratio,
    #[default]
    Level,
}

/// Contiguous monthly observations without NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct MonthlySeries {
    start: Month,
    values: Vec<f64>,
    unit: Unit,
}

impl MonthlySeries {
    pub fn new(start: Month, values: Vec<f64>) -> Result<Self> {
        Self::with_unit(start, values, Unit::Level)
    }

    pub fn with_unit(start: Month, values: Vec<f64>, unit: Unit) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite value at {}",
                start.offset(i as i64)
            )));
        }
        Ok(MonthlySeries {
            start,
            values,
            unit,
        })
    }

    pub fn start(&self) -> Month {
        self.start
    }

    /// Last month, or the month before `start` for an empty series.
    pub fn end(&self) -> Month {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn months(&self) -> impl Iterator<Item = Month> + '_ {
        (0..self.values.len()).map(move |i| self.start.offset(i as i64))
    }

    pub fn get(&self, month: Month) -> Option<f64> {
        let i = self.start.until(month);
        if i < 0 {
            return None;
        }
        self.values.get(i as usize).copied()
    }

    /// Sub-series over `[from, to]`, which must lie inside the series.
    pub fn slice(&self, from: Month, to: Month) -> Result<MonthlySeries> {
        let a = self.start.until(from);
        let b = self.start.until(to);
        if a < 0 || b < a || b as usize >= self.values.len() {
            return Err(Error::invalid(format!(
                "range {from}..{to} outside series {}..{}",
                self.start,
                self.end()
            )));
        }
        Ok(MonthlySeries {
            start: from,
            values: self.values[a as usize..=b as usize].to_vec(),
            unit: self.unit,
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<MonthlySeries> {
        MonthlySeries::with_unit(
            self.start,
            self.values.iter().map(|&v| f(v)).collect(),
            self.unit,
        )
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Contiguous quarterly observations.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlySeries {
    start: Quarter,
    values: Vec<f64>,
}

impl QuarterlySeries {
    pub fn new(start: Quarter, values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("non-finite quarterly value"));
        }
        Ok(QuarterlySeries { start, values })
    }

    pub fn start(&self) -> Quarter {
        self.start
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Overlapping months of several series.
pub fn common_range(series: &[&MonthlySeries]) -> Result<(Month, Month)> {
    let from = series
        .iter()
        .map(|s| s.start())
        .max()
        .ok_or_else(|| Error::invalid("no series given"))?;
    let to = series.iter().map(|s| s.end()).min().expect("nonempty");
    if to < from {
        return Err(Error::invalid("series do not overlap"));
    }
    Ok((from, to))
}
