//! Aligned named series and lagged design matrices.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::inference::breusch_godfrey;
use super::ols::{default_bandwidth, ols_with_bandwidth, Design, OlsFit};
use crate::error::{Error, Result};
use crate::period::Month;
use crate::series::{common_range, MonthlySeries};

/// One regressor: a series at a lag (0 = contemporaneous).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Term {
    pub series: String,
    pub lag: usize,
}

impl Term {
    pub fn new(series: impl Into<String>, lag: usize) -> Self {
        Term {
            series: series.into(),
            lag,
        }
    }

    /// `emsi(-2)` for lagged terms, the bare name at lag 0.
    pub fn label(&self) -> String {
        if self.lag == 0 {
            self.series.clone()
        } else {
            format!("{}(-{})", self.series, self.lag)
        }
    }

    /// Terms `series(-1) … series(-k)`.
    pub fn lags(series: &str, k: usize) -> Vec<Term> {
        (1..=k).map(|l| Term::new(series, l)).collect()
    }
}

/// Regression specification: dependent series, ordered terms, and a constant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModelSpec {
    pub dependent: String,
    pub terms: Vec<Term>,
    pub constant: bool,
}

impl ModelSpec {
    pub fn max_lag(&self) -> usize {
        self.terms.iter().map(|t| t.lag).max().unwrap_or(0)
    }
}

/// Named series restricted to their common months.
#[derive(Debug, Clone)]
pub struct Frame {
    start: Month,
    len: usize,
    columns: Vec<(String, Vec<f64>)>,
}

impl Frame {
    pub fn new(series: &[(&str, &MonthlySeries)]) -> Result<Self> {
        let refs: Vec<&MonthlySeries> = series.iter().map(|(_, s)| *s).collect();
        let (from, to) = common_range(&refs)?;
        let mut columns = Vec::with_capacity(series.len());
        for (name, s) in series {
            if columns.iter().any(|(n, _): &(String, Vec<f64>)| n == name) {
                return Err(Error::invalid(format!("series `{name}` given twice")));
            }
            columns.push((name.to_string(), s.slice(from, to)?.values().to_vec()));
        }
        Ok(Frame {
            start: from,
            len: (from.until(to) + 1) as usize,
            columns,
        })
    }

    pub fn start(&self) -> Month {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn column(&self, name: &str) -> Result<&[f64]> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
            .ok_or_else(|| Error::invalid(format!("unknown series `{name}`")))
    }

    /// Design for `spec`, using every month with all lags available.
    pub fn design(&self, spec: &ModelSpec) -> Result<Design> {
        let skip = spec.max_lag();
        if skip >= self.len {
            return Err(Error::invalid(format!("lag {skip} leaves no observations")));
        }
        let rows = self.len - skip;
        let y = self.column(&spec.dependent)?;
        let k = spec.terms.len() + usize::from(spec.constant);
        let mut x = DMatrix::zeros(rows, k);
        let mut names = Vec::with_capacity(k);
        let mut j = 0;
        if spec.constant {
            x.column_mut(0).fill(1.0);
            names.push("const".to_string());
            j = 1;
        }
        for term in &spec.terms {
            let col = self.column(&term.series)?;
            for r in 0..rows {
                x[(r, j)] = col[skip + r - term.lag];
            }
            names.push(term.label());
            j += 1;
        }
        let yv = DVector::from_iterator(rows, y[skip..].iter().copied());
        Ok(Design::new(names, x, yv))
    }

    /// First month of the estimation sample for `spec`.
    pub fn sample_start(&self, spec: &ModelSpec) -> Month {
        self.start.offset(spec.max_lag() as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
/// Lag-depth search and inference settings shared by the lagged models.
pub struct GrangerConfig {
    pub k_max: usize,
    pub bg_lags: usize,
    pub alpha: f64,
    /// HAC bandwidth; `None` uses the automatic rule.
    pub bandwidth: Option<usize>,
}

impl Default for GrangerConfig {
    fn default() -> Self {
        GrangerConfig {
            k_max: 12,
            bg_lags: 12,
            alpha: 0.05,
            bandwidth: None,
        }
    }
}

/// Outcome of lag-depth selection.
#[derive(Debug, Clone)]
pub struct LagChoice {
    pub k: usize,
    /// True when no depth tried removed residual autocorrelation and `k` is
    /// the deepest one: `k_max`, or less when the sample cannot support
    /// `k_max`.
    pub fallback: bool,
    pub fit: OlsFit,
}

/// Fits `design` with the configured HAC bandwidth.
pub fn fit_with(cfg: &GrangerConfig, design: &Design) -> Result<OlsFit> {
    ols_with_bandwidth(
        design,
        cfg.bandwidth
            .unwrap_or_else(|| default_bandwidth(design.n())),
    )
}

/// Smallest `K ∈ 1..=k_max` whose fit passes a Breusch–Godfrey test with
/// `bg_lags` lags at level `alpha`. Depths with too few observations for
/// the test are not tried.
pub fn select_lags<F>(cfg: &GrangerConfig, mut design_for: F) -> Result<LagChoice>
where
    F: FnMut(usize) -> Result<Design>,
{
    let GrangerConfig {
        k_max,
        bg_lags,
        alpha,
        ..
    } = *cfg;
    if k_max == 0 {
        return Err(Error::invalid("k_max must be at least 1"));
    }
    let mut last: Option<(usize, OlsFit)> = None;
    for k in 1..=k_max {
        let design = design_for(k)?;
        if design.n() <= design.k() + bg_lags {
            if let Some((k, fit)) = last {
                return Ok(LagChoice {
                    k,
                    fallback: true,
                    fit,
                });
            }
            return Err(Error::invalid(format!(
                "{} observations insufficient for lag depth {k} ({} regressors, {bg_lags} test lags)",
                design.n(),
                design.k()
            )));
        }
        let fit = fit_with(cfg, &design)?;
        if breusch_godfrey(&fit, bg_lags)?.p_value >= alpha {
            return Ok(LagChoice {
                k,
                fallback: false,
                fit,
            });
        }
        last = Some((k, fit));
    }
    let (k, fit) = last.expect("k_max ≥ 1");
    Ok(LagChoice {
        k,
        fallback: true,
        fit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(start: &str, v: Vec<f64>) -> MonthlySeries {
        MonthlySeries::new(start.parse().unwrap(), v).unwrap()
    }

    #[test]
    fn lagged_design_alignment() {
        let a = s("2000-01", (0..10).map(f64::from).collect());
        let b = s("2000-03", (100..110).map(f64::from).collect());
        let frame = Frame::new(&[("a", &a), ("b", &b)]).unwrap();
        assert_eq!(frame.len(), 8);
        let spec = ModelSpec {
            dependent: "a".into(),
            terms: vec![Term::new("b", 2), Term::new("a", 1), Term::new("b", 0)],
            constant: true,
        };
        let d = frame.design(&spec).unwrap();
        assert_eq!(d.names, ["const", "b(-2)", "a(-1)", "b"]);
        assert_eq!(d.n(), 6);
        // first row is month 2000-05: a=4, b(-2)=b@2000-03=100, a(-1)=3, b=102
        assert_eq!(d.y[0], 4.0);
        assert_eq!(
            d.x.row(0).iter().copied().collect::<Vec<_>>(),
            [1.0, 100.0, 3.0, 102.0]
        );
        assert_eq!(frame.sample_start(&spec).to_string(), "2000-05");
    }

    #[test]
    fn select_lags_stays_within_the_sample() {
        let ar = |n: usize| {
            let mut v = vec![0.0; n];
            for t in 1..n {
                v[t] = 0.5 * v[t - 1] + ((t * 7919) % 13) as f64 - 6.0;
            }
            v
        };
        let choose = |n: usize, k_max: usize| {
            let a = s("2000-01", ar(n));
            let frame = Frame::new(&[("a", &a)]).unwrap();
            let cfg = GrangerConfig {
                k_max,
                alpha: 1.1,
                ..GrangerConfig::default()
            };
            select_lags(&cfg, |k| {
                frame.design(&ModelSpec {
                    dependent: "a".into(),
                    terms: Term::lags("a", k),
                    constant: true,
                })
            })
        };
        // alpha above one rejects every depth, forcing the fallback.
        assert!(choose(14, 8).is_err());
        let c = choose(30, 12).unwrap();
        assert!(c.fallback);
        // Depth k leaves 30 − k rows for 1 + k regressors and 12 test lags.
        assert_eq!(c.k, 8);
        assert_eq!(choose(200, 3).unwrap().k, 3);
    }
}
