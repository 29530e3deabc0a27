//! Granger-causality battery, contemporaneous models and the macro-lag
//! significance tally.
//!
//! Each direction is a single OLS equation: the effect variable on a
//! constant, `K` lags of the cause, `K` lags of every control and `K` own
//! lags. `K` is the smallest depth whose residuals pass a Breusch–Godfrey
//! test. The cause block is tested jointly with a HAC Wald statistic.

use serde::Serialize;

use super::inference::WaldTest;
use super::lags::{select_lags, Frame, GrangerConfig, LagChoice, ModelSpec, Term};
use super::ols::OlsFit;
use crate::error::{Error, Result};
use crate::series::MonthlySeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    XToY,
    YToX,
    Bidirectional,
    None,
}

impl Direction {
    pub fn from_p_values(p_xy: f64, p_yx: f64, alpha: f64) -> Self {
        match (p_xy < alpha, p_yx < alpha) {
            (true, true) => Direction::Bidirectional,
            (true, false) => Direction::XToY,
            (false, true) => Direction::YToX,
            (false, false) => Direction::None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::XToY => "x_to_y",
            Direction::YToX => "y_to_x",
            Direction::Bidirectional => "bidirectional",
            Direction::None => "none",
        }
    }
}

/// One equation of the pair.
#[derive(Debug, Clone)]
pub struct DirectionalTest {
    pub cause: String,
    pub effect: String,
    pub k: usize,
    pub fallback: bool,
    pub wald: WaldTest,
    pub fit: OlsFit,
}

#[derive(Debug, Clone)]
pub struct GrangerResult {
    pub direction: Direction,
    /// Lags of x in the equation for y.
    pub x_to_y: DirectionalTest,
    /// Lags of y in the equation for x.
    pub y_to_x: DirectionalTest,
}

fn directional(
    frame: &Frame,
    cause: &str,
    effect: &str,
    controls: &[&str],
    cfg: &GrangerConfig,
) -> Result<DirectionalTest> {
    let spec_for = |k: usize| {
        let mut terms = Term::lags(cause, k);
        for c in controls {
            terms.extend(Term::lags(c, k));
        }
        terms.extend(Term::lags(effect, k));
        ModelSpec {
            dependent: effect.to_string(),
            terms,
            constant: true,
        }
    };
    let LagChoice { k, fallback, fit } = select_lags(cfg, |k| frame.design(&spec_for(k)))?;
    let block: Vec<String> = Term::lags(cause, k).iter().map(Term::label).collect();
    let names: Vec<&str> = block.iter().map(String::as_str).collect();
    let wald = fit.wald_hac(&names)?;
    Ok(DirectionalTest {
        cause: cause.to_string(),
        effect: effect.to_string(),
        k,
        fallback,
        wald,
        fit,
    })
}

/// Tests whether `x` Granger-causes `y` and vice versa, controlling for
/// lags of `controls`.
pub fn granger_test(
    x: (&str, &MonthlySeries),
    y: (&str, &MonthlySeries),
    controls: &[(&str, &MonthlySeries)],
    cfg: &GrangerConfig,
) -> Result<GrangerResult> {
    if x.0 == y.0 {
        return Err(Error::invalid("x and y must have different names"));
    }
    let mut all = vec![x, y];
    all.extend_from_slice(controls);
    let frame = Frame::new(&all)?;
    if frame.len() < 60 {
        return Err(Error::invalid(format!(
            "Granger test needs at least 60 aligned months, got {}",
            frame.len()
        )));
    }
    let control_names: Vec<&str> = controls.iter().map(|(n, _)| *n).collect();
    let x_to_y = directional(&frame, x.0, y.0, &control_names, cfg)?;
    let y_to_x = directional(&frame, y.0, x.0, &control_names, cfg)?;
    Ok(GrangerResult {
        direction: Direction::from_p_values(x_to_y.wald.p_value, y_to_x.wald.p_value, cfg.alpha),
        x_to_y,
        y_to_x,
    })
}

#[derive(Debug, Clone)]
pub struct ContemporaneousFit {
    pub k: usize,
    pub fallback: bool,
    pub fit: OlsFit,
}

impl ContemporaneousFit {
    /// Names of the own-lag coefficients, for long-run effects.
    pub fn own_lag_names(&self, survey: &str) -> Vec<String> {
        Term::lags(survey, self.k).iter().map(Term::label).collect()
    }
}

/// `survey_t` on a constant, `emsi_t`, contemporaneous macro variables and
/// `K` own lags.
pub fn contemporaneous_model(
    survey: (&str, &MonthlySeries),
    emsi: (&str, &MonthlySeries),
    macros: &[(&str, &MonthlySeries)],
    cfg: &GrangerConfig,
) -> Result<ContemporaneousFit> {
    let mut all = vec![survey, emsi];
    all.extend_from_slice(macros);
    let frame = Frame::new(&all)?;
    let spec_for = |k: usize| {
        let mut terms = vec![Term::new(emsi.0, 0)];
        terms.extend(macros.iter().map(|(n, _)| Term::new(*n, 0)));
        terms.extend(Term::lags(survey.0, k));
        ModelSpec {
            dependent: survey.0.to_string(),
            terms,
            constant: true,
        }
    };
    let LagChoice { k, fallback, fit } = select_lags(cfg, |k| frame.design(&spec_for(k)))?;
    Ok(ContemporaneousFit { k, fallback, fit })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignificanceCount {
    pub variable: String,
    pub significant: usize,
    /// Fits in which the variable appears.
    pub total: usize,
}

/// For each variable, the number of fits in which its block of regressors
/// (`var` or `var(-k)`) is jointly significant at `alpha` under HAC
/// inference. Fits without the variable are left out of its total.
pub fn significance_summary(
    fits: &[&OlsFit],
    variables: &[&str],
    alpha: f64,
) -> Result<Vec<SignificanceCount>> {
    let mut out = Vec::with_capacity(variables.len());
    for &var in variables {
        let prefix = format!("{var}(-");
        let mut count = SignificanceCount {
            variable: var.to_string(),
            significant: 0,
            total: 0,
        };
        for fit in fits {
            let block: Vec<&str> = fit
                .names()
                .iter()
                .filter(|n| n.as_str() == var || n.starts_with(&prefix))
                .map(String::as_str)
                .collect();
            if block.is_empty() {
                continue;
            }
            count.total += 1;
            if fit.wald_hac(&block)?.p_value < alpha {
                count.significant += 1;
            }
        }
        out.push(count);
    }
    Ok(out)
}
