//! Browser bindings: an HP filter explorer, a sentiment index simulator and
//! a small naive Bayes classifier trained from typed examples.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wasm_bindgen::prelude::*;

use mediasent::index::{monthly_emsi, DailyCounts};
use mediasent::nb::{train_on_tokens, LabeledTokens, NbModel, SentimentClass};
use mediasent::period::Month;
use mediasent::series::{centered_ma, hp_filter, MonthlySeries};
use mediasent::text::tokenize;

fn js(e: mediasent::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn start() -> Month {
    Month::new(2000, 1).expect("valid month")
}

/// Trend component of `values` under smoothing parameter `lambda`.
#[wasm_bindgen]
pub fn hp_trend(values: Vec<f64>, lambda: f64) -> Result<Vec<f64>, JsError> {
    let series = MonthlySeries::new(start(), values).map_err(js)?;
    let hp = hp_filter(&series, lambda).map_err(js)?;
    Ok(hp.trend.values().to_vec())
}

/// A random walk with a slow cycle on top, for the HP explorer.
#[wasm_bindgen]
pub fn demo_series(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut level = 100.0;
    (0..n)
        .map(|t| {
            level += 0.2 + rng.random_range(-1.0..1.0);
            level + 4.0 * (t as f64 * std::f64::consts::TAU / 60.0).sin()
        })
        .collect()
}

/// Simulated monthly index with its centered moving average. The moving
/// average is padded with NaN where the window lacks support.
#[wasm_bindgen]
pub struct IndexDemo {
    emsi: Vec<f64>,
    smoothed: Vec<f64>,
}

#[wasm_bindgen]
impl IndexDemo {
    #[wasm_bindgen(getter)]
    pub fn emsi(&self) -> Vec<f64> {
        self.emsi.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn smoothed(&self) -> Vec<f64> {
        self.smoothed.clone()
    }
}

/// Each day carries `items_per_day` items. An item is irrelevant with
/// probability `irrelevant`; otherwise it is positive with a probability that
/// swings by `swing` around one half over a three-year cycle.
#[wasm_bindgen]
pub fn simulate_index(
    months: u32,
    items_per_day: u32,
    swing: f64,
    irrelevant: f64,
    ma_window: usize,
    seed: u64,
) -> Result<IndexDemo, JsError> {
    if !(0.0..=1.0).contains(&swing) || !(0.0..=1.0).contains(&irrelevant) {
        return Err(JsError::new(
            "swing and irrelevant share must lie in [0, 1]",
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut emsi = Vec::with_capacity(months as usize);
    for m in 0..months {
        let month = start().offset(i64::from(m));
        let p_pos = 0.5 + 0.5 * swing * (f64::from(m) * std::f64::consts::TAU / 36.0).sin();
        let days: Vec<DailyCounts> = month
            .dates()
            .map(|date| {
                let (mut p, mut n, mut i) = (0, 0, 0);
                for _ in 0..items_per_day {
                    if rng.random_bool(irrelevant) {
                        i += 1;
                    } else if rng.random_bool(p_pos) {
                        p += 1;
                    } else {
                        n += 1;
                    }
                }
                DailyCounts::new(date, p, n, i)
            })
            .collect();
        emsi.push(monthly_emsi(month, &days).map_err(js)?);
    }
    let mut smoothed = vec![f64::NAN; emsi.len()];
    if ma_window >= 2 && emsi.len() > ma_window {
        let ma = centered_ma(
            &MonthlySeries::new(start(), emsi.clone()).map_err(js)?,
            ma_window,
        )
        .map_err(js)?;
        let offset = start().until(ma.start()) as usize;
        smoothed[offset..offset + ma.len()].copy_from_slice(ma.values());
    }
    Ok(IndexDemo { emsi, smoothed })
}

/// Naive Bayes model trained from lines of the form `label: text`.
#[wasm_bindgen]
pub struct ToyClassifier {
    model: NbModel,
}

#[wasm_bindgen]
impl ToyClassifier {
    #[wasm_bindgen(constructor)]
    pub fn new(examples: &str) -> Result<ToyClassifier, JsError> {
        let mut docs = Vec::new();
        for (i, line) in examples
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty())
        {
            let (label, text) = line
                .split_once(':')
                .ok_or_else(|| JsError::new(&format!("line {}: expected `label: text`", i + 1)))?;
            let label: SentimentClass = label.parse().map_err(js)?;
            docs.push(LabeledTokens::new(
                format!("l{}", i + 1),
                label,
                tokenize(text),
            ));
        }
        let (model, _) = train_on_tokens(&docs).map_err(js)?;
        Ok(ToyClassifier { model })
    }

    /// Predicted class name.
    pub fn classify(&self, text: &str) -> String {
        self.model
            .classify_text("input", text)
            .predicted
            .as_str()
            .to_string()
    }

    /// Posterior probabilities in the order of `classes()`.
    pub fn posteriors(&self, text: &str) -> Vec<f64> {
        let scores = self.model.classify_text("input", text).scores;
        let top = scores
            .iter()
            .map(|(_, s)| *s)
            .fold(f64::NEG_INFINITY, f64::max);
        let mass: Vec<f64> = scores.iter().map(|(_, s)| (s - top).exp()).collect();
        let total: f64 = mass.iter().sum();
        mass.into_iter().map(|m| m / total).collect()
    }

    pub fn classes(&self) -> Vec<String> {
        self.model
            .classes()
            .iter()
            .map(|c| c.as_str().to_string())
            .collect()
    }

    pub fn vocabulary_size(&self) -> usize {
        self.model.vocabulary().len()
    }
}
