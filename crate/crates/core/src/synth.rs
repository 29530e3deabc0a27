//! Synthetic fixtures with known ground truth: a labeled corpus drawn from
//! per-class word distributions, and survey and macro series drawn from a
//! stable first-order system driven by the corpus sentiment.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::path::Path;

use chrono::NaiveTime;
use nalgebra::DMatrix;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::corpus::{serialize_batch, Channel, MediaItem, MAX_RECORDS};
use crate::error::{Error, Result};
use crate::index::{build_emsi, Locality, LocalityTable};
use crate::io::{csv_writer, Metadata};
use crate::nb::{write_labels_csv, LabeledText, SentimentClass};
use crate::period::{Month, Quarter};
use crate::series::{
    write_quarterly_csv, write_series_table, MonthlySeries, QuarterlySeries, Unit,
};

/// Words that mark an item as economic news; the bundled query selects on
/// them.
pub const TOPIC_WORDS: [&str; 4] = ["economy", "market", "prices", "jobs"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutletSpec {
    pub name: String,
    pub channel: Channel,
    pub locality: Locality,
    /// Mean body length in words.
    pub words: usize,
    /// Relative publishing frequency.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub start: Month,
    pub months: usize,
    pub items_per_day: f64,
    pub outlets: Vec<OutletSpec>,
    /// Words private to each class.
    pub class_vocab: usize,
    /// Words every class draws from; the only overlap between classes.
    pub shared_vocab: usize,
    /// Probability that a word comes from the class's private list.
    pub signal: f64,
    pub irrelevant_share: f64,
    /// Share of items without any topic word.
    pub offtopic_share: f64,
    /// Standard deviation of the monthly positive share around one half.
    pub sentiment_sd: f64,
    pub labeled_docs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSpec {
    pub name: String,
    pub mean: f64,
    pub ar: f64,
    pub noise: f64,
    /// Effect of the previous month's value on the survey.
    pub survey_effect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub survey_mean: f64,
    pub survey_ar: f64,
    /// Effect of the previous month's index on the survey.
    pub emsi_effect: f64,
    pub survey_noise: f64,
    pub macros: Vec<MacroSpec>,
    pub gdp_growth: f64,
    pub gdp_cycle_ar: f64,
    pub gdp_noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub seed: u64,
    pub corpus: CorpusSpec,
    pub series: SeriesSpec,
}

impl Default for SyntheticSpec {
    /// Ten years of daily news from six outlets, about ten thousand items.
    fn default() -> Self {
        let outlet = |name: &str, channel, locality, words, weight| OutletSpec {
            name: name.into(),
            channel,
            locality,
            words,
            weight,
        };
        SyntheticSpec {
            seed: 20240601,
            corpus: CorpusSpec {
                start: Month::new(2010, 1).expect("valid month"),
                months: 120,
                items_per_day: 2.8,
                outlets: vec![
                    outlet(
                        "Daily Ledger",
                        Channel::Print,
                        Locality::Nationwide,
                        60,
                        3.0,
                    ),
                    outlet(
                        "Morning Courier",
                        Channel::Print,
                        Locality::Nationwide,
                        45,
                        2.0,
                    ),
                    outlet("Harbor Town Post", Channel::Print, Locality::Local, 30, 1.0),
                    outlet("Valley Gazette", Channel::Print, Locality::Local, 25, 0.5),
                    outlet(
                        "Wire Online",
                        Channel::Online,
                        Locality::Nationwide,
                        20,
                        4.0,
                    ),
                    outlet("City Net News", Channel::Online, Locality::Local, 18, 1.0),
                ],
                class_vocab: 60,
                shared_vocab: 200,
                signal: 0.05,
                irrelevant_share: 0.3,
                offtopic_share: 0.1,
                sentiment_sd: 0.15,
                labeled_docs: 500,
            },
            series: SeriesSpec {
                survey_mean: -5.0,
                survey_ar: 0.9,
                emsi_effect: 9.0,
                survey_noise: 1.0,
                macros: vec![
                    MacroSpec {
                        name: "unemployment".into(),
                        mean: 7.0,
                        ar: 0.95,
                        noise: 0.15,
                        survey_effect: -0.5,
                    },
                    MacroSpec {
                        name: "inflation".into(),
                        mean: 2.0,
                        ar: 0.8,
                        noise: 0.3,
                        survey_effect: 0.0,
                    },
                    MacroSpec {
                        name: "policy_rate".into(),
                        mean: 1.5,
                        ar: 0.97,
                        noise: 0.1,
                        survey_effect: 0.0,
                    },
                ],
                gdp_growth: 0.005,
                gdp_cycle_ar: 0.8,
                gdp_noise: 0.006,
            },
        }
    }
}

/// Ground truth written beside a fixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truth {
    pub seed: u64,
    pub emsi_name: String,
    pub survey_name: String,
    /// Granger direction between the index (x) and the survey (y).
    pub direction: String,
    pub emsi_effect: f64,
    pub survey_ar: f64,
    pub long_run_effect: f64,
    pub macro_effects: Vec<(String, f64)>,
    pub spectral_radius: f64,
    pub items: usize,
    pub on_topic_items: usize,
    pub months: usize,
    /// Index computed from the true labels of on-topic items.
    pub emsi_true: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFixture {
    pub items: Vec<MediaItem>,
    /// True class of each item; off-topic items count as irrelevant.
    pub item_labels: Vec<SentimentClass>,
    pub labels: Vec<LabeledText>,
    pub survey: MonthlySeries,
    pub macros: Vec<(String, MonthlySeries)>,
    pub gdp: QuarterlySeries,
    pub localities: LocalityTable,
    pub query: String,
    pub truth: Truth,
}

/// Largest eigenvalue modulus of a square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    m.complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn companion(series: &SeriesSpec) -> DMatrix<f64> {
    let k = series.macros.len() + 1;
    let mut a = DMatrix::zeros(k, k);
    a[(0, 0)] = series.survey_ar;
    for (i, m) in series.macros.iter().enumerate() {
        a[(0, i + 1)] = m.survey_effect;
        a[(i + 1, i + 1)] = m.ar;
    }
    a
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<f64> {
        let c = &self.corpus;
        if c.months == 0 || c.outlets.is_empty() || c.class_vocab == 0 {
            return Err(Error::invalid(
                "synthetic corpus needs months, outlets and class words",
            ));
        }
        if c.outlets.iter().any(|o| o.words == 0 || !(o.weight > 0.0)) {
            return Err(Error::invalid("outlets need positive length and weight"));
        }
        for (name, p) in [
            ("signal", c.signal),
            ("irrelevant_share", c.irrelevant_share),
            ("offtopic_share", c.offtopic_share),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("{name} must lie in [0, 1]")));
            }
        }
        if c.signal < 1.0 && c.shared_vocab == 0 {
            return Err(Error::invalid("signal below 1 needs shared words"));
        }
        if !(c.items_per_day > 0.0) || !(c.sentiment_sd >= 0.0) {
            return Err(Error::invalid(
                "items_per_day must be positive and sentiment_sd non-negative",
            ));
        }
        let rho = spectral_radius(&companion(&self.series));
        if rho >= 1.0 {
            return Err(Error::invalid(format!(
                "unstable series system: spectral radius {rho:.4} ≥ 1"
            )));
        }
        Ok(rho)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Distinct pronounceable words of two to four syllables.
fn make_words(rng: &mut ChaCha8Rng, n: usize, taken: &mut HashSet<String>) -> Vec<String> {
    const ONSETS: [&str; 16] = [
        "b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "st",
    ];
    const VOWELS: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(2..=4);
        let w: String = (0..syllables)
            .map(|_| {
                format!(
                    "{}{}",
                    ONSETS[rng.random_range(0..ONSETS.len())],
                    VOWELS[rng.random_range(0..VOWELS.len())]
                )
            })
            .collect();
        if taken.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

struct Vocab {
    class: [Vec<String>; 3],
    shared: Vec<String>,
    offtopic: Vec<String>,
}

impl Vocab {
    fn word<'a>(
        &'a self,
        rng: &mut ChaCha8Rng,
        class: Option<SentimentClass>,
        signal: f64,
    ) -> &'a str {
        let list = match class {
            None => &self.offtopic,
            Some(c) if self.shared.is_empty() || rng.random::<f64>() < signal => {
                &self.class[c.index()]
            }
            Some(_) => &self.shared,
        };
        &list[rng.random_range(0..list.len())]
    }

    /// Text of `len` words; on-topic texts carry one topic word.
    fn text(
        &self,
        rng: &mut ChaCha8Rng,
        class: Option<SentimentClass>,
        len: usize,
        signal: f64,
    ) -> String {
        let mut words: Vec<&str> = (0..len).map(|_| self.word(rng, class, signal)).collect();
        if class.is_some() {
            let topic = TOPIC_WORDS[rng.random_range(0..TOPIC_WORDS.len())];
            let at = rng.random_range(0..=words.len());
            words.insert(at, topic);
        }
        words.join(" ")
    }
}

fn draw_class(rng: &mut ChaCha8Rng, irrelevant_share: f64, positive_share: f64) -> SentimentClass {
    if rng.random::<f64>() < irrelevant_share {
        SentimentClass::Irrelevant
    } else if rng.random::<f64>() < positive_share {
        SentimentClass::Positive
    } else {
        SentimentClass::Negative
    }
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<SyntheticFixture> {
    let radius = spec.validate()?;
    let c = &spec.corpus;
    let s = &spec.series;

    let mut rng = stream(spec.seed, 1);
    let mut taken: HashSet<String> = TOPIC_WORDS.iter().map(|w| w.to_string()).collect();
    let vocab = Vocab {
        class: [
            make_words(&mut rng, c.class_vocab, &mut taken),
            make_words(&mut rng, c.class_vocab, &mut taken),
            make_words(&mut rng, c.class_vocab, &mut taken),
        ],
        shared: make_words(&mut rng, c.shared_vocab, &mut taken),
        offtopic: make_words(&mut rng, c.class_vocab.max(20), &mut taken),
    };

    // Corpus.
    let mut rng = stream(spec.seed, 2);
    let total_weight: f64 = c.outlets.iter().map(|o| o.weight).sum();
    let per_day = Poisson::new(c.items_per_day).map_err(|e| Error::invalid(e.to_string()))?;
    let mut items = Vec::new();
    let mut item_labels = Vec::new();
    let mut positive_share = Vec::with_capacity(c.months);
    for mi in 0..c.months {
        let month = c.start.offset(mi as i64);
        let q = (0.5 + c.sentiment_sd * normal(&mut rng)).clamp(0.02, 0.98);
        positive_share.push(q);
        for date in month.dates() {
            let n = per_day.sample(&mut rng) as usize;
            let mut day: Vec<(NaiveTime, MediaItem, SentimentClass)> = Vec::with_capacity(n);
            for _ in 0..n {
                let mut pick = rng.random::<f64>() * total_weight;
                let outlet = c
                    .outlets
                    .iter()
                    .find(|o| {
                        pick -= o.weight;
                        pick < 0.0
                    })
                    .unwrap_or(&c.outlets[c.outlets.len() - 1]);
                let offtopic = rng.random::<f64>() < c.offtopic_share;
                let class = draw_class(&mut rng, c.irrelevant_share, q);
                let topic_class = (!offtopic).then_some(class);
                let len = ((outlet.words as f64) * rng.random_range(0.5..1.5))
                    .round()
                    .max(1.0) as usize;
                let headline_len = rng.random_range(3..=6);
                let headline = vocab.text(&mut rng, None, headline_len, c.signal);
                let body = vocab.text(&mut rng, topic_class, len, c.signal);
                let secs = rng.random_range(0..86_400u32);
                let time =
                    NaiveTime::from_num_seconds_from_midnight_opt(secs, 0).expect("in range");
                let item = MediaItem::new(
                    String::new(),
                    outlet.name.clone(),
                    date,
                    Some(time),
                    outlet.channel,
                    headline,
                    body,
                );
                day.push((
                    time,
                    item,
                    if offtopic {
                        SentimentClass::Irrelevant
                    } else {
                        class
                    },
                ));
            }
            day.sort_by_key(|(t, _, _)| *t);
            for (_, mut item, label) in day {
                item.id = format!("syn-{:06}", items.len() + 1);
                items.push(item);
                item_labels.push(label);
            }
        }
    }

    // Labeled training documents, drawn like on-topic items at an even
    // positive share.
    let mut rng = stream(spec.seed, 3);
    let mean_words = c
        .outlets
        .iter()
        .map(|o| o.words as f64 * o.weight)
        .sum::<f64>()
        / total_weight;
    let labels = (0..c.labeled_docs)
        .map(|i| {
            let class = draw_class(&mut rng, c.irrelevant_share, 0.5);
            let len = (mean_words * rng.random_range(0.5..1.5)).round().max(1.0) as usize;
            LabeledText {
                id: format!("lab-{:04}", i + 1),
                label: class,
                text: vocab.text(&mut rng, Some(class), len, c.signal),
            }
        })
        .collect();

    // Series.
    let end = c.start.offset(c.months as i64 - 1);
    let emsi = build_emsi(
        items.iter().zip(&item_labels).map(|(it, l)| (it.date, *l)),
        c.start,
        end,
    )?;
    let emsi_true = emsi.values();
    let mut rng = stream(spec.seed, 4);
    let mut macro_paths: Vec<Vec<f64>> = s
        .macros
        .iter()
        .map(|m| vec![m.mean + m.noise * normal(&mut rng) / (1.0 - m.ar * m.ar).sqrt()])
        .collect();
    let mut survey = vec![s.survey_mean + s.survey_noise * normal(&mut rng)];
    let intercept = s.survey_mean * (1.0 - s.survey_ar);
    for t in 1..c.months {
        for (m, path) in s.macros.iter().zip(macro_paths.iter_mut()) {
            let prev = path[t - 1];
            path.push(m.mean + m.ar * (prev - m.mean) + m.noise * normal(&mut rng));
        }
        let macro_term: f64 = s
            .macros
            .iter()
            .zip(&macro_paths)
            .map(|(m, p)| m.survey_effect * (p[t - 1] - m.mean))
            .sum();
        let value = intercept
            + s.survey_ar * survey[t - 1]
            + s.emsi_effect * emsi_true[t - 1]
            + macro_term
            + s.survey_noise * normal(&mut rng);
        survey.push(value);
    }
    let survey = MonthlySeries::with_unit(c.start, survey, Unit::Percent)?;
    let macros = s
        .macros
        .iter()
        .zip(macro_paths)
        .map(|(m, p)| {
            Ok((
                m.name.clone(),
                MonthlySeries::with_unit(c.start, p, Unit::Percent)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let first_q: Quarter = c.start.quarter();
    let quarters = (first_q.first_month().until(end) / 3 + 1) as usize;
    let mut log_gdp = 7.0;
    let mut cycle = 0.0;
    let mut gdp = Vec::with_capacity(quarters);
    for _ in 0..quarters {
        cycle = s.gdp_cycle_ar * cycle + s.gdp_noise * normal(&mut rng);
        log_gdp += s.gdp_growth;
        gdp.push(((log_gdp + cycle).exp() * 100.0).round() / 100.0);
    }
    let gdp = QuarterlySeries::new(first_q, gdp)?;

    let localities = c
        .outlets
        .iter()
        .map(|o| (o.name.clone(), o.locality))
        .collect();
    let query = TOPIC_WORDS.join(" OR ");
    let truth = Truth {
        seed: spec.seed,
        emsi_name: "emsi".into(),
        survey_name: "survey".into(),
        direction: if s.emsi_effect != 0.0 {
            "x_to_y"
        } else {
            "none"
        }
        .into(),
        emsi_effect: s.emsi_effect,
        survey_ar: s.survey_ar,
        long_run_effect: s.emsi_effect / (1.0 - s.survey_ar),
        macro_effects: s
            .macros
            .iter()
            .map(|m| (m.name.clone(), m.survey_effect))
            .collect(),
        spectral_radius: radius,
        items: items.len(),
        on_topic_items: items.len() - count_offtopic(&items),
        months: c.months,
        emsi_true,
    };
    Ok(SyntheticFixture {
        items,
        item_labels,
        labels,
        survey,
        macros,
        gdp,
        localities,
        query,
        truth,
    })
}

fn count_offtopic(items: &[MediaItem]) -> usize {
    let topic: BTreeSet<&str> = TOPIC_WORDS.into_iter().collect();
    items
        .iter()
        .filter(|it| !it.tokens().iter().any(|t| topic.contains(t)))
        .count()
}

impl SyntheticFixture {
    /// Batch files of at most `MAX_RECORDS` items, named `batch_NNN.txt`.
    pub fn batches(&self) -> Result<Vec<(String, String)>> {
        self.items
            .chunks(MAX_RECORDS)
            .enumerate()
            .map(|(i, chunk)| Ok((format!("batch_{i:03}.txt"), serialize_batch(chunk)?)))
            .collect()
    }

    /// A pipeline configuration for the files `write_to` produces, with
    /// outputs under `out/`.
    pub fn pipeline_toml(&self) -> String {
        format!(
            "seed = {}\noutput_dir = \"out\"\n\n[inputs]\nbatches = [\"batches\"]\nlabels = \"labels.csv\"\n\
             query = \"query.txt\"\nsurvey = \"survey.csv\"\nmacros = \"macro.csv\"\ngdp = \"gdp_q.csv\"\n\
             localities = \"outlets.csv\"\n",
            self.truth.seed
        )
    }

    /// Writes `batches/`, `labels.csv`, `survey.csv`, `macro.csv`,
    /// `gdp_q.csv`, `outlets.csv`, `query.txt`, `truth.json` and
    /// `pipeline.toml` into `dir`.
    pub fn write_to(&self, dir: &Path, meta: &Metadata) -> Result<()> {
        let batch_dir = dir.join("batches");
        fs::create_dir_all(&batch_dir)?;
        for (name, text) in self.batches()? {
            fs::write(batch_dir.join(name), text)?;
        }
        let file = |name: &str| fs::File::create(dir.join(name)).map(std::io::BufWriter::new);
        write_labels_csv(file("labels.csv")?, &self.labels, Some(meta))?;
        write_series_table(
            file("survey.csv")?,
            &[(self.truth.survey_name.as_str(), &self.survey)],
            Some(meta),
        )?;
        let cols: Vec<(&str, &MonthlySeries)> =
            self.macros.iter().map(|(n, s)| (n.as_str(), s)).collect();
        write_series_table(file("macro.csv")?, &cols, Some(meta))?;
        write_quarterly_csv(file("gdp_q.csv")?, "gdp", &self.gdp, Some(meta))?;
        let mut w = csv_writer(file("outlets.csv")?, Some(meta))?;
        w.write_record(["outlet", "locality"])?;
        for (o, l) in &self.localities {
            w.write_record([
                o.as_str(),
                if *l == Locality::Local {
                    "local"
                } else {
                    "nationwide"
                },
            ])?;
        }
        w.flush()?;
        fs::write(dir.join("query.txt"), format!("{}\n", self.query))?;
        fs::write(
            dir.join("truth.json"),
            serde_json::to_string_pretty(&self.truth)? + "\n",
        )?;
        fs::write(dir.join("pipeline.toml"), self.pipeline_toml())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nb::{cross_validate, LabeledTokens};

    fn small() -> SyntheticSpec {
        let mut spec = SyntheticSpec::default();
        spec.corpus.months = 6;
        spec.corpus.labeled_docs = 120;
        spec
    }

    #[test]
    fn deterministic_and_consistent() {
        let a = generate_synthetic(&small()).unwrap();
        let b = generate_synthetic(&small()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.survey.len(), 6);
        assert_eq!(a.gdp.len(), 2);
        assert_eq!(a.items.len(), a.item_labels.len());
        assert!(a
            .items
            .windows(2)
            .all(|w| (w[0].date, w[0].time) <= (w[1].date, w[1].time)));
        assert_eq!(a.truth.long_run_effect, 9.0 / (1.0 - 0.9));
        let parsed =
            crate::corpus::parse_batch_named("x", a.batches().unwrap()[0].1.as_bytes()).unwrap();
        assert!(parsed.errors.is_empty());
        assert_eq!(parsed.items[..], a.items[..parsed.items.len()]);
    }

    #[test]
    fn unstable_system_rejected() {
        let mut spec = small();
        spec.series.survey_ar = 1.02;
        assert!(generate_synthetic(&spec).is_err());
        let mut spec = small();
        spec.series.macros[0].ar = -1.0;
        assert!(generate_synthetic(&spec).is_err());
    }

    #[test]
    fn separable_vocabulary_is_perfectly_classified() {
        let mut spec = small();
        spec.corpus.signal = 1.0;
        spec.corpus.shared_vocab = 0;
        let fx = generate_synthetic(&spec).unwrap();
        let docs: Vec<LabeledTokens> = fx.labels.iter().map(LabeledText::to_tokens).collect();
        let report = cross_validate(&docs, 5, 1).unwrap();
        assert_eq!(report.accuracy, 1.0);
    }

    #[test]
    fn neutral_corpus_has_zero_index() {
        let mut spec = small();
        spec.corpus.irrelevant_share = 1.0;
        let fx = generate_synthetic(&spec).unwrap();
        assert!(fx.truth.emsi_true.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn spectral_radius_of_triangular_system() {
        let spec = SyntheticSpec::default();
        let r = spec.validate().unwrap();
        assert!((r - 0.97).abs() < 1e-12);
    }
}
