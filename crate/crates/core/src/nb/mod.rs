//! Multinomial naive Bayes sentiment classifier with add-one smoothing.
//!
//! Training produces closed-form estimates:
//!
//! ```text
//! P(c)   = N_c / N
//! P(w|c) = (W_cw + 1) / (Σ_t W_ct + |V|)
//! ```
//!
//! and classification picks `argmax_c log P(c) + Σ_k n_k log P(w_k|c)` over
//! in-vocabulary words, each occurrence counted.

mod cv;
mod labels;
mod model_file;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{tokenize, vectorize, DocVector, TokenStream, Vocabulary};

pub use cv::{cross_validate, fold_assignment, CvReport, LabeledTokens};
pub use labels::{read_labels_csv, write_labels_csv, LabeledText};
pub use model_file::{read_model, write_model, MODEL_MAGIC, MODEL_VERSION};

/// Sentiment label. Declaration order is the fixed tie-break order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SentimentClass {
    Positive,
    Negative,
    Irrelevant,
}

impl SentimentClass {
    pub const ALL: [SentimentClass; 3] = [
        SentimentClass::Positive,
        SentimentClass::Negative,
        SentimentClass::Irrelevant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SentimentClass::Positive => "positive",
            SentimentClass::Negative => "negative",
            SentimentClass::Irrelevant => "irrelevant",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Positive ↔ negative; irrelevant is fixed.
    pub fn swapped(self) -> Self {
        match self {
            SentimentClass::Positive => SentimentClass::Negative,
            SentimentClass::Negative => SentimentClass::Positive,
            SentimentClass::Irrelevant => SentimentClass::Irrelevant,
        }
    }
}

impl fmt::Display for SentimentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SentimentClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" | "pos" => Ok(SentimentClass::Positive),
            "negative" | "neg" => Ok(SentimentClass::Negative),
            "irrelevant" | "irr" => Ok(SentimentClass::Irrelevant),
            other => Err(Error::invalid(format!("unknown sentiment class `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledDoc {
    pub id: String,
    pub label: SentimentClass,
    pub doc: DocVector,
}

/// Sufficient statistics for training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainCounts {
    /// Documents per class, indexed by `SentimentClass::index`.
    pub docs: [u64; 3],
    /// Word counts per class, `words[c][w]`.
    pub words: [Vec<u64>; 3],
    /// Row sums of `words`.
    pub totals: [u64; 3],
}

impl TrainCounts {
    pub fn accumulate(vocab_size: usize, docs: &[LabeledDoc]) -> Self {
        let mut counts = TrainCounts {
            docs: [0; 3],
            words: std::array::from_fn(|_| vec![0; vocab_size]),
            totals: [0; 3],
        };
        for d in docs {
            let c = d.label.index();
            counts.docs[c] += 1;
            for &(w, n) in d.doc.counts() {
                counts.words[c][w as usize] += n as u64;
                counts.totals[c] += n as u64;
            }
        }
        counts
    }

    pub fn n_docs(&self) -> u64 {
        self.docs.iter().sum()
    }
}

/// Trained classifier. Only classes seen in training are present.
#[derive(Debug, Clone, PartialEq)]
pub struct NbModel {
    vocab: Vocabulary,
    classes: Vec<SentimentClass>,
    log_priors: Vec<f64>,
    /// `log_conditionals[k][w]` for class `classes[k]`.
    log_conditionals: Vec<Vec<f64>>,
}

/// Result of classifying one document.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedDoc {
    pub id: String,
    pub predicted: SentimentClass,
    /// `(class, log score)` for every class in the model.
    pub scores: Vec<(SentimentClass, f64)>,
}

impl NbModel {
    /// Trains on documents vectorized against `vocab`. Returns the model and
    /// warnings for classes without training documents.
    pub fn train(vocab: Vocabulary, docs: &[LabeledDoc]) -> Result<(Self, Vec<String>)> {
        if docs.is_empty() {
            return Err(Error::invalid("empty training set"));
        }
        if vocab.is_empty() {
            return Err(Error::invalid("empty vocabulary"));
        }
        let counts = TrainCounts::accumulate(vocab.len(), docs);
        Ok(Self::from_counts(vocab, &counts))
    }

    pub fn from_counts(vocab: Vocabulary, counts: &TrainCounts) -> (Self, Vec<String>) {
        let n = counts.n_docs() as f64;
        let v = vocab.len() as f64;
        let mut warnings = Vec::new();
        let mut classes = Vec::new();
        let mut log_priors = Vec::new();
        let mut log_conditionals = Vec::new();
        for class in SentimentClass::ALL {
            let c = class.index();
            if counts.docs[c] == 0 {
                warnings.push(format!(
                    "class `{class}` has no training documents and is left out of the model"
                ));
                continue;
            }
            classes.push(class);
            log_priors.push((counts.docs[c] as f64 / n).ln());
            let denom = counts.totals[c] as f64 + v;
            log_conditionals.push(
                counts.words[c]
                    .iter()
                    .map(|&w| ((w as f64 + 1.0) / denom).ln())
                    .collect(),
            );
        }
        (
            NbModel {
                vocab,
                classes,
                log_priors,
                log_conditionals,
            },
            warnings,
        )
    }

    pub(crate) fn from_parts(
        vocab: Vocabulary,
        classes: Vec<SentimentClass>,
        log_priors: Vec<f64>,
        log_conditionals: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if classes.len() != log_priors.len() || classes.len() != log_conditionals.len() {
            return Err(Error::Format("class table sizes disagree".into()));
        }
        if log_conditionals.iter().any(|row| row.len() != vocab.len()) {
            return Err(Error::Format(
                "conditional table does not match vocabulary".into(),
            ));
        }
        Ok(NbModel {
            vocab,
            classes,
            log_priors,
            log_conditionals,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn classes(&self) -> &[SentimentClass] {
        &self.classes
    }

    pub fn log_priors(&self) -> &[f64] {
        &self.log_priors
    }

    pub fn log_conditionals(&self) -> &[Vec<f64>] {
        &self.log_conditionals
    }

    fn slot(&self, class: SentimentClass) -> Option<usize> {
        self.classes.iter().position(|&c| c == class)
    }

    pub fn prior(&self, class: SentimentClass) -> Option<f64> {
        self.slot(class).map(|k| self.log_priors[k].exp())
    }

    /// `P(w|c)`, `None` if the class or word is unknown.
    pub fn conditional(&self, class: SentimentClass, word: &str) -> Option<f64> {
        let k = self.slot(class)?;
        let w = self.vocab.lookup(word)?;
        Some(self.log_conditionals[k][w as usize].exp())
    }

    /// Log posterior scores (up to the shared evidence term).
    pub fn scores(&self, doc: &DocVector) -> Vec<(SentimentClass, f64)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(k, &class)| {
                let row = &self.log_conditionals[k];
                let likelihood: f64 = doc
                    .counts()
                    .iter()
                    .map(|&(w, n)| n as f64 * row[w as usize])
                    .sum();
                (class, self.log_priors[k] + likelihood)
            })
            .collect()
    }

    /// MAP class. Equal scores go to the higher prior, then to the earlier
    /// class in positive, negative, irrelevant order.
    pub fn classify(&self, id: impl Into<String>, doc: &DocVector) -> ClassifiedDoc {
        let scores = self.scores(doc);
        let mut best = 0;
        for k in 1..scores.len() {
            let (s, b) = (scores[k].1, scores[best].1);
            if s > b || (s == b && self.log_priors[k] > self.log_priors[best]) {
                best = k;
            }
        }
        ClassifiedDoc {
            id: id.into(),
            predicted: scores[best].0,
            scores,
        }
    }

    pub fn classify_tokens(&self, id: impl Into<String>, tokens: &TokenStream) -> ClassifiedDoc {
        self.classify(id, &vectorize(tokens, &self.vocab))
    }

    pub fn classify_text(&self, id: impl Into<String>, text: &str) -> ClassifiedDoc {
        self.classify_tokens(id, &tokenize(text))
    }

    /// Words with the largest `P(w|a) − P(w|b)`, descending, ties by
    /// vocabulary index. `n` is truncated to the vocabulary size.
    pub fn discriminative_words(
        &self,
        a: SentimentClass,
        b: SentimentClass,
        n: usize,
    ) -> Result<Vec<(String, f64)>> {
        let ka = self
            .slot(a)
            .ok_or_else(|| Error::invalid(format!("class `{a}` not in model")))?;
        let kb = self
            .slot(b)
            .ok_or_else(|| Error::invalid(format!("class `{b}` not in model")))?;
        let mut diffs: Vec<(usize, f64)> = (0..self.vocab.len())
            .map(|w| {
                let d = self.log_conditionals[ka][w].exp() - self.log_conditionals[kb][w].exp();
                (w, d)
            })
            .collect();
        diffs.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
        Ok(diffs
            .into_iter()
            .take(n)
            .map(|(w, d)| (self.vocab.words()[w].clone(), d))
            .collect())
    }
}

/// Builds a vocabulary over the token streams, vectorizes them and trains.
pub fn train_on_tokens(docs: &[LabeledTokens]) -> Result<(NbModel, Vec<String>)> {
    let vocab = Vocabulary::build(docs.iter().map(|d| &d.tokens));
    let labeled: Vec<LabeledDoc> = docs
        .iter()
        .map(|d| LabeledDoc {
            id: d.id.clone(),
            label: d.label,
            doc: vectorize(&d.tokens, &vocab),
        })
        .collect();
    NbModel::train(vocab, &labeled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentClass::*;

    pub(crate) fn toy() -> NbModel {
        let docs = [
            ("p1", Positive, "good growth"),
            ("p2", Positive, "strong growth"),
            ("n1", Negative, "weak recession"),
        ];
        let labeled: Vec<LabeledTokens> = docs
            .iter()
            .map(|(id, l, t)| LabeledTokens::new(*id, *l, tokenize(t)))
            .collect();
        let (m, warnings) = train_on_tokens(&labeled).unwrap();
        assert_eq!(warnings.len(), 1, "irrelevant is absent");
        m
    }

    #[test]
    fn toy_probabilities() {
        let m = toy();
        assert_eq!(m.vocabulary().len(), 5);
        assert!((m.prior(Positive).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.conditional(Positive, "growth").unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((m.conditional(Negative, "good").unwrap() - 1.0 / 7.0).abs() < 1e-12);
        assert_eq!(m.classes(), &[Positive, Negative]);
    }

    #[test]
    fn toy_classification() {
        let m = toy();
        let r = m.classify_text("d", "good growth");
        assert_eq!(r.predicted, Positive);
        let pos = r.scores[0].1.exp();
        let neg = r.scores[1].1.exp();
        assert!((pos - 4.0 / 81.0).abs() < 1e-12);
        assert!((neg - (1.0 / 3.0) * (1.0 / 49.0)).abs() < 1e-12);
        // prior only
        assert_eq!(m.classify_text("e", "").predicted, Positive);
        assert_eq!(
            m.classify_text("e", "unseen words only").predicted,
            Positive
        );
    }

    #[test]
    fn single_class_single_doc() {
        let (m, _) =
            train_on_tokens(&[LabeledTokens::new("x", Negative, tokenize("aa bb"))]).unwrap();
        assert_eq!(m.prior(Negative), Some(1.0));
        assert!((m.conditional(Negative, "aa").unwrap() - 0.5).abs() < 1e-15);
        assert!((m.conditional(Negative, "bb").unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ties_use_prior_then_class_order() {
        // Symmetric classes: equal priors and equal conditionals for "aa".
        let docs = [
            LabeledTokens::new("1", Negative, tokenize("aa bb")),
            LabeledTokens::new("2", Positive, tokenize("aa cc")),
            LabeledTokens::new("3", Irrelevant, tokenize("aa dd")),
        ];
        let (m, _) = train_on_tokens(&docs).unwrap();
        assert_eq!(m.classify_text("t", "aa").predicted, Positive);

        // Higher prior wins an exact score tie.
        let vocab = Vocabulary::from_words(vec!["aa".into()]).unwrap();
        let (lo, hi) = (0.25f64.ln(), 0.75f64.ln());
        let m = NbModel::from_parts(
            vocab,
            vec![Positive, Negative],
            vec![lo, hi],
            vec![vec![hi], vec![lo]],
        )
        .unwrap();
        let r = m.classify_text("t", "aa");
        assert_eq!(r.scores[0].1, r.scores[1].1);
        assert_eq!(r.predicted, Negative);
    }

    #[test]
    fn empty_training_errors() {
        assert!(train_on_tokens(&[]).is_err());
        assert!(train_on_tokens(&[LabeledTokens::new("x", Positive, tokenize("a"))]).is_err());
    }

    #[test]
    fn discriminative_words_toy() {
        let m = toy();
        let top = m.discriminative_words(Positive, Negative, 1).unwrap();
        assert_eq!(top[0].0, "growth");
        assert!((top[0].1 - (1.0 / 3.0 - 1.0 / 7.0)).abs() < 1e-12);

        let same = m.discriminative_words(Positive, Positive, 3).unwrap();
        let words: Vec<_> = same.iter().map(|(w, _)| w.as_str()).collect();
        assert_eq!(words, ["good", "growth", "strong"]);
        assert!(same.iter().all(|(_, d)| *d == 0.0));

        assert_eq!(
            m.discriminative_words(Positive, Negative, 100)
                .unwrap()
                .len(),
            5
        );
        assert!(m.discriminative_words(Irrelevant, Negative, 1).is_err());
    }

    #[test]
    fn normalization() {
        let m = toy();
        for row in m.log_conditionals() {
            let s: f64 = row.iter().map(|l| l.exp()).sum();
            assert!((s - 1.0).abs() < 1e-9);
        }
        let p: f64 = m.log_priors().iter().map(|l| l.exp()).sum();
        assert!((p - 1.0).abs() < 1e-12);
    }
}
