//! Seeded k-fold cross-validation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{train_on_tokens, SentimentClass};
use crate::error::{Error, Result};
use crate::text::TokenStream;

/// A labeled document before vectorization. Cross-validation builds each
/// fold's vocabulary from that fold's training part only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledTokens {
    pub id: String,
    pub label: SentimentClass,
    pub tokens: TokenStream,
}

impl LabeledTokens {
    pub fn new(id: impl Into<String>, label: SentimentClass, tokens: TokenStream) -> Self {
        LabeledTokens {
            id: id.into(),
            label,
            tokens,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    /// Correct held-out predictions over all documents.
    pub accuracy: f64,
    /// `confusion[actual][predicted]`, indexed by `SentimentClass::index`.
    pub confusion: [[u64; 3]; 3],
    pub fold_accuracies: Vec<f64>,
    pub warnings: Vec<String>,
}

impl CvReport {
    pub fn total(&self) -> u64 {
        self.confusion.iter().flatten().sum()
    }
}

/// Shuffles document indices with `seed` and splits them into `k` parts whose
/// sizes differ by at most one.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (n / k, n % k);
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for f in 0..k {
        let len = base + usize::from(f < extra);
        folds.push(order[start..start + len].to_vec());
        start += len;
    }
    folds
}

pub fn cross_validate(docs: &[LabeledTokens], k: usize, seed: u64) -> Result<CvReport> {
    if k < 2 {
        return Err(Error::invalid(format!("need at least 2 folds, got {k}")));
    }
    if k > docs.len() {
        return Err(Error::invalid(format!(
            "{k} folds for {} documents",
            docs.len()
        )));
    }
    let folds = fold_assignment(docs.len(), k, seed);
    let mut held_out = vec![usize::MAX; docs.len()];
    for (f, fold) in folds.iter().enumerate() {
        for &i in fold {
            held_out[i] = f;
        }
    }

    let mut confusion = [[0u64; 3]; 3];
    let mut fold_accuracies = Vec::with_capacity(k);
    let mut warnings = Vec::new();
    for (f, fold) in folds.iter().enumerate() {
        let train: Vec<LabeledTokens> = docs
            .iter()
            .zip(&held_out)
            .filter(|(_, &h)| h != f)
            .map(|(d, _)| d.clone())
            .collect();
        let (model, w) = train_on_tokens(&train)?;
        warnings.extend(w.into_iter().map(|w| format!("fold {}: {w}", f + 1)));
        let mut correct = 0;
        for &i in fold {
            let d = &docs[i];
            let pred = model.classify_tokens(d.id.as_str(), &d.tokens).predicted;
            confusion[d.label.index()][pred.index()] += 1;
            correct += usize::from(pred == d.label);
        }
        fold_accuracies.push(correct as f64 / fold.len() as f64);
    }
    let correct: u64 = (0..3).map(|c| confusion[c][c]).sum();
    Ok(CvReport {
        accuracy: correct as f64 / docs.len() as f64,
        confusion,
        fold_accuracies,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn folds_partition_indices() {
        let folds = fold_assignment(103, 10, 5);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort();
        assert_eq!(all, (0..103).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        assert!(sizes.iter().all(|&s| s == 10 || s == 11));
        assert_eq!(fold_assignment(103, 10, 5), folds);
    }

    fn tiny() -> Vec<LabeledTokens> {
        (0..9)
            .map(|i| {
                let (label, text) = match i % 3 {
                    0 => (SentimentClass::Positive, "gains boom rally"),
                    1 => (SentimentClass::Negative, "losses slump crash"),
                    _ => (SentimentClass::Irrelevant, "sports weather music"),
                };
                LabeledTokens::new(format!("d{i}"), label, tokenize(text))
            })
            .collect()
    }

    #[test]
    fn leave_one_out_covers_every_doc() {
        let docs = tiny();
        let r = cross_validate(&docs, docs.len(), 1).unwrap();
        assert_eq!(r.total(), docs.len() as u64);
        assert_eq!(r.fold_accuracies.len(), docs.len());
        assert_eq!(r.accuracy, 1.0);
    }

    #[test]
    fn bad_fold_counts() {
        let docs = tiny();
        assert!(cross_validate(&docs, 1, 0).is_err());
        assert!(cross_validate(&docs, 10, 0).is_err());
    }
}
