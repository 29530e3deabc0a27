//! Tokenization, vocabularies and bag-of-words vectors.
//!
//! Tokens are maximal runs of Unicode letters and digits taken from the
//! lowercased text; single-character runs are dropped. No stemming and no
//! stop-word list: function words carry sentiment signal in news text.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Lowercase tokens of one document, in order of appearance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenStream(Vec<String>);

impl TokenStream {
    pub fn tokens(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }

    pub fn into_inner(self) -> Vec<String> {
        self.0
    }

    pub fn join(&self) -> String {
        self.0.join(" ")
    }
}

impl From<Vec<String>> for TokenStream {
    fn from(tokens: Vec<String>) -> Self {
        TokenStream(tokens)
    }
}

/// Splits `text` into lowercase letter/digit runs, keeping runs of at least
/// two characters.
pub fn tokenize(text: &str) -> TokenStream {
    let lower = text.to_lowercase();
    let tokens = lower
        .split(|c: char| !c.is_alphanumeric())
        .filter(|run| run.chars().nth(1).is_some())
        .map(str::to_owned)
        .collect();
    TokenStream(tokens)
}

/// Lowercase letter/digit runs with no length filter. Used for query terms,
/// where a phrase is matched word by word.
pub(crate) fn words(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|run| !run.is_empty())
        .map(str::to_owned)
        .collect()
}

/// Dense word ↔ index map.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, u32>,
}

impl Vocabulary {
    /// Builds a vocabulary from documents, assigning indices in order of
    /// first occurrence.
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a TokenStream>,
    {
        let mut vocab = Vocabulary::default();
        for doc in docs {
            for tok in doc.iter() {
                vocab.insert(tok);
            }
        }
        vocab
    }

    /// Builds a vocabulary from an explicit word list. Duplicate words are an
    /// error since they would break the bijection.
    pub fn from_words(words: Vec<String>) -> Result<Self, crate::Error> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i as u32).is_some() {
                return Err(crate::Error::invalid(format!(
                    "duplicate vocabulary word `{w}`"
                )));
            }
        }
        Ok(Vocabulary { words, index })
    }

    /// Adds `word` if unseen and returns its index.
    pub fn insert(&mut self, word: &str) -> u32 {
        if let Some(&i) = self.index.get(word) {
            return i;
        }
        let i = self.words.len() as u32;
        self.words.push(word.to_owned());
        self.index.insert(word.to_owned(), i);
        i
    }

    pub fn lookup(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word_of(&self, index: u32) -> Option<&str> {
        self.words.get(index as usize).map(String::as_str)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Writes `index,word` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), crate::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["index", "word"])?;
        for (i, word) in self.words.iter().enumerate() {
            w.write_record([i.to_string().as_str(), word])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sparse term counts of one document against a fixed vocabulary.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DocVector {
    /// `(index, count)` pairs sorted by index, counts ≥ 1.
    counts: Vec<(u32, u32)>,
    total: usize,
    oov: usize,
}

impl DocVector {
    pub fn counts(&self) -> &[(u32, u32)] {
        &self.counts
    }

    pub fn count(&self, index: u32) -> u32 {
        self.counts
            .binary_search_by_key(&index, |&(i, _)| i)
            .map(|pos| self.counts[pos].1)
            .unwrap_or(0)
    }

    /// Token count of the source document, `n_d`.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Tokens that were not in the vocabulary.
    pub fn oov(&self) -> usize {
        self.oov
    }

    pub fn in_vocab(&self) -> usize {
        self.total - self.oov
    }
}

pub fn vectorize(doc: &TokenStream, vocab: &Vocabulary) -> DocVector {
    let mut tally: BTreeMap<u32, u32> = BTreeMap::new();
    let mut oov = 0;
    for tok in doc.iter() {
        match vocab.lookup(tok) {
            Some(i) => *tally.entry(i).or_insert(0) += 1,
            None => oov += 1,
        }
    }
    DocVector {
        counts: tally.into_iter().collect(),
        total: doc.len(),
        oov,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ts(words: &[&str]) -> TokenStream {
        TokenStream(words.iter().map(|s| s.to_string()).collect())
    }

    #[test]
    fn tokenize_examples() {
        assert_eq!(
            tokenize("Stark tillväxt 2017!"),
            ts(&["stark", "tillväxt", "2017"])
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("MSEK, MSEK"), ts(&["msek", "msek"]));
        assert_eq!(
            tokenize("Ökad export, år på år; é"),
            ts(&["ökad", "export", "år", "på", "år"])
        );
    }

    #[test]
    fn vocabulary_first_occurrence_order() {
        let v = Vocabulary::build(&[ts(&["ab", "bc"]), ts(&["bc", "cd"])]);
        assert_eq!(v.len(), 3);
        assert_eq!(v.words(), &["ab", "bc", "cd"]);
        assert_eq!(Vocabulary::build(&[]).len(), 0);
    }

    #[test]
    fn vectorize_counts_and_oov() {
        let v = Vocabulary::from_words(vec!["growth".into(), "weak".into()]).unwrap();
        let d = vectorize(&ts(&["growth", "growth", "weak"]), &v);
        assert_eq!(d.counts(), &[(0, 2), (1, 1)]);
        assert_eq!(d.total(), 3);

        let unseen = vectorize(&ts(&["boom", "bust"]), &v);
        assert!(unseen.counts().is_empty());
        assert_eq!(unseen.oov(), unseen.total());
    }

    #[test]
    fn duplicate_word_list_rejected() {
        assert!(Vocabulary::from_words(vec!["ab".into(), "ab".into()]).is_err());
    }

    #[test]
    fn vocabulary_csv_export() {
        let v = Vocabulary::from_words(vec!["år".into(), "msek".into()]).unwrap();
        let mut buf = Vec::new();
        v.write_csv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "index,word\n0,år\n1,msek\n"
        );
    }

    #[test]
    fn vectorize_random_doc_matches_tally() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let pool: Vec<String> = (0..80).map(|i| format!("w{i}")).collect();
        let doc = TokenStream(
            (0..1000)
                .map(|_| pool[rng.random_range(0..pool.len())].clone())
                .collect(),
        );
        let vocab = Vocabulary::from_words(pool[..50].to_vec()).unwrap();
        let dv = vectorize(&doc, &vocab);

        let mut oracle: HashMap<&str, u32> = HashMap::new();
        for t in doc.iter() {
            *oracle.entry(t).or_default() += 1;
        }
        for (w, &c) in &oracle {
            if let Some(i) = vocab.lookup(w) {
                assert_eq!(dv.count(i), c);
            }
        }
        let oov: u32 = oracle
            .iter()
            .filter(|(w, _)| vocab.lookup(w).is_none())
            .map(|(_, &c)| c)
            .sum();
        assert_eq!(dv.oov(), oov as usize);
    }

    proptest! {
        #[test]
        fn tokenize_idempotent(text in "[a-zA-ZåäöÅÄÖé0-9 ,.!?-]{0,80}") {
            let once = tokenize(&text);
            prop_assert_eq!(tokenize(&once.join()), once);
        }

        #[test]
        fn counts_partition_tokens(text in "[a-e ]{0,120}", keep in 0usize..10) {
            let doc = tokenize(&text);
            let vocab = Vocabulary::build(std::iter::once(&doc));
            let trimmed = Vocabulary::from_words(vocab.words().iter().take(keep).cloned().collect()).unwrap();
            let dv = vectorize(&doc, &trimmed);
            let in_vocab: u32 = dv.counts().iter().map(|&(_, c)| c).sum();
            prop_assert_eq!(in_vocab as usize + dv.oov(), doc.len());
            for i in 0..vocab.len() as u32 {
                prop_assert_eq!(vocab.lookup(vocab.word_of(i).unwrap()), Some(i));
            }
        }
    }
}
