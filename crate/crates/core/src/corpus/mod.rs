//! Media items, batch-file ingestion and Boolean retrieval.

mod batch;
mod query;
mod table;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{tokenize, TokenStream};

pub use batch::{
    parse_batch, parse_batch_named, serialize_batch, BatchReport, RecordError, MAX_RECORDS,
};
pub use query::{parse_query, BooleanQuery};
pub use table::{read_corpus_csv, write_corpus_csv};

/// Publishing format of a media item.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Print,
    Online,
}

impl Channel {
    pub fn as_str(self) -> &'static str {
        match self {
            Channel::Print => "print",
            Channel::Online => "online",
        }
    }

    /// Value used on the `Publiceringsställe:` header line.
    pub fn batch_code(self) -> &'static str {
        match self {
            Channel::Print => "print",
            Channel::Online => "webb",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Channel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "print" => Ok(Channel::Print),
            "online" | "webb" => Ok(Channel::Online),
            other => Err(Error::invalid(format!("unknown channel `{other}`"))),
        }
    }
}

/// One parsed media record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MediaItem {
    pub id: String,
    pub outlet: String,
    pub date: NaiveDate,
    pub time: Option<NaiveTime>,
    pub channel: Channel,
    pub headline: String,
    pub body: String,
    pub word_count: usize,
}

impl MediaItem {
    /// Builds an item and computes its word count from headline and body.
    pub fn new(
        id: impl Into<String>,
        outlet: impl Into<String>,
        date: NaiveDate,
        time: Option<NaiveTime>,
        channel: Channel,
        headline: impl Into<String>,
        body: impl Into<String>,
    ) -> Self {
        let mut item = MediaItem {
            id: id.into(),
            outlet: outlet.into(),
            date,
            time,
            channel,
            headline: headline.into(),
            body: body.into(),
            word_count: 0,
        };
        item.word_count = item.tokens().len();
        item
    }

    /// Headline and body as one text; both take part in matching and
    /// classification.
    pub fn full_text(&self) -> String {
        if self.headline.is_empty() {
            self.body.clone()
        } else {
            format!("{}\n{}", self.headline, self.body)
        }
    }

    pub fn tokens(&self) -> TokenStream {
        tokenize(&self.full_text())
    }

    fn sort_key(&self) -> (NaiveDate, Option<NaiveTime>, &str) {
        (self.date, self.time, &self.id)
    }
}

/// Items ordered by publication time, ties broken by id. Ids are unique.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Corpus {
    items: Vec<MediaItem>,
}

impl Corpus {
    pub fn new(mut items: Vec<MediaItem>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(items.len());
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(Error::invalid(format!("duplicate item id `{}`", item.id)));
            }
        }
        items.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        Ok(Corpus { items })
    }

    /// Merges per-file parse results into one corpus.
    pub fn merge<I: IntoIterator<Item = Vec<MediaItem>>>(parts: I) -> Result<Self> {
        Corpus::new(parts.into_iter().flatten().collect())
    }

    pub fn items(&self) -> &[MediaItem] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn into_items(self) -> Vec<MediaItem> {
        self.items
    }

    /// Items matching `query`, in corpus order.
    pub fn filter(&self, query: &BooleanQuery) -> Corpus {
        Corpus {
            items: self
                .items
                .iter()
                .filter(|item| query.matches(item))
                .cloned()
                .collect(),
        }
    }
}

pub fn filter_corpus(corpus: &Corpus, query: &BooleanQuery) -> Corpus {
    corpus.filter(query)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn item(id: &str, date: &str, body: &str) -> MediaItem {
        MediaItem::new(
            id,
            "Dagens Industri",
            date.parse().unwrap(),
            None,
            Channel::Print,
            "",
            body,
        )
    }

    #[test]
    fn corpus_sorted_by_date_then_id() {
        let c = Corpus::new(vec![
            item("b", "2017-01-02", "x"),
            item("c", "2017-01-01", "x"),
            item("a", "2017-01-02", "x"),
        ])
        .unwrap();
        let ids: Vec<_> = c.items().iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["c", "a", "b"]);
    }

    #[test]
    fn duplicate_ids_rejected() {
        let r = Corpus::new(vec![
            item("a", "2017-01-02", "x"),
            item("a", "2017-01-03", "y"),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn filter_keeps_order_and_is_idempotent() {
        let c = Corpus::new(vec![
            item("1", "2017-01-01", "ekonomi prognos"),
            item("2", "2017-01-02", "sport"),
            item("3", "2017-01-03", "ekonomi rapport"),
        ])
        .unwrap();
        let q = parse_query(r#""ekonomi""#).unwrap();
        let once = filter_corpus(&c, &q);
        let ids: Vec<_> = once.items().iter().map(|i| i.id.as_str()).collect();
        assert_eq!(ids, ["1", "3"]);
        assert_eq!(filter_corpus(&once, &q), once);

        let all = parse_query(r#""ekonomi" OR "sport""#).unwrap();
        assert_eq!(filter_corpus(&c, &all), c);
    }

    #[test]
    fn word_count_covers_headline() {
        let it = MediaItem::new(
            "x",
            "Affärsvärlden",
            "2017-04-10".parse().unwrap(),
            None,
            Channel::Online,
            "Stark tillväxt",
            "i svensk ekonomi",
        );
        assert_eq!(it.word_count, 4);
    }
}
