use std::io::{Read, Write};

use chrono::NaiveDate;

use crate::corpus::{Channel, MediaItem};
use crate::error::{Error, Result};
use crate::io::{csv_reader, csv_writer, Metadata};
use crate::nb::{NbModel, SentimentClass};

const COLUMNS: [&str; 9] = [
    "id",
    "date",
    "outlet",
    "channel",
    "word_count",
    "predicted",
    "score_positive",
    "score_negative",
    "score_irrelevant",
];

/// A media item reduced to what aggregation needs, with its predicted class
/// and per-class log scores (absent for classes the model lacks).
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifiedItem {
    pub id: String,
    pub date: NaiveDate,
    pub outlet: String,
    pub channel: Channel,
    pub word_count: usize,
    pub predicted: SentimentClass,
    pub scores: [Option<f64>; 3],
}

pub fn classify_items(model: &NbModel, items: &[MediaItem]) -> Vec<ClassifiedItem> {
    items
        .iter()
        .map(|item| {
            let c = model.classify_tokens(item.id.clone(), &item.tokens());
            let mut scores = [None; 3];
            for (class, s) in c.scores {
                scores[class.index()] = Some(s);
            }
            ClassifiedItem {
                id: item.id.clone(),
                date: item.date,
                outlet: item.outlet.clone(),
                channel: item.channel,
                word_count: item.word_count,
                predicted: c.predicted,
                scores,
            }
        })
        .collect()
}

pub fn write_classified_csv<W: Write>(
    out: W,
    items: &[ClassifiedItem],
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    w.write_record(COLUMNS)?;
    for it in items {
        let mut row = vec![
            it.id.clone(),
            it.date.to_string(),
            it.outlet.clone(),
            it.channel.as_str().to_string(),
            it.word_count.to_string(),
            it.predicted.as_str().to_string(),
        ];
        row.extend(
            it.scores
                .iter()
                .map(|s| s.map(|v| v.to_string()).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_classified_csv<R: Read>(input: R) -> Result<Vec<ClassifiedItem>> {
    let mut r = csv_reader(input);
    if r.headers()?.iter().ne(COLUMNS) {
        return Err(Error::Format(format!(
            "classified CSV must have columns {}",
            COLUMNS.join(",")
        )));
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Format(format!("row {}: bad {what}", row + 1));
        let score = |i: usize| -> Result<Option<f64>> {
            let raw = &rec[6 + i];
            if raw.is_empty() {
                Ok(None)
            } else {
                raw.parse().map(Some).map_err(|_| bad("score"))
            }
        };
        out.push(ClassifiedItem {
            id: rec[0].to_string(),
            date: rec[1].parse().map_err(|_| bad("date"))?,
            outlet: rec[2].to_string(),
            channel: rec[3].parse().map_err(|_| bad("channel"))?,
            word_count: rec[4].parse().map_err(|_| bad("word_count"))?,
            predicted: rec[5].parse().map_err(|_| bad("class"))?,
            scores: [score(0)?, score(1)?, score(2)?],
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nb::{train_on_tokens, LabeledTokens};
    use crate::text::tokenize;

    #[test]
    fn round_trip() {
        let docs = [
            LabeledTokens::new("a", SentimentClass::Positive, tokenize("good growth")),
            LabeledTokens::new("b", SentimentClass::Negative, tokenize("bad crisis")),
        ];
        let (model, _) = train_on_tokens(&docs).unwrap();
        let date = NaiveDate::from_ymd_opt(2020, 3, 1).unwrap();
        let items = vec![
            MediaItem::new(
                "x1",
                "Daily, \"News\"",
                date,
                None,
                Channel::Print,
                "Good",
                "growth ahead",
            ),
            MediaItem::new("x2", "Web", date, None, Channel::Online, "", "crisis"),
        ];
        let classified = classify_items(&model, &items);
        assert_eq!(classified[0].predicted, SentimentClass::Positive);
        assert_eq!(classified[1].predicted, SentimentClass::Negative);
        assert!(classified[0].scores[2].is_none());
        let mut buf = Vec::new();
        write_classified_csv(&mut buf, &classified, Some(&Metadata::new(3, "abc"))).unwrap();
        assert_eq!(read_classified_csv(buf.as_slice()).unwrap(), classified);
        assert!(read_classified_csv("id,date\n".as_bytes()).is_err());
    }
}
