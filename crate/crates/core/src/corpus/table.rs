//! `corpus.csv`: one row per item, RFC-4180 quoting.

use std::io::{Read, Write};

use chrono::{NaiveDate, NaiveTime};

use super::{Channel, MediaItem};
use crate::error::{Error, Result};
use crate::io::{csv_reader, csv_writer, Metadata};

pub const CORPUS_COLUMNS: [&str; 8] = [
    "id",
    "outlet",
    "date",
    "time",
    "channel",
    "word_count",
    "headline",
    "body",
];

pub fn write_corpus_csv<W: Write>(
    out: W,
    items: &[MediaItem],
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    w.write_record(CORPUS_COLUMNS)?;
    for it in items {
        let time = it
            .time
            .map(|t| t.format("%H:%M:%S").to_string())
            .unwrap_or_default();
        w.write_record([
            it.id.as_str(),
            it.outlet.as_str(),
            &it.date.format("%Y-%m-%d").to_string(),
            &time,
            it.channel.as_str(),
            &it.word_count.to_string(),
            it.headline.as_str(),
            it.body.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_corpus_csv<R: Read>(input: R) -> Result<Vec<MediaItem>> {
    let mut r = csv_reader(input);
    let headers = r.headers()?.clone();
    if headers.iter().collect::<Vec<_>>() != CORPUS_COLUMNS {
        return Err(Error::Format(format!(
            "corpus CSV header must be {}",
            CORPUS_COLUMNS.join(",")
        )));
    }
    let mut items = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| Error::Format(format!("corpus CSV row {}: invalid {what}", row + 1));
        let date = NaiveDate::parse_from_str(&rec[2], "%Y-%m-%d").map_err(|_| bad("date"))?;
        let time = match &rec[3] {
            "" => None,
            t => Some(NaiveTime::parse_from_str(t, "%H:%M:%S").map_err(|_| bad("time"))?),
        };
        let channel: Channel = rec[4].parse().map_err(|_| bad("channel"))?;
        let word_count = rec[5].parse().map_err(|_| bad("word_count"))?;
        items.push(MediaItem {
            id: rec[0].to_string(),
            outlet: rec[1].to_string(),
            date,
            time,
            channel,
            headline: rec[6].to_string(),
            body: rec[7].to_string(),
            word_count,
        });
    }
    Ok(items)
}
