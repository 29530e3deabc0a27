//! Reader and writer for the batch text format.
//!
//! ```text
//! ==== ITEM ====
//! Media: Affärsvärlden
//! Datum: 2017-04-10, 16:37:00
//! Publiceringsställe: webb
//! Rubrik: Optional headline
//! ----
//! Body text, any number of lines.
//! ```
//!
//! An optional `Id:` header pins the item id; otherwise ids are derived from
//! the batch name and the record's position in the file.

use std::fmt::Write as _;

use chrono::{NaiveDate, NaiveTime};

use super::{Channel, MediaItem};
use crate::error::{Error, Result};

pub const SEPARATOR: &str = "==== ITEM ====";
pub const BODY_MARKER: &str = "----";
pub const MAX_RECORDS: usize = 500;

/// A record that was skipped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecordError {
    /// 1-based position of the record in the file.
    pub record: usize,
    /// Byte offset of the record's first line.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BatchReport {
    pub items: Vec<MediaItem>,
    pub errors: Vec<RecordError>,
}

struct Line<'a> {
    offset: usize,
    text: &'a str,
}

fn lines(input: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    let mut offset = 0;
    for raw in input.split_inclusive('\n') {
        let text = raw.strip_suffix('\n').unwrap_or(raw);
        let text = text.strip_suffix('\r').unwrap_or(text);
        out.push(Line { offset, text });
        offset += raw.len();
    }
    out
}

/// Parses a batch file, naming derived ids after `batch`.
pub fn parse_batch(bytes: &[u8]) -> Result<BatchReport> {
    parse_batch_named("batch", bytes)
}

pub fn parse_batch_named(name: &str, bytes: &[u8]) -> Result<BatchReport> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse {
        offset: e.valid_up_to(),
        message: "input is not valid UTF-8".into(),
    })?;

    // Split into chunks on separator lines; a leading blank chunk is ignored.
    let mut chunks: Vec<(usize, Vec<Line<'_>>)> = vec![(0, Vec::new())];
    for line in lines(text) {
        if line.text == SEPARATOR {
            chunks.push((line.offset, Vec::new()));
        } else if line.text.starts_with("====") {
            return Err(Error::Parse {
                offset: line.offset,
                message: format!("malformed record separator `{}`", line.text),
            });
        } else {
            chunks.last_mut().expect("nonempty").1.push(line);
        }
    }
    if chunks[0].1.iter().all(|l| l.text.trim().is_empty()) {
        chunks.remove(0);
    }
    if chunks.len() > MAX_RECORDS {
        return Err(Error::Format(format!(
            "{} records in one batch file, at most {MAX_RECORDS} allowed",
            chunks.len()
        )));
    }

    let mut report = BatchReport::default();
    for (ordinal, (offset, chunk)) in chunks.into_iter().enumerate() {
        let record = ordinal + 1;
        match parse_record(name, record, offset, &chunk)? {
            Ok(item) => report.items.push(item),
            Err(message) => report.errors.push(RecordError {
                record,
                offset,
                message,
            }),
        }
    }
    Ok(report)
}

#[derive(Default)]
struct Headers<'a> {
    id: Option<&'a str>,
    outlet: Option<&'a str>,
    datum: Option<&'a str>,
    channel: Option<&'a str>,
    headline: Option<&'a str>,
}

/// Outer error aborts the file, inner error skips the record.
fn parse_record(
    name: &str,
    record: usize,
    offset: usize,
    chunk: &[Line<'_>],
) -> Result<std::result::Result<MediaItem, String>> {
    let Some(split) = chunk.iter().position(|l| l.text == BODY_MARKER) else {
        return Err(Error::Parse {
            offset,
            message: format!("record {record} has no `{BODY_MARKER}` line before its body"),
        });
    };

    let mut h = Headers::default();
    for line in &chunk[..split] {
        if line.text.trim().is_empty() {
            continue;
        }
        let Some((key, value)) = line.text.split_once(':') else {
            return Ok(Err(format!(
                "header line without `:` at byte {}",
                line.offset
            )));
        };
        let value = value.trim();
        let slot = match key.trim() {
            "Id" => &mut h.id,
            "Media" => &mut h.outlet,
            "Datum" => &mut h.datum,
            "Publiceringsställe" => &mut h.channel,
            "Rubrik" => &mut h.headline,
            _ => continue,
        };
        if slot.replace(value).is_some() {
            return Ok(Err(format!("duplicate `{}` header", key.trim())));
        }
    }

    let body_lines: Vec<&str> = chunk[split + 1..].iter().map(|l| l.text).collect();
    let body = body_lines
        .join("\n")
        .trim_end_matches(['\n', '\r'])
        .to_string();

    let Some(outlet) = h.outlet.filter(|s| !s.is_empty()) else {
        return Ok(Err("missing `Media` header".into()));
    };
    let Some(datum) = h.datum else {
        return Ok(Err("missing `Datum` header".into()));
    };
    let (date, time) = match parse_datum(datum) {
        Ok(dt) => dt,
        Err(e) => return Ok(Err(e)),
    };
    let channel = match h.channel {
        Some("webb") | Some("online") => Channel::Online,
        Some("print") => Channel::Print,
        Some(other) => return Ok(Err(format!("unknown Publiceringsställe `{other}`"))),
        None => return Ok(Err("missing `Publiceringsställe` header".into())),
    };
    if body.trim().is_empty() {
        return Ok(Err("empty body".into()));
    }

    let id = match h.id {
        Some(id) if !id.is_empty() => id.to_string(),
        _ => format!("{name}-{record:03}"),
    };
    Ok(Ok(MediaItem::new(
        id,
        outlet,
        date,
        time,
        channel,
        h.headline.unwrap_or(""),
        body,
    )))
}

fn parse_datum(value: &str) -> std::result::Result<(NaiveDate, Option<NaiveTime>), String> {
    let (date_part, time_part) = match value.split_once(',') {
        Some((d, t)) => (d.trim(), Some(t.trim())),
        None => (value.trim(), None),
    };
    let date = NaiveDate::parse_from_str(date_part, "%Y-%m-%d")
        .map_err(|_| format!("invalid date `{value}`"))?;
    let time = match time_part {
        Some(t) => Some(
            NaiveTime::parse_from_str(t, "%H:%M:%S")
                .map_err(|_| format!("invalid time `{value}`"))?,
        ),
        None => None,
    };
    Ok((date, time))
}

/// Writes items in the batch format. Every header carries an explicit `Id:`
/// so that parsing the output reproduces the items exactly.
pub fn serialize_batch(items: &[MediaItem]) -> Result<String> {
    if items.len() > MAX_RECORDS {
        return Err(Error::Format(format!(
            "{} items exceed the {MAX_RECORDS}-record batch limit",
            items.len()
        )));
    }
    let mut out = String::new();
    for item in items {
        for field in [&item.id, &item.outlet, &item.headline] {
            if field.contains('\n') {
                return Err(Error::invalid(format!(
                    "item `{}`: header field contains a newline",
                    item.id
                )));
            }
        }
        if item.body.lines().any(|l| l.starts_with("====")) {
            return Err(Error::invalid(format!(
                "item `{}`: body line collides with the record separator",
                item.id
            )));
        }
        let _ = writeln!(out, "{SEPARATOR}");
        let _ = writeln!(out, "Id: {}", item.id);
        let _ = writeln!(out, "Media: {}", item.outlet);
        match item.time {
            Some(t) => {
                let _ = writeln!(
                    out,
                    "Datum: {}, {}",
                    item.date.format("%Y-%m-%d"),
                    t.format("%H:%M:%S")
                );
            }
            None => {
                let _ = writeln!(out, "Datum: {}", item.date.format("%Y-%m-%d"));
            }
        }
        let _ = writeln!(out, "Publiceringsställe: {}", item.channel.batch_code());
        if !item.headline.is_empty() {
            let _ = writeln!(out, "Rubrik: {}", item.headline);
        }
        let _ = writeln!(out, "{BODY_MARKER}");
        let _ = writeln!(out, "{}", item.body);
    }
    Ok(out)
}
