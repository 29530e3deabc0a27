//! Labeled training data as `id,label,text` CSV.

use std::io::{Read, Write};

use super::{LabeledTokens, SentimentClass};
use crate::error::{Error, Result};
use crate::io::{csv_reader, csv_writer, Metadata};
use crate::text::tokenize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledText {
    pub id: String,
    pub label: SentimentClass,
    pub text: String,
}

impl LabeledText {
    pub fn to_tokens(&self) -> LabeledTokens {
        LabeledTokens::new(self.id.clone(), self.label, tokenize(&self.text))
    }
}

pub fn read_labels_csv<R: Read>(input: R) -> Result<Vec<LabeledText>> {
    let mut r = csv_reader(input);
    if r.headers()?.iter().ne(["id", "label", "text"]) {
        return Err(Error::Format(
            "labels CSV must have columns id,label,text".into(),
        ));
    }
    let mut out = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let label = rec[1]
            .parse()
            .map_err(|e: Error| Error::Format(format!("row {}: {e}", row + 1)))?;
        out.push(LabeledText {
            id: rec[0].to_string(),
            label,
            text: rec[2].to_string(),
        });
    }
    Ok(out)
}

pub fn write_labels_csv<W: Write>(
    out: W,
    docs: &[LabeledText],
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    w.write_record(["id", "label", "text"])?;
    for d in docs {
        w.write_record([d.id.as_str(), d.label.as_str(), d.text.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let docs = vec![
            LabeledText {
                id: "1".into(),
                label: SentimentClass::Positive,
                text: "good, \"strong\" growth".into(),
            },
            LabeledText {
                id: "2".into(),
                label: SentimentClass::Irrelevant,
                text: "weather\nreport".into(),
            },
        ];
        let mut buf = Vec::new();
        write_labels_csv(&mut buf, &docs, None).unwrap();
        assert_eq!(read_labels_csv(buf.as_slice()).unwrap(), docs);
        assert!(read_labels_csv("id,label,text\n1,happy,x\n".as_bytes()).is_err());
        assert_eq!(docs[0].to_tokens().tokens.len(), 3);
    }
}
