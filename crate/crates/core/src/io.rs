//! Shared CSV conventions: optional `#` metadata line, then a header row.

use std::io::{Read, Write};

use sha2::{Digest, Sha256};

use crate::error::Result;

/// Provenance written as the first line of every generated artifact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub seed: u64,
    pub config_hash: String,
}

impl Metadata {
    pub fn new(seed: u64, config_hash: impl Into<String>) -> Self {
        Metadata {
            seed,
            config_hash: config_hash.into(),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "# mediasent {} seed={} config={}",
            env!("CARGO_PKG_VERSION"),
            self.seed,
            self.config_hash
        )
    }
}

/// First 16 hex digits of the SHA-256 of `bytes`.
pub fn short_hash(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn csv_writer<W: Write>(mut out: W, meta: Option<&Metadata>) -> Result<csv::Writer<W>> {
    if let Some(m) = meta {
        writeln!(out, "{}", m.line())?;
    }
    Ok(csv::Writer::from_writer(out))
}

pub fn csv_reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(input)
}
