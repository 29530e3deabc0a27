//! Binary model file.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic "MSNB" | version u16 | metadata: u32 len + UTF-8
//! vocab: u32 count, then per word u32 len + UTF-8
//! classes: u8 count, then one u8 code per class (0 positive, 1 negative, 2 irrelevant)
//! log priors: f64 bits per class
//! log conditionals: f64 bits, class-major, |V| per class
//! ```
//!
//! Floats are stored by bit pattern so a write/read cycle is exact.

use std::io::{Read, Write};

use super::{NbModel, SentimentClass};
use crate::error::{Error, Result};
use crate::text::Vocabulary;

pub const MODEL_MAGIC: &[u8; 4] = b"MSNB";
pub const MODEL_VERSION: u16 = 1;

pub fn write_model<W: Write>(mut out: W, model: &NbModel, metadata: &str) -> Result<()> {
    out.write_all(MODEL_MAGIC)?;
    out.write_all(&MODEL_VERSION.to_le_bytes())?;
    write_str(&mut out, metadata)?;
    let vocab = model.vocabulary();
    out.write_all(&(vocab.len() as u32).to_le_bytes())?;
    for w in vocab.words() {
        write_str(&mut out, w)?;
    }
    out.write_all(&[model.classes().len() as u8])?;
    for c in model.classes() {
        out.write_all(&[c.index() as u8])?;
    }
    for p in model.log_priors() {
        out.write_all(&p.to_bits().to_le_bytes())?;
    }
    for row in model.log_conditionals() {
        for v in row {
            out.write_all(&v.to_bits().to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a model and its metadata string.
pub fn read_model<R: Read>(mut input: R) -> Result<(NbModel, String)> {
    let mut magic = [0u8; 4];
    input.read_exact(&mut magic).map_err(truncated)?;
    if &magic != MODEL_MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(read_array(&mut input)?);
    if version != MODEL_VERSION {
        return Err(Error::Format(format!(
            "unsupported model version {version}"
        )));
    }
    let metadata = read_str(&mut input)?;
    let n_words = u32::from_le_bytes(read_array(&mut input)?) as usize;
    let mut words = Vec::with_capacity(n_words.min(1 << 20));
    for _ in 0..n_words {
        words.push(read_str(&mut input)?);
    }
    let vocab = Vocabulary::from_words(words)?;
    let [n_classes] = read_array::<1>(&mut input)?;
    let mut classes = Vec::new();
    for _ in 0..n_classes {
        let [code] = read_array::<1>(&mut input)?;
        let class = *SentimentClass::ALL
            .get(code as usize)
            .ok_or_else(|| Error::Format(format!("unknown class code {code}")))?;
        classes.push(class);
    }
    let mut read_f64 =
        || -> Result<f64> { Ok(f64::from_bits(u64::from_le_bytes(read_array(&mut input)?))) };
    let log_priors = (0..classes.len())
        .map(|_| read_f64())
        .collect::<Result<Vec<_>>>()?;
    let mut log_conditionals = Vec::with_capacity(classes.len());
    for _ in 0..classes.len() {
        log_conditionals.push(
            (0..n_words)
                .map(|_| read_f64())
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let model = NbModel::from_parts(vocab, classes, log_priors, log_conditionals)?;
    Ok((model, metadata))
}

fn truncated(e: std::io::Error) -> Error {
    if e.kind() == std::io::ErrorKind::UnexpectedEof {
        Error::Format("model file truncated".into())
    } else {
        Error::Io(e)
    }
}

fn read_array<const N: usize>(input: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    input.read_exact(&mut buf).map_err(truncated)?;
    Ok(buf)
}

fn write_str(out: &mut impl Write, s: &str) -> Result<()> {
    out.write_all(&(s.len() as u32).to_le_bytes())?;
    out.write_all(s.as_bytes())?;
    Ok(())
}

fn read_str(input: &mut impl Read) -> Result<String> {
    let len = u32::from_le_bytes(read_array(input)?) as usize;
    let mut buf = Vec::new();
    input.take(len as u64).read_to_end(&mut buf)?;
    if buf.len() != len {
        return Err(Error::Format("model file truncated".into()));
    }
    String::from_utf8(buf).map_err(|_| Error::Format("model file holds invalid UTF-8".into()))
}
