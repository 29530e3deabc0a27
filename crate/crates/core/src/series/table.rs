//! Series CSV files: a `period` column (`YYYY-MM` or `YYYY-Qn`) followed by
//! one or more value columns. Cells may be blank before a series starts or
//! after it ends.

use std::io::{Read, Write};

use super::{MonthlySeries, QuarterlySeries, SurveyWave};
use crate::error::{Error, Result};
use crate::io::{csv_reader, csv_writer, Metadata};
use crate::period::{Month, Quarter};

/// Reads every value column of a monthly table.
pub fn read_series_table<R: Read>(input: R) -> Result<Vec<(String, MonthlySeries)>> {
    let mut r = csv_reader(input);
    let headers: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if headers.len() < 2 {
        return Err(Error::Format(
            "series CSV needs a period column and at least one value column".into(),
        ));
    }
    let mut months = Vec::new();
    let mut cells: Vec<Vec<Option<f64>>> = vec![Vec::new(); headers.len() - 1];
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let month: Month = rec[0]
            .parse()
            .map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))?;
        if let Some(&prev) = months.last() {
            if month != Month::offset(prev, 1) {
                return Err(Error::Format(format!(
                    "row {}: months not contiguous at {month}",
                    row + 1
                )));
            }
        }
        months.push(month);
        for (c, col) in cells.iter_mut().enumerate() {
            let raw = rec.get(c + 1).unwrap_or("").trim();
            col.push(if raw.is_empty() {
                None
            } else {
                Some(raw.parse().map_err(|_| {
                    Error::Format(format!(
                        "row {}, column `{}`: bad number `{raw}`",
                        row + 1,
                        headers[c + 1]
                    ))
                })?)
            });
        }
    }
    let mut out = Vec::new();
    for (c, col) in cells.into_iter().enumerate() {
        let name = headers[c + 1].clone();
        let Some(first) = col.iter().position(Option::is_some) else {
            continue;
        };
        let last = col.iter().rposition(Option::is_some).expect("has a value");
        let values: Option<Vec<f64>> = col[first..=last].iter().copied().collect();
        let values = values.ok_or_else(|| Error::Format(format!("column `{name}` has a gap")))?;
        out.push((name, MonthlySeries::new(months[first], values)?));
    }
    Ok(out)
}

/// Reads one column (the first value column when `column` is `None`).
pub fn read_series_csv<R: Read>(input: R, column: Option<&str>) -> Result<MonthlySeries> {
    let table = read_series_table(input)?;
    let found = match column {
        Some(name) => table.into_iter().find(|(n, _)| n == name),
        None => table.into_iter().next(),
    };
    found.map(|(_, s)| s).ok_or_else(|| {
        Error::Format(format!(
            "column `{}` not found",
            column.unwrap_or("<first>")
        ))
    })
}

/// Survey answer counts: `period,a1,a2,a3,a4,a5,a6`, one row per wave.
pub fn read_waves_csv<R: Read>(input: R) -> Result<Vec<SurveyWave>> {
    let mut r = csv_reader(input);
    let headers: Vec<String> = r
        .headers()?
        .iter()
        .map(|h| h.trim().to_ascii_lowercase())
        .collect();
    if headers != ["period", "a1", "a2", "a3", "a4", "a5", "a6"] {
        return Err(Error::Format(
            "waves CSV header must be period,a1,a2,a3,a4,a5,a6".into(),
        ));
    }
    let mut waves = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let bad = |e: String| Error::Format(format!("row {}: {e}", row + 1));
        let month: Month = rec[0].parse().map_err(|e: Error| bad(e.to_string()))?;
        let mut answers = [0u32; 6];
        for (i, a) in answers.iter_mut().enumerate() {
            let raw = rec.get(i + 1).unwrap_or("").trim();
            *a = raw
                .parse()
                .map_err(|_| bad(format!("bad count `{raw}` for a{}", i + 1)))?;
        }
        waves.push(SurveyWave::new(month, answers));
    }
    Ok(waves)
}

pub fn read_quarterly_csv<R: Read>(input: R) -> Result<QuarterlySeries> {
    let mut r = csv_reader(input);
    let mut start: Option<Quarter> = None;
    let mut values = Vec::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        let q: Quarter = rec[0]
            .parse()
            .map_err(|e| Error::Format(format!("row {}: {e}", row + 1)))?;
        let expected = start.map(|s| s.offset(values.len() as i64));
        if expected.is_some_and(|e| e != q) {
            return Err(Error::Format(format!(
                "row {}: quarters not contiguous at {q}",
                row + 1
            )));
        }
        start.get_or_insert(q);
        let raw = rec.get(1).unwrap_or("").trim();
        values.push(
            raw.parse::<f64>()
                .map_err(|_| Error::Format(format!("row {}: bad number `{raw}`", row + 1)))?,
        );
    }
    let start = start.ok_or_else(|| Error::Format("empty quarterly series".into()))?;
    QuarterlySeries::new(start, values)
}

pub fn write_quarterly_csv<W: Write>(
    out: W,
    name: &str,
    series: &QuarterlySeries,
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    w.write_record(["period", name])?;
    for (i, v) in series.values().iter().enumerate() {
        w.write_record([series.start().offset(i as i64).to_string(), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series_csv<W: Write>(
    out: W,
    name: &str,
    series: &MonthlySeries,
    meta: Option<&Metadata>,
) -> Result<()> {
    write_series_table(out, &[(name, series)], meta)
}

/// Writes several series over the union of their ranges.
pub fn write_series_table<W: Write>(
    out: W,
    columns: &[(&str, &MonthlySeries)],
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    let mut header = vec!["period"];
    header.extend(columns.iter().map(|(n, _)| *n));
    w.write_record(&header)?;
    let nonempty: Vec<&MonthlySeries> = columns
        .iter()
        .map(|(_, s)| *s)
        .filter(|s| !s.is_empty())
        .collect();
    if let (Some(from), Some(to)) = (
        nonempty.iter().map(|s| s.start()).min(),
        nonempty.iter().map(|s| s.end()).max(),
    ) {
        for i in 0..=from.until(to) {
            let m = from.offset(i);
            let mut row = vec![m.to_string()];
            row.extend(
                columns
                    .iter()
                    .map(|(_, s)| s.get(m).map(|v| v.to_string()).unwrap_or_default()),
            );
            w.write_record(&row)?;
        }
    }
    w.flush()?;
    Ok(())
}
