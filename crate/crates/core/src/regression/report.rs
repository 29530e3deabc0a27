//! Result tables: coefficient with stars over the HAC standard error in
//! parentheses, rendered as aligned text or CSV.

use std::fmt::Write as _;
use std::io::Write;

use super::granger::{GrangerResult, SignificanceCount};
use super::inference::stars;
use super::ols::OlsFit;
use crate::error::Result;
use crate::io::{csv_writer, Metadata};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|c| {
                std::iter::once(&self.header[c])
                    .chain(self.rows.iter().map(|r| &r[c]))
                    .map(|s| s.chars().count())
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            for (c, cell) in cells.iter().enumerate() {
                if c == 0 {
                    let _ = write!(out, "{cell:<w$}", w = widths[c]);
                } else {
                    let _ = write!(out, "  {cell:>w$}", w = widths[c]);
                }
            }
            out.push('\n');
        };
        line(&mut out, &self.header);
        let rule: usize = widths.iter().sum::<usize>() + 2 * widths.len().saturating_sub(1);
        out.push_str(&"-".repeat(rule));
        out.push('\n');
        for r in &self.rows {
            line(&mut out, r);
        }
        out
    }

    pub fn write_csv<W: Write>(&self, out: W, meta: Option<&Metadata>) -> Result<()> {
        let mut w = csv_writer(out, meta)?;
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `5.39**` style estimate cell.
pub fn coef_cell(estimate: f64, p_value: f64) -> String {
    format!("{estimate:.2}{}", stars(p_value))
}

/// One column per fit; each regressor takes two rows, estimate then
/// `(HAC SE)`. Summary rows follow.
pub fn regression_table(columns: &[(&str, &OlsFit)]) -> Table {
    let mut header = vec![String::new()];
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    let mut table = Table::new(header);
    let mut names: Vec<&str> = Vec::new();
    for (_, fit) in columns {
        for n in fit.names() {
            if !names.contains(&n.as_str()) {
                names.push(n);
            }
        }
    }
    for name in names {
        let mut est = vec![name.to_string()];
        let mut se = vec![String::new()];
        for (_, fit) in columns {
            match (fit.index_of(name), fit.t_hac(name)) {
                (Some(i), Ok((_, p))) => {
                    est.push(coef_cell(fit.coefficients()[i], p));
                    se.push(format!("({:.2})", fit.hac_std_errors()[i]));
                }
                (Some(i), Err(_)) => {
                    est.push(format!("{:.2}", fit.coefficients()[i]));
                    se.push("(0.00)".into());
                }
                (None, _) => {
                    est.push(String::new());
                    se.push(String::new());
                }
            }
        }
        table.push(est);
        table.push(se);
    }
    type Cell = fn(&OlsFit) -> String;
    let summary: [(&str, Cell); 3] = [
        ("R2", |f| format!("{:.3}", f.r_squared())),
        ("adj. R2", |f| format!("{:.3}", f.adj_r_squared())),
        ("N", |f| f.n().to_string()),
    ];
    for (label, value) in summary {
        let mut row = vec![label.to_string()];
        row.extend(columns.iter().map(|(_, f)| value(f)));
        table.push(row);
    }
    table
}

/// One row per (cause, effect) pair with both directional tests.
pub fn granger_table(results: &[(&str, &str, &GrangerResult)]) -> Table {
    let mut table = Table::new(
        [
            "x",
            "y",
            "direction",
            "k_xy",
            "wald_xy",
            "p_xy",
            "k_yx",
            "wald_yx",
            "p_yx",
            "fallback",
        ]
        .map(String::from)
        .to_vec(),
    );
    for (x, y, r) in results {
        let (a, b) = (&r.x_to_y, &r.y_to_x);
        table.push(vec![
            x.to_string(),
            y.to_string(),
            r.direction.as_str().to_string(),
            a.k.to_string(),
            format!("{:.4}", a.wald.statistic),
            format!("{:.4}", a.wald.p_value),
            b.k.to_string(),
            format!("{:.4}", b.wald.statistic),
            format!("{:.4}", b.wald.p_value),
            (a.fallback || b.fallback).to_string(),
        ]);
    }
    table
}

pub fn significance_table(counts: &[SignificanceCount]) -> Table {
    let mut table = Table::new(
        ["variable", "significant", "total"]
            .map(String::from)
            .to_vec(),
    );
    for c in counts {
        table.push(vec![
            c.variable.clone(),
            c.significant.to_string(),
            c.total.to_string(),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regression::{ols, Design};

    #[test]
    fn layout() {
        let x: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(i, v)| 1.0 + 2.0 * v + ((i * 13) % 5) as f64 * 0.1)
            .collect();
        let fit = ols(&Design::with_constant(&y, &[("x", &x)]).unwrap()).unwrap();
        let t = regression_table(&[("m1", &fit)]);
        assert_eq!(t.rows.len(), 2 * 2 + 3);
        assert!(t.rows[2][1].starts_with("2.0") && t.rows[2][1].ends_with("***"));
        assert!(t.rows[3][1].starts_with('('));
        let text = t.render();
        assert!(text.lines().count() == t.rows.len() + 2);
        let mut buf = Vec::new();
        t.write_csv(&mut buf, None).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with(",m1\nconst,"));
    }

    #[test]
    fn cells() {
        assert_eq!(coef_cell(5.391, 0.03), "5.39**");
        assert_eq!(coef_cell(-0.1, 0.5), "-0.10");
    }
}
