//! Partitions of the corpus into outlet groups, each with its own index.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{build_weighted, ClassifiedItem, EmsiSeries, Observation};
use crate::corpus::Channel;
use crate::error::{Error, Result};
use crate::io::csv_reader;
use crate::period::Month;

/// Guards inverse-distance weights when an outlet sits on its exemplar.
pub const DISTANCE_EPSILON: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Locality {
    Nationwide,
    Local,
}

impl FromStr for Locality {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nationwide" | "national" => Ok(Locality::Nationwide),
            "local" => Ok(Locality::Local),
            other => Err(Error::Format(format!("unknown locality `{other}`"))),
        }
    }
}

pub type LocalityTable = BTreeMap<String, Locality>;

/// Reads `outlet,locality` rows.
pub fn read_locality_table<R: Read>(input: R) -> Result<LocalityTable> {
    let mut r = csv_reader(input);
    let mut table = LocalityTable::new();
    for (row, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::Format(format!(
                "row {}: expected outlet,locality",
                row + 1
            )));
        }
        let loc = rec[1]
            .parse()
            .map_err(|e: Error| Error::Format(format!("row {}: {e}", row + 1)))?;
        if table.insert(rec[0].to_string(), loc).is_some() {
            return Err(Error::Format(format!(
                "row {}: outlet `{}` listed twice",
                row + 1,
                &rec[0]
            )));
        }
    }
    Ok(table)
}

/// Points in (average words per item, item count) space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Exemplars {
    pub frequent: [f64; 2],
    pub infrequent: [f64; 2],
}

impl Exemplars {
    /// Frequent publishers at the 90th percentile of both coordinates,
    /// infrequent ones at the 10th.
    pub fn from_stats(stats: &BTreeMap<String, OutletStats>) -> Result<Self> {
        if stats.is_empty() {
            return Err(Error::invalid("no outlets to place exemplars"));
        }
        let mut words: Vec<f64> = stats.values().map(|s| s.avg_words).collect();
        let mut counts: Vec<f64> = stats.values().map(|s| s.items as f64).collect();
        words.sort_by(f64::total_cmp);
        counts.sort_by(f64::total_cmp);
        Ok(Exemplars {
            frequent: [percentile(&words, 0.9), percentile(&counts, 0.9)],
            infrequent: [percentile(&words, 0.1), percentile(&counts, 0.1)],
        })
    }
}

/// Linear-interpolation percentile of sorted data.
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OutletStats {
    pub avg_words: f64,
    pub items: usize,
}

pub fn outlet_stats(items: &[ClassifiedItem]) -> BTreeMap<String, OutletStats> {
    let mut acc: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for it in items {
        let e = acc.entry(it.outlet.clone()).or_default();
        e.0 += it.word_count;
        e.1 += 1;
    }
    acc.into_iter()
        .map(|(k, (w, n))| {
            (
                k,
                OutletStats {
                    avg_words: w as f64 / n as f64,
                    items: n,
                },
            )
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum SubgroupScheme {
    PrintOnline,
    NationwideLocal(LocalityTable),
    /// `None` places exemplars from the corpus percentiles.
    FrequentInfrequent(Option<Exemplars>),
}

impl SubgroupScheme {
    pub fn name(&self) -> &'static str {
        match self {
            SubgroupScheme::PrintOnline => "print_online",
            SubgroupScheme::NationwideLocal(_) => "nationwide_local",
            SubgroupScheme::FrequentInfrequent(_) => "frequent_infrequent",
        }
    }

    pub fn groups(&self) -> [&'static str; 2] {
        match self {
            SubgroupScheme::PrintOnline => ["print", "online"],
            SubgroupScheme::NationwideLocal(_) => ["nationwide", "local"],
            SubgroupScheme::FrequentInfrequent(_) => ["frequent", "infrequent"],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubgroupSplit {
    /// Group name to index, in the scheme's group order.
    pub groups: Vec<(String, EmsiSeries)>,
    /// Outlet to group assignment.
    pub assignment: BTreeMap<String, String>,
    pub warnings: Vec<String>,
}

fn distance(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

/// Splits items into the scheme's two groups and builds an index for each
/// over `from..=to`. Under the frequency scheme each item is weighted by the
/// inverse distance from its outlet to the group exemplar.
pub fn split_subgroups(
    items: &[ClassifiedItem],
    scheme: &SubgroupScheme,
    from: Month,
    to: Month,
) -> Result<SubgroupSplit> {
    let names = scheme.groups();
    let mut warnings = Vec::new();
    let mut assignment = BTreeMap::new();
    let mut obs: [Vec<Observation>; 2] = [Vec::new(), Vec::new()];
    let outlets: BTreeSet<&str> = items.iter().map(|i| i.outlet.as_str()).collect();
    // outlet -> (group, weight)
    let mut placement: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    match scheme {
        SubgroupScheme::PrintOnline => {}
        SubgroupScheme::NationwideLocal(table) => {
            for &o in &outlets {
                let g = match table.get(o) {
                    Some(Locality::Nationwide) => 0,
                    Some(Locality::Local) => 1,
                    None => {
                        warnings.push(format!(
                            "outlet `{o}` missing from locality table; treated as nationwide"
                        ));
                        0
                    }
                };
                placement.insert(o.to_string(), (g, 1.0));
            }
        }
        SubgroupScheme::FrequentInfrequent(ex) => {
            let stats = outlet_stats(items);
            let ex = match ex {
                Some(e) => *e,
                None => Exemplars::from_stats(&stats)?,
            };
            for (o, s) in &stats {
                let p = [s.avg_words, s.items as f64];
                let (df, di) = (distance(p, ex.frequent), distance(p, ex.infrequent));
                let (g, d) = if df <= di { (0, df) } else { (1, di) };
                placement.insert(o.clone(), (g, 1.0 / d.max(DISTANCE_EPSILON)));
            }
        }
    }
    for it in items {
        let (g, weight) = match scheme {
            SubgroupScheme::PrintOnline => (usize::from(it.channel == Channel::Online), 1.0),
            _ => placement[&it.outlet],
        };
        assignment
            .entry(it.outlet.clone())
            .or_insert_with(|| names[g].to_string());
        obs[g].push(Observation {
            date: it.date,
            class: it.predicted,
            weight,
        });
    }
    let mut groups = Vec::with_capacity(2);
    for (g, name) in names.iter().enumerate() {
        groups.push((name.to_string(), build_weighted(&obs[g], from, to)?));
    }
    Ok(SubgroupSplit {
        groups,
        assignment,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index::build_emsi;
    use crate::nb::SentimentClass;
    use chrono::NaiveDate;

    fn item(
        id: usize,
        outlet: &str,
        day: u32,
        channel: Channel,
        words: usize,
        class: SentimentClass,
    ) -> ClassifiedItem {
        ClassifiedItem {
            id: id.to_string(),
            date: NaiveDate::from_ymd_opt(2020, 1, day).unwrap(),
            outlet: outlet.into(),
            channel,
            word_count: words,
            predicted: class,
            scores: [None; 3],
        }
    }

    fn jan() -> Month {
        Month::new(2020, 1).unwrap()
    }

    #[test]
    fn all_online_leaves_print_empty() {
        let items: Vec<_> = (0..10)
            .map(|i| {
                item(
                    i,
                    "w",
                    1 + i as u32,
                    Channel::Online,
                    100,
                    SentimentClass::Positive,
                )
            })
            .collect();
        let s = split_subgroups(&items, &SubgroupScheme::PrintOnline, jan(), jan()).unwrap();
        assert_eq!(s.groups[0].0, "print");
        assert_eq!(s.groups[0].1.values(), vec![0.0]);
        assert!((s.groups[1].1.values()[0] - 10.0 / 31.0).abs() < 1e-15);
    }

    #[test]
    fn channel_partition_preserves_counts() {
        use SentimentClass::*;
        let classes = [Positive, Negative, Irrelevant];
        let items: Vec<_> = (0..90)
            .map(|i| {
                let ch = if i % 4 == 0 {
                    Channel::Print
                } else {
                    Channel::Online
                };
                item(i, "o", 1 + (i % 28) as u32, ch, 50, classes[i % 3])
            })
            .collect();
        let s = split_subgroups(&items, &SubgroupScheme::PrintOnline, jan(), jan()).unwrap();
        let all = build_emsi(items.iter().map(|i| (i.date, i.predicted)), jan(), jan()).unwrap();
        let (a, b, t) = (
            s.groups[0].1.points()[0],
            s.groups[1].1.points()[0],
            all.points()[0],
        );
        assert_eq!(a.n_positive + b.n_positive, t.n_positive);
        assert_eq!(a.n_negative + b.n_negative, t.n_negative);
        assert_eq!(a.n_irrelevant + b.n_irrelevant, t.n_irrelevant);
    }

    #[test]
    fn locality_lookup_with_default() {
        let table = read_locality_table(
            "outlet,locality\nBig Daily,nationwide\nTown Post,local\n".as_bytes(),
        )
        .unwrap();
        let items = vec![
            item(
                0,
                "Big Daily",
                1,
                Channel::Print,
                10,
                SentimentClass::Negative,
            ),
            item(
                1,
                "Town Post",
                2,
                Channel::Print,
                10,
                SentimentClass::Positive,
            ),
            item(
                2,
                "Unknown",
                3,
                Channel::Print,
                10,
                SentimentClass::Negative,
            ),
        ];
        let s = split_subgroups(
            &items,
            &SubgroupScheme::NationwideLocal(table),
            jan(),
            jan(),
        )
        .unwrap();
        assert_eq!(s.assignment["Unknown"], "nationwide");
        assert_eq!(s.warnings.len(), 1);
        assert_eq!(s.groups[0].1.points()[0].n_negative, 2);
        assert_eq!(s.groups[1].1.points()[0].n_positive, 1);
        assert!(read_locality_table("outlet,locality\na,rural\n".as_bytes()).is_err());
    }

    #[test]
    fn exemplar_hits_and_nearest_rule() {
        // "A": 2 items of 100 words; "B": 1 item of 500 words; "C": 2 items of 420 words.
        let items = vec![
            item(0, "A", 1, Channel::Print, 100, SentimentClass::Positive),
            item(1, "A", 2, Channel::Print, 100, SentimentClass::Negative),
            item(2, "B", 1, Channel::Print, 500, SentimentClass::Negative),
            item(3, "C", 1, Channel::Print, 420, SentimentClass::Positive),
            item(4, "C", 5, Channel::Print, 420, SentimentClass::Positive),
        ];
        let ex = Exemplars {
            frequent: [100.0, 2.0],
            infrequent: [500.0, 1.0],
        };
        let s = split_subgroups(
            &items,
            &SubgroupScheme::FrequentInfrequent(Some(ex)),
            jan(),
            jan(),
        )
        .unwrap();
        assert_eq!(s.assignment["A"], "frequent");
        assert_eq!(s.assignment["B"], "infrequent");
        // C at (420, 2): distance 320 to frequent, ≈80.006 to infrequent.
        assert_eq!(s.assignment["C"], "infrequent");
        // Day 1 infrequent: B negative with weight 1e9, C positive with
        // weight 1/80.006; net is nearly −1.
        let w_c = 1.0 / (80.0f64.powi(2) + 1.0).sqrt();
        let day1 = (w_c - 1e9) / (w_c + 1e9);
        let expected = (day1 + 1.0) / 31.0;
        assert!((s.groups[1].1.values()[0] - expected).abs() < 1e-15);
        assert_eq!(s.groups[0].1.values()[0], 0.0);
    }

    #[test]
    fn default_exemplars_from_percentiles() {
        let mut stats = BTreeMap::new();
        for (i, (w, n)) in [(10.0, 1), (20.0, 3), (30.0, 5)].into_iter().enumerate() {
            stats.insert(
                i.to_string(),
                OutletStats {
                    avg_words: w,
                    items: n,
                },
            );
        }
        let ex = Exemplars::from_stats(&stats).unwrap();
        assert!((ex.frequent[0] - 28.0).abs() < 1e-12 && (ex.frequent[1] - 4.6).abs() < 1e-12);
        assert!((ex.infrequent[0] - 12.0).abs() < 1e-12 && (ex.infrequent[1] - 1.4).abs() < 1e-12);
    }
}
