//! Economic media sentiment index: the daily net share of positive over
//! negative items, averaged over every calendar day of a month.

mod classified;
mod subgroups;

use std::collections::{BTreeMap, HashSet};
use std::io::Write;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::{csv_writer, Metadata};
use crate::nb::SentimentClass;
use crate::period::Month;
use crate::series::{centered_ma, MonthlySeries, Unit};

pub use classified::{classify_items, read_classified_csv, write_classified_csv, ClassifiedItem};
pub use subgroups::{
    outlet_stats, read_locality_table, split_subgroups, Exemplars, Locality, LocalityTable,
    OutletStats, SubgroupScheme, SubgroupSplit, DISTANCE_EPSILON,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DailyCounts {
    pub date: NaiveDate,
    pub n_positive: u64,
    pub n_negative: u64,
    pub n_irrelevant: u64,
}

impl DailyCounts {
    pub fn new(date: NaiveDate, n_positive: u64, n_negative: u64, n_irrelevant: u64) -> Self {
        DailyCounts {
            date,
            n_positive,
            n_negative,
            n_irrelevant,
        }
    }
}

/// `(p − n) / (p + n)`, or 0 on a day without relevant items.
pub fn daily_net(counts: &DailyCounts) -> f64 {
    net(counts.n_positive as f64, counts.n_negative as f64)
}

fn net(p: f64, n: f64) -> f64 {
    if p + n > 0.0 {
        (p - n) / (p + n)
    } else {
        0.0
    }
}

/// Average daily net over all days of `month`. Days absent from `daily`
/// contribute 0.
pub fn monthly_emsi(month: Month, daily: &[DailyCounts]) -> Result<f64> {
    let mut seen = HashSet::new();
    let mut sum = 0.0;
    for d in daily {
        if Month::of(d.date) != month {
            return Err(Error::invalid(format!("{} is not in {month}", d.date)));
        }
        if !seen.insert(d.date) {
            return Err(Error::invalid(format!("duplicate counts for {}", d.date)));
        }
        sum += daily_net(d);
    }
    Ok(sum / f64::from(month.days()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EmsiPoint {
    pub month: Month,
    pub value: f64,
    pub days: u32,
    pub n_positive: u64,
    pub n_negative: u64,
    pub n_irrelevant: u64,
}

/// Consecutive monthly index values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmsiSeries {
    points: Vec<EmsiPoint>,
}

impl EmsiSeries {
    pub fn points(&self) -> &[EmsiPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn to_series(&self) -> Result<MonthlySeries> {
        let start = self
            .points
            .first()
            .map(|p| p.month)
            .ok_or_else(|| Error::invalid("empty index"))?;
        MonthlySeries::with_unit(start, self.values(), Unit::Ratio)
    }
}

/// One dated item with its class and averaging weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Observation {
    pub date: NaiveDate,
    pub class: SentimentClass,
    pub weight: f64,
}

/// Index over `from..=to` from weighted observations. Within a day the net
/// uses weighted positive and negative totals; the reported counts are
/// unweighted.
pub(crate) fn build_weighted(obs: &[Observation], from: Month, to: Month) -> Result<EmsiSeries> {
    if to < from {
        return Err(Error::invalid(format!("empty month range {from}..{to}")));
    }
    #[derive(Default, Clone, Copy)]
    struct Day {
        wp: f64,
        wn: f64,
        counts: [u64; 3],
    }
    let mut days: BTreeMap<NaiveDate, Day> = BTreeMap::new();
    for o in obs {
        let m = Month::of(o.date);
        if m < from || m > to {
            return Err(Error::invalid(format!(
                "item dated {} lies outside {from}..{to}",
                o.date
            )));
        }
        let day = days.entry(o.date).or_default();
        day.counts[o.class.index()] += 1;
        match o.class {
            SentimentClass::Positive => day.wp += o.weight,
            SentimentClass::Negative => day.wn += o.weight,
            SentimentClass::Irrelevant => {}
        }
    }
    let mut points = Vec::with_capacity((from.until(to) + 1) as usize);
    for i in 0..=from.until(to) {
        let month = from.offset(i);
        let mut sum = 0.0;
        let mut counts = [0u64; 3];
        for (_, d) in days.range(month.first_day()..month.offset(1).first_day()) {
            sum += net(d.wp, d.wn);
            for (total, c) in counts.iter_mut().zip(d.counts) {
                *total += c;
            }
        }
        points.push(EmsiPoint {
            month,
            value: sum / f64::from(month.days()),
            days: month.days(),
            n_positive: counts[SentimentClass::Positive.index()],
            n_negative: counts[SentimentClass::Negative.index()],
            n_irrelevant: counts[SentimentClass::Irrelevant.index()],
        });
    }
    Ok(EmsiSeries { points })
}

/// Monthly index over `from..=to`. Irrelevant items are counted but do not
/// enter the net.
pub fn build_emsi<I>(classified: I, from: Month, to: Month) -> Result<EmsiSeries>
where
    I: IntoIterator<Item = (NaiveDate, SentimentClass)>,
{
    let obs: Vec<Observation> = classified
        .into_iter()
        .map(|(date, class)| Observation {
            date,
            class,
            weight: 1.0,
        })
        .collect();
    build_weighted(&obs, from, to)
}

/// Month range spanned by a set of dates.
pub fn month_span<I: IntoIterator<Item = NaiveDate>>(dates: I) -> Option<(Month, Month)> {
    dates.into_iter().fold(None, |acc, d| {
        let m = Month::of(d);
        Some(match acc {
            None => (m, m),
            Some((a, b)) => (a.min(m), b.max(m)),
        })
    })
}

/// Writes `month, emsi, n_positive, n_negative, n_irrelevant`, one column
/// per subgroup (`emsi_<group>`) and, when `ma_window` is given, the
/// centered moving average (`emsi_ma<w>`) with blanks where it is undefined.
pub fn write_emsi_csv<W: Write>(
    out: W,
    emsi: &EmsiSeries,
    subgroups: &[(&str, &EmsiSeries)],
    ma_window: Option<usize>,
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut w = csv_writer(out, meta)?;
    let mut header: Vec<String> = ["month", "emsi", "n_positive", "n_negative", "n_irrelevant"]
        .map(String::from)
        .to_vec();
    header.extend(subgroups.iter().map(|(g, _)| format!("emsi_{g}")));
    let ma = match ma_window {
        Some(window) => {
            header.push(format!("emsi_ma{window}"));
            Some(centered_ma(&emsi.to_series()?, window)?)
        }
        None => None,
    };
    w.write_record(&header)?;
    for (i, p) in emsi.points.iter().enumerate() {
        let mut row = vec![
            p.month.to_string(),
            p.value.to_string(),
            p.n_positive.to_string(),
            p.n_negative.to_string(),
            p.n_irrelevant.to_string(),
        ];
        for (g, s) in subgroups {
            let v = s
                .points
                .get(i)
                .filter(|q| q.month == p.month)
                .ok_or_else(|| {
                    Error::invalid(format!("subgroup `{g}` is not aligned with the index"))
                })?;
            row.push(v.value.to_string());
        }
        if let Some(ma) = &ma {
            row.push(ma.get(p.month).map(|v| v.to_string()).unwrap_or_default());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn daily_net_cases() {
        assert_eq!(daily_net(&DailyCounts::new(d(2020, 1, 1), 3, 1, 9)), 0.5);
        assert_eq!(daily_net(&DailyCounts::new(d(2020, 1, 1), 0, 0, 4)), 0.0);
        assert_eq!(daily_net(&DailyCounts::new(d(2020, 1, 1), 0, 7, 0)), -1.0);
    }

    #[test]
    fn monthly_cases() {
        let june = Month::new(2021, 6).unwrap();
        let all_pos: Vec<_> = june.dates().map(|x| DailyCounts::new(x, 1, 0, 0)).collect();
        assert_eq!(monthly_emsi(june, &all_pos).unwrap(), 1.0);
        let one = [DailyCounts::new(d(2021, 6, 10), 3, 1, 0)];
        assert!((monthly_emsi(june, &one).unwrap() - 0.5 / 30.0).abs() < 1e-15);
        let sym = [
            DailyCounts::new(d(2021, 6, 1), 3, 1, 0),
            DailyCounts::new(d(2021, 6, 2), 1, 3, 0),
        ];
        assert_eq!(monthly_emsi(june, &sym).unwrap(), 0.0);
        let dup = [one[0], one[0]];
        assert!(monthly_emsi(june, &dup).is_err());
        assert!(monthly_emsi(june, &[DailyCounts::new(d(2021, 7, 1), 1, 0, 0)]).is_err());
    }

    #[test]
    fn build_cases() {
        let jan = Month::new(2022, 1).unwrap();
        let s = build_emsi(
            [(d(2022, 1, 5), SentimentClass::Positive)],
            jan,
            jan.offset(1),
        )
        .unwrap();
        assert!((s.points()[0].value - 1.0 / 31.0).abs() < 1e-15);
        assert_eq!(s.points()[1].value, 0.0);
        assert_eq!(s.points()[0].days, 31);
        assert_eq!(s.points()[1].days, 28);

        let irr = build_emsi([(d(2022, 1, 5), SentimentClass::Irrelevant)], jan, jan).unwrap();
        assert_eq!(irr.points()[0].value, 0.0);
        assert_eq!(irr.points()[0].n_irrelevant, 1);

        assert!(build_emsi([(d(2023, 1, 5), SentimentClass::Positive)], jan, jan).is_err());

        let mut alt = Vec::new();
        for i in 0..12 {
            let m = jan.offset(i);
            let class = if i % 2 == 0 {
                SentimentClass::Positive
            } else {
                SentimentClass::Negative
            };
            alt.extend(m.dates().map(|x| (x, class)));
        }
        let s = build_emsi(alt, jan, jan.offset(11)).unwrap();
        for (i, v) in s.values().iter().enumerate() {
            assert_eq!(*v, if i % 2 == 0 { 1.0 } else { -1.0 });
        }
    }

    #[test]
    fn csv_layout() {
        let jan = Month::new(2022, 1).unwrap();
        let items: Vec<_> = (0..14)
            .map(|i| (jan.offset(i).first_day(), SentimentClass::Positive))
            .collect();
        let s = build_emsi(items, jan, jan.offset(13)).unwrap();
        let mut buf = Vec::new();
        write_emsi_csv(&mut buf, &s, &[("all", &s)], Some(12), None).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[0],
            "month,emsi,n_positive,n_negative,n_irrelevant,emsi_all,emsi_ma12"
        );
        assert!(lines[1].ends_with(','));
        assert!(!lines[7].ends_with(','));
        let table = crate::series::read_series_table(text.as_bytes()).unwrap();
        assert_eq!(table[0].1.values(), s.values().as_slice());
    }

    fn year_of_counts() -> impl Strategy<Value = Vec<(u64, u64, u64)>> {
        prop::collection::vec((0u64..6, 0u64..6, 0u64..3), 365)
    }

    proptest! {
        #[test]
        fn bounds_swap_and_scale(counts in year_of_counts(), k in 1u64..5) {
            let jan = Month::new(2019, 1).unwrap();
            let dates: Vec<NaiveDate> = (0..12).flat_map(|i| jan.offset(i).dates()).collect();
            let expand = |scale: u64, swap: bool| {
                let mut v = Vec::new();
                for (date, &(p, n, r)) in dates.iter().zip(&counts) {
                    let (p, n) = if swap { (n, p) } else { (p, n) };
                    v.extend(std::iter::repeat_n((*date, SentimentClass::Positive), (p * scale) as usize));
                    v.extend(std::iter::repeat_n((*date, SentimentClass::Negative), (n * scale) as usize));
                    v.extend(std::iter::repeat_n((*date, SentimentClass::Irrelevant), r as usize));
                }
                build_emsi(v, jan, jan.offset(11)).unwrap().values()
            };
            let base = expand(1, false);
            let swapped = expand(1, true);
            let scaled = expand(k, false);
            for i in 0..12 {
                prop_assert!((-1.0..=1.0).contains(&base[i]));
                prop_assert_eq!(swapped[i], -base[i]);
                prop_assert!((scaled[i] - base[i]).abs() < 1e-15);
            }
        }
    }
}
