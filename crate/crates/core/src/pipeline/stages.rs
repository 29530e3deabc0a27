//! Pipeline stages. Each reads its inputs from files and writes its
//! artifacts to files, so a stage run alone on a previous stage's output
//! gives the same bytes as the full run.

use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::corpus::{
    parse_batch_named, parse_query, read_corpus_csv, write_corpus_csv, BooleanQuery, Corpus,
};
use crate::error::{Error, Result};
use crate::index::{
    build_emsi, classify_items, month_span, read_classified_csv, split_subgroups,
    write_classified_csv, write_emsi_csv, SubgroupScheme,
};
use crate::io::{csv_writer, Metadata};
use crate::nb::{
    cross_validate, read_labels_csv, read_model, train_on_tokens, write_model, CvReport,
    LabeledTokens, NbModel, SentimentClass,
};
use crate::regression::{
    contemporaneous_model, diff_mean_test, diff_var_test, granger_table, granger_test,
    level_correct, long_run_block, mean_test, qlr_break, regression_table, significance_summary,
    significance_table, GrangerConfig, GrangerResult, OlsFit, Table, Term,
};
use crate::series::{
    adf_test, hp_filter, interpolate_q_to_m, read_quarterly_csv, read_series_table,
    write_series_table, MonthlySeries, QuarterlySeries,
};

pub const CORPUS_CSV: &str = "corpus.csv";
pub const MODEL_BIN: &str = "model.bin";
pub const CV_CSV: &str = "cv.csv";
pub const TOP_WORDS_CSV: &str = "top_words.csv";
pub const CLASSIFIED_CSV: &str = "classified.csv";
pub const EMSI_CSV: &str = "emsi.csv";
pub const MACRO_PREPARED_CSV: &str = "macro_prepared.csv";
pub const ADF_CSV: &str = "adf.csv";
pub const MEANS_CSV: &str = "means.csv";
pub const DIFFS_CSV: &str = "diffs.csv";
pub const GRANGER_CSV: &str = "granger.csv";
pub const CONTEMP_CSV: &str = "contemp.csv";
pub const LONG_RUN_CSV: &str = "long_run.csv";
pub const QLR_CSV: &str = "qlr.csv";
pub const SUMMARY_CSV: &str = "summary.csv";
pub const REPORT_TXT: &str = "report.txt";

/// Files a stage wrote and what it had to say about its input.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StageOutput {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
}

pub fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::from(e).in_file(path))
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::from(e).in_file(dir))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::from(e).in_file(path))
}

/// Runs `f` with a writer on `path`, attributing errors to the file.
fn write_file(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<PathBuf> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush().map_err(Error::from))
        .map_err(|e| e.in_file(path))?;
    Ok(path.to_path_buf())
}

fn read_with<T>(path: &Path, f: impl FnOnce(BufReader<File>) -> Result<T>) -> Result<T> {
    f(open(path)?).map_err(|e| e.in_file(path))
}

/// Files named directly plus the files inside named directories, the latter
/// in name order.
pub fn expand_batch_paths(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let mut entries: Vec<PathBuf> = fs::read_dir(p)
                .map_err(|e| Error::from(e).in_file(p))?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()
                .map_err(|e| Error::from(e).in_file(p))?;
            entries.retain(|e| e.is_file());
            entries.sort();
            out.extend(entries);
        } else {
            out.push(p.clone());
        }
    }
    if out.is_empty() {
        return Err(Error::invalid("no batch files found"));
    }
    Ok(out)
}

/// Parses batch files into one corpus. Malformed records are skipped and
/// reported; malformed files abort.
pub fn load_corpus(paths: &[PathBuf]) -> Result<(Corpus, Vec<String>)> {
    let mut notes = Vec::new();
    let mut parts = Vec::new();
    for path in expand_batch_paths(paths)? {
        let bytes = fs::read(&path).map_err(|e| Error::from(e).in_file(&path))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let report = parse_batch_named(&name, &bytes).map_err(|e| e.in_file(&path))?;
        for e in &report.errors {
            notes.push(format!(
                "{}: record {} at byte {} skipped: {}",
                path.display(),
                e.record,
                e.offset,
                e.message
            ));
        }
        parts.push(report.items);
    }
    Ok((Corpus::merge(parts)?, notes))
}

pub fn read_query_file(path: &Path) -> Result<BooleanQuery> {
    let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
    parse_query(text.trim()).map_err(|e| e.in_file(path))
}

/// Batch files to `corpus.csv`, keeping items that match `query`.
pub fn ingest(
    batches: &[PathBuf],
    query: Option<&BooleanQuery>,
    out: &Path,
    meta: &Metadata,
) -> Result<StageOutput> {
    let (corpus, mut notes) = load_corpus(batches)?;
    let total = corpus.len();
    let kept = match query {
        Some(q) => corpus.filter(q),
        None => corpus,
    };
    notes.push(format!("{total} items parsed, {} kept", kept.len()));
    let file = write_file(out, |w| write_corpus_csv(w, kept.items(), Some(meta)))?;
    Ok(StageOutput {
        files: vec![file],
        notes,
    })
}

pub fn read_labeled_tokens(path: &Path) -> Result<Vec<LabeledTokens>> {
    Ok(read_with(path, read_labels_csv)?
        .iter()
        .map(|d| d.to_tokens())
        .collect())
}

/// Class pairs whose discriminative words `train` reports.
pub const TOP_WORD_PAIRS: [(SentimentClass, SentimentClass); 2] = [
    (SentimentClass::Positive, SentimentClass::Negative),
    (SentimentClass::Negative, SentimentClass::Positive),
];

/// Fold accuracies, the pooled accuracy and the confusion matrix.
pub fn write_cv_csv<W: Write>(out: W, cv: &CvReport, meta: Option<&Metadata>) -> Result<()> {
    let mut c = csv_writer(out, meta)?;
    c.write_record([
        "row",
        "accuracy",
        "pred_positive",
        "pred_negative",
        "pred_irrelevant",
    ])?;
    for (i, a) in cv.fold_accuracies.iter().enumerate() {
        c.write_record([
            format!("fold{}", i + 1),
            a.to_string(),
            String::new(),
            String::new(),
            String::new(),
        ])?;
    }
    c.write_record([
        "pooled".to_string(),
        cv.accuracy.to_string(),
        String::new(),
        String::new(),
        String::new(),
    ])?;
    for class in SentimentClass::ALL {
        let row = cv.confusion[class.index()];
        c.write_record([
            format!("actual_{class}"),
            String::new(),
            row[0].to_string(),
            row[1].to_string(),
            row[2].to_string(),
        ])?;
    }
    c.flush()?;
    Ok(())
}

/// The `n` most discriminative words for each `(class, versus)` pair.
pub fn write_top_words_csv<W: Write>(
    out: W,
    model: &NbModel,
    pairs: &[(SentimentClass, SentimentClass)],
    n: usize,
    meta: Option<&Metadata>,
) -> Result<()> {
    let mut c = csv_writer(out, meta)?;
    c.write_record(["class", "versus", "rank", "word", "probability_difference"])?;
    for &(a, b) in pairs {
        for (rank, (word, d)) in model.discriminative_words(a, b, n)?.iter().enumerate() {
            c.write_record([
                a.as_str(),
                b.as_str(),
                &(rank + 1).to_string(),
                word,
                &d.to_string(),
            ])?;
        }
    }
    c.flush()?;
    Ok(())
}

/// Trains on all labeled documents and cross-validates with `folds` folds.
/// Writes `model.bin`, `cv.csv` and `top_words.csv` into `out_dir`.
pub fn train(
    labels: &Path,
    folds: usize,
    cv_seed: u64,
    top_words: usize,
    out_dir: &Path,
    meta: &Metadata,
) -> Result<StageOutput> {
    let docs = read_labeled_tokens(labels)?;
    let (model, mut notes) = train_on_tokens(&docs)?;
    let mut files = vec![write_file(&out_dir.join(MODEL_BIN), |w| {
        write_model(w, &model, &meta.line())
    })?];

    let cv = cross_validate(&docs, folds, cv_seed)?;
    notes.extend(cv.warnings.iter().cloned());
    notes.push(format!(
        "{}-fold cross-validated accuracy {:.4}",
        folds, cv.accuracy
    ));
    files.push(write_file(&out_dir.join(CV_CSV), |w| {
        write_cv_csv(w, &cv, Some(meta))
    })?);
    files.push(write_file(&out_dir.join(TOP_WORDS_CSV), |w| {
        write_top_words_csv(w, &model, &TOP_WORD_PAIRS, top_words, Some(meta))
    })?);
    Ok(StageOutput { files, notes })
}

/// `corpus.csv` and `model.bin` to `classified.csv`.
pub fn classify(corpus: &Path, model: &Path, out: &Path, meta: &Metadata) -> Result<StageOutput> {
    let items = read_with(corpus, read_corpus_csv)?;
    let (model, _) = read_with(model, read_model)?;
    let classified = classify_items(&model, &items);
    let mut counts = [0usize; 3];
    for c in &classified {
        counts[c.predicted.index()] += 1;
    }
    let file = write_file(out, |w| write_classified_csv(w, &classified, Some(meta)))?;
    Ok(StageOutput {
        files: vec![file],
        notes: vec![format!(
            "{} items classified: {} positive, {} negative, {} irrelevant",
            classified.len(),
            counts[0],
            counts[1],
            counts[2]
        )],
    })
}

/// `classified.csv` to `emsi.csv`, with one column per subgroup and the
/// centered moving average when the series is long enough.
pub fn index(
    classified: &Path,
    schemes: &[SubgroupScheme],
    ma_window: usize,
    out: &Path,
    meta: &Metadata,
) -> Result<StageOutput> {
    let items = read_with(classified, read_classified_csv)?;
    let (from, to) = month_span(items.iter().map(|i| i.date))
        .ok_or_else(|| Error::invalid("no classified items"))?;
    let emsi = build_emsi(items.iter().map(|i| (i.date, i.predicted)), from, to)?;
    let mut notes = Vec::new();
    let mut groups = Vec::new();
    for scheme in schemes {
        let split = split_subgroups(&items, scheme, from, to)?;
        notes.extend(split.warnings);
        groups.extend(split.groups);
    }
    let refs: Vec<(&str, &_)> = groups.iter().map(|(n, s)| (n.as_str(), s)).collect();
    let ma = (ma_window > 0 && emsi.len() > ma_window).then_some(ma_window);
    if ma.is_none() && ma_window > 0 {
        notes.push(format!(
            "{} months are too few for a {ma_window}-month moving average",
            emsi.len()
        ));
    }
    let file = write_file(out, |w| write_emsi_csv(w, &emsi, &refs, ma, Some(meta)))?;
    notes.push(format!("index spans {from} to {to}"));
    Ok(StageOutput {
        files: vec![file],
        notes,
    })
}

/// HP cycle of 100·log GDP after interpolating the quarters to months.
pub fn output_gap(gdp: &QuarterlySeries, lambda: f64) -> Result<MonthlySeries> {
    let monthly = interpolate_q_to_m(gdp)?;
    if monthly.values().iter().any(|v| *v <= 0.0) {
        return Err(Error::invalid("GDP must be positive to take logs"));
    }
    Ok(hp_filter(&monthly.map(|v| 100.0 * v.ln())?, lambda)?.cycle)
}

/// Macro table plus, when quarterly GDP is given, `gdp_gap`: the HP cycle of
/// 100·log GDP interpolated to months.
pub fn prep(
    macros: &Path,
    gdp: Option<&Path>,
    lambda: f64,
    out: &Path,
    meta: &Metadata,
) -> Result<StageOutput> {
    let mut table = read_with(macros, read_series_table)?;
    let mut notes = Vec::new();
    if let Some(g) = gdp {
        let q = read_with(g, read_quarterly_csv)?;
        let gap = output_gap(&q, lambda).map_err(|e| e.in_file(g))?;
        notes.push(format!(
            "output gap from {} quarters, lambda {lambda}",
            q.len()
        ));
        table.push(("gdp_gap".to_string(), gap));
    }
    let refs: Vec<(&str, &MonthlySeries)> = table.iter().map(|(n, s)| (n.as_str(), s)).collect();
    let file = write_file(out, |w| write_series_table(w, &refs, Some(meta)))?;
    Ok(StageOutput {
        files: vec![file],
        notes,
    })
}

/// Index measures in an `emsi.csv`: the main index and subgroup columns.
pub fn emsi_measures(table: Vec<(String, MonthlySeries)>) -> Vec<(String, MonthlySeries)> {
    table
        .into_iter()
        .filter(|(n, _)| {
            n == "emsi"
                || n.strip_prefix("emsi_").is_some_and(|rest| {
                    !(rest.starts_with("ma") && rest[2..].chars().all(|c| c.is_ascii_digit()))
                })
        })
        .collect()
}

const SUBGROUP_PAIRS: [(&str, &str); 3] = [
    ("print", "online"),
    ("nationwide", "local"),
    ("frequent", "infrequent"),
];

pub fn named(v: &[(String, MonthlySeries)]) -> Vec<(&str, &MonthlySeries)> {
    v.iter().map(|(n, s)| (n.as_str(), s)).collect()
}

fn find<'a>(v: &[(&str, &'a MonthlySeries)], name: &str) -> Option<&'a MonthlySeries> {
    v.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// What a table builder does when one of its tests cannot be computed.
pub enum OnFailure<'a> {
    /// Record the failure and carry on with the remaining tests.
    Note(&'a mut Vec<String>),
    Abort,
}

impl OnFailure<'_> {
    fn handle(&mut self, what: String, e: Error) -> Result<()> {
        match self {
            OnFailure::Note(notes) => {
                notes.push(format!("{what}: {e}"));
                Ok(())
            }
            OnFailure::Abort => Err(e.context(what)),
        }
    }
}

fn f4(x: f64) -> String {
    format!("{x:.4}")
}

/// Augmented Dickey–Fuller tests with a constant and an AIC-chosen lag.
pub fn adf_table(
    series: &[(&str, &MonthlySeries)],
    max_lag: usize,
    fail: &mut OnFailure,
) -> Result<Table> {
    let mut adf = Table::new(
        [
            "series",
            "statistic",
            "p_value",
            "lag",
            "nobs",
            "cv_1pct",
            "cv_5pct",
            "cv_10pct",
        ]
        .map(String::from)
        .to_vec(),
    );
    for (name, s) in series {
        match adf_test(s, max_lag) {
            Ok(r) => adf.push(vec![
                name.to_string(),
                f4(r.statistic),
                f4(r.p_value),
                r.lag.to_string(),
                r.nobs.to_string(),
                f4(r.critical_values[0]),
                f4(r.critical_values[1]),
                f4(r.critical_values[2]),
            ]),
            Err(e) => fail.handle(format!("ADF {name}"), e)?,
        }
    }
    Ok(adf)
}

/// Each measure's mean with a HAC standard error.
pub fn means_table(measures: &[(&str, &MonthlySeries)], fail: &mut OnFailure) -> Result<Table> {
    let mut means = Table::new(
        [
            "measure",
            "mean",
            "hac_se",
            "t_ratio",
            "p_value",
            "formatted",
        ]
        .map(String::from)
        .to_vec(),
    );
    for (name, s) in measures {
        match mean_test(s.values()) {
            Ok(m) => means.push(vec![
                name.to_string(),
                f4(m.mean),
                f4(m.se),
                f4(m.t_ratio),
                f4(m.p_value),
                m.formatted(),
            ]),
            Err(e) => fail.handle(format!("mean test {name}"), e)?,
        }
    }
    Ok(means)
}

/// Mean and variance differences between the two halves of each subgroup
/// scheme present among `measures`.
pub fn diffs_table(measures: &[(&str, &MonthlySeries)], fail: &mut OnFailure) -> Result<Table> {
    let mut diffs = Table::new(
        [
            "a",
            "b",
            "mean_diff",
            "hac_se",
            "t_ratio",
            "p_value",
            "var_ratio",
            "var_p_value",
            "warning",
        ]
        .map(String::from)
        .to_vec(),
    );
    let opt = |v: Option<f64>| v.map(f4).unwrap_or_default();
    for (a, b) in SUBGROUP_PAIRS {
        let (na, nb) = (format!("emsi_{a}"), format!("emsi_{b}"));
        let (Some(sa), Some(sb)) = (find(measures, &na), find(measures, &nb)) else {
            continue;
        };
        match (diff_mean_test(sa, sb), diff_var_test(sa, sb)) {
            (Ok(m), Ok(v)) => diffs.push(vec![
                na,
                nb,
                f4(m.mean_diff),
                f4(m.se),
                opt(m.t_ratio),
                opt(m.p_value),
                f4(v.f),
                f4(v.p_value),
                m.warning.unwrap_or_default(),
            ]),
            (Err(e), _) | (_, Err(e)) => fail.handle(format!("difference test {na} vs {nb}"), e)?,
        }
    }
    Ok(diffs)
}

/// One `(x, y, result)` per pair of `xs` and `ys`.
pub type GrangerRun = Vec<(String, String, GrangerResult)>;

/// Granger tests of every `x` against every `y`, controlling for lags of
/// `controls`.
pub fn granger_battery(
    xs: &[(&str, &MonthlySeries)],
    ys: &[(&str, &MonthlySeries)],
    controls: &[(&str, &MonthlySeries)],
    cfg: &GrangerConfig,
    fail: &mut OnFailure,
) -> Result<GrangerRun> {
    let mut results = Vec::new();
    for &(x, xs) in xs {
        for &(y, ys) in ys {
            match granger_test((x, xs), (y, ys), controls, cfg) {
                Ok(r) => results.push((x.to_string(), y.to_string(), r)),
                Err(e) => fail.handle(format!("Granger {x} vs {y}"), e)?,
            }
        }
    }
    Ok(results)
}

pub fn granger_run_table(results: &GrangerRun) -> Table {
    let refs: Vec<(&str, &str, &GrangerResult)> = results
        .iter()
        .map(|(a, b, r)| (a.as_str(), b.as_str(), r))
        .collect();
    granger_table(&refs)
}

/// How often each control's lag block is significant in the equations for
/// the `y` variables.
pub fn summary_run_table(results: &GrangerRun, controls: &[&str], alpha: f64) -> Result<Table> {
    let fits: Vec<&OlsFit> = results.iter().map(|(_, _, r)| &r.x_to_y.fit).collect();
    Ok(significance_table(&significance_summary(
        &fits, controls, alpha,
    )?))
}

/// Contemporaneous models of each survey on `emsi` and the controls, and a
/// long-run effect table. The long-run table also covers the lagged
/// equations for `emsi` found in `granger`.
pub fn contemp_tables(
    emsi: &MonthlySeries,
    surveys: &[(&str, &MonthlySeries)],
    controls: &[(&str, &MonthlySeries)],
    granger: &GrangerRun,
    cfg: &GrangerConfig,
    fail: &mut OnFailure,
) -> Result<(Table, Table)> {
    let mut contemp = Vec::new();
    let mut long_run = Table::new(
        [
            "survey",
            "equation",
            "k",
            "emsi_coefficient",
            "long_run_effect",
            "se",
        ]
        .map(String::from)
        .to_vec(),
    );
    let mut push_long_run =
        |survey: &str, equation: &str, k: usize, fit: &OlsFit, targets: &[String]| {
            let lags: Vec<String> = Term::lags(survey, k).iter().map(Term::label).collect();
            let lag_refs: Vec<&str> = lags.iter().map(String::as_str).collect();
            let target_refs: Vec<&str> = targets.iter().map(String::as_str).collect();
            let beta: f64 = target_refs
                .iter()
                .map(|t| fit.coefficient(t).unwrap_or(f64::NAN))
                .sum();
            let (value, se) = match long_run_block(fit, &target_refs, &lag_refs) {
                Ok(lr) => (f4(lr.value), f4(lr.se)),
                Err(e) => (format!("undefined: {e}"), String::new()),
            };
            long_run.push(vec![
                survey.to_string(),
                equation.to_string(),
                k.to_string(),
                f4(beta),
                value,
                se,
            ]);
        };
    for &(s, ss) in surveys {
        match contemporaneous_model((s, ss), ("emsi", emsi), controls, cfg) {
            Ok(c) => {
                push_long_run(s, "contemporaneous", c.k, &c.fit, &["emsi".to_string()]);
                contemp.push((s, c.fit));
            }
            Err(e) => fail.handle(format!("contemporaneous model {s}"), e)?,
        }
        if let Some((_, _, r)) = granger.iter().find(|(x, y, _)| x == "emsi" && y == s) {
            let t = &r.x_to_y;
            let targets: Vec<String> = Term::lags("emsi", t.k).iter().map(Term::label).collect();
            push_long_run(s, "lagged", t.k, &t.fit, &targets);
        }
    }
    let cols: Vec<(&str, &OlsFit)> = contemp.iter().map(|(n, f)| (*n, f)).collect();
    Ok((regression_table(&cols), long_run))
}

/// Sup-F break tests, then the same test on the level-corrected series.
pub fn qlr_table(series: &[(&str, &MonthlySeries)], fail: &mut OnFailure) -> Result<Table> {
    let mut qlr = Table::new(
        [
            "series",
            "break_month",
            "sup_f",
            "significant",
            "sup_f_corrected",
            "significant_corrected",
        ]
        .map(String::from)
        .to_vec(),
    );
    for &(s, ss) in series {
        let r = qlr_break(ss).and_then(|b| {
            let again = qlr_break(&level_correct(ss, b.break_month)?)?;
            Ok((b, again))
        });
        match r {
            Ok((b, again)) => qlr.push(vec![
                s.to_string(),
                b.break_month.to_string(),
                f4(b.sup_f),
                b.significant.to_string(),
                f4(again.sup_f),
                again.significant.to_string(),
            ]),
            Err(e) => fail.handle(format!("break test {s}"), e)?,
        }
    }
    Ok(qlr)
}

/// The hypothesis tests on the index, the survey series and the prepared
/// macro controls. Failures of individual tests are reported and skipped.
pub fn tests(
    emsi: &Path,
    survey: &Path,
    macros: &Path,
    cfg: &GrangerConfig,
    adf_max_lag: usize,
    out_dir: &Path,
    meta: &Metadata,
) -> Result<StageOutput> {
    let measures = emsi_measures(read_with(emsi, read_series_table)?);
    let surveys = read_with(survey, read_series_table)?;
    let controls = read_with(macros, read_series_table)?;
    let Some(main) = find(&named(&measures), "emsi") else {
        return Err(Error::Format("no `emsi` column".into()).in_file(emsi));
    };
    let (measures, surveys, controls) = (named(&measures), named(&surveys), named(&controls));
    let control_names: Vec<&str> = controls.iter().map(|(n, _)| *n).collect();
    let mut notes = Vec::new();
    let mut files = Vec::new();
    let mut report = String::new();
    let _ = writeln!(report, "{}", meta.line());
    let mut emit = |name: &str, title: &str, table: &Table| -> Result<()> {
        files.push(write_file(&out_dir.join(name), |w| {
            table.write_csv(w, Some(meta))
        })?);
        let _ = writeln!(report, "\n{title}\n{}", table.render());
        Ok(())
    };

    let all: Vec<(&str, &MonthlySeries)> = measures
        .iter()
        .chain(&surveys)
        .chain(&controls)
        .copied()
        .collect();
    emit(
        ADF_CSV,
        "Unit-root tests (constant, AIC lag)",
        &adf_table(&all, adf_max_lag, &mut OnFailure::Note(&mut notes))?,
    )?;
    emit(
        MEANS_CSV,
        "Means (HAC)",
        &means_table(&measures, &mut OnFailure::Note(&mut notes))?,
    )?;
    emit(
        DIFFS_CSV,
        "Subgroup differences",
        &diffs_table(&measures, &mut OnFailure::Note(&mut notes))?,
    )?;

    let results = granger_battery(
        &measures,
        &surveys,
        &controls,
        cfg,
        &mut OnFailure::Note(&mut notes),
    )?;
    emit(
        GRANGER_CSV,
        "Granger causality (x = index measure, y = survey)",
        &granger_run_table(&results),
    )?;
    let summary = summary_run_table(&results, &control_names, cfg.alpha)?;
    emit(
        SUMMARY_CSV,
        "Significant macro lag blocks in the survey equations",
        &summary,
    )?;

    let (contemp, long_run) = contemp_tables(
        main,
        &surveys,
        &controls,
        &results,
        cfg,
        &mut OnFailure::Note(&mut notes),
    )?;
    emit(
        CONTEMP_CSV,
        "Contemporaneous models (HAC SE in parentheses)",
        &contemp,
    )?;
    emit(LONG_RUN_CSV, "Long-run effects", &long_run)?;
    emit(
        QLR_CSV,
        "Structural breaks (sup-F, 15% trimming)",
        &qlr_table(&surveys, &mut OnFailure::Note(&mut notes))?,
    )?;

    if !notes.is_empty() {
        let _ = writeln!(report, "\nNotes");
        for n in &notes {
            let _ = writeln!(report, "- {n}");
        }
    }
    files.push(write_file(&out_dir.join(REPORT_TXT), |w| {
        Ok(w.write_all(report.as_bytes())?)
    })?);
    Ok(StageOutput { files, notes })
}
