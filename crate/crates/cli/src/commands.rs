use std::fmt;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Result;

use mediasent::corpus::{parse_query, read_corpus_csv, write_corpus_csv, Corpus};
use mediasent::index::{read_locality_table, LocalityTable, SubgroupScheme};
use mediasent::io::{short_hash, Metadata};
use mediasent::nb::{cross_validate, read_model, train_on_tokens, write_model, SentimentClass};
use mediasent::period::Month;
use mediasent::pipeline::stages::{
    self, adf_table, contemp_tables, create, emsi_measures, granger_battery, granger_run_table,
    named, open, output_gap, qlr_table, summary_run_table, write_cv_csv, write_top_words_csv,
    OnFailure, StageOutput,
};
use mediasent::pipeline::{run_pipeline, run_stage, stage_seed, PipelineConfig, STAGES};
use mediasent::regression::Table;
use mediasent::series::{
    deflate, read_quarterly_csv, read_series_table, read_waves_csv, regime_demean, survey_balance,
    write_series_csv, yoy_pct_change, MonthlySeries,
};
use mediasent::synth::{generate_synthetic, SyntheticSpec};
use mediasent::text::vectorize;

use crate::settings::{merge, read_table, Settings};
use crate::{Cli, Command, Prep, SeriesIn, TestArgs};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_DATA: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

/// A problem with how the program was invoked rather than with the data.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(err) = cause.downcast_ref::<mediasent::Error>() {
            return if err.is_numeric() {
                EXIT_NUMERIC
            } else {
                EXIT_DATA
            };
        }
    }
    EXIT_DATA
}

fn report(out: &StageOutput) {
    for n in &out.notes {
        eprintln!("{n}");
    }
    for f in &out.files {
        eprintln!("wrote {}", f.display());
    }
}

/// Runs `f` on a buffered writer for `path`, or on stdout without one.
fn with_output(
    path: Option<&Path>,
    f: impl FnOnce(&mut dyn Write) -> mediasent::Result<()>,
) -> Result<()> {
    match path {
        Some(p) => {
            let mut w = create(p)?;
            f(&mut w).map_err(|e| e.in_file(p))?;
            w.flush()
                .map_err(|e| mediasent::Error::from(e).in_file(p))?;
            eprintln!("wrote {}", p.display());
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

/// CSV to `path`, or the aligned rendering on stdout.
fn emit_table(table: &Table, path: Option<&Path>, meta: &Metadata) -> Result<()> {
    match path {
        Some(_) => with_output(path, |w| table.write_csv(w, Some(meta))),
        None => {
            print!("{}", table.render());
            Ok(())
        }
    }
}

fn read_table_file(path: &Path) -> Result<Vec<(String, MonthlySeries)>> {
    Ok(read_series_table(open(path)?).map_err(|e| e.in_file(path))?)
}

fn read_column(input: &SeriesIn) -> Result<(String, MonthlySeries)> {
    let table = read_table_file(&input.input)?;
    let found = match &input.column {
        Some(c) => table.into_iter().find(|(n, _)| n == c),
        None => table.into_iter().next(),
    };
    found.ok_or_else(|| {
        mediasent::Error::Format(format!(
            "column `{}` not found",
            input.column.as_deref().unwrap_or("<first>")
        ))
        .in_file(&input.input)
        .into()
    })
}

fn write_series(
    name: &str,
    series: &MonthlySeries,
    out: Option<&Path>,
    meta: &Metadata,
) -> Result<()> {
    with_output(out, |w| write_series_csv(w, name, series, Some(meta)))
}

fn print_notes(notes: &[String]) {
    for n in notes {
        eprintln!("{n}");
    }
}

/// Index measures when the table is an index file, every column otherwise.
fn cause_table(path: &Path) -> Result<Vec<(String, MonthlySeries)>> {
    let table = read_table_file(path)?;
    Ok(if table.iter().any(|(n, _)| n == "emsi") {
        emsi_measures(table)
    } else {
        table
    })
}

fn optional_table(path: Option<&PathBuf>) -> Result<Vec<(String, MonthlySeries)>> {
    path.map(|p| read_table_file(p))
        .transpose()
        .map(Option::unwrap_or_default)
}

fn parse_class(s: &str) -> Result<SentimentClass> {
    s.parse()
        .map_err(|e: mediasent::Error| UsageError(e.to_string()).into())
}

fn subgroup_schemes(
    names: &[String],
    localities: Option<&Path>,
    settings: &Settings,
) -> Result<Vec<SubgroupScheme>> {
    names
        .iter()
        .filter(|n| !n.trim().is_empty())
        .map(|n| {
            Ok(match n.trim() {
                "print_online" => SubgroupScheme::PrintOnline,
                "nationwide_local" => {
                    let table = match localities {
                        Some(p) => read_locality_table(open(p)?).map_err(|e| e.in_file(p))?,
                        None => LocalityTable::new(),
                    };
                    SubgroupScheme::NationwideLocal(table)
                }
                "frequent_infrequent" => {
                    SubgroupScheme::FrequentInfrequent(settings.index.exemplars)
                }
                other => {
                    return Err(UsageError(format!("unknown subgroup scheme `{other}`")).into())
                }
            })
        })
        .collect()
}

pub fn run(cli: &Cli) -> Result<()> {
    if let Command::Run { stage } = &cli.command {
        return run_config(cli, stage.as_deref());
    }
    let settings = Settings::load(cli)?;
    let meta = settings.metadata();
    match &cli.command {
        Command::Ingest { input, query, out } => {
            let query = query.as_deref().map(stages::read_query_file).transpose()?;
            report(&stages::ingest(input, query.as_ref(), out, &meta)?);
        }
        Command::Query {
            query,
            corpus,
            input,
            out,
        } => {
            let q = match (&query.file, &query.expr) {
                (Some(f), _) => stages::read_query_file(f)?,
                (None, Some(e)) => parse_query(e)?,
                (None, None) => unreachable!("clap requires one of the two"),
            };
            let corpus = match corpus {
                Some(p) => Corpus::new(read_corpus_csv(open(p)?).map_err(|e| e.in_file(p))?)?,
                None => {
                    let (c, notes) = stages::load_corpus(input)?;
                    print_notes(&notes);
                    c
                }
            };
            let kept = corpus.filter(&q);
            println!("{} of {} items match", kept.len(), corpus.len());
            if let Some(p) = out {
                with_output(Some(p), |w| write_corpus_csv(w, kept.items(), Some(&meta)))?;
            }
        }
        Command::Train {
            labels,
            corpus,
            model,
        } => {
            let docs = stages::read_labeled_tokens(labels)?;
            let (nb, warnings) = train_on_tokens(&docs)?;
            print_notes(&warnings);
            with_output(Some(model), |w| write_model(w, &nb, &meta.line()))?;
            eprintln!(
                "{} documents, vocabulary of {} words",
                docs.len(),
                nb.vocabulary().len()
            );
            if let Some(p) = corpus {
                let items = read_corpus_csv(open(p)?).map_err(|e| e.in_file(p))?;
                let (mut known, mut total) = (0usize, 0usize);
                for item in &items {
                    let v = vectorize(&item.tokens(), nb.vocabulary());
                    known += v.in_vocab();
                    total += v.total();
                }
                let share = if total == 0 {
                    0.0
                } else {
                    known as f64 / total as f64
                };
                println!(
                    "corpus tokens covered by the vocabulary: {:.2}% of {total}",
                    100.0 * share
                );
            }
        }
        Command::Cv { labels, k, out } => {
            let docs = stages::read_labeled_tokens(labels)?;
            let k = k.unwrap_or(settings.train.cv_folds);
            let cv = cross_validate(&docs, k, stage_seed(settings.seed, "train"))?;
            print_notes(&cv.warnings);
            eprintln!("{k}-fold cross-validated accuracy {:.4}", cv.accuracy);
            with_output(out.as_deref(), |w| write_cv_csv(w, &cv, Some(&meta)))?;
        }
        Command::Classify { model, corpus, out } => {
            report(&stages::classify(corpus, model, out, &meta)?)
        }
        Command::TopWords {
            model,
            a,
            b,
            n,
            out,
        } => {
            let (a, b) = (parse_class(a)?, parse_class(b)?);
            let (nb, _) = read_model(open(model)?).map_err(|e| e.in_file(model))?;
            let n = n.unwrap_or(settings.train.top_words);
            with_output(out.as_deref(), |w| {
                write_top_words_csv(w, &nb, &[(a, b)], n, Some(&meta))
            })?;
        }
        Command::Index {
            classified,
            out,
            subgroups,
            locality_table,
            ma,
        } => {
            let names = subgroups.as_ref().unwrap_or(&settings.index.subgroups);
            let schemes = subgroup_schemes(names, locality_table.as_deref(), &settings)?;
            let ma = ma.unwrap_or(settings.index.ma_window);
            report(&stages::index(classified, &schemes, ma, out, &meta)?);
        }
        Command::Prep(p) => prep(p, &settings, &meta)?,
        Command::Granger { tests, out } => {
            let results = battery(tests, &settings)?;
            emit_table(&granger_run_table(&results), out.as_deref(), &meta)?;
        }
        Command::Summary { tests, out } => {
            let controls = optional_table(tests.controls.as_ref())?;
            let names: Vec<&str> = controls.iter().map(|(n, _)| n.as_str()).collect();
            let results = battery(tests, &settings)?;
            let table = summary_run_table(&results, &names, settings.tests.alpha)?;
            emit_table(&table, out.as_deref(), &meta)?;
        }
        Command::Contemp {
            survey,
            emsi,
            controls,
            kmax,
            out,
            long_run_out,
        } => {
            let measures = read_table_file(emsi)?;
            let main = measures
                .iter()
                .find(|(n, _)| n == "emsi")
                .map(|(_, s)| s)
                .ok_or_else(|| mediasent::Error::Format("no `emsi` column".into()).in_file(emsi))?;
            let surveys = read_table_file(survey)?;
            let controls = optional_table(controls.as_ref())?;
            let mut cfg = settings.tests.granger();
            if let Some(k) = kmax {
                cfg.k_max = *k;
            }
            let (surveys, controls) = (named(&surveys), named(&controls));
            let granger = granger_battery(
                &[("emsi", main)],
                &surveys,
                &controls,
                &cfg,
                &mut OnFailure::Abort,
            )?;
            let (fits, long_run) = contemp_tables(
                main,
                &surveys,
                &controls,
                &granger,
                &cfg,
                &mut OnFailure::Abort,
            )?;
            emit_table(&fits, out.as_deref(), &meta)?;
            emit_table(&long_run, long_run_out.as_deref(), &meta)?;
        }
        Command::Qlr { series, out } => {
            let table = read_table_file(series)?;
            let qlr = qlr_table(&named(&table), &mut OnFailure::Abort)?;
            emit_table(&qlr, out.as_deref(), &meta)?;
        }
        Command::Synth { out, spec, months } => {
            let mut table =
                toml::Table::try_from(SyntheticSpec::default()).expect("spec serializes");
            if let Some(p) = spec {
                merge(&mut table, read_table(p)?);
            }
            let mut spec: SyntheticSpec = table
                .try_into()
                .map_err(|e: toml::de::Error| UsageError(format!("synthetic spec: {e}")))?;
            if let Some(seed) = cli.seed {
                spec.seed = seed;
            }
            if let Some(m) = months {
                spec.corpus.months = *m as usize;
            }
            let fx = generate_synthetic(&spec)?;
            let text = toml::to_string(&spec).expect("spec serializes");
            fx.write_to(out, &Metadata::new(spec.seed, short_hash(text.as_bytes())))
                .map_err(|e| e.in_file(out))?;
            eprintln!(
                "{} items ({} on topic) over {} months, {} labeled documents; truth in {}",
                fx.truth.items,
                fx.truth.on_topic_items,
                fx.truth.months,
                fx.labels.len(),
                out.join("truth.json").display()
            );
        }
        Command::Run { .. } => unreachable!("handled above"),
    }
    Ok(())
}

fn battery(tests: &TestArgs, settings: &Settings) -> Result<stages::GrangerRun> {
    let xs = cause_table(&tests.x)?;
    let ys = read_table_file(&tests.y)?;
    let controls = optional_table(tests.controls.as_ref())?;
    let mut cfg = settings.tests.granger();
    if let Some(k) = tests.kmax {
        cfg.k_max = k;
    }
    Ok(granger_battery(
        &named(&xs),
        &named(&ys),
        &named(&controls),
        &cfg,
        &mut OnFailure::Abort,
    )?)
}

fn prep(p: &Prep, settings: &Settings, meta: &Metadata) -> Result<()> {
    match p {
        Prep::Gap { gdp, lambda, out } => {
            let q = read_quarterly_csv(open(gdp)?).map_err(|e| e.in_file(gdp))?;
            let gap = output_gap(&q, lambda.unwrap_or(settings.tests.hp_lambda))
                .map_err(|e| e.in_file(gdp))?;
            write_series("gdp_gap", &gap, out.as_deref(), meta)
        }
        Prep::Yoy { input, out } => {
            let (name, s) = read_column(input)?;
            write_series(&name, &yoy_pct_change(&s)?, out.as_deref(), meta)
        }
        Prep::Deflate {
            input,
            cpi,
            cpi_column,
            out,
        } => {
            let (name, s) = read_column(input)?;
            let (_, price) = read_column(&SeriesIn {
                input: cpi.clone(),
                column: cpi_column.clone(),
            })?;
            write_series(&name, &deflate(&s, &price)?, out.as_deref(), meta)
        }
        Prep::Balance { waves, name, out } => {
            let w = read_waves_csv(open(waves)?).map_err(|e| e.in_file(waves))?;
            let balance = survey_balance(&w).map_err(|e| e.in_file(waves))?;
            write_series(name, &balance, out.as_deref(), meta)
        }
        Prep::Adf {
            input,
            max_lag,
            out,
        } => {
            let table = read_table_file(input)?;
            let max_lag = max_lag.unwrap_or(settings.tests.adf_max_lag);
            let adf = adf_table(&named(&table), max_lag, &mut OnFailure::Abort)?;
            emit_table(&adf, out.as_deref(), meta)
        }
        Prep::Demean {
            input,
            break_month,
            out,
        } => {
            let month: Month = break_month
                .parse()
                .map_err(|e: mediasent::Error| UsageError(e.to_string()))?;
            let (name, s) = read_column(input)?;
            write_series(&name, &regime_demean(&s, month)?, out.as_deref(), meta)
        }
    }
}

fn run_config(cli: &Cli, stage: Option<&str>) -> Result<()> {
    let path = cli.config.as_ref().ok_or_else(|| {
        UsageError(format!(
            "`run` needs a configuration: pass --config or set {}",
            mediasent::pipeline::CONFIG_ENV
        ))
    })?;
    let mut overrides = cli.overrides.clone();
    if let Some(seed) = cli.seed {
        overrides.push(format!("seed={seed}"));
    }
    let cfg = PipelineConfig::load(path, &overrides).map_err(|e| UsageError(e.to_string()))?;
    match stage {
        Some(name) => {
            let name = STAGES
                .iter()
                .find(|s| **s == name)
                .expect("validated by clap");
            report(&run_stage(&cfg, name)?);
        }
        None => {
            for (name, out) in run_pipeline(&cfg)? {
                eprintln!("[{name}]");
                report(&out);
            }
        }
    }
    Ok(())
}
