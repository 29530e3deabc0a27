mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mediasent::pipeline::CONFIG_ENV;

/// Media sentiment index construction and the time-series tests run on it.
#[derive(Debug, Parser)]
#[command(name = "mediasent", version)]
pub struct Cli {
    /// Configuration file.
    #[arg(long, global = true, env = CONFIG_ENV, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Overrides a configuration key, e.g. `--set tests.k_max=6`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,

    /// Seed for randomized steps; overrides `seed` in the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse batch files and keep the items matching a query.
    Ingest {
        /// Batch files or directories of batch files.
        #[arg(long = "in", required = true, num_args = 1..)]
        input: Vec<PathBuf>,
        /// File holding a Boolean query; all items are kept without one.
        #[arg(long)]
        query: Option<PathBuf>,
        #[arg(long, default_value = "corpus.csv")]
        out: PathBuf,
    },
    /// Count (and optionally write) the items of a corpus matching a query.
    Query {
        #[command(flatten)]
        query: QueryArg,
        /// Corpus CSV written by `ingest`.
        #[arg(long, required_unless_present = "input", conflicts_with = "input")]
        corpus: Option<PathBuf>,
        /// Batch files or directories instead of a corpus CSV.
        #[arg(long = "in", num_args = 1..)]
        input: Vec<PathBuf>,
        /// Writes the matching items as a corpus CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the classifier on labeled documents.
    Train {
        /// Labeled CSV with columns id,label,text.
        #[arg(long)]
        labels: PathBuf,
        /// Corpus whose vocabulary coverage is reported.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value = "model.bin")]
        model: PathBuf,
    },
    /// K-fold cross-validation of the classifier.
    Cv {
        /// Labeled CSV with columns id,label,text.
        #[arg(long, default_value = "labels.csv")]
        labels: PathBuf,
        /// Number of folds; defaults to `train.cv_folds`.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify every corpus item.
    Classify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, default_value = "classified.csv")]
        out: PathBuf,
    },
    /// Words most indicative of one class over another.
    TopWords {
        #[arg(long, default_value = "model.bin")]
        model: PathBuf,
        #[arg(long, default_value = "positive")]
        a: String,
        #[arg(long, default_value = "negative")]
        b: String,
        /// Defaults to `train.top_words`.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the monthly sentiment index and its subgroup variants.
    Index {
        #[arg(long)]
        classified: PathBuf,
        #[arg(long, default_value = "emsi.csv")]
        out: PathBuf,
        /// Comma-separated schemes; defaults to `index.subgroups`.
        #[arg(long, value_delimiter = ',')]
        subgroups: Option<Vec<String>>,
        /// CSV with columns outlet,locality.
        #[arg(long)]
        locality_table: Option<PathBuf>,
        /// Moving-average window; 0 disables it. Defaults to `index.ma_window`.
        #[arg(long)]
        ma: Option<usize>,
    },
    /// Series preparation.
    #[command(subcommand)]
    Prep(Prep),
    /// Granger causality between index measures and survey series.
    Granger {
        #[command(flatten)]
        tests: TestArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Contemporaneous regressions and long-run effects.
    Contemp {
        /// Survey series table.
        #[arg(long)]
        survey: PathBuf,
        /// Table with an `emsi` column.
        #[arg(long)]
        emsi: PathBuf,
        #[arg(long)]
        controls: Option<PathBuf>,
        #[arg(long)]
        kmax: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        long_run_out: Option<PathBuf>,
    },
    /// Sup-F test for an intercept shift at an unknown month.
    Qlr {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// How often each control's lags are significant in the survey equations.
    Summary {
        #[command(flatten)]
        tests: TestArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a synthetic fixture with known ground truth.
    Synth {
        #[arg(long)]
        out: PathBuf,
        /// TOML file with generator settings; built-in defaults otherwise.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Number of months.
        #[arg(long)]
        months: Option<u32>,
    },
    /// Run the whole pipeline, or one stage of it, from the configuration.
    Run {
        /// Run only this stage on the previous stages' artifacts.
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(mediasent::pipeline::STAGES))]
        stage: Option<String>,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct QueryArg {
    /// File holding the query.
    #[arg(long = "query")]
    pub file: Option<PathBuf>,
    /// Query text given inline.
    #[arg(long)]
    pub expr: Option<String>,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Table of cause candidates, e.g. `emsi.csv`.
    #[arg(long)]
    pub x: PathBuf,
    /// Table of effect candidates, e.g. `survey.csv`.
    #[arg(long)]
    pub y: PathBuf,
    /// Table of control variables.
    #[arg(long)]
    pub controls: Option<PathBuf>,
    /// Maximum lag depth; defaults to `tests.k_max`.
    #[arg(long)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Prep {
    /// Output gap: HP cycle of 100·log of quarterly GDP interpolated to months.
    Gap {
        #[arg(long)]
        gdp: PathBuf,
        /// Smoothing parameter; defaults to `tests.hp_lambda`.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Year-on-year percentage change.
    Yoy {
        #[command(flatten)]
        input: SeriesIn,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nominal series divided by a price index.
    Deflate {
        #[command(flatten)]
        input: SeriesIn,
        /// Price-index table.
        #[arg(long)]
        cpi: PathBuf,
        #[arg(long)]
        cpi_column: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Net balance of survey answer counts.
    Balance {
        /// CSV with columns period,a1,a2,a3,a4,a5,a6.
        #[arg(long)]
        waves: PathBuf,
        #[arg(long, default_value = "balance")]
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Augmented Dickey–Fuller tests on every column.
    Adf {
        #[arg(long = "in")]
        input: PathBuf,
        /// Defaults to `tests.adf_max_lag`.
        #[arg(long)]
        max_lag: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Subtract the regime means before and after a break month.
    Demean {
        #[command(flatten)]
        input: SeriesIn,
        /// First month of the second regime, `YYYY-MM`.
        #[arg(long = "break")]
        break_month: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct SeriesIn {
    /// Monthly series table.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Column to read; the first value column by default.
    #[arg(long)]
    pub column: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() {
                commands::EXIT_USAGE
            } else {
                0
            });
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
