//! The end-to-end workflow: ingest, train, classify, index, prep and tests.

mod config;
pub mod stages;

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::index::{read_locality_table, LocalityTable, SubgroupScheme};
use crate::io::Metadata;
use stages::{open, StageOutput};

pub use config::{
    apply_override, IndexSettings, Inputs, PipelineConfig, TestSettings, TrainSettings, CONFIG_ENV,
};

/// Stage names in execution order.
pub const STAGES: [&str; 6] = ["ingest", "train", "classify", "index", "prep", "tests"];

/// Seed for one consumer of randomness, derived from the run seed.
pub fn stage_seed(seed: u64, stage: &str) -> u64 {
    let id = STAGES
        .iter()
        .position(|s| *s == stage)
        .unwrap_or(STAGES.len()) as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id + 1);
    rng.next_u64()
}

pub fn metadata(cfg: &PipelineConfig) -> Metadata {
    Metadata::new(cfg.seed, cfg.hash())
}

/// Subgroup schemes named in the configuration.
pub fn schemes(cfg: &PipelineConfig) -> Result<Vec<SubgroupScheme>> {
    cfg.index
        .subgroups
        .iter()
        .map(|name| {
            Ok(match name.as_str() {
                "print_online" => SubgroupScheme::PrintOnline,
                "nationwide_local" => {
                    let table = match &cfg.inputs.localities {
                        Some(p) => {
                            let p = cfg.resolve(p);
                            read_locality_table(open(&p)?).map_err(|e| e.in_file(&p))?
                        }
                        None => LocalityTable::new(),
                    };
                    SubgroupScheme::NationwideLocal(table)
                }
                "frequent_infrequent" => SubgroupScheme::FrequentInfrequent(cfg.index.exemplars),
                other => return Err(Error::invalid(format!("unknown subgroup scheme `{other}`"))),
            })
        })
        .collect()
}

/// Runs one stage on the artifacts of the previous ones in the output
/// directory.
pub fn run_stage(cfg: &PipelineConfig, stage: &'static str) -> Result<StageOutput> {
    let meta = metadata(cfg);
    let out = cfg.resolve(&cfg.output_dir);
    let r = match stage {
        "ingest" => {
            let query = cfg
                .inputs
                .query
                .as_ref()
                .map(|q| stages::read_query_file(&cfg.resolve(q)))
                .transpose()?;
            let batches: Vec<PathBuf> = cfg.inputs.batches.iter().map(|b| cfg.resolve(b)).collect();
            stages::ingest(
                &batches,
                query.as_ref(),
                &out.join(stages::CORPUS_CSV),
                &meta,
            )
        }
        "train" => stages::train(
            &cfg.resolve(&cfg.inputs.labels),
            cfg.train.cv_folds,
            stage_seed(cfg.seed, "train"),
            cfg.train.top_words,
            &out,
            &meta,
        ),
        "classify" => stages::classify(
            &out.join(stages::CORPUS_CSV),
            &out.join(stages::MODEL_BIN),
            &out.join(stages::CLASSIFIED_CSV),
            &meta,
        ),
        "index" => stages::index(
            &out.join(stages::CLASSIFIED_CSV),
            &schemes(cfg)?,
            cfg.index.ma_window,
            &out.join(stages::EMSI_CSV),
            &meta,
        ),
        "prep" => stages::prep(
            &cfg.resolve(&cfg.inputs.macros),
            cfg.inputs.gdp.as_ref().map(|g| cfg.resolve(g)).as_deref(),
            cfg.tests.hp_lambda,
            &out.join(stages::MACRO_PREPARED_CSV),
            &meta,
        ),
        "tests" => stages::tests(
            &out.join(stages::EMSI_CSV),
            &cfg.resolve(&cfg.inputs.survey),
            &out.join(stages::MACRO_PREPARED_CSV),
            &cfg.tests.granger(),
            cfg.tests.adf_max_lag,
            &out,
            &meta,
        ),
        other => return Err(Error::invalid(format!("unknown stage `{other}`"))),
    };
    r.map_err(|e| e.in_stage(stage))
}

/// All stages in order; the first failure aborts with the stage's name.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Vec<(&'static str, StageOutput)>> {
    STAGES
        .iter()
        .map(|&s| Ok((s, run_stage(cfg, s)?)))
        .collect()
}
