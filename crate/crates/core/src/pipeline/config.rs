use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::Exemplars;
use crate::io::short_hash;
use crate::regression::GrangerConfig;
use crate::series::MONTHLY_LAMBDA;

/// Environment variable naming the default configuration file.
pub const CONFIG_ENV: &str = "MEDIASENT_CONFIG";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    /// Batch files or directories of batch files.
    pub batches: Vec<PathBuf>,
    pub labels: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<PathBuf>,
    pub survey: PathBuf,
    pub macros: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gdp: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub localities: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainSettings {
    pub cv_folds: usize,
    pub top_words: usize,
}

impl Default for TrainSettings {
    fn default() -> Self {
        TrainSettings {
            cv_folds: 10,
            top_words: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IndexSettings {
    /// Any of `print_online`, `nationwide_local`, `frequent_infrequent`.
    pub subgroups: Vec<String>,
    pub ma_window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exemplars: Option<Exemplars>,
}

impl Default for IndexSettings {
    fn default() -> Self {
        IndexSettings {
            subgroups: vec![
                "print_online".into(),
                "nationwide_local".into(),
                "frequent_infrequent".into(),
            ],
            ma_window: 12,
            exemplars: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TestSettings {
    pub hp_lambda: f64,
    pub k_max: usize,
    pub bg_lags: usize,
    pub alpha: f64,
    /// Fixed HAC bandwidth; the automatic rule applies when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bandwidth: Option<usize>,
    pub adf_max_lag: usize,
}

impl Default for TestSettings {
    fn default() -> Self {
        let g = GrangerConfig::default();
        TestSettings {
            hp_lambda: MONTHLY_LAMBDA,
            k_max: g.k_max,
            bg_lags: g.bg_lags,
            alpha: g.alpha,
            bandwidth: None,
            adf_max_lag: 12,
        }
    }
}

impl TestSettings {
    pub fn granger(&self) -> GrangerConfig {
        GrangerConfig {
            k_max: self.k_max,
            bg_lags: self.bg_lags,
            alpha: self.alpha,
            bandwidth: self.bandwidth,
        }
    }
}

fn default_seed() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub output_dir: PathBuf,
    pub inputs: Inputs,
    #[serde(default)]
    pub train: TrainSettings,
    #[serde(default)]
    pub index: IndexSettings,
    #[serde(default)]
    pub tests: TestSettings,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// Sets `dotted.key = value` in a TOML table. The value is read as a TOML
/// literal when it parses as one and as a string otherwise.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::invalid(format!("override `{assignment}` is not key=value")))?;
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key present"),
        Err(_) => toml::Value::String(raw.to_string()),
    };
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::invalid(format!("bad override key `{key}`")));
    }
    let mut cur = table;
    for p in &parts[..parts.len() - 1] {
        cur = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| Error::invalid(format!("override key `{key}`: `{p}` is not a table")))?;
    }
    cur.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl PipelineConfig {
    /// Parses configuration text, applies overrides and records `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path, overrides: &[String]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::Format(format!("config: {e}")))?;
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut cfg: PipelineConfig = table
            .try_into()
            .map_err(|e: toml::de::Error| Error::Format(format!("config: {e}")))?;
        cfg.base_dir = base_dir.to_path_buf();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::from(e).in_file(path))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_toml(&text, &base, overrides).map_err(|e| e.in_file(path))
    }

    fn validate(&self) -> Result<()> {
        if self.inputs.batches.is_empty() {
            return Err(Error::invalid("inputs.batches is empty"));
        }
        if self.train.cv_folds < 2 {
            return Err(Error::invalid("train.cv_folds must be at least 2"));
        }
        for s in &self.index.subgroups {
            if !["print_online", "nationwide_local", "frequent_infrequent"].contains(&s.as_str()) {
                return Err(Error::invalid(format!("unknown subgroup scheme `{s}`")));
            }
        }
        if !(self.tests.hp_lambda >= 0.0)
            || !(0.0..1.0).contains(&self.tests.alpha)
            || self.tests.k_max == 0
        {
            return Err(Error::invalid(
                "tests: need hp_lambda ≥ 0, 0 < alpha < 1, k_max ≥ 1",
            ));
        }
        Ok(())
    }

    /// `p` relative to the configuration file.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn output(&self, name: &str) -> PathBuf {
        self.resolve(&self.output_dir).join(name)
    }

    /// Hash of the settings that determine the outputs. The output
    /// directory is left out so that reruns elsewhere match byte for byte.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        let text = toml::to_string(&c).expect("config serializes");
        short_hash(text.as_bytes())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TEXT: &str = r#"
seed = 7
output_dir = "out"

[inputs]
batches = ["batches"]
labels = "labels.csv"
survey = "survey.csv"
macros = "macro.csv"

[tests]
k_max = 6
"#;

    #[test]
    fn defaults_overrides_and_hash() {
        let c = PipelineConfig::from_toml(TEXT, Path::new("/data"), &[]).unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.tests.k_max, 6);
        assert_eq!(c.tests.bg_lags, 12);
        assert_eq!(c.train.cv_folds, 10);
        assert_eq!(c.output("emsi.csv"), Path::new("/data/out/emsi.csv"));

        let o = PipelineConfig::from_toml(
            TEXT,
            Path::new("/data"),
            &[
                "seed=9".into(),
                "tests.alpha=0.1".into(),
                "inputs.gdp=gdp_q.csv".into(),
            ],
        )
        .unwrap();
        assert_eq!(o.seed, 9);
        assert_eq!(o.tests.alpha, 0.1);
        assert_eq!(o.inputs.gdp.as_deref(), Some(Path::new("gdp_q.csv")));
        assert_ne!(o.hash(), c.hash());

        let moved =
            PipelineConfig::from_toml(TEXT, Path::new("/data"), &["output_dir=elsewhere".into()])
                .unwrap();
        assert_eq!(moved.hash(), c.hash());
    }

    #[test]
    fn rejects_bad_config() {
        assert!(PipelineConfig::from_toml("seed = 1", Path::new("."), &[]).is_err());
        assert!(
            PipelineConfig::from_toml(TEXT, Path::new("."), &["tests.bogus=1".into()]).is_err()
        );
        assert!(PipelineConfig::from_toml(
            TEXT,
            Path::new("."),
            &["index.subgroups=[\"x\"]".into()]
        )
        .is_err());
        assert!(PipelineConfig::from_toml(TEXT, Path::new("."), &["novalue".into()]).is_err());
    }
}
