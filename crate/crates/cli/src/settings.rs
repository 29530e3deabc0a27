use std::fs;
use std::path::Path;

use anyhow::Result;
use serde::{Deserialize, Serialize};

use mediasent::io::{short_hash, Metadata};
use mediasent::pipeline::{apply_override, IndexSettings, TestSettings, TrainSettings};

use crate::commands::UsageError;
use crate::Cli;

/// The tunable part of a configuration. Single-step commands read their
/// defaults from here; input paths only matter to `run`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct Settings {
    pub seed: u64,
    pub train: TrainSettings,
    pub index: IndexSettings,
    pub tests: TestSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: 1,
            train: TrainSettings::default(),
            index: IndexSettings::default(),
            tests: TestSettings::default(),
        }
    }
}

impl Settings {
    pub fn load(cli: &Cli) -> Result<Self> {
        let mut table = match &cli.config {
            Some(path) => read_table(path)?,
            None => toml::Table::new(),
        };
        for o in &cli.overrides {
            apply_override(&mut table, o).map_err(|e| UsageError(e.to_string()))?;
        }
        table.remove("inputs");
        table.remove("output_dir");
        let mut settings: Settings = table
            .try_into()
            .map_err(|e: toml::de::Error| UsageError(format!("configuration: {e}")))?;
        if let Some(seed) = cli.seed {
            settings.seed = seed;
        }
        Ok(settings)
    }

    pub fn metadata(&self) -> Metadata {
        let text = toml::to_string(self).expect("settings serialize");
        Metadata::new(self.seed, short_hash(text.as_bytes()))
    }
}

pub fn read_table(path: &Path) -> Result<toml::Table> {
    let text =
        fs::read_to_string(path).map_err(|e| UsageError(format!("{}: {e}", path.display())))?;
    Ok(text
        .parse()
        .map_err(|e: toml::de::Error| UsageError(format!("{}: {e}", path.display())))?)
}

/// Overlays `top` onto `base`, descending into tables present in both.
pub fn merge(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => merge(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_is_recursive() {
        let mut base: toml::Table = "a = 1\n[t]\nx = 1\ny = 2\n".parse().unwrap();
        merge(&mut base, "b = 3\n[t]\ny = 5\n".parse().unwrap());
        assert_eq!(base.to_string(), "a = 1\nb = 3\n\n[t]\nx = 1\ny = 5\n");
    }
}
