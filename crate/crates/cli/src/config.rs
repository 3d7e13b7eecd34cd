//! Flag/config-file merging. A config file is plain `key = value` lines with
//! the same names as the long flags (dashes or underscores); explicit flags
//! win over file values.

use std::collections::HashMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};

#[derive(Debug, Default)]
pub struct FileConfig {
    map: HashMap<String, String>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> anyhow::Result<Self> {
        let mut map = HashMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("cannot read config file {}", path.display()))?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    bail!("config line {} is not `key = value`: {raw:?}", lineno + 1);
                };
                map.insert(key.trim().replace('_', "-"), value.trim().to_string());
            }
        }
        Ok(Self { map })
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(|s| s.as_str())
    }

    pub fn merge_f64(&self, flag: Option<f64>, key: &str) -> anyhow::Result<Option<f64>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|s| s.parse::<f64>().with_context(|| format!("config key {key}: bad float {s:?}")))
            .transpose()
    }

    pub fn merge_usize(&self, flag: Option<usize>, key: &str) -> anyhow::Result<Option<usize>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.get(key)
            .map(|s| s.parse::<usize>().with_context(|| format!("config key {key}: bad integer {s:?}")))
            .transpose()
    }

    pub fn merge_path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.get(key).map(PathBuf::from))
    }

    pub fn merge_bool(&self, flag: bool, key: &str) -> bool {
        if flag {
            return true;
        }
        matches!(self.get(key), Some("true") | Some("1") | Some("yes"))
    }
}

/// Compact float formatting for file names (`1e4` → `10000`, `0.5` → `0.5`).
pub fn tag(x: f64) -> String {
    format!("{x}")
}
