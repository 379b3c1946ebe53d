//! Run configuration: defaults, then the `BARFILL_CONFIG` file, then flags.

use std::path::{Path, PathBuf};

use barfill_core::{Error, Limits, Result};

pub const CONFIG_ENV: &str = "BARFILL_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub limits: Limits,
    pub seed: u64,
    pub format: Format,
    pub checkpoint: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            limits: Limits::default(),
            seed: 0,
            format: Format::Json,
            checkpoint: None,
            threads: None,
        }
    }
}

fn number(key: &str, value: &str) -> Result<u64> {
    value
        .replace('_', "")
        .parse()
        .map_err(|_| Error::Malformed(format!("config key `{key}` expects a number, got `{value}`")))
}

impl RunConfig {
    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let l = &mut self.limits;
        match key {
            "order_cap" => l.order_cap = number(key, value)?,
            "tuple_cap" => l.tuple_cap = number(key, value)?,
            "nnz_cap" => l.nnz_cap = number(key, value)?,
            "census_cap" => l.census_cap = number(key, value)?,
            "node_budget" | "budget" => l.node_budget = number(key, value)?,
            "weight_ceiling" => l.weight_ceiling = number(key, value)? as usize,
            "seed" => self.seed = number(key, value)?,
            "threads" => self.threads = Some(number(key, value)? as usize),
            "checkpoint" => self.checkpoint = Some(PathBuf::from(value)),
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(Error::Malformed(format!("unknown output format `{value}`"))),
                }
            }
            _ => return Err(Error::Malformed(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Settings from `key = value` lines; `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Malformed(format!("config line {}: expected key = value", no + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Precondition(format!("cannot read config {}: {e}", path.display())))?;
        self.apply_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.limits.validate()?;
        if self.threads == Some(0) {
            return Err(Error::Precondition("threads must be positive".into()));
        }
        Ok(())
    }
}
