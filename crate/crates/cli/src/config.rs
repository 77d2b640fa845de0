//! Flat TOML config whose keys mirror the long flag names. Explicit flags win.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;

use crate::error::{CliError, CliResult, EXIT_MALFORMED};

/// Every key any subcommand reads; anything else in the file is rejected.
const KNOWN_KEYS: &[&str] = &[
    "out", "jobs", "seed", "zero_floor", "sl_check", "j", "delta", "d", "verify_ed", "steps",
    "delta_min", "delta_max", "points", "depths", "gnuplot", "refine_tol", "bracket",
];

#[derive(Debug, Default)]
pub struct Config {
    table: toml::Table,
}

impl Config {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::invalid(format!("reading config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::new(e.code, format!("{}: {}", path.display(), e)))
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let raw: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| CliError::new(EXIT_MALFORMED, e.to_string()))?;
        let mut table = toml::Table::new();
        for (k, v) in raw {
            let key = k.replace('-', "_");
            if v.is_table() {
                return Err(CliError::new(EXIT_MALFORMED, format!("config must be flat; `{k}` is a table")));
            }
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(CliError::new(EXIT_MALFORMED, format!("unknown config key `{k}`")));
            }
            table.insert(key, v);
        }
        Ok(Config { table })
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> CliResult<Option<T>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(v) => v
                .clone()
                .try_into()
                .map(Some)
                .map_err(|e| CliError::new(EXIT_MALFORMED, format!("config key `{key}`: {e}"))),
        }
    }

    /// Flag if given, else config value, else `default`.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str, default: T) -> CliResult<T> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    /// Like [`Config::pick`] for switches: a set flag wins, else the config value.
    pub fn switch(&self, flag: bool, key: &str) -> CliResult<bool> {
        Ok(flag || self.get(key)?.unwrap_or(false))
    }
}
