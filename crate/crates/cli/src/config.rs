//! Run configuration: a TOML file with one table per subcommand, overridden
//! key by key by command-line flags.
//!
//! ```toml
//! species = "cs.toml"
//!
//! [fictitious-field]
//! intensity = [0.87]
//! detuning = -23e9
//! pol = "sigma-minus"
//! ```
//!
//! Keys match the long flag names with `-` written as `_`. Paths are
//! relative to the working directory. Besides `species`, the top level may
//! set `output`, `format` and `seed`; a `seed` there applies to every
//! command that draws noise unless its own table or flag sets one.

use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};
use crate::output::Format;

#[derive(Debug, Default)]
pub struct RunConfig {
    pub species: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    sections: Map<String, Value>,
    source: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| {
            let line = e.span().map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1);
            CliError::usage(format!(
                "{}{}: {}",
                path.display(),
                line.map(|l| format!(" line {l}")).unwrap_or_default(),
                e.message()
            ))
        })?;
        let mut config = RunConfig { source: Some(path.to_path_buf()), ..RunConfig::default() };
        for (key, value) in table {
            match (key.as_str(), value) {
                ("species", toml::Value::String(s)) => config.species = Some(PathBuf::from(s)),
                ("output", toml::Value::String(s)) => config.output = Some(PathBuf::from(s)),
                ("format", toml::Value::String(s)) => {
                    config.format = Some(Format::from_str(&s, false).map_err(|_| {
                        CliError::usage(format!("{}: format must be csv or json, got `{s}`", path.display()))
                    })?)
                }
                ("seed", toml::Value::Integer(n)) => {
                    config.seed = Some(u64::try_from(n).map_err(|_| {
                        CliError::usage(format!("{}: seed must be a non-negative integer", path.display()))
                    })?)
                }
                (_, toml::Value::Table(t)) => {
                    let json = serde_json::to_value(t).map_err(|e| CliError::usage(e.to_string()))?;
                    config.sections.insert(key, json);
                }
                ("species" | "output" | "format" | "seed", _) => {
                    return Err(CliError::usage(format!("{}: top-level `{key}` has the wrong type", path.display())))
                }
                _ => return Err(CliError::usage(format!("{}: unknown top-level key `{key}`", path.display()))),
            }
        }
        Ok(config)
    }

    /// Flags on top of the `[section]` table. Unset flags (`None`, empty
    /// lists) fall through to the file; keys the command does not know are
    /// rejected.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, section: &str, flags: &T) -> CliResult<T> {
        let mut merged = match self.sections.get(section) {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        };
        let Value::Object(set) = serde_json::to_value(flags).map_err(|e| CliError::usage(e.to_string()))? else {
            unreachable!("argument structs serialize to objects");
        };
        for (k, v) in set {
            let unset = v.is_null() || v.as_array().is_some_and(|a| a.is_empty());
            if !unset {
                merged.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| {
            let origin = self.source.as_ref().map(|p| format!("{} ", p.display())).unwrap_or_default();
            CliError::usage(format!("{origin}[{section}]: {e}"))
        })
    }
}

/// Unwraps a value that may come from a flag or the config file.
pub fn required<T>(value: Option<T>, flag: &str, section: &str) -> CliResult<T> {
    value.ok_or_else(|| {
        CliError::usage(format!(
            "missing --{flag} (or `{}` in [{section}] of the config)\n\nFor more information, try 'mifr {section} --help'.",
            flag.replace('-', "_")
        ))
    })
}

impl RunConfig {
    /// Rejects tables that name no subcommand.
    pub fn check_sections(&self, known: &[&str]) -> CliResult<()> {
        match self.sections.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(CliError::usage(format!("config table [{k}] matches no subcommand"))),
            None => Ok(()),
        }
    }
}
