//! Table and report writers. Numbers are printed in Rust's shortest
//! round-trip form, which never depends on the locale.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

fn io_err(path: Option<&Path>, e: impl std::fmt::Display) -> CliError {
    let what = path.map(|p| p.display().to_string()).unwrap_or_else(|| "stdout".into());
    CliError::usage(format!("cannot write {what}: {e}"))
}

pub fn open(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(|e| io_err(Some(p), e))?;
            }
            Box::new(BufWriter::new(File::create(p).map_err(|e| io_err(Some(p), e))?))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

#[derive(Serialize)]
struct Envelope<'a, T> {
    schema_version: u32,
    command: &'a str,
    rows: &'a [T],
}

/// CSV starts with a `# schema_version` comment line; JSON wraps the rows
/// in an envelope carrying the version and command name.
pub fn write_table<T: Serialize>(command: &str, rows: &[T], format: Format, path: Option<&Path>) -> CliResult<()> {
    let mut out = open(path)?;
    let err = |e: &dyn std::fmt::Display| io_err(path, e);
    match format {
        Format::Csv => {
            writeln!(out, "# schema_version: {SCHEMA_VERSION}").map_err(|e| err(&e))?;
            let mut w = csv::Writer::from_writer(&mut out);
            for r in rows {
                w.serialize(r).map_err(|e| err(&e))?;
            }
            w.flush().map_err(|e| err(&e))?;
        }
        Format::Json => {
            let env = Envelope { schema_version: SCHEMA_VERSION, command, rows };
            serde_json::to_writer_pretty(&mut out, &env).map_err(|e| err(&e))?;
            writeln!(out).map_err(|e| err(&e))?;
        }
    }
    out.flush().map_err(|e| err(&e))
}

pub fn write_json<T: Serialize>(value: &T, path: Option<&Path>) -> CliResult<()> {
    let mut out = open(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| io_err(path, e))?;
    writeln!(out).and_then(|_| out.flush()).map_err(|e| io_err(path, e))
}

pub fn write_text(text: &str, path: Option<&Path>) -> CliResult<()> {
    let mut out = open(path)?;
    out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| io_err(path, e))
}
