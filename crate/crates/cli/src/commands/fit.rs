use std::fs::File;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mifr::spectra::{fit_fano, fit_landau_zener, fit_linear_shift, LzSample, ShiftSample, SpectraError, Spectrum};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::required;
use crate::error::{CliError, CliResult};
use crate::output::SCHEMA_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitModel {
    /// Fano profile on a spectrum (CSV or JSON as written by `scan`).
    Fano,
    /// Landau–Zener avoided crossing on CSV `b_g,energy_hz,branch`.
    Lz,
    /// Straight line on CSV `intensity,center[,sigma]`.
    Linear,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitArgs {
    #[arg(value_enum)]
    pub model: Option<FitModel>,
    /// Input data file.
    pub input: Option<PathBuf>,
    /// Fano fit window `lo,hi` in axis units [default: whole spectrum].
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default)]
    pub window: Vec<f64>,
}

#[derive(Serialize)]
struct Report {
    schema_version: u32,
    model: FitModel,
    input: String,
    converged: bool,
    #[serde(flatten)]
    body: Value,
}

fn read_rows<T: DeserializeOwned>(path: &Path) -> CliResult<Vec<T>> {
    let file = File::open(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(file);
    rdr.deserialize()
        .map(|r| {
            r.map_err(|e| {
                let line = e.position().map(|p| format!(" line {}", p.line())).unwrap_or_default();
                CliError::usage(format!("{}{line}: {e}", path.display()))
            })
        })
        .collect()
}

pub fn read_spectrum(path: &Path) -> CliResult<Spectrum> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        Spectrum::from_json_str(&text)
    } else {
        Spectrum::read_csv(text.as_bytes())
    };
    parsed.map_err(|e| CliError::usage(format!("{}: {e}", path.display())))
}

/// Fit report and whether the fit converged. A fit that ran out of
/// iterations still yields a report carrying its last parameters.
pub fn run(args: FitArgs) -> CliResult<(Value, bool)> {
    let model = required(args.model, "model", "fit")?;
    let input = required(args.input, "input", "fit")?;
    let result: Result<Value, SpectraError> = match model {
        FitModel::Fano => {
            let spec = read_spectrum(&input)?;
            if spec.is_empty() {
                return Err(CliError::usage(format!("{}: no data points", input.display())));
            }
            let window = match args.window.as_slice() {
                [] => (spec.points()[0].x, spec.points()[spec.len() - 1].x),
                [lo, hi] => (*lo, *hi),
                _ => return Err(CliError::usage("--window takes two values lo,hi")),
            };
            fit_fano(&spec, window, None).map(|f| serde_json::to_value(f).expect("fit serializes"))
        }
        FitModel::Lz => {
            let data: Vec<LzSample> = read_rows(&input)?;
            fit_landau_zener(&data, None).map(|f| serde_json::to_value(f).expect("fit serializes"))
        }
        FitModel::Linear => {
            let data: Vec<ShiftSample> = read_rows(&input)?;
            fit_linear_shift(&data).map(|f| serde_json::to_value(f).expect("fit serializes"))
        }
    };
    let (converged, body) = match result {
        Ok(body) => (true, body),
        Err(SpectraError::FitNotConverged { iterations, params }) => {
            (false, serde_json::json!({ "iterations": iterations, "last_parameters": params }))
        }
        Err(e) => return Err(e.into()),
    };
    let report = Report { schema_version: SCHEMA_VERSION, model, input: input.display().to_string(), converged, body };
    Ok((serde_json::to_value(report).expect("report serializes"), converged))
}
