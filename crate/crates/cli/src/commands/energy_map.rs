use std::path::PathBuf;

use clap::Args;
use mifr::spectra::{assemble_energy_map, process_scans, Association, PeakProcessing, Spectrum};
use serde::{Deserialize, Serialize};

use super::fit::read_spectrum;
use super::load_registry;
use crate::config::required;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnergyMapArgs {
    /// Directory of spectrum JSON files written by `scan`; each needs the
    /// field and intensity in its metadata.
    pub dir: Option<PathBuf>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Highest order tried when labelling peaks [default: 3].
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Minimum dip depth 1 − N/N₀ [default: 0.1].
    #[arg(long)]
    pub min_depth: Option<f64>,
    /// Minimum distance between dips in Hz [default: 10e3].
    #[arg(long)]
    pub min_separation: Option<f64>,
    /// Half width of each Fano fit window in Hz [default: 6e3].
    #[arg(long)]
    pub fit_half_window: Option<f64>,
    /// Centers closer than this (Hz) across intensities are one resonance [default: 8e3].
    #[arg(long)]
    pub match_window: Option<f64>,
}

#[derive(Serialize)]
pub struct MapRow {
    b_g: f64,
    frequency_hz: f64,
    frequency_err_hz: f64,
    omega_res_hz: Option<f64>,
    order_m: Option<i32>,
    state: Option<String>,
    bound: Option<bool>,
    association: Association,
    /// `label:order` pairs within tolerance, best first, `;`-separated.
    candidates: String,
}

/// Rows plus the number of ambiguous ones.
pub fn run(args: EnergyMapArgs) -> CliResult<(Vec<MapRow>, usize)> {
    let dir = required(args.dir, "dir", "energy-map")?;
    let entries =
        std::fs::read_dir(&dir).map_err(|e| CliError::usage(format!("cannot read {}: {e}", dir.display())))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::usage(format!("{} holds no spectrum JSON files", dir.display())));
    }
    let scans = files
        .iter()
        .map(|p| {
            let spec: Spectrum = read_spectrum(p)?;
            let meta = &spec.metadata;
            let (Some(b), Some(i)) = (meta.fixed_value, meta.intensity) else {
                return Err(CliError::usage(format!("{}: metadata needs fixed_value and intensity", p.display())));
            };
            Ok((b, spec, i))
        })
        .collect::<CliResult<Vec<_>>>()?;
    let opts = PeakProcessing {
        min_depth: args.min_depth.unwrap_or(0.1),
        min_separation: args.min_separation.unwrap_or(10e3),
        fit_half_window: args.fit_half_window.unwrap_or(6e3),
        match_window: args.match_window.unwrap_or(8e3),
    };
    let peaks = process_scans(&scans, &opts)?;
    let registry = load_registry(args.registry.as_ref())?;
    let map = assemble_energy_map(&peaks, &registry, args.max_order.unwrap_or(3))?;
    let ambiguous = map.iter().filter(|p| p.association == Association::Ambiguous).count();
    let rows = map
        .into_iter()
        .map(|p| MapRow {
            b_g: p.b_g,
            frequency_hz: p.frequency_hz,
            frequency_err_hz: p.frequency_err_hz,
            omega_res_hz: p.omega_res_hz,
            order_m: p.order_m,
            state: p.state_label,
            bound: p.bound,
            association: p.association,
            candidates: p.candidates.iter().map(|c| format!("{}:{}", c.state, c.order)).collect::<Vec<_>>().join(";"),
        })
        .collect();
    Ok((rows, ambiguous))
}
