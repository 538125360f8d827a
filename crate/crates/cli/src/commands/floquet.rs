use std::f64::consts::TAU;
use std::path::PathBuf;

use clap::Args;
use mifr::floquet::{avoided_crossing_gap, resonance_frequencies, DrivenTwoLevel};
use serde::{Deserialize, Serialize};

use super::load_registry;
use crate::config::required;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceArgs {
    /// Molecular-state energy relative to threshold in Hz; negative is bound.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Registry state label, e.g. 4g(4); needs --field.
    #[arg(long)]
    pub state: Option<String>,
    /// Magnetic field in G for --state.
    #[arg(long)]
    pub field: Option<f64>,
    /// Molecular registry TOML [default: built-in cesium states].
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Highest |m| listed [default: 3].
    #[arg(long)]
    pub max_order: Option<u32>,
}

#[derive(Serialize)]
pub struct ResonanceRow {
    energy_hz: f64,
    order_m: i32,
    frequency_hz: f64,
    bound: bool,
}

fn state_energy(
    energy: Option<f64>,
    state: Option<&str>,
    field: Option<f64>,
    registry: Option<&PathBuf>,
    section: &str,
) -> CliResult<f64> {
    match (energy, state) {
        (Some(e), None) => Ok(e),
        (None, Some(label)) => {
            let b = required(field, "field", section)?;
            Ok(load_registry(registry)?.energy(label, b)?)
        }
        (Some(_), Some(_)) => Err(CliError::usage("give either --energy or --state, not both")),
        (None, None) => required(None, "energy", section),
    }
}

pub fn resonances(args: ResonanceArgs) -> CliResult<Vec<ResonanceRow>> {
    let e = state_energy(args.energy, args.state.as_deref(), args.field, args.registry.as_ref(), "resonances")?;
    let list = resonance_frequencies(-TAU * e, args.max_order.unwrap_or(3))?;
    Ok(list
        .into_iter()
        .map(|r| ResonanceRow { energy_hz: e, order_m: r.m, frequency_hz: r.omega / TAU, bound: e < 0.0 })
        .collect())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapArgs {
    /// Molecular-state energy relative to threshold in Hz; negative is bound.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Registry state label; needs --field.
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub field: Option<f64>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Bare coupling Ω/2π in Hz.
    #[arg(long)]
    pub rabi: Option<f64>,
    /// Modulation amplitude A/2π in Hz.
    #[arg(long, allow_negative_numbers = true)]
    pub amplitude: Option<f64>,
    /// Resonance order |m|; comma-separated for several rows [default: 1].
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub order: Vec<u32>,
    /// Width of the modulation-frequency scan in Hz [default: 10% of the resonance frequency].
    #[arg(long)]
    pub window: Option<f64>,
}

#[derive(Serialize)]
pub struct GapRow {
    order_m: i32,
    center_hz: f64,
    gap_hz: f64,
    rwa_gap_hz: f64,
    relative_difference: f64,
}

pub fn gap(args: GapArgs) -> CliResult<Vec<GapRow>> {
    let section = "floquet-gap";
    let e = state_energy(args.energy, args.state.as_deref(), args.field, args.registry.as_ref(), section)?;
    let rabi = required(args.rabi, "rabi", section)?;
    let amplitude = required(args.amplitude, "amplitude", section)?;
    let orders = if args.order.is_empty() { vec![1] } else { args.order };
    let omega_b = -TAU * e;
    orders
        .into_iter()
        .map(|k| {
            if k == 0 {
                return Err(CliError::usage("order must be at least 1"));
            }
            let m = -(omega_b.signum() as i32) * k as i32;
            let expected = omega_b.abs() / f64::from(k);
            let window = args.window.map_or(0.1 * expected, |w| TAU * w);
            let model = DrivenTwoLevel::from_detuning(omega_b, TAU * rabi, TAU * amplitude, expected);
            let g = avoided_crossing_gap(&model, m, window)?;
            Ok(GapRow {
                order_m: m,
                center_hz: g.center / TAU,
                gap_hz: g.gap / TAU,
                rwa_gap_hz: g.rwa_gap / TAU,
                relative_difference: if g.rwa_gap > 0.0 { (g.gap - g.rwa_gap) / g.rwa_gap } else { f64::NAN },
            })
        })
        .collect()
}
