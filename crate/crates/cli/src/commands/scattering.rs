use std::f64::consts::TAU;

use clap::Args;
use mifr::scattering::{dressed_alpha_beta, scattering_length, DressedChannelModel, KTerm, ResonanceModel};
use serde::{Deserialize, Serialize};

use crate::config::required;
use crate::error::{CliError, CliResult};

/// Explicit modulation frequencies, or an evenly spaced grid.
fn frequency_grid(
    freq: &[f64],
    from: Option<f64>,
    to: Option<f64>,
    points: Option<usize>,
    section: &str,
) -> CliResult<Vec<f64>> {
    if !freq.is_empty() {
        return Ok(freq.to_vec());
    }
    let lo = required(from, "from", section)?;
    let hi = required(to, "to", section)?;
    let n = points.unwrap_or(201);
    if n < 2 || !(hi > lo) {
        return Err(CliError::usage(format!("need --to > --from and --points >= 2 in [{section}]")));
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LengthArgs {
    /// Background scattering length in Bohr radii.
    #[arg(long, allow_negative_numbers = true)]
    pub a_bk: Option<f64>,
    /// Resonance width Δ_m/2π in Hz.
    #[arg(long, allow_negative_numbers = true)]
    pub width: Option<f64>,
    /// Resonance position ω₀/2π in Hz.
    #[arg(long, allow_negative_numbers = true)]
    pub position: Option<f64>,
    /// Drive order m (nonzero).
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<i32>,
    /// Modulation frequencies in Hz, comma-separated.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub freq: Vec<f64>,
    /// Grid start in Hz (with --to and --points).
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    /// Grid size [default: 201].
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Serialize)]
pub struct LengthRow {
    frequency_hz: f64,
    a_s_bohr: f64,
}

pub fn length(args: LengthArgs) -> CliResult<Vec<LengthRow>> {
    let section = "scattering-length";
    let model = ResonanceModel {
        a_bk: required(args.a_bk, "a-bk", section)?,
        delta_m: TAU * required(args.width, "width", section)?,
        omega0: TAU * required(args.position, "position", section)?,
        m: required(args.order, "order", section)?,
    };
    let grid = frequency_grid(&args.freq, args.from, args.to, args.points, section)?;
    grid.into_iter().map(|f| Ok(LengthRow { frequency_hz: f, a_s_bohr: scattering_length(&model, TAU * f)? })).collect()
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DressedArgs {
    /// Background scattering length in Bohr radii.
    #[arg(long, allow_negative_numbers = true)]
    pub a_bk: Option<f64>,
    /// Resonance width Δ_m/2π in Hz.
    #[arg(long)]
    pub width: Option<f64>,
    /// Inelastic coupling γ/2π in Hz.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Molecular-state energy relative to threshold in Hz; negative is bound.
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Resonance shift δω_m/2π in Hz [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    /// Resonance order |m| [default: 1].
    #[arg(long)]
    pub order: Option<u32>,
    /// Collisional wavenumber in 1/m [default: 1e5].
    #[arg(long)]
    pub k: Option<f64>,
    /// Reduced mass in kg; adds the collision energy ħk²/2μ to the detuning.
    #[arg(long)]
    pub reduced_mass: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub freq: Vec<f64>,
    #[arg(long)]
    pub from: Option<f64>,
    #[arg(long)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Serialize)]
pub struct DressedRow {
    frequency_hz: f64,
    alpha_bohr: f64,
    beta_bohr: f64,
}

pub fn dressed(args: DressedArgs) -> CliResult<Vec<DressedRow>> {
    let section = "dressed";
    let omega_b = -TAU * required(args.energy, "energy", section)?;
    let order = args.order.unwrap_or(1);
    if order == 0 {
        return Err(CliError::usage("order must be at least 1"));
    }
    let model = DressedChannelModel {
        a_bk: required(args.a_bk, "a-bk", section)?,
        delta_m: TAU * required(args.width, "width", section)?,
        gamma_in: TAU * required(args.gamma, "gamma", section)?,
        omega_b,
        delta_shift: TAU * args.shift.unwrap_or(0.0),
        m: omega_b.signum() as i32 * order as i32,
        k_term: args.reduced_mass.map_or(KTerm::Omit, |reduced_mass| KTerm::CollisionEnergy { reduced_mass }),
    };
    let k = args.k.unwrap_or(1e5);
    let grid = frequency_grid(&args.freq, args.from, args.to, args.points, section)?;
    grid.into_iter()
        .map(|f| {
            let ab = dressed_alpha_beta(&model, TAU * f, k)?;
            Ok(DressedRow { frequency_hz: f, alpha_bohr: ab.alpha, beta_bohr: ab.beta })
        })
        .collect()
}
