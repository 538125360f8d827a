use std::f64::consts::TAU;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use mifr::lightshift::{LightField, Waveform};
use mifr::scattering::{DressedChannelModel, KTerm, LossCoefficients, ResonanceModel};
use mifr::spectra::{
    synthesize_spectrum, Axis, DressedSource, MolecularSource, ResonanceSource, Spectrum, SpectrumMetadata,
    SynthesisConfig, TwoChannelSource,
};
use serde::{Deserialize, Serialize};

use super::light::Pol;
use super::load_registry;
use crate::config::required;
use crate::error::{CliError, CliResult};
use crate::output::{write_text, Format};

const SECTION: &str = "scan";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceKind {
    /// Registry state driven by an intensity-modulated beam, all orders.
    Molecular,
    /// Single lossless two-channel resonance.
    TwoChannel,
    /// Single dressed resonance with an inelastic channel.
    Dressed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanAxis {
    /// Modulation frequency in Hz at fixed field.
    Frequency,
    /// Magnetic field in G at fixed modulation frequency.
    Field,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaveformArg {
    Cosine,
    RaisedCosine,
}

/// Synthetic loss spectrum. Usually driven by a `[scan]` config table;
/// flags override single keys.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanArgs {
    /// Resonance model [default: molecular].
    #[arg(long, value_enum)]
    pub source: Option<SourceKind>,
    /// Scan axis; field scans need the molecular source [default: frequency].
    #[arg(long, value_enum)]
    pub axis: Option<ScanAxis>,
    /// Grid start (Hz or G).
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    /// Grid end (Hz or G).
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    /// Grid size [default: 401].
    #[arg(long)]
    pub points: Option<usize>,

    /// Registry state label (molecular).
    #[arg(long)]
    pub state: Option<String>,
    /// Magnetic field in G of a frequency scan (molecular).
    #[arg(long)]
    pub field: Option<f64>,
    /// Modulation frequency in Hz of a field scan (molecular).
    #[arg(long)]
    pub mod_freq: Option<f64>,
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Average peak intensity in W/cm² (molecular).
    #[arg(long)]
    pub intensity: Option<f64>,
    /// Beam detuning in Hz [default: -23e9].
    #[arg(long, allow_negative_numbers = true)]
    pub detuning: Option<f64>,
    /// [default: sigma-minus]
    #[arg(long, value_enum)]
    pub pol: Option<Pol>,
    /// Intensity modulation depth in [0, 1] [default: 0.86].
    #[arg(long)]
    pub modulation_depth: Option<f64>,
    /// Differential light shift of the state in Hz per W/cm² [default: -8000].
    #[arg(long, allow_negative_numbers = true)]
    pub shift_slope: Option<f64>,
    /// [default: cosine]
    #[arg(long, value_enum)]
    pub waveform: Option<WaveformArg>,
    /// Width prefactor in Hz; order k gets width_scale·J_k(A/ω_k)² [default: 50e3].
    #[arg(long)]
    pub width_scale: Option<f64>,
    /// Highest order included (molecular) [default: 3].
    #[arg(long)]
    pub max_order: Option<u32>,

    /// Resonance width Δ_m/2π in Hz (two-channel, dressed).
    #[arg(long, allow_negative_numbers = true)]
    pub width: Option<f64>,
    /// Resonance position ω₀/2π in Hz (two-channel).
    #[arg(long, allow_negative_numbers = true)]
    pub position: Option<f64>,
    /// State energy in Hz, negative is bound (dressed).
    #[arg(long, allow_negative_numbers = true)]
    pub energy: Option<f64>,
    /// Resonance shift δω_m/2π in Hz (dressed) [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    pub shift: Option<f64>,
    /// Drive order: signed m (two-channel) or |m| (dressed) [default: 1].
    #[arg(long, allow_negative_numbers = true)]
    pub order: Option<i32>,

    /// Inelastic coupling γ/2π in Hz [default: 4e3].
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Background scattering length in Bohr radii [default: 1000].
    #[arg(long, allow_negative_numbers = true)]
    pub a_bk: Option<f64>,

    /// Hold time in ms [default: 100].
    #[arg(long)]
    pub hold_time: Option<f64>,
    /// Peak density in cm⁻³ [default: 1e13].
    #[arg(long)]
    pub density: Option<f64>,
    /// Two-body loss coefficient, cm³/s per Bohr radius of β [default: 9e-14].
    #[arg(long)]
    pub two_body: Option<f64>,
    /// Three-body loss coefficient, cm⁶/s per a₀⁴ of α⁴ [default: 1e-45].
    #[arg(long)]
    pub three_body: Option<f64>,
    /// Wavenumber (1/m) of the unitarity cap on |α|; 0 disables it [default: collision wavenumber].
    #[arg(long)]
    pub unitarity_k: Option<f64>,
    /// Collisional wavenumber in 1/m [default: 1e5].
    #[arg(long)]
    pub collision_k: Option<f64>,
    /// Standard deviation of the additive noise on N/N₀ [default: 0.01].
    #[arg(long)]
    pub noise: Option<f64>,
    /// Noise seed [default: 0].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Free-text label stored in the JSON metadata.
    #[arg(long)]
    pub label: Option<String>,
}

/// Source plus the fixed field and intensity recorded in the metadata.
type Source = (Box<dyn ResonanceSource>, Option<f64>, Option<f64>);

fn source(args: &ScanArgs) -> CliResult<Source> {
    let a_bk = args.a_bk.unwrap_or(1000.0);
    let gamma = TAU * args.gamma.unwrap_or(4e3);
    let axis = args.axis.unwrap_or(ScanAxis::Frequency);
    let kind = args.source.unwrap_or(SourceKind::Molecular);
    if axis == ScanAxis::Field && kind != SourceKind::Molecular {
        return Err(CliError::usage("field scans need --source molecular"));
    }
    Ok(match kind {
        SourceKind::Molecular => {
            let intensity = required(args.intensity, "intensity", SECTION)?;
            let mut field =
                LightField::cw(intensity, args.detuning.unwrap_or(-23e9), args.pol.unwrap_or(Pol::SigmaMinus).vector());
            field.modulation_depth = args.modulation_depth.unwrap_or(0.86);
            let (scan_axis, fixed) = match axis {
                ScanAxis::Frequency => (Axis::ModulationFreqHz, required(args.field, "field", SECTION)?),
                ScanAxis::Field => (Axis::FieldGauss, required(args.mod_freq, "mod-freq", SECTION)?),
            };
            field.modulation_freq = args.mod_freq.unwrap_or(0.0);
            let src = MolecularSource {
                registry: load_registry(args.registry.as_ref())?,
                state: required(args.state.clone(), "state", SECTION)?,
                axis: scan_axis,
                fixed,
                field,
                shift_slope: args.shift_slope.unwrap_or(-8e3),
                waveform: match args.waveform.unwrap_or(WaveformArg::Cosine) {
                    WaveformArg::Cosine => Waveform::Cosine,
                    WaveformArg::RaisedCosine => Waveform::RaisedCosine,
                },
                width_scale: TAU * args.width_scale.unwrap_or(50e3),
                gamma_in: gamma,
                a_bk,
                max_order: args.max_order.unwrap_or(3),
            };
            if src.registry.get(&src.state).is_none() {
                return Err(CliError::usage(format!("no molecular state labelled {}", src.state)));
            }
            (Box::new(src), Some(fixed), Some(intensity))
        }
        SourceKind::TwoChannel => {
            let model = ResonanceModel {
                a_bk,
                delta_m: TAU * required(args.width, "width", SECTION)?,
                omega0: TAU * required(args.position, "position", SECTION)?,
                m: args.order.unwrap_or(1),
            };
            (Box::new(TwoChannelSource { model }), args.field, None)
        }
        SourceKind::Dressed => {
            let omega_b = -TAU * required(args.energy, "energy", SECTION)?;
            let order = args.order.unwrap_or(1);
            if order < 1 {
                return Err(CliError::usage("dressed --order is |m| and must be at least 1"));
            }
            let model = DressedChannelModel {
                a_bk,
                delta_m: TAU * required(args.width, "width", SECTION)?,
                gamma_in: gamma,
                omega_b,
                delta_shift: TAU * args.shift.unwrap_or(0.0),
                m: omega_b.signum() as i32 * order,
                k_term: KTerm::Omit,
            };
            (Box::new(DressedSource { model }), args.field, None)
        }
    })
}

pub fn run(args: ScanArgs) -> CliResult<Spectrum> {
    let from = required(args.from, "from", SECTION)?;
    let to = required(args.to, "to", SECTION)?;
    let n = args.points.unwrap_or(401);
    if n < 2 || !(to > from) {
        return Err(CliError::usage("need --to > --from and --points >= 2"));
    }
    let grid: Vec<f64> = (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect();
    let (src, fixed, intensity) = source(&args)?;
    let collision_k = args.collision_k.unwrap_or(1e5);
    let seed = args.seed.unwrap_or(0);
    let hold = args.hold_time.unwrap_or(100.0);
    let config = SynthesisConfig {
        hold_time_ms: hold,
        density_cm3: args.density.unwrap_or(1e13),
        loss: LossCoefficients {
            two_body: args.two_body.unwrap_or(9e-14),
            three_body: args.three_body.unwrap_or(1e-45),
            unitarity_k: args.unitarity_k.map_or(Some(collision_k), |k| (k != 0.0).then_some(k)),
        },
        collision_k,
        noise_sigma: args.noise.unwrap_or(0.01),
        seed,
        metadata: SpectrumMetadata {
            fixed_value: fixed,
            intensity,
            hold_time_ms: Some(hold),
            seed: Some(seed),
            label: args.label.clone(),
        },
    };
    Ok(synthesize_spectrum(src.as_ref(), &config, &grid)?)
}

/// `<base>.csv` and `<base>.json` when an output path is given, otherwise
/// the spectrum in the requested format on stdout.
pub fn write(spec: &Spectrum, output: Option<&Path>, format: Format) -> CliResult<()> {
    match output {
        Some(p) => {
            let base = if p.extension().is_some_and(|e| e == "csv" || e == "json") {
                p.with_extension("")
            } else {
                p.to_path_buf()
            };
            let with_ext = |ext: &str| {
                let mut name = base.clone().into_os_string();
                name.push(".");
                name.push(ext);
                PathBuf::from(name)
            };
            write_text(&spec.to_csv_string(), Some(&with_ext("csv")))?;
            write_text(&(spec.to_json_string() + "\n"), Some(&with_ext("json")))
        }
        None => match format {
            Format::Csv => write_text(&spec.to_csv_string(), None),
            Format::Json => write_text(&(spec.to_json_string() + "\n"), None),
        },
    }
}
