use clap::{Args, ValueEnum};
use mifr::atomdata::AtomSpecies;
use mifr::lightshift::{fictitious_field, heating_rate, scattering_rate, LightField, Polarization};
use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::config::required;
use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pol {
    SigmaPlus,
    SigmaMinus,
    /// Linear, perpendicular to the beam axis.
    Linear,
    /// Linear along the quantization axis.
    Pi,
}

impl Pol {
    pub fn vector(self) -> Polarization {
        match self {
            Pol::SigmaPlus => Polarization::sigma_plus(),
            Pol::SigmaMinus => Polarization::sigma_minus(),
            Pol::Pi => Polarization::pi(),
            Pol::Linear => {
                Polarization::from_cartesian(Complex::new(1.0, 0.0), Complex::new(0.0, 0.0), Complex::new(0.0, 0.0))
                    .expect("unit vector")
            }
        }
    }

    fn name(self) -> &'static str {
        match self {
            Pol::SigmaPlus => "sigma-plus",
            Pol::SigmaMinus => "sigma-minus",
            Pol::Linear => "linear",
            Pol::Pi => "pi",
        }
    }
}

/// Beam settings shared by the light-shift commands.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamArgs {
    /// Average peak intensity in W/cm²; comma-separated for several rows.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(default)]
    pub intensity: Vec<f64>,
    /// Detuning in Hz from the strongest D2 component out of the ground level (red is negative).
    #[arg(long, allow_negative_numbers = true)]
    pub detuning: Option<f64>,
    #[arg(long, value_enum)]
    pub pol: Option<Pol>,
    /// Hyperfine level F [default: species ground level].
    #[arg(long = "f-level")]
    pub f_level: Option<i32>,
    /// Magnetic sublevel m_F for rate commands [default: F].
    #[arg(long, allow_negative_numbers = true)]
    pub m_f: Option<i32>,
}

struct Beam {
    intensities: Vec<f64>,
    detuning: f64,
    pol: Pol,
    f: i32,
    m_f: i32,
}

impl BeamArgs {
    fn resolve(self, section: &str, species: &AtomSpecies) -> CliResult<Beam> {
        if self.intensity.is_empty() {
            return required(None, "intensity", section);
        }
        let detuning = required(self.detuning, "detuning", section)?;
        let f = self.f_level.unwrap_or(species.ground_f);
        let m_f = self.m_f.unwrap_or(f);
        if m_f.abs() > f {
            return Err(CliError::usage(format!("|m_F| = {} exceeds F = {f}", m_f.abs())));
        }
        Ok(Beam { intensities: self.intensity, detuning, pol: self.pol.unwrap_or(Pol::SigmaMinus), f, m_f })
    }
}

#[derive(Serialize)]
pub struct FieldRow {
    intensity_w_cm2: f64,
    detuning_hz: f64,
    pol: &'static str,
    f: i32,
    fictitious_field_mg: f64,
}

pub fn fictitious(args: BeamArgs, species: &AtomSpecies) -> CliResult<Vec<FieldRow>> {
    let beam = args.resolve("fictitious-field", species)?;
    beam.intensities
        .iter()
        .map(|&i| {
            let field = LightField::cw(i, beam.detuning, beam.pol.vector());
            Ok(FieldRow {
                intensity_w_cm2: i,
                detuning_hz: beam.detuning,
                pol: beam.pol.name(),
                f: beam.f,
                fictitious_field_mg: fictitious_field(&field, species, beam.f)? * 1e3,
            })
        })
        .collect()
}

#[derive(Serialize)]
pub struct RateRow {
    intensity_w_cm2: f64,
    detuning_hz: f64,
    pol: &'static str,
    f: i32,
    m_f: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    scattering_rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    heating_nk_per_ms: Option<f64>,
}

pub fn rate(args: BeamArgs, species: &AtomSpecies, heating: bool) -> CliResult<Vec<RateRow>> {
    let section = if heating { "heating-rate" } else { "scattering-rate" };
    let beam = args.resolve(section, species)?;
    beam.intensities
        .iter()
        .map(|&i| {
            let field = LightField::cw(i, beam.detuning, beam.pol.vector());
            let (rs, heat) = if heating {
                (None, Some(heating_rate(&field, species, beam.f, beam.m_f)?))
            } else {
                (Some(scattering_rate(&field, species, beam.f, beam.m_f)?), None)
            };
            Ok(RateRow {
                intensity_w_cm2: i,
                detuning_hz: beam.detuning,
                pol: beam.pol.name(),
                f: beam.f,
                m_f: beam.m_f,
                scattering_rate_hz: rs,
                heating_nk_per_ms: heat,
            })
        })
        .collect()
}
