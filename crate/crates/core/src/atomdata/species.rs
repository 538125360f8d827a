use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::constants::ATOMIC_MASS_UNIT;
use super::{parse_error, AtomDataError};
use crate::specfun::HalfInt;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Line {
    D1,
    D2,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Line::D1 => "D1",
            Line::D2 => "D2",
        })
    }
}

impl FromStr for Line {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "D1" | "d1" => Ok(Line::D1),
            "D2" | "d2" => Ok(Line::D2),
            other => Err(format!("unknown line `{other}`")),
        }
    }
}

/// One hyperfine component `F -> F'` of a fine-structure line.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub line: Line,
    pub f: i32,
    pub f_prime: i32,
    /// Transition frequency `ω_{F'F}/2π` in Hz.
    pub frequency_hz: f64,
    /// `⟨J‖d‖J'⟩` in C·m, ground state on the left.
    pub reduced_dipole: f64,
    pub j: HalfInt,
    pub j_prime: HalfInt,
    /// Excited-state decay rate Γ in rad/s.
    pub decay_rate: f64,
}

impl Transition {
    pub fn angular_frequency(&self) -> f64 {
        TAU * self.frequency_hz
    }

    fn validate(&self) -> Result<(), AtomDataError> {
        let id = self.id();
        let bad = |why: &str| AtomDataError::Invalid(format!("transition {id}: {why}"));
        if !(self.frequency_hz > 0.0) || !self.frequency_hz.is_finite() {
            return Err(bad("frequency must be positive"));
        }
        if !(self.reduced_dipole > 0.0) || !self.reduced_dipole.is_finite() {
            return Err(bad("reduced dipole must be positive"));
        }
        if !(self.decay_rate > 0.0) || !self.decay_rate.is_finite() {
            return Err(bad("decay rate must be positive"));
        }
        if (self.f - self.f_prime).abs() > 1 || self.f < 0 || self.f_prime < 0 {
            return Err(bad("requires |F - F'| <= 1"));
        }
        if self.j.twice() < 0 || self.j_prime.twice() < 0 {
            return Err(bad("negative J"));
        }
        Ok(())
    }

    pub fn id(&self) -> String {
        format!("{} {}->{}", self.line, self.f, self.f_prime)
    }

    fn key(&self) -> (Line, i32, i32) {
        (self.line, self.f, self.f_prime)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomSpecies {
    pub name: String,
    pub mass_kg: f64,
    pub nuclear_spin: HalfInt,
    pub ground_f: i32,
    pub ground_gf: f64,
    pub transitions: Vec<Transition>,
}

const CS_D1_DIPOLE: f64 = 2.6980e-29;
const CS_D2_DIPOLE: f64 = 3.7971e-29;
const CS_D1_LINEWIDTH_HZ: f64 = 4.5612e6;
const CS_D2_LINEWIDTH_HZ: f64 = 5.2227e6;

impl AtomSpecies {
    /// Cesium-133 with the D1/D2 hyperfine components out of `F = 3`.
    pub fn cesium() -> Self {
        let half = HalfInt::from_twice(1);
        let three_halves = HalfInt::from_twice(3);
        let row = |line, f_prime, frequency_thz: f64| {
            let (dipole, width, j_prime) = match line {
                Line::D1 => (CS_D1_DIPOLE, CS_D1_LINEWIDTH_HZ, half),
                Line::D2 => (CS_D2_DIPOLE, CS_D2_LINEWIDTH_HZ, three_halves),
            };
            Transition {
                line,
                f: 3,
                f_prime,
                frequency_hz: frequency_thz * 1e12,
                reduced_dipole: dipole,
                j: half,
                j_prime,
                decay_rate: TAU * width,
            }
        };
        AtomSpecies {
            name: "Cs133".to_string(),
            mass_kg: 132.905_451_961 * ATOMIC_MASS_UNIT,
            nuclear_spin: HalfInt::from_twice(7),
            ground_f: 3,
            ground_gf: -0.25,
            transitions: vec![
                row(Line::D1, 3, 335.120_562_84),
                row(Line::D1, 4, 335.121_730_52),
                row(Line::D2, 2, 351.730_549_72),
                row(Line::D2, 3, 351.730_700_92),
                row(Line::D2, 4, 351.730_902_17),
            ],
        }
    }

    pub fn validate(&self) -> Result<(), AtomDataError> {
        if self.transitions.is_empty() {
            return Err(AtomDataError::Invalid("species has no transitions".into()));
        }
        if !(self.mass_kg > 0.0) || !self.mass_kg.is_finite() {
            return Err(AtomDataError::Invalid("mass must be positive".into()));
        }
        if self.nuclear_spin.twice() < 0 || self.ground_f < 0 {
            return Err(AtomDataError::Invalid("negative angular momentum".into()));
        }
        if !self.ground_gf.is_finite() || self.ground_gf == 0.0 {
            return Err(AtomDataError::Invalid("ground g_F must be finite and nonzero".into()));
        }
        for (i, t) in self.transitions.iter().enumerate() {
            t.validate()?;
            if self.transitions[..i].iter().any(|u| u.key() == t.key()) {
                return Err(AtomDataError::Invalid(format!("duplicate transition {}", t.id())));
            }
        }
        Ok(())
    }

    /// Reduced mass of two identical atoms.
    pub fn pair_reduced_mass(&self) -> f64 {
        0.5 * self.mass_kg
    }

    /// Transitions out of ground hyperfine level `f`.
    pub fn transitions_from(&self, f: i32) -> impl Iterator<Item = &Transition> {
        self.transitions.iter().filter(move |t| t.f == f)
    }

    pub fn transition(&self, line: Line, f: i32, f_prime: i32) -> Option<&Transition> {
        self.transitions.iter().find(|t| t.key() == (line, f, f_prime))
    }

    /// Parse a species file. Entries are merged over the built-in cesium data
    /// unless the file sets `base = "none"`.
    pub fn from_toml_str(text: &str) -> Result<Self, AtomDataError> {
        let file: SpeciesFile = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
        if file.schema_version.is_some_and(|v| v != SCHEMA_VERSION) {
            return Err(AtomDataError::Invalid(format!("unsupported schema_version {}", file.schema_version.unwrap())));
        }
        let mut species = match file.base.as_deref().unwrap_or("cs133") {
            "cs133" | "Cs133" | "cesium" => AtomSpecies::cesium(),
            "none" => AtomSpecies {
                name: String::new(),
                mass_kg: f64::NAN,
                nuclear_spin: HalfInt::ZERO,
                ground_f: -1,
                ground_gf: f64::NAN,
                transitions: Vec::new(),
            },
            other => return Err(AtomDataError::Invalid(format!("unknown base species `{other}`"))),
        };
        let from_scratch = file.base.as_deref() == Some("none");

        let s = file.species.unwrap_or_default();
        let required = |present: bool, field: &'static str| {
            if from_scratch && !present {
                Err(AtomDataError::MissingField { section: "species".into(), field })
            } else {
                Ok(())
            }
        };
        required(s.name.is_some(), "name")?;
        required(s.mass_kg.is_some(), "mass_kg")?;
        required(s.nuclear_spin.is_some(), "nuclear_spin")?;
        required(s.ground_f.is_some(), "ground_f")?;
        required(s.ground_gf.is_some(), "ground_gf")?;
        if let Some(v) = s.name {
            species.name = v;
        }
        if let Some(v) = s.mass_kg {
            species.mass_kg = v;
        }
        if let Some(v) = s.nuclear_spin {
            species.nuclear_spin = v;
        }
        if let Some(v) = s.ground_f {
            species.ground_f = v;
        }
        if let Some(v) = s.ground_gf {
            species.ground_gf = v;
        }

        for entry in file.transition {
            let key = (entry.line, entry.f, entry.f_prime);
            let section = format!("transition {} {}->{}", entry.line, entry.f, entry.f_prime);
            if let Some(existing) = species.transitions.iter_mut().find(|t| t.key() == key) {
                entry.apply(existing);
            } else {
                species.transitions.push(entry.into_transition(section)?);
            }
        }
        species.validate()?;
        Ok(species)
    }

    pub fn load(path: &Path) -> Result<Self, AtomDataError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AtomDataError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    /// Self-contained file (`base = "none"`) that loads back to `self`.
    pub fn to_toml_string(&self) -> String {
        let file = SpeciesFile {
            schema_version: Some(SCHEMA_VERSION),
            base: Some("none".into()),
            species: Some(SpeciesSection {
                name: Some(self.name.clone()),
                mass_kg: Some(self.mass_kg),
                nuclear_spin: Some(self.nuclear_spin),
                ground_f: Some(self.ground_f),
                ground_gf: Some(self.ground_gf),
            }),
            transition: self
                .transitions
                .iter()
                .map(|t| TransitionEntry {
                    line: t.line,
                    f: t.f,
                    f_prime: t.f_prime,
                    frequency_hz: Some(t.frequency_hz),
                    reduced_dipole_cm: Some(t.reduced_dipole),
                    j: Some(t.j),
                    j_prime: Some(t.j_prime),
                    linewidth_hz: Some(t.decay_rate / TAU),
                })
                .collect(),
        };
        toml::to_string(&file).expect("species serializes")
    }
}

/// Loads the species file at `path`, or the built-in cesium data when `None`.
pub fn load_species(path: Option<&Path>) -> Result<AtomSpecies, AtomDataError> {
    match path {
        Some(p) => AtomSpecies::load(p),
        None => Ok(AtomSpecies::cesium()),
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    base: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    species: Option<SpeciesSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    transition: Vec<TransitionEntry>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpeciesSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mass_kg: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nuclear_spin: Option<HalfInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_f: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ground_gf: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransitionEntry {
    line: Line,
    f: i32,
    f_prime: i32,
    #[serde(skip_serializing_if = "Option::is_none")]
    frequency_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced_dipole_cm: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j: Option<HalfInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    j_prime: Option<HalfInt>,
    /// Γ/2π in Hz.
    #[serde(skip_serializing_if = "Option::is_none")]
    linewidth_hz: Option<f64>,
}

impl TransitionEntry {
    fn apply(self, t: &mut Transition) {
        if let Some(v) = self.frequency_hz {
            t.frequency_hz = v;
        }
        if let Some(v) = self.reduced_dipole_cm {
            t.reduced_dipole = v;
        }
        if let Some(v) = self.j {
            t.j = v;
        }
        if let Some(v) = self.j_prime {
            t.j_prime = v;
        }
        if let Some(v) = self.linewidth_hz {
            t.decay_rate = TAU * v;
        }
    }

    fn into_transition(self, section: String) -> Result<Transition, AtomDataError> {
        let missing = |field| AtomDataError::MissingField { section: section.clone(), field };
        Ok(Transition {
            line: self.line,
            f: self.f,
            f_prime: self.f_prime,
            frequency_hz: self.frequency_hz.ok_or_else(|| missing("frequency_hz"))?,
            reduced_dipole: self.reduced_dipole_cm.ok_or_else(|| missing("reduced_dipole_cm"))?,
            j: self.j.ok_or_else(|| missing("j"))?,
            j_prime: self.j_prime.ok_or_else(|| missing("j_prime"))?,
            decay_rate: TAU * self.linewidth_hz.ok_or_else(|| missing("linewidth_hz"))?,
        })
    }
}
