//! Atom-loss spectra: forward synthesis, peak finding, line-shape fits and
//! assembly of the molecular binding-energy map.

mod energy_map;
mod fano;
mod linear;
mod lz;
mod peaks;
mod synth;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::atomdata::AtomDataError;
use crate::lightshift::LightShiftError;
use crate::lsq::LsqError;
use crate::scattering::ScatteringError;
use crate::specfun::SpecFunError;

pub use energy_map::{
    assemble_energy_map, process_scans, Association, Candidate, CompensatedPeak, EnergyMapPoint, PeakProcessing,
    ScanPeaks, ORDER_RATIO_TOLERANCE,
};
pub use fano::{fano_profile, fit_fano, FanoFit};
pub use linear::{fit_linear_shift, LinearShiftFit, ShiftSample};
pub use lz::{fit_landau_zener, lz_energy, Branch, LandauZenerFit, LandauZenerInit, LzSample};
pub use peaks::{find_peaks, Peak};
pub use synth::{
    synthesize_spectrum, DressedSource, MolecularSource, ResonanceSource, SynthesisConfig, TwoChannelSource,
};

pub const SCHEMA_VERSION: u32 = 1;
/// Upper bound on `N_m/N_0`; noise may push a point slightly above one.
pub const MAX_RELATIVE_ATOMS: f64 = 1.2;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectraError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("CSV error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Csv { line: Option<u64>, message: String },
    #[error("JSON error at line {line}: {message}")]
    Json { line: usize, message: String },
    #[error("fit did not converge after {iterations} iterations; last parameters {params:?}")]
    FitNotConverged { iterations: usize, params: Vec<f64> },
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    AtomData(#[from] AtomDataError),
    #[error(transparent)]
    LightShift(#[from] LightShiftError),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

impl From<LsqError> for SpectraError {
    fn from(e: LsqError) -> Self {
        match e {
            LsqError::NotConverged { iterations, params, .. } => SpectraError::FitNotConverged { iterations, params },
            other => SpectraError::InvalidInput(other.to_string()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    #[serde(rename = "modulation_freq_Hz")]
    ModulationFreqHz,
    #[serde(rename = "field_Gauss")]
    FieldGauss,
}

impl Axis {
    pub fn name(&self) -> &'static str {
        match self {
            Axis::ModulationFreqHz => "modulation_freq_Hz",
            Axis::FieldGauss => "field_Gauss",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "modulation_freq_Hz" => Ok(Axis::ModulationFreqHz),
            "field_Gauss" => Ok(Axis::FieldGauss),
            other => Err(format!("unknown axis `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub x: f64,
    /// `N_m/N_0`.
    pub relative_atoms: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumMetadata {
    /// Magnetic field (G) of a frequency scan, or modulation frequency (Hz) of a field scan.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_value: Option<f64>,
    /// W/cm².
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub intensity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hold_time_ms: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    axis: Axis,
    points: Vec<SpectrumPoint>,
    pub metadata: SpectrumMetadata,
}

impl Spectrum {
    /// Validates ordering (strictly increasing `x`), ranges and finiteness.
    pub fn new(axis: Axis, points: Vec<SpectrumPoint>, metadata: SpectrumMetadata) -> Result<Self, SpectraError> {
        for (i, p) in points.iter().enumerate() {
            if !p.x.is_finite() || !p.relative_atoms.is_finite() || !p.sigma.is_finite() {
                return Err(SpectraError::InvalidInput(format!("point {i} is not finite")));
            }
            if !(0.0..=MAX_RELATIVE_ATOMS).contains(&p.relative_atoms) {
                return Err(SpectraError::InvalidInput(format!(
                    "point {i}: relative atom number {} outside [0, {MAX_RELATIVE_ATOMS}]",
                    p.relative_atoms
                )));
            }
            if p.sigma < 0.0 {
                return Err(SpectraError::InvalidInput(format!("point {i}: negative sigma")));
            }
            if i > 0 && !(p.x > points[i - 1].x) {
                return Err(SpectraError::InvalidInput(format!("points not strictly increasing at index {i}")));
            }
        }
        Ok(Spectrum { axis, points, metadata })
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    pub fn points(&self) -> &[SpectrumPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Header `axis,value,relative_atoms,sigma`; numbers in shortest round-trip form.
    /// CSV with a leading `# schema_version` comment line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), SpectraError> {
        writeln!(out, "# schema_version: {SCHEMA_VERSION}")
            .map_err(|e| SpectraError::Csv { line: None, message: e.to_string() })?;
        let mut w = csv::Writer::from_writer(out);
        let wrap = |e: csv::Error| SpectraError::Csv { line: None, message: e.to_string() };
        w.write_record(["axis", "value", "relative_atoms", "sigma"]).map_err(wrap)?;
        for p in &self.points {
            w.write_record([
                self.axis.name().to_string(),
                p.x.to_string(),
                p.relative_atoms.to_string(),
                p.sigma.to_string(),
            ])
            .map_err(wrap)?;
        }
        w.flush().map_err(|e| SpectraError::Csv { line: None, message: e.to_string() })
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is UTF-8")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self, SpectraError> {
        let mut rdr =
            csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).comment(Some(b'#')).from_reader(input);
        let headers = rdr.headers().map_err(|e| SpectraError::Csv { line: Some(1), message: e.to_string() })?.clone();
        let expected = ["axis", "value", "relative_atoms", "sigma"];
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(SpectraError::Csv {
                line: Some(headers.position().map_or(1, |p| p.line())),
                message: format!("header must be `{}`", expected.join(",")),
            });
        }
        let mut axis = None;
        let mut points = Vec::new();
        for record in rdr.records() {
            let record = record
                .map_err(|e| SpectraError::Csv { line: e.position().map(|p| p.line()), message: e.to_string() })?;
            let line = record.position().map(|p| p.line());
            let bad = |message: String| SpectraError::Csv { line, message };
            let row_axis: Axis = record[0].parse().map_err(bad)?;
            if *axis.get_or_insert(row_axis) != row_axis {
                return Err(bad("axis changes between rows".into()));
            }
            let num = |i: usize, name: &str| {
                record[i].parse::<f64>().map_err(|_| bad(format!("{name} `{}` is not a number", &record[i])))
            };
            points.push(SpectrumPoint {
                x: num(1, "value")?,
                relative_atoms: num(2, "relative_atoms")?,
                sigma: num(3, "sigma")?,
            });
        }
        let axis = axis.ok_or(SpectraError::Csv { line: None, message: "no data rows".into() })?;
        Spectrum::new(axis, points, SpectrumMetadata::default())
    }

    pub fn to_json_string(&self) -> String {
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            axis: self.axis,
            metadata: self.metadata.clone(),
            points: self.points.clone(),
        };
        serde_json::to_string_pretty(&env).expect("spectrum serializes")
    }

    pub fn from_json_str(text: &str) -> Result<Self, SpectraError> {
        let env: Envelope =
            serde_json::from_str(text).map_err(|e| SpectraError::Json { line: e.line(), message: e.to_string() })?;
        if env.schema_version != SCHEMA_VERSION {
            return Err(SpectraError::InvalidInput(format!("unsupported schema_version {}", env.schema_version)));
        }
        Spectrum::new(env.axis, env.points, env.metadata)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    schema_version: u32,
    axis: Axis,
    metadata: SpectrumMetadata,
    points: Vec<SpectrumPoint>,
}
