use std::fmt;
use std::process::ExitCode;

use mifr::atomdata::AtomDataError;
use mifr::floquet::FloquetError;
use mifr::lightshift::LightShiftError;
use mifr::scattering::ScatteringError;
use mifr::specfun::SpecFunError;
use mifr::spectra::SpectraError;

/// Failure classes with their process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    /// Bad flags, config or input files.
    Usage = 2,
    /// Valid input outside the physical model's domain.
    Domain = 3,
    NotConverged = 4,
    /// Rows were written but some peaks could not be labelled uniquely.
    Ambiguous = 5,
}

#[derive(Debug)]
pub struct CliError {
    pub kind: Kind,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Usage, message: message.into() }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.kind as u8)
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn with(kind: Kind, e: impl fmt::Display) -> CliError {
    CliError { kind, message: e.to_string() }
}

impl From<SpecFunError> for CliError {
    fn from(e: SpecFunError) -> Self {
        with(Kind::Domain, e)
    }
}

impl From<AtomDataError> for CliError {
    fn from(e: AtomDataError) -> Self {
        let kind = match e {
            AtomDataError::OutsideWindow { .. } => Kind::Domain,
            _ => Kind::Usage,
        };
        with(kind, e)
    }
}

impl From<LightShiftError> for CliError {
    fn from(e: LightShiftError) -> Self {
        let kind = match e {
            LightShiftError::InvalidInput(_) | LightShiftError::NoReference(_) => Kind::Usage,
            _ => Kind::Domain,
        };
        with(kind, e)
    }
}

impl From<FloquetError> for CliError {
    fn from(e: FloquetError) -> Self {
        let kind = match e {
            FloquetError::InvalidModel(_) | FloquetError::TruncationTooSmall { .. } => Kind::Usage,
            FloquetError::NotConverged { .. } => Kind::NotConverged,
            _ => Kind::Domain,
        };
        with(kind, e)
    }
}

impl From<ScatteringError> for CliError {
    fn from(e: ScatteringError) -> Self {
        let kind = match e {
            ScatteringError::InvalidInput(_) => Kind::Usage,
            _ => Kind::Domain,
        };
        with(kind, e)
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Scattering(inner) => inner.into(),
            SpectraError::AtomData(inner) => inner.into(),
            SpectraError::LightShift(inner) => inner.into(),
            SpectraError::SpecFun(inner) => inner.into(),
            SpectraError::FitNotConverged { .. } => with(Kind::NotConverged, e),
            _ => with(Kind::Usage, e),
        }
    }
}
