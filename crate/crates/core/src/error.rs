//! Crate-wide error wrapping each module's own error type.

use crate::atomdata::AtomDataError;
use crate::floquet::FloquetError;
use crate::lightshift::LightShiftError;
use crate::lsq::LsqError;
use crate::scattering::ScatteringError;
use crate::specfun::SpecFunError;
use crate::spectra::SpectraError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
    #[error(transparent)]
    AtomData(#[from] AtomDataError),
    #[error(transparent)]
    LightShift(#[from] LightShiftError),
    #[error(transparent)]
    Floquet(#[from] FloquetError),
    #[error(transparent)]
    Scattering(#[from] ScatteringError),
    #[error(transparent)]
    Lsq(#[from] LsqError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}
