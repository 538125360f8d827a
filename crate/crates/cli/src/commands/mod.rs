pub mod energy_map;
pub mod fit;
pub mod floquet;
pub mod light;
pub mod scan;
pub mod scattering;

use std::path::PathBuf;

use mifr::atomdata::MolecularRegistry;

use crate::error::CliResult;

pub fn load_registry(path: Option<&PathBuf>) -> CliResult<MolecularRegistry> {
    Ok(match path {
        Some(p) => MolecularRegistry::load(p)?,
        None => MolecularRegistry::cesium_default(),
    })
}
