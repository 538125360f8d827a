//! Physical constants, alkali transition data and molecular-state energy models.
//!
//! Species and registry files are TOML. Frequencies are in Hz, dipoles in C·m,
//! masses in kg and magnetic fields in Gauss; the unit is part of each key name.

pub mod constants;
mod molecular;
mod species;

pub use molecular::{
    avoided_crossing, molecular_energy, CrossingPartner, MolecularRegistry, MolecularState, DEFAULT_WINDOW_G,
    MAX_MU_REL_HZ_PER_G,
};
pub use species::{load_species, AtomSpecies, Line, Transition, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AtomDataError {
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("parse error{}: {message}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, message: String },
    #[error("[{section}] is missing required field `{field}`")]
    MissingField { section: String, field: &'static str },
    #[error("invalid data: {0}")]
    Invalid(String),
    #[error("state {state} names crossing partner {partner}, which is not in the registry")]
    UnresolvedPartner { state: String, partner: String },
    #[error("no molecular state labelled {0}")]
    UnknownState(String),
    #[error("B = {b_g} G is outside the validity window [{lo}, {hi}] G of state {label}")]
    OutsideWindow { label: String, b_g: f64, lo: f64, hi: f64 },
}

fn parse_error(text: &str, err: &toml::de::Error) -> AtomDataError {
    let line = err.span().map(|span| text[..span.start.min(text.len())].matches('\n').count() + 1);
    AtomDataError::Parse { line, message: err.message().to_string() }
}
