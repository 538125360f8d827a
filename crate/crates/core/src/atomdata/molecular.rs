//! Locally linear molecular-state energies with an optional single avoided crossing.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{parse_error, AtomDataError};

/// Largest differential magnetic moment accepted, Hz/G.
pub const MAX_MU_REL_HZ_PER_G: f64 = 2.3e6;
pub const DEFAULT_WINDOW_G: (f64, f64) = (15.0, 50.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingPartner {
    pub label: String,
    /// Coupling `V_ij/h` in Hz; equals the minimum branch splitting.
    pub coupling_hz: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MolecularState {
    /// Quantum numbers `fl(m_f)`, e.g. `4g(4)`.
    pub label: String,
    /// Energy relative to threshold at `b_ref_g`, Hz. Negative is bound.
    pub e0_hz: f64,
    pub mu_rel_hz_per_g: f64,
    pub b_ref_g: f64,
    pub window_g: (f64, f64),
    pub partner: Option<CrossingPartner>,
}

impl MolecularState {
    pub fn linear(label: &str, e0_hz: f64, mu_rel_hz_per_g: f64, b_ref_g: f64) -> Self {
        MolecularState {
            label: label.to_string(),
            e0_hz,
            mu_rel_hz_per_g,
            b_ref_g,
            window_g: DEFAULT_WINDOW_G,
            partner: None,
        }
    }

    pub fn with_partner(mut self, label: &str, coupling_hz: f64) -> Self {
        self.partner = Some(CrossingPartner { label: label.to_string(), coupling_hz });
        self
    }

    /// Uncoupled energy `E0 + mu_rel (B - B_ref)`.
    pub fn bare_energy(&self, b_g: f64) -> f64 {
        self.e0_hz + self.mu_rel_hz_per_g * (b_g - self.b_ref_g)
    }

    fn check_window(&self, b_g: f64) -> Result<(), AtomDataError> {
        let (lo, hi) = self.window_g;
        if !(b_g >= lo && b_g <= hi) {
            return Err(AtomDataError::OutsideWindow { label: self.label.clone(), b_g, lo, hi });
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), AtomDataError> {
        let bad = |why: String| AtomDataError::Invalid(format!("state {}: {why}", self.label));
        if self.label.trim().is_empty() {
            return Err(AtomDataError::Invalid("state with empty label".into()));
        }
        for (name, v) in [("e0_hz", self.e0_hz), ("mu_rel_hz_per_g", self.mu_rel_hz_per_g), ("b_ref_g", self.b_ref_g)] {
            if !v.is_finite() {
                return Err(bad(format!("{name} is not finite")));
            }
        }
        if self.mu_rel_hz_per_g.abs() > MAX_MU_REL_HZ_PER_G {
            return Err(bad(format!(
                "|mu_rel| = {} Hz/G exceeds {MAX_MU_REL_HZ_PER_G} Hz/G",
                self.mu_rel_hz_per_g.abs()
            )));
        }
        let (lo, hi) = self.window_g;
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(bad(format!("empty validity window [{lo}, {hi}] G")));
        }
        if let Some(p) = &self.partner {
            if !(p.coupling_hz >= 0.0) || !p.coupling_hz.is_finite() {
                return Err(bad(format!("coupling {} Hz must be >= 0", p.coupling_hz)));
            }
            if p.label == self.label {
                return Err(bad("state is its own crossing partner".into()));
            }
        }
        Ok(())
    }
}

/// Eigenvalues `(E-, E+)` of `[[E_i, V/2], [V/2, E_j]]`.
pub fn avoided_crossing(e_i: f64, e_j: f64, coupling: f64) -> (f64, f64) {
    if coupling == 0.0 {
        return (e_i.min(e_j), e_i.max(e_j));
    }
    let mean = 0.5 * (e_i + e_j);
    let half = 0.5 * (e_i - e_j).hypot(coupling);
    (mean - half, mean + half)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MolecularRegistry {
    states: Vec<MolecularState>,
}

impl MolecularRegistry {
    pub fn new(states: Vec<MolecularState>) -> Result<Self, AtomDataError> {
        let registry = MolecularRegistry { states };
        registry.validate()?;
        Ok(registry)
    }

    /// States seen in the cesium loss spectra between 15 and 50 G.
    ///
    /// `4g(4)` is fitted to its light-shifted position (228.7 kHz bound at
    /// 19.41 G) and to the first-order peaks of a 150 kHz drive at 19.51 and
    /// 19.90 G. The other three are illustrative: `6s`/`6g(6)` cross near
    /// 18.66 G with a 25 kHz coupling, `4d` reaches threshold near 47.78 G.
    pub fn cesium_default() -> Self {
        MolecularRegistry {
            states: vec![
                MolecularState::linear("6g(6)", -150.0e3, 0.02e6, 18.66).with_partner("6s", 25.0e3),
                MolecularState::linear("6s", -150.0e3, 1.5e6, 18.66).with_partner("6g(6)", 25.0e3),
                MolecularState::linear("4g(4)", -228.7e3, 0.785e6, 19.41),
                MolecularState::linear("4d", -315.0e3, 0.75e6, 47.36),
            ],
        }
    }

    pub fn states(&self) -> &[MolecularState] {
        &self.states
    }

    pub fn get(&self, label: &str) -> Option<&MolecularState> {
        self.states.iter().find(|s| s.label == label)
    }

    pub fn validate(&self) -> Result<(), AtomDataError> {
        for (i, s) in self.states.iter().enumerate() {
            s.validate()?;
            if self.states[..i].iter().any(|t| t.label == s.label) {
                return Err(AtomDataError::Invalid(format!("duplicate state label {}", s.label)));
            }
            if let Some(p) = &s.partner {
                if self.get(&p.label).is_none() {
                    return Err(AtomDataError::UnresolvedPartner { state: s.label.clone(), partner: p.label.clone() });
                }
            }
        }
        Ok(())
    }

    /// Lower and upper avoided-crossing branches through `label` at `b_g`, Hz.
    /// Without a partner both equal the bare energy.
    pub fn branches(&self, label: &str, b_g: f64) -> Result<(f64, f64), AtomDataError> {
        let state = self.get(label).ok_or_else(|| AtomDataError::UnknownState(label.to_string()))?;
        state.check_window(b_g)?;
        let own = state.bare_energy(b_g);
        match &state.partner {
            None => Ok((own, own)),
            Some(p) => {
                let partner = self.get(&p.label).ok_or_else(|| AtomDataError::UnresolvedPartner {
                    state: state.label.clone(),
                    partner: p.label.clone(),
                })?;
                Ok(avoided_crossing(own, partner.bare_energy(b_g), p.coupling_hz))
            }
        }
    }

    /// Energy of `label` at `b_g`, Hz.
    pub fn energy(&self, label: &str, b_g: f64) -> Result<f64, AtomDataError> {
        let state = self.get(label).ok_or_else(|| AtomDataError::UnknownState(label.to_string()))?;
        molecular_energy(state, b_g, self)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, AtomDataError> {
        let file: RegistryFile = toml::from_str(text).map_err(|e| parse_error(text, &e))?;
        if file.schema_version.is_some_and(|v| v != super::SCHEMA_VERSION) {
            return Err(AtomDataError::Invalid(format!("unsupported schema_version {}", file.schema_version.unwrap())));
        }
        let states = file
            .state
            .into_iter()
            .map(|e| {
                let partner = match (e.partner, e.coupling_hz) {
                    (Some(label), Some(coupling_hz)) => Some(CrossingPartner { label, coupling_hz }),
                    (Some(_), None) => {
                        return Err(AtomDataError::MissingField {
                            section: format!("state {}", e.label),
                            field: "coupling_hz",
                        })
                    }
                    (None, Some(_)) => {
                        return Err(AtomDataError::MissingField {
                            section: format!("state {}", e.label),
                            field: "partner",
                        })
                    }
                    (None, None) => None,
                };
                Ok(MolecularState {
                    label: e.label,
                    e0_hz: e.e0_hz,
                    mu_rel_hz_per_g: e.mu_rel_hz_per_g,
                    b_ref_g: e.b_ref_g,
                    window_g: (e.b_min_g.unwrap_or(DEFAULT_WINDOW_G.0), e.b_max_g.unwrap_or(DEFAULT_WINDOW_G.1)),
                    partner,
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(states)
    }

    pub fn load(path: &Path) -> Result<Self, AtomDataError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| AtomDataError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        let file = RegistryFile {
            schema_version: Some(super::SCHEMA_VERSION),
            state: self
                .states
                .iter()
                .map(|s| StateEntry {
                    label: s.label.clone(),
                    e0_hz: s.e0_hz,
                    mu_rel_hz_per_g: s.mu_rel_hz_per_g,
                    b_ref_g: s.b_ref_g,
                    b_min_g: Some(s.window_g.0),
                    b_max_g: Some(s.window_g.1),
                    partner: s.partner.as_ref().map(|p| p.label.clone()),
                    coupling_hz: s.partner.as_ref().map(|p| p.coupling_hz),
                })
                .collect(),
        };
        toml::to_string(&file).expect("registry serializes")
    }
}

/// Energy of `state` at field `b_g` (Gauss) relative to threshold, Hz.
///
/// With a crossing partner the result is the avoided-crossing eigenvalue on the
/// side carrying the state's own character: the upper branch where its bare
/// energy lies above the partner's, the lower one otherwise (and at a tie).
pub fn molecular_energy(state: &MolecularState, b_g: f64, registry: &MolecularRegistry) -> Result<f64, AtomDataError> {
    state.check_window(b_g)?;
    let own = state.bare_energy(b_g);
    let Some(p) = &state.partner else {
        return Ok(own);
    };
    let partner = registry
        .get(&p.label)
        .ok_or_else(|| AtomDataError::UnresolvedPartner { state: state.label.clone(), partner: p.label.clone() })?;
    let other = partner.bare_energy(b_g);
    let (lower, upper) = avoided_crossing(own, other, p.coupling_hz);
    Ok(if own > other { upper } else { lower })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    #[serde(skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    #[serde(default)]
    state: Vec<StateEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateEntry {
    label: String,
    e0_hz: f64,
    mu_rel_hz_per_g: f64,
    b_ref_g: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_min_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    b_max_g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    partner: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    coupling_hz: Option<f64>,
}
