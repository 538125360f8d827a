//! AC-Stark effects of a far-detuned beam on a ground hyperfine level:
//! vector polarizability, the equivalent fictitious magnetic field, photon
//! scattering and recoil heating.
//!
//! Only the transitions listed in the [`AtomSpecies`] enter the sums.

use std::f64::consts::TAU;

use nalgebra::Complex;

use crate::atomdata::constants::{
    BOHR_MAGNETON, BOLTZMANN, HBAR, SPEED_OF_LIGHT, TESLA_PER_GAUSS, VACUUM_PERMEABILITY, W_M2_PER_W_CM2,
};
use crate::atomdata::{AtomSpecies, Line, Transition};
use crate::specfun::{wigner_3j, wigner_6j, HalfInt, SpecFunError};

/// Closest approach to a transition, in units of its decay rate.
pub const RESONANCE_GUARD_LINEWIDTHS: f64 = 10.0;

const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LightShiftError {
    #[error("light is {linewidths:.2} linewidths from {transition}; far-detuned formulas do not apply")]
    NearResonance { transition: String, linewidths: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("species has no {0} transition to reference the detuning against")]
    NoReference(&'static str),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// Spherical components `(u₊₁, u₀, u₋₁)` of a unit polarization vector.
/// Component `u_q` drives `Δm_F = q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Polarization {
    u_plus: Complex<f64>,
    u_zero: Complex<f64>,
    u_minus: Complex<f64>,
}

impl Polarization {
    pub fn new(u_plus: Complex<f64>, u_zero: Complex<f64>, u_minus: Complex<f64>) -> Result<Self, LightShiftError> {
        let p = Polarization { u_plus, u_zero, u_minus };
        let norm = p.weights().iter().sum::<f64>();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(LightShiftError::InvalidInput(format!("polarization norm² is {norm}, expected 1")));
        }
        Ok(p)
    }

    /// Rescales arbitrary nonzero components to unit norm.
    pub fn normalized(
        u_plus: Complex<f64>,
        u_zero: Complex<f64>,
        u_minus: Complex<f64>,
    ) -> Result<Self, LightShiftError> {
        let n = (u_plus.norm_sqr() + u_zero.norm_sqr() + u_minus.norm_sqr()).sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(LightShiftError::InvalidInput("zero polarization vector".into()));
        }
        Self::new(u_plus / n, u_zero / n, u_minus / n)
    }

    pub fn sigma_plus() -> Self {
        Polarization { u_plus: Complex::new(1.0, 0.0), u_zero: Complex::new(0.0, 0.0), u_minus: Complex::new(0.0, 0.0) }
    }

    pub fn sigma_minus() -> Self {
        Polarization { u_plus: Complex::new(0.0, 0.0), u_zero: Complex::new(0.0, 0.0), u_minus: Complex::new(1.0, 0.0) }
    }

    pub fn pi() -> Self {
        Polarization { u_plus: Complex::new(0.0, 0.0), u_zero: Complex::new(1.0, 0.0), u_minus: Complex::new(0.0, 0.0) }
    }

    /// From Cartesian components, `u_{±1} = ∓(u_x ± i u_y)/√2`, `u₀ = u_z`.
    pub fn from_cartesian(ux: Complex<f64>, uy: Complex<f64>, uz: Complex<f64>) -> Result<Self, LightShiftError> {
        let i = Complex::new(0.0, 1.0);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self::new(-(ux + i * uy) * s, uz, (ux - i * uy) * s)
    }

    /// `σ⁺ ↔ σ⁻`.
    pub fn swapped(&self) -> Self {
        Polarization { u_plus: self.u_minus, u_zero: self.u_zero, u_minus: self.u_plus }
    }

    pub fn u_plus(&self) -> Complex<f64> {
        self.u_plus
    }
    pub fn u_zero(&self) -> Complex<f64> {
        self.u_zero
    }
    pub fn u_minus(&self) -> Complex<f64> {
        self.u_minus
    }

    /// `[|u₋₁|², |u₀|², |u₊₁|²]`, indexed by `q + 1`.
    pub fn weights(&self) -> [f64; 3] {
        [self.u_minus.norm_sqr(), self.u_zero.norm_sqr(), self.u_plus.norm_sqr()]
    }

    /// `|u₋₁|² − |u₊₁|²`.
    pub fn circularity(&self) -> f64 {
        self.u_minus.norm_sqr() - self.u_plus.norm_sqr()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightField {
    /// Average peak intensity, W/cm².
    pub intensity: f64,
    /// Hz, relative to the strongest D2 component out of the ground level; red is negative.
    pub detuning: f64,
    pub polarization: Polarization,
    pub modulation_depth: f64,
    /// Hz.
    pub modulation_freq: f64,
}

impl LightField {
    /// Unmodulated beam.
    pub fn cw(intensity: f64, detuning: f64, polarization: Polarization) -> Self {
        LightField { intensity, detuning, polarization, modulation_depth: 0.0, modulation_freq: 0.0 }
    }

    fn validate(&self) -> Result<(), LightShiftError> {
        if !(self.intensity >= 0.0) || !self.intensity.is_finite() {
            return Err(LightShiftError::InvalidInput(format!("intensity {} W/cm² must be >= 0", self.intensity)));
        }
        if !self.detuning.is_finite() {
            return Err(LightShiftError::InvalidInput("detuning is not finite".into()));
        }
        if !(0.0..=1.0).contains(&self.modulation_depth) {
            return Err(LightShiftError::InvalidInput(format!(
                "modulation depth {} outside [0, 1]",
                self.modulation_depth
            )));
        }
        Ok(())
    }

    /// Laser angular frequency, rad/s.
    pub fn angular_frequency(&self, species: &AtomSpecies) -> Result<f64, LightShiftError> {
        Ok(TAU * (reference_transition(species)?.frequency_hz + self.detuning))
    }
}

/// D2 component with the largest `F'` out of the species' ground level.
pub fn reference_transition(species: &AtomSpecies) -> Result<&Transition, LightShiftError> {
    species
        .transitions_from(species.ground_f)
        .filter(|t| t.line == Line::D2)
        .max_by_key(|t| t.f_prime)
        .ok_or(LightShiftError::NoReference("D2"))
}

fn check_far_detuned<'a>(transitions: impl Iterator<Item = &'a Transition>, omega: f64) -> Result<(), LightShiftError> {
    for t in transitions {
        let linewidths = (omega - t.angular_frequency()).abs() / t.decay_rate;
        if linewidths < RESONANCE_GUARD_LINEWIDTHS {
            return Err(LightShiftError::NearResonance { transition: t.id(), linewidths });
        }
    }
    Ok(())
}

fn check_level(species: &AtomSpecies, f: i32) -> Result<(), LightShiftError> {
    if f <= 0 {
        return Err(LightShiftError::InvalidInput(format!("F = {f} has no vector polarizability")));
    }
    if species.transitions_from(f).next().is_none() {
        return Err(LightShiftError::InvalidInput(format!("species has no transitions out of F = {f}")));
    }
    Ok(())
}

/// Vector polarizability `α_v(F; ω)` in C·m²/V.
pub fn vector_polarizability(species: &AtomSpecies, f: i32, omega: f64) -> Result<f64, LightShiftError> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(LightShiftError::InvalidInput(format!("angular frequency {omega} must be positive")));
    }
    check_level(species, f)?;
    check_far_detuned(species.transitions_from(f), omega)?;

    let ff = HalfInt::int(f);
    let one = HalfInt::ONE;
    let fx = f as f64;
    let prefactor = (6.0 * fx * (2.0 * fx + 1.0) / (fx + 1.0)).sqrt();
    let mut alpha = 0.0;
    for t in species.transitions_from(f) {
        let fp = HalfInt::int(t.f_prime);
        let sign = if (f + t.f_prime + 1) % 2 == 0 { 1.0 } else { -1.0 };
        let six_a = wigner_6j(one, one, one, ff, ff, fp)?;
        let six_b = wigner_6j(t.j, t.j_prime, one, fp, ff, species.nuclear_spin)?;
        let w0 = t.angular_frequency();
        alpha += sign * prefactor * six_a * omega * t.reduced_dipole.powi(2) / (HBAR * (w0 * w0 - omega * omega))
            * f64::from(fp.multiplicity())
            * f64::from(t.j.multiplicity())
            * six_b.powi(2);
    }
    Ok(alpha)
}

/// Fictitious magnetic field along the beam axis, Gauss.
pub fn fictitious_field(field: &LightField, species: &AtomSpecies, f: i32) -> Result<f64, LightShiftError> {
    field.validate()?;
    let omega = field.angular_frequency(species)?;
    let alpha = vector_polarizability(species, f, omega)?;
    let intensity = field.intensity * W_M2_PER_W_CM2;
    let tesla = -(intensity * VACUUM_PERMEABILITY * SPEED_OF_LIGHT)
        / (2.0 * BOHR_MAGNETON * species.ground_gf * f as f64)
        * field.polarization.circularity()
        * alpha;
    Ok(tesla / TESLA_PER_GAUSS)
}

/// `⟨F' m'|d_q|F m⟩` in C·m.
///
/// The tabulated reduced element is `⟨J‖d‖J'⟩`; it is converted to
/// `⟨J'‖d‖J⟩` with `|⟨J'‖d‖J⟩|² = (2J+1)/(2J'+1) |⟨J‖d‖J'⟩|²`.
pub fn dipole_matrix_element(t: &Transition, nuclear_spin: HalfInt, m: i32, q: i32) -> Result<f64, LightShiftError> {
    let m_prime = m + q;
    if m_prime.abs() > t.f_prime {
        return Ok(0.0);
    }
    let (f, fp) = (HalfInt::int(t.f), HalfInt::int(t.f_prime));
    let three = wigner_3j(f, HalfInt::ONE, fp, HalfInt::int(m), HalfInt::int(q), HalfInt::int(-m_prime))?;
    if three == 0.0 {
        return Ok(0.0);
    }
    let six = wigner_6j(t.j_prime, t.j, HalfInt::ONE, f, fp, nuclear_spin)?;
    // (-1)^{F-1+m'} (-1)^{F+J'+1+I}; the second exponent is an integer because I and J' are both half-integer or both integer.
    let twice_exp = 2 * (t.f - 1 + m_prime) + (HalfInt::int(t.f + 1) + t.j_prime + nuclear_spin).twice();
    let sign = if (twice_exp / 2) % 2 == 0 { 1.0 } else { -1.0 };
    let reduced_jpj = t.reduced_dipole * (f64::from(t.j.multiplicity()) / f64::from(t.j_prime.multiplicity())).sqrt();
    Ok(sign
        * f64::from(fp.multiplicity()).sqrt()
        * three
        * (f64::from(f.multiplicity()) * f64::from(t.j_prime.multiplicity())).sqrt()
        * six
        * reduced_jpj)
}

/// Photon scattering rate of `|F, m_F⟩`, Hz.
pub fn scattering_rate(field: &LightField, species: &AtomSpecies, f: i32, m_f: i32) -> Result<f64, LightShiftError> {
    field.validate()?;
    check_level(species, f)?;
    if m_f.abs() > f {
        return Err(LightShiftError::InvalidInput(format!("|m_F| = {} exceeds F = {f}", m_f.abs())));
    }
    let omega = field.angular_frequency(species)?;
    check_far_detuned(species.transitions_from(f), omega)?;

    let weights = field.polarization.weights();
    let mut sum = 0.0;
    for t in species.transitions_from(f) {
        let detuning = omega - t.angular_frequency();
        for q in -1..=1 {
            let w = weights[(q + 1) as usize];
            if w == 0.0 {
                continue;
            }
            let d = dipole_matrix_element(t, species.nuclear_spin, m_f, q)?;
            sum += w * d * d / (detuning * detuning) * t.decay_rate;
        }
    }
    let intensity = field.intensity * W_M2_PER_W_CM2;
    Ok(intensity * VACUUM_PERMEABILITY * SPEED_OF_LIGHT / (2.0 * HBAR * HBAR) * sum)
}

/// Recoil heating `dT/dt = (2/3k_B) R_s (ħk)²/2m`, in nK/ms.
pub fn heating_rate(field: &LightField, species: &AtomSpecies, f: i32, m_f: i32) -> Result<f64, LightShiftError> {
    let rate = scattering_rate(field, species, f, m_f)?;
    let k = field.angular_frequency(species)? / SPEED_OF_LIGHT;
    let recoil = (HBAR * k).powi(2) / (2.0 * species.mass_kg);
    let kelvin_per_s = 2.0 / (3.0 * BOLTZMANN) * rate * recoil;
    Ok(kelvin_per_s * 1e6)
}

/// How the modulation depth maps onto the instantaneous intensity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Waveform {
    /// `I(t) = I (1 + d cos ωt)`: cosine amplitude `d·I`, mean `I`.
    #[default]
    Cosine,
    /// `I(t) = I [(1 − d) + d (1 + cos ωt)/2]`: cosine amplitude `d·I/2`, mean `I (1 − d/2)`.
    RaisedCosine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelModulation {
    /// Cosine amplitude `A` of the differential shift, rad/s.
    pub amplitude: f64,
    /// Time-averaged differential shift, rad/s.
    pub dc_shift: f64,
}

/// Converts intensity modulation into the level-modulation amplitude `A`
/// given a differential light-shift coefficient in Hz per W/cm².
pub fn level_modulation_amplitude(
    field: &LightField,
    shift_slope: f64,
    waveform: Waveform,
) -> Result<LevelModulation, LightShiftError> {
    if !shift_slope.is_finite() {
        return Err(LightShiftError::InvalidInput("shift slope is not finite".into()));
    }
    if !(0.0..=1.0).contains(&field.modulation_depth) {
        return Err(LightShiftError::InvalidInput(format!(
            "modulation depth {} outside [0, 1]",
            field.modulation_depth
        )));
    }
    if !(field.intensity >= 0.0) || !field.intensity.is_finite() {
        return Err(LightShiftError::InvalidInput(format!("intensity {} W/cm² must be >= 0", field.intensity)));
    }
    let scale = TAU * shift_slope * field.intensity;
    let d = field.modulation_depth;
    Ok(match waveform {
        Waveform::Cosine => LevelModulation { amplitude: scale * d, dc_shift: scale },
        Waveform::RaisedCosine => LevelModulation { amplitude: 0.5 * scale * d, dc_shift: scale * (1.0 - 0.5 * d) },
    })
}
