//! Modulation-induced resonant scattering length, the dressed three-channel
//! complex scattering length `a = α − iβ`, and a loss-rate forward model.
//!
//! Scattering lengths are in Bohr radii at the interface; frequencies in rad/s.

use std::f64::consts::PI;

use crate::atomdata::constants::{BOHR_RADIUS, HBAR};
use crate::specfun::{bessel_j, SpecFunError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScatteringError {
    #[error("scattering length diverges at ω = {omega_pole} rad/s")]
    Pole { omega_pole: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    SpecFun(#[from] SpecFunError),
}

/// `a_s = a_bk (1 − Δ_m / (−mω − ω₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceModel {
    /// Bohr radii.
    pub a_bk: f64,
    /// Resonance width Δ_m, rad/s.
    pub delta_m: f64,
    /// Resonance position ω₀, rad/s.
    pub omega0: f64,
    pub m: i32,
}

impl ResonanceModel {
    fn validate(&self) -> Result<(), ScatteringError> {
        if self.m == 0 {
            return Err(ScatteringError::InvalidInput("drive order m must be nonzero".into()));
        }
        if self.a_bk == 0.0 || !self.a_bk.is_finite() {
            return Err(ScatteringError::InvalidInput(
                "background scattering length must be finite and nonzero".into(),
            ));
        }
        if !self.delta_m.is_finite() || !self.omega0.is_finite() {
            return Err(ScatteringError::InvalidInput("non-finite resonance parameter".into()));
        }
        Ok(())
    }

    /// Modulation frequency of the pole, `−ω₀/m`.
    pub fn pole(&self) -> f64 {
        -self.omega0 / self.m as f64
    }

    /// Modulation frequency where `a_s = 0`, `−(ω₀ + Δ_m)/m`.
    pub fn zero_crossing(&self) -> f64 {
        -(self.omega0 + self.delta_m) / self.m as f64
    }
}

pub fn scattering_length(model: &ResonanceModel, omega: f64) -> Result<f64, ScatteringError> {
    model.validate()?;
    if model.delta_m == 0.0 {
        return Ok(model.a_bk);
    }
    let detuning = -(model.m as f64) * omega - model.omega0;
    if detuning == 0.0 {
        return Err(ScatteringError::Pole { omega_pole: model.pole() });
    }
    Ok(model.a_bk * (detuning - model.delta_m) / detuning)
}

/// `Δ_m = (2π)³μ/(2πħ³ a_bk) · J_m(A/ω)² · |⟨φ_res|W|φ₀⁽⁺⁾⟩|²`.
///
/// `matrix_element_sq` is the bare coupling in J²·m³ (plane-wave continuum
/// normalisation); `a_bk` in Bohr radii; result in rad/s.
pub fn width_from_coupling(
    matrix_element_sq: f64,
    amplitude: f64,
    omega: f64,
    m: i32,
    a_bk: f64,
    reduced_mass: f64,
) -> Result<f64, ScatteringError> {
    if a_bk == 0.0 || !a_bk.is_finite() {
        return Err(ScatteringError::InvalidInput("background scattering length must be finite and nonzero".into()));
    }
    if !(omega > 0.0) || !(reduced_mass > 0.0) || !matrix_element_sq.is_finite() || matrix_element_sq < 0.0 {
        return Err(ScatteringError::InvalidInput("need ω > 0, μ > 0 and a non-negative matrix element".into()));
    }
    let j = bessel_j(m, amplitude / omega)?;
    let prefactor = (2.0 * PI).powi(3) * reduced_mass / (2.0 * PI * HBAR.powi(3) * a_bk * BOHR_RADIUS);
    Ok(prefactor * j * j * matrix_element_sq)
}

/// How the collisional wavenumber enters the resonance detuning.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum KTerm {
    /// Detuning is `ω_b − mω − δω_m`; `k` enters only through `Γ/2 = k a_bk Δ_m`.
    #[default]
    Omit,
    /// Adds the relative kinetic energy `ħk²/2μ` to the detuning.
    CollisionEnergy { reduced_mass: f64 },
}

/// Entrance channel dressed by `N` modulation quanta coupled to a bound
/// state carrying `N + m`, which in turn decays into an inelastic channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedChannelModel {
    /// Bohr radii.
    pub a_bk: f64,
    /// Width Δ_m (rad/s); the elastic coupling is `Γ/2 = k a_bk Δ_m`.
    pub delta_m: f64,
    /// Inelastic coupling γ, rad/s.
    pub gamma_in: f64,
    /// Binding energy ω_b, rad/s.
    pub omega_b: f64,
    /// Resonance shift δω_m, rad/s.
    pub delta_shift: f64,
    pub m: i32,
    pub k_term: KTerm,
}

impl DressedChannelModel {
    fn validate(&self) -> Result<(), ScatteringError> {
        if self.a_bk == 0.0 || !self.a_bk.is_finite() {
            return Err(ScatteringError::InvalidInput(
                "background scattering length must be finite and nonzero".into(),
            ));
        }
        if !(self.gamma_in >= 0.0) {
            return Err(ScatteringError::InvalidInput(format!("γ = {} must be >= 0", self.gamma_in)));
        }
        if !(self.delta_m * self.a_bk >= 0.0) {
            return Err(ScatteringError::InvalidInput("elastic coupling Γ = 2k a_bk Δ_m must be >= 0".into()));
        }
        if self.m == 0 {
            return Err(ScatteringError::InvalidInput("drive order m must be nonzero".into()));
        }
        if let KTerm::CollisionEnergy { reduced_mass } = self.k_term {
            if !(reduced_mass > 0.0) {
                return Err(ScatteringError::InvalidInput("reduced mass must be positive".into()));
            }
        }
        Ok(())
    }

    /// `Δ = ω_b − mω − δω_m`.
    pub fn detuning(&self, omega: f64) -> f64 {
        self.omega_b - self.m as f64 * omega - self.delta_shift
    }

    /// Elastic coupling `Γ` at wavenumber `k` (1/m), rad/s.
    pub fn elastic_coupling(&self, k: f64) -> f64 {
        2.0 * k * self.a_bk * BOHR_RADIUS * self.delta_m
    }

    /// The two-channel model with the same pole: `m → −m`, `ω₀ = ω_b − δω_m`.
    pub fn matched_resonance_model(&self) -> ResonanceModel {
        ResonanceModel { a_bk: self.a_bk, delta_m: self.delta_m, omega0: self.omega_b - self.delta_shift, m: -self.m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexScatteringLength {
    /// Re a, Bohr radii.
    pub alpha: f64,
    /// −Im a, Bohr radii.
    pub beta: f64,
}

/// Real and (negative) imaginary parts of the dressed scattering length at
/// modulation frequency `omega` and collisional wavenumber `k` (1/m).
pub fn dressed_alpha_beta(
    model: &DressedChannelModel,
    omega: f64,
    k: f64,
) -> Result<ComplexScatteringLength, ScatteringError> {
    model.validate()?;
    if !(k >= 0.0) || !k.is_finite() {
        return Err(ScatteringError::InvalidInput(format!("wavenumber {k} must be finite and >= 0")));
    }
    let mut x = model.detuning(omega);
    if let KTerm::CollisionEnergy { reduced_mass } = model.k_term {
        x += HBAR * k * k / (2.0 * reduced_mass);
    }
    let half_gamma = 0.5 * model.gamma_in;
    let half_elastic = k * model.a_bk * BOHR_RADIUS * model.delta_m;
    let pole = ScatteringError::Pole { omega_pole: (model.omega_b - model.delta_shift) / model.m as f64 };

    let den_alpha = x * x + half_gamma * half_gamma - half_elastic * half_elastic;
    let den_beta = x * x + (half_gamma + half_elastic).powi(2);
    if den_beta == 0.0 || (den_alpha == 0.0 && x != 0.0) {
        return Err(pole);
    }
    let scale = model.a_bk * model.delta_m;
    let alpha = if x == 0.0 { model.a_bk } else { model.a_bk + scale * x / den_alpha };
    let beta = 0.5 * scale * model.gamma_in / den_beta;
    Ok(ComplexScatteringLength { alpha, beta })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelScaling {
    /// Order `m + n` of the lowest open inelastic channel.
    pub channel_order: i32,
    /// Fitted `d ln γ / d ln A`.
    pub slope: f64,
    /// Small-argument prediction `2|m + n|`.
    pub expected: f64,
}

/// Largest A/ω for which small-argument Bessel behaviour is assumed.
pub const SMALL_DRIVE_LIMIT: f64 = 0.2;

/// Log-log slope of `γ ∝ J_{m+n}(A/ω)²` over `ratios` (values of A/ω), with
/// `n ≥ 1` chosen to minimise `|m + n|`.
pub fn inelastic_channel_scaling(ratios: &[f64], m: i32) -> Result<ChannelScaling, ScatteringError> {
    if ratios.len() < 3 {
        return Err(ScatteringError::InvalidInput("need at least three drive amplitudes".into()));
    }
    if ratios.iter().any(|&r| !(r > 0.0) || r > SMALL_DRIVE_LIMIT) {
        return Err(ScatteringError::InvalidInput(format!("A/ω values must lie in (0, {SMALL_DRIVE_LIMIT}]")));
    }
    let lo = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().cloned().fold(0.0, f64::max);
    if hi / lo < 2.0 {
        return Err(ScatteringError::InvalidInput("A/ω grid spans less than a factor of two".into()));
    }
    let n = (-m).max(1);
    let order = m + n;
    let mut xs = Vec::with_capacity(ratios.len());
    let mut ys = Vec::with_capacity(ratios.len());
    for &r in ratios {
        let j = bessel_j(order, r)?;
        xs.push(r.ln());
        ys.push((j * j).ln());
    }
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(ChannelScaling { channel_order: order, slope: sxy / sxx, expected: 2.0 * order.abs() as f64 })
}

/// Coefficients of the loss forward model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCoefficients {
    /// cm³/s per Bohr radius of β.
    pub two_body: f64,
    /// cm⁶/s per a₀⁴ of α⁴.
    pub three_body: f64,
    /// Wavenumber (1/m) of the unitarity cap on |α|; `None` disables it.
    pub unitarity_k: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossRate {
    /// 1/s.
    pub two_body: f64,
    /// 1/s.
    pub three_body: f64,
}

impl LossRate {
    pub fn total(&self) -> f64 {
        self.two_body + self.three_body
    }
}

/// `|α|` saturated smoothly at `1/k`: `α / √(1 + (kα)²)`.
pub fn unitarity_capped(alpha_bohr: f64, k: f64) -> f64 {
    let ka = k * alpha_bohr * BOHR_RADIUS;
    alpha_bohr / (1.0 + ka * ka).sqrt()
}

/// Per-atom loss rate `L₂ β n + L₃ α⁴ n²`, density in cm⁻³.
pub fn loss_rate_proxy(
    alpha: f64,
    beta: f64,
    density: f64,
    coefficients: &LossCoefficients,
) -> Result<LossRate, ScatteringError> {
    if !(density > 0.0) || !density.is_finite() {
        return Err(ScatteringError::InvalidInput(format!("density {density} must be positive")));
    }
    if !(beta >= 0.0) {
        return Err(ScatteringError::InvalidInput(format!("β = {beta} must be >= 0")));
    }
    if !alpha.is_finite() && coefficients.unitarity_k.is_none() {
        return Err(ScatteringError::InvalidInput("α is not finite and no unitarity cap is set".into()));
    }
    let a = match coefficients.unitarity_k {
        Some(k) if alpha.is_infinite() => alpha.signum() / (k * BOHR_RADIUS),
        Some(k) => unitarity_capped(alpha, k),
        None => alpha,
    };
    Ok(LossRate {
        two_body: coefficients.two_body * beta * density,
        three_body: coefficients.three_body * a.powi(4) * density * density,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn res() -> ResonanceModel {
        ResonanceModel { a_bk: 1000.0, delta_m: 2.0e3, omega0: -1.4e6, m: 1 }
    }

    #[test]
    fn asymptote_zero_and_pole() {
        let r = res();
        let far = r.pole() + 1e7 * r.delta_m;
        assert!((scattering_length(&r, far).unwrap() / r.a_bk - 1.0).abs() < 1e-5);
        assert_eq!(scattering_length(&r, r.zero_crossing()).unwrap(), 0.0);
        assert!(matches!(scattering_length(&r, r.pole()), Err(ScatteringError::Pole { .. })));
        let flat = ResonanceModel { delta_m: 0.0, ..r };
        assert_eq!(scattering_length(&flat, r.pole() + 3.0).unwrap(), r.a_bk);
    }

    #[test]
    fn zero_sits_delta_above_pole() {
        for m in [-2, -1, 1, 3] {
            let r = ResonanceModel { m, omega0: if m > 0 { -1e6 } else { 1e6 }, ..res() };
            let shift = -(m as f64) * (r.zero_crossing() - r.pole());
            assert!((shift - r.delta_m).abs() < 1e-9 * r.delta_m);
        }
    }

    #[test]
    fn width_vanishes_without_drive() {
        assert_eq!(width_from_coupling(1e-50, 0.0, 1e6, 1, 1000.0, 1e-25).unwrap(), 0.0);
        assert!(width_from_coupling(1e-50, 1e5, 1e6, 1, 0.0, 1e-25).is_err());
    }

    #[test]
    fn dressed_extremum_values() {
        let model = DressedChannelModel {
            a_bk: 900.0,
            delta_m: 3.0e3,
            gamma_in: 5.0e4,
            omega_b: 1.0e6,
            delta_shift: 0.0,
            m: -1,
            k_term: KTerm::Omit,
        };
        // Δ = ω_b + ω = γ/2
        let omega = 0.5 * model.gamma_in - model.omega_b;
        let v = dressed_alpha_beta(&model, omega, 0.0).unwrap();
        let want = model.a_bk * model.delta_m / model.gamma_in;
        assert!((v.alpha - model.a_bk - want).abs() < 1e-12 * want);
        assert!((v.beta - want).abs() < 1e-12 * want);
    }

    #[test]
    fn beta_is_non_negative() {
        let model = DressedChannelModel {
            a_bk: 300.0,
            delta_m: 1.0e3,
            gamma_in: 2.0e3,
            omega_b: 5.0e5,
            delta_shift: 1.0e2,
            m: 1,
            k_term: KTerm::CollisionEnergy { reduced_mass: 1.1e-25 },
        };
        for i in 0..200 {
            let omega = 4.9e5 + 100.0 * i as f64;
            for k in [0.0, 1e5, 1e7] {
                assert!(dressed_alpha_beta(&model, omega, k).unwrap().beta >= 0.0);
            }
        }
    }

    #[test]
    fn lowest_inelastic_channel() {
        let grid: Vec<f64> = (0..20).map(|i| 0.002 * 1.25f64.powi(i)).filter(|&r| r <= 0.2).collect();
        let up = inelastic_channel_scaling(&grid, 1).unwrap();
        assert_eq!(up.channel_order, 2);
        let down = inelastic_channel_scaling(&grid, -1).unwrap();
        assert_eq!(down.channel_order, 0);
        assert!(inelastic_channel_scaling(&[0.1, 0.11, 0.12], 1).is_err());
        assert!(inelastic_channel_scaling(&[0.1, 0.2, 0.5], 1).is_err());
    }

    #[test]
    fn loss_rate_power_laws() {
        let c = LossCoefficients { two_body: 1e-14, three_body: 1e-40, unitarity_k: None };
        let zero = loss_rate_proxy(0.0, 0.0, 1e13, &c).unwrap();
        assert_eq!(zero.total(), 0.0);
        let a = loss_rate_proxy(800.0, 20.0, 1e13, &c).unwrap();
        let b = loss_rate_proxy(800.0, 20.0, 2e13, &c).unwrap();
        assert!((b.two_body / a.two_body - 2.0).abs() < 1e-12);
        assert!((b.three_body / a.three_body - 4.0).abs() < 1e-12);
        assert!(loss_rate_proxy(1.0, -1.0, 1e13, &c).is_err());
    }

    #[test]
    fn unitarity_cap_bounds_alpha() {
        let k = 1e6;
        let bound = 1.0 / (k * BOHR_RADIUS);
        for a in [1.0, 1e3, 1e5, 1e9, -1e9] {
            let capped = unitarity_capped(a, k);
            assert!(capped.abs() < bound);
            assert_eq!(capped.signum(), f64::signum(a));
        }
        assert!((unitarity_capped(10.0, k) - 10.0).abs() < 1e-5);
        let c = LossCoefficients { two_body: 0.0, three_body: 1e-40, unitarity_k: Some(k) };
        assert!(loss_rate_proxy(f64::INFINITY, 0.0, 1e13, &c).unwrap().total().is_finite());
    }
}
