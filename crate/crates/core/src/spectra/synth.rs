use std::f64::consts::TAU;

use rayon::prelude::*;

use super::{Axis, SpectraError, Spectrum, SpectrumMetadata, SpectrumPoint, MAX_RELATIVE_ATOMS};
use crate::atomdata::MolecularRegistry;
use crate::lightshift::{level_modulation_amplitude, LightField, Waveform};
use crate::noise;
use crate::scattering::{
    dressed_alpha_beta, loss_rate_proxy, scattering_length, ComplexScatteringLength, DressedChannelModel, KTerm,
    LossCoefficients, ResonanceModel, ScatteringError,
};
use crate::specfun::bessel_j;

/// Anything that yields resonant scattering lengths along a scan axis.
pub trait ResonanceSource: Sync {
    fn axis(&self) -> Axis;
    /// Background scattering length, Bohr radii.
    fn background(&self) -> f64;
    /// One complex scattering length per resonance term at scan position `x`
    /// and collisional wavenumber `k` (1/m).
    fn channels(&self, x: f64, k: f64) -> Result<Vec<ComplexScatteringLength>, SpectraError>;
}

/// Single two-channel resonance on a modulation-frequency (Hz) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoChannelSource {
    pub model: ResonanceModel,
}

impl ResonanceSource for TwoChannelSource {
    fn axis(&self) -> Axis {
        Axis::ModulationFreqHz
    }

    fn background(&self) -> f64 {
        self.model.a_bk
    }

    fn channels(&self, x: f64, _k: f64) -> Result<Vec<ComplexScatteringLength>, SpectraError> {
        let alpha = match scattering_length(&self.model, TAU * x) {
            Ok(a) => a,
            Err(ScatteringError::Pole { .. }) => f64::INFINITY,
            Err(e) => return Err(e.into()),
        };
        Ok(vec![ComplexScatteringLength { alpha, beta: 0.0 }])
    }
}

/// Dressed three-channel resonance on a modulation-frequency (Hz) axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DressedSource {
    pub model: DressedChannelModel,
}

impl ResonanceSource for DressedSource {
    fn axis(&self) -> Axis {
        Axis::ModulationFreqHz
    }

    fn background(&self) -> f64 {
        self.model.a_bk
    }

    fn channels(&self, x: f64, k: f64) -> Result<Vec<ComplexScatteringLength>, SpectraError> {
        Ok(vec![dressed_alpha_beta(&self.model, TAU * x, k)?])
    }
}

/// Registry molecular state driven by an intensity-modulated beam, with all
/// orders `|m| = 1..=max_order`.
///
/// The beam shifts the state by the DC part of the differential light shift
/// and modulates it with amplitude `A`. Order `k` has width
/// `width_scale · J_k(A/ω_k)²` evaluated at its own resonance `ω_k = |ω_b|/k`.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularSource {
    pub registry: MolecularRegistry,
    pub state: String,
    pub axis: Axis,
    /// Field (G) of a frequency scan, or modulation frequency (Hz) of a field scan.
    pub fixed: f64,
    pub field: LightField,
    /// Differential light shift, Hz per W/cm²; positive moves the state up.
    pub shift_slope: f64,
    pub waveform: Waveform,
    /// rad/s.
    pub width_scale: f64,
    /// rad/s.
    pub gamma_in: f64,
    /// Bohr radii.
    pub a_bk: f64,
    pub max_order: u32,
}

impl MolecularSource {
    /// `ω_b` including the DC light shift at field `b_g`, rad/s.
    pub fn omega_b(&self, b_g: f64) -> Result<f64, SpectraError> {
        let e = self.registry.energy(&self.state, b_g)?;
        let lm = level_modulation_amplitude(&self.field, self.shift_slope, self.waveform)?;
        Ok(-(TAU * e + lm.dc_shift))
    }

    /// Modulation frequencies (Hz) of each order at field `b_g`.
    pub fn resonance_frequencies(&self, b_g: f64) -> Result<Vec<f64>, SpectraError> {
        let w_b = self.omega_b(b_g)?;
        Ok((1..=self.max_order).map(|k| w_b.abs() / (TAU * k as f64)).collect())
    }
}

impl ResonanceSource for MolecularSource {
    fn axis(&self) -> Axis {
        self.axis
    }

    fn background(&self) -> f64 {
        self.a_bk
    }

    fn channels(&self, x: f64, k: f64) -> Result<Vec<ComplexScatteringLength>, SpectraError> {
        let (b_g, freq) = match self.axis {
            Axis::ModulationFreqHz => (self.fixed, x),
            Axis::FieldGauss => (x, self.fixed),
        };
        let w_b = self.omega_b(b_g)?;
        if w_b == 0.0 {
            return Ok(Vec::new());
        }
        let amplitude = level_modulation_amplitude(&self.field, self.shift_slope, self.waveform)?.amplitude;
        let sign = w_b.signum() as i32;
        let mut out = Vec::with_capacity(self.max_order as usize);
        for order in 1..=self.max_order as i32 {
            let omega_k = w_b.abs() / order as f64;
            let j = bessel_j(order, amplitude / omega_k)?;
            let model = DressedChannelModel {
                a_bk: self.a_bk,
                delta_m: self.width_scale * j * j,
                gamma_in: self.gamma_in,
                omega_b: w_b,
                delta_shift: 0.0,
                m: sign * order,
                k_term: KTerm::Omit,
            };
            out.push(dressed_alpha_beta(&model, TAU * freq, k)?);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisConfig {
    pub hold_time_ms: f64,
    /// cm⁻³.
    pub density_cm3: f64,
    pub loss: LossCoefficients,
    /// Collisional wavenumber, 1/m.
    pub collision_k: f64,
    /// Standard deviation of additive Gaussian noise on `N_m/N_0`.
    pub noise_sigma: f64,
    pub seed: u64,
    pub metadata: SpectrumMetadata,
}

/// `N_m/N_0 = exp(−(R − R_bg) t)`, where `R_bg` is the loss at the background
/// scattering length. Without a resonance the spectrum is flat at one.
pub fn synthesize_spectrum(
    source: &dyn ResonanceSource,
    config: &SynthesisConfig,
    grid: &[f64],
) -> Result<Spectrum, SpectraError> {
    if grid.is_empty() {
        return Err(SpectraError::InvalidInput("empty grid".into()));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid.iter().any(|x| !x.is_finite()) {
        return Err(SpectraError::InvalidInput("grid must be finite and strictly increasing".into()));
    }
    if !(config.hold_time_ms > 0.0) {
        return Err(SpectraError::InvalidInput("hold time must be positive".into()));
    }
    if !(config.noise_sigma >= 0.0) || !config.noise_sigma.is_finite() {
        return Err(SpectraError::InvalidInput("noise sigma must be >= 0".into()));
    }
    let hold_s = config.hold_time_ms * 1e-3;
    let a_bk = source.background();
    let background = loss_rate_proxy(a_bk, 0.0, config.density_cm3, &config.loss)?.total();

    let clean = grid
        .par_iter()
        .map(|&x| {
            let mut excess = 0.0;
            for c in source.channels(x, config.collision_k)? {
                excess += loss_rate_proxy(c.alpha, c.beta, config.density_cm3, &config.loss)?.total() - background;
            }
            let y = (-excess * hold_s).exp();
            if !y.is_finite() {
                return Err(SpectraError::InvalidInput(format!("non-finite loss at x = {x}")));
            }
            Ok(y)
        })
        .collect::<Result<Vec<f64>, SpectraError>>()?;

    let mut rng = noise::seeded(config.seed);
    let points = grid
        .iter()
        .zip(clean)
        .map(|(&x, y)| {
            let noisy = if config.noise_sigma > 0.0 { y + noise::gaussian(&mut rng, config.noise_sigma) } else { y };
            SpectrumPoint { x, relative_atoms: noisy.clamp(0.0, MAX_RELATIVE_ATOMS), sigma: config.noise_sigma }
        })
        .collect();

    let mut metadata = config.metadata.clone();
    metadata.hold_time_ms = Some(config.hold_time_ms);
    metadata.seed = Some(config.seed);
    Spectrum::new(source.axis(), points, metadata)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(noise_sigma: f64) -> SynthesisConfig {
        SynthesisConfig {
            hold_time_ms: 100.0,
            density_cm3: 1e13,
            loss: LossCoefficients { two_body: 1e-13, three_body: 1e-41, unitarity_k: Some(1e6) },
            collision_k: 1e5,
            noise_sigma,
            seed: 42,
            metadata: SpectrumMetadata::default(),
        }
    }

    fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
    }

    #[test]
    fn no_width_gives_flat_unit_spectrum() {
        let src = TwoChannelSource { model: ResonanceModel { a_bk: 200.0, delta_m: 0.0, omega0: -TAU * 1e5, m: 1 } };
        let s = synthesize_spectrum(&src, &config(0.0), &grid(9e4, 1.1e5, 101)).unwrap();
        assert!(s.points().iter().all(|p| p.relative_atoms == 1.0));
    }

    #[test]
    fn pole_on_grid_stays_finite() {
        let src =
            TwoChannelSource { model: ResonanceModel { a_bk: 200.0, delta_m: TAU * 500.0, omega0: -TAU * 1e5, m: 1 } };
        let s = synthesize_spectrum(&src, &config(0.0), &grid(9e4, 1.1e5, 201)).unwrap();
        assert!(s.points().iter().all(|p| p.relative_atoms.is_finite()));
        let min = s.points().iter().map(|p| p.relative_atoms).fold(1.0, f64::min);
        assert!(min < 0.9);
    }

    #[test]
    fn seeded_noise_is_reproducible() {
        let src =
            TwoChannelSource { model: ResonanceModel { a_bk: 200.0, delta_m: TAU * 500.0, omega0: -TAU * 1e5, m: 1 } };
        let g = grid(9e4, 1.1e5, 64);
        let a = synthesize_spectrum(&src, &config(0.01), &g).unwrap();
        let b = synthesize_spectrum(&src, &config(0.01), &g).unwrap();
        assert_eq!(a.to_csv_string(), b.to_csv_string());
        let mut other = config(0.01);
        other.seed = 43;
        assert_ne!(synthesize_spectrum(&src, &other, &g).unwrap().to_csv_string(), a.to_csv_string());
    }

    #[test]
    fn rejects_unsorted_grid() {
        let src = TwoChannelSource { model: ResonanceModel { a_bk: 200.0, delta_m: 1.0, omega0: -1.0, m: 1 } };
        assert!(synthesize_spectrum(&src, &config(0.0), &[2.0, 1.0]).is_err());
    }
}
