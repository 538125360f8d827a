//! Closed-loop scan generator shared by the pipeline tests.

#![allow(dead_code)]

pub mod racah;

use std::f64::consts::TAU;

use mifr::atomdata::MolecularRegistry;
use mifr::lightshift::{LightField, Polarization, Waveform};
use mifr::scattering::LossCoefficients;
use mifr::spectra::{
    assemble_energy_map, process_scans, synthesize_spectrum, Axis, EnergyMapPoint, MolecularSource, PeakProcessing,
    ScanPeaks, Spectrum, SpectrumMetadata, SynthesisConfig,
};

/// Differential light shift of the molecular level, Hz per W/cm².
pub const SHIFT_SLOPE: f64 = -8.0e3;
/// Reference binding energy that sets the intensity scale, Hz.
const REFERENCE_ENERGY: f64 = 228.7e3;
/// Intensities for the fundamental and for the second order, W/cm², at the
/// reference energy; scaled by `|E|/REFERENCE_ENERGY` for other states so
/// every scan probes the same `A/ω`.
const FUNDAMENTAL_INTENSITIES: [f64; 4] = [0.7, 0.9, 1.1, 1.3];
const SECOND_ORDER_INTENSITIES: [f64; 4] = [3.75, 4.5, 5.25, 6.0];

pub const NOISE: f64 = 0.01;
const GRID_HALF_SPAN: f64 = 15e3;
const GRID_STEP: f64 = 200.0;

pub struct Case {
    pub state: &'static str,
    pub b_g: f64,
}

pub const CASES: [Case; 4] = [
    Case { state: "4g(4)", b_g: 19.41 },
    Case { state: "4g(4)", b_g: 19.90 },
    Case { state: "4d", b_g: 47.36 },
    Case { state: "6g(6)", b_g: 18.2 },
];

pub fn processing() -> PeakProcessing {
    PeakProcessing { min_depth: 0.1, min_separation: 10e3, fit_half_window: 6e3, match_window: 8e3 }
}

pub fn source(registry: &MolecularRegistry, case: &Case, intensity: f64) -> MolecularSource {
    let mut field = LightField::cw(intensity, -23e9, Polarization::sigma_minus());
    field.modulation_depth = 1.0;
    MolecularSource {
        registry: registry.clone(),
        state: case.state.to_string(),
        axis: Axis::ModulationFreqHz,
        fixed: case.b_g,
        field,
        shift_slope: SHIFT_SLOPE,
        waveform: Waveform::Cosine,
        width_scale: TAU * 50e3,
        gamma_in: TAU * 4e3,
        a_bk: 1000.0,
        max_order: 3,
    }
}

fn config(seed: u64, b_g: f64, intensity: f64) -> SynthesisConfig {
    SynthesisConfig {
        hold_time_ms: 100.0,
        density_cm3: 1e13,
        loss: LossCoefficients { two_body: 9e-14, three_body: 0.0, unitarity_k: None },
        collision_k: 1e5,
        noise_sigma: NOISE,
        seed,
        metadata: SpectrumMetadata { fixed_value: Some(b_g), intensity: Some(intensity), ..Default::default() },
    }
}

/// Order-1 and order-2 scans at four intensities each for every case, on
/// windows around the light-shifted resonance.
pub fn synthesize_scans(registry: &MolecularRegistry, seed: u64) -> Vec<(f64, Spectrum, f64)> {
    let mut out = Vec::new();
    let mut n = 0u64;
    for case in &CASES {
        let scale = registry.energy(case.state, case.b_g).unwrap().abs() / REFERENCE_ENERGY;
        for (order, set) in [(1usize, FUNDAMENTAL_INTENSITIES), (2, SECOND_ORDER_INTENSITIES)] {
            for base in set {
                let intensity = base * scale;
                let src = source(registry, case, intensity);
                let center = src.resonance_frequencies(case.b_g).unwrap()[order - 1];
                let steps = (2.0 * GRID_HALF_SPAN / GRID_STEP) as usize;
                let grid: Vec<f64> = (0..=steps).map(|i| center - GRID_HALF_SPAN + GRID_STEP * i as f64).collect();
                let spec =
                    synthesize_spectrum(&src, &config(seed.wrapping_add(n), case.b_g, intensity), &grid).unwrap();
                n += 1;
                out.push((case.b_g, spec, intensity));
            }
        }
    }
    out
}

pub fn run_pipeline(registry: &MolecularRegistry, seed: u64) -> (Vec<ScanPeaks>, Vec<EnergyMapPoint>) {
    let scans = synthesize_scans(registry, seed);
    let peaks = process_scans(&scans, &processing()).unwrap();
    let map = assemble_energy_map(&peaks, registry, 3).unwrap();
    (peaks, map)
}
