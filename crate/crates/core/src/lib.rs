//! Numerical toolkit for modulation-induced Feshbach resonances.
//!
//! A far-detuned, intensity-modulated laser shakes the energy of a molecular
//! level relative to the free two-atom scattering state. Whenever an integer
//! multiple of the modulation frequency bridges the gap, the scattering length
//! resonates exactly like a magnetic Feshbach resonance.
//!
//! * [`specfun`]: Bessel `J_n`, Wigner 3-j / 6-j.
//! * [`atomdata`]: constants, cesium D-line table, molecular-state registry.
//! * [`lightshift`]: vector polarizability, fictitious field, photon scattering, heating.
//! * [`floquet`]: driven two-level model, Bessel-weighted coupling, Floquet-matrix solver.
//! * [`scattering`]: resonant scattering length, dressed three-channel model, loss rates.
//! * [`spectra`]: synthetic loss spectra, peak finding, Fano / Landau–Zener / linear fits,
//!   energy-map assembly.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod atomdata;
pub mod error;
pub mod floquet;
pub mod lightshift;
pub mod lsq;
pub mod noise;
pub mod scattering;
pub mod specfun;
pub mod spectra;

pub use error::Error;
