//! CODATA 2018 values, SI.

use std::f64::consts::PI;

pub const PLANCK: f64 = 6.626_070_15e-34;
pub const HBAR: f64 = PLANCK / (2.0 * PI);
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const VACUUM_PERMEABILITY: f64 = 1.256_637_062_12e-6;
pub const BOHR_MAGNETON: f64 = 9.274_010_078_3e-24;
pub const BOLTZMANN: f64 = 1.380_649e-23;
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

pub const TESLA_PER_GAUSS: f64 = 1e-4;
/// W/m² per W/cm².
pub const W_M2_PER_W_CM2: f64 = 1e4;
