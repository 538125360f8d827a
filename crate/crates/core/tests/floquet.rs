use std::f64::consts::TAU;

use mifr::floquet::{avoided_crossing_gap, floquet_spectrum, fold, DrivenTwoLevel};
use proptest::prelude::*;

const W: f64 = TAU * 100e3;

fn model() -> impl Strategy<Value = DrivenTwoLevel> {
    (-3.3f64..3.3, 0.0f64..0.2, -3.0f64..3.0)
        .prop_map(|(b, rabi, a)| DrivenTwoLevel::from_detuning(b * W, rabi * W, a * W, W))
}

fn circ(a: f64, b: f64) -> f64 {
    fold(a - b, W).abs()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn truncation_n_and_n_plus_5_agree(m in model()) {
        let n = m.minimum_truncation();
        let a = floquet_spectrum(&m, n).unwrap();
        let b = floquet_spectrum(&m, n + 5).unwrap();
        for (x, y) in a.quasi_energies.iter().zip(&b.quasi_energies) {
            prop_assert!(circ(*x, *y) < 1e-9 * W, "{x} vs {y}");
        }
    }

    #[test]
    fn common_level_offset_shifts_quasi_energies(m in model(), c in -0.45f64..0.45) {
        let shifted = DrivenTwoLevel { omega_alpha: m.omega_alpha + c * W, omega_beta: m.omega_beta + c * W, ..m };
        let n = m.minimum_truncation() + 5;
        let a = floquet_spectrum(&m, n).unwrap();
        let b = floquet_spectrum(&shifted, n).unwrap();
        for x in a.quasi_energies {
            let target = x + c * W;
            let best = b.quasi_energies.iter().map(|y| circ(*y, target)).fold(f64::INFINITY, f64::min);
            prop_assert!(best < 1e-9 * W, "{x} + {} not found in {:?}", c * W, b.quasi_energies);
        }
        prop_assert!((a.gap() - b.gap()).abs() < 1e-9 * W);
    }

    #[test]
    fn drive_sign_leaves_gaps_unchanged(m in model()) {
        let flipped = DrivenTwoLevel { amplitude: -m.amplitude, ..m };
        let n = m.minimum_truncation() + 5;
        let a = floquet_spectrum(&m, n).unwrap().gap();
        let b = floquet_spectrum(&flipped, n).unwrap().gap();
        prop_assert!((a - b).abs() < 1e-9 * W, "{a} vs {b}");
    }
}

#[test]
fn gap_position_unchanged_by_common_offset() {
    let base = DrivenTwoLevel::from_detuning(-TAU * 228.7e3, TAU * 2e3, TAU * 150e3, TAU * 228.7e3);
    let shifted = DrivenTwoLevel { omega_alpha: base.omega_alpha + TAU * 37e3, omega_beta: TAU * 37e3, ..base };
    let a = avoided_crossing_gap(&base, 1, TAU * 20e3).unwrap();
    let b = avoided_crossing_gap(&shifted, 1, TAU * 20e3).unwrap();
    assert!((a.center - b.center).abs() < 1e-6 * a.center, "{} vs {}", a.center, b.center);
    assert!((a.gap - b.gap).abs() < 1e-6 * a.gap);
}

/// Second-order level repulsion from the off-resonant sidebands moves the
/// crossing by an amount growing as `Ω²`.
#[test]
fn crossing_shift_scales_quadratically_with_coupling() {
    let wb = -TAU * 228.7e3;
    let shift = |rabi: f64| {
        let m = DrivenTwoLevel::from_detuning(wb, rabi, TAU * 150e3, -wb);
        avoided_crossing_gap(&m, 1, TAU * 10e3).unwrap().center + wb
    };
    let (r1, r2) = (TAU * 1e3, TAU * 4e3);
    let exponent = (shift(r2) / shift(r1)).abs().ln() / (r2 / r1).ln();
    assert!((exponent - 2.0).abs() < 0.05, "exponent {exponent}");
}
