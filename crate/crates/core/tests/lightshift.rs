use mifr::atomdata::AtomSpecies;
use mifr::lightshift::{
    fictitious_field, heating_rate, level_modulation_amplitude, scattering_rate, LightField, Polarization, Waveform,
};
use nalgebra::Complex;
use proptest::prelude::*;

fn field(intensity: f64, detuning_ghz: f64, pol: Polarization) -> LightField {
    LightField::cw(intensity, detuning_ghz * 1e9, pol)
}

fn polarization() -> impl Strategy<Value = Polarization> {
    (0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(a, b, c, phase)| {
        Polarization::normalized(Complex::new(a, 0.0), Complex::new(b, 0.0), Complex::from_polar(c + 1e-3, phase))
            .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn fictitious_field_odd_under_helicity_swap(pol in polarization(), ghz in prop_oneof![-60.0f64..-5.0, 5.0f64..60.0]) {
        let cs = AtomSpecies::cesium();
        let b = fictitious_field(&field(2.0, ghz, pol), &cs, 3).unwrap();
        let swapped = fictitious_field(&field(2.0, ghz, pol.swapped()), &cs, 3).unwrap();
        prop_assert_eq!(b, -swapped);
    }

    #[test]
    fn quantities_linear_in_intensity(pol in polarization(), ghz in prop_oneof![-60.0f64..-5.0, 5.0f64..60.0], m_f in -3i32..=3) {
        let cs = AtomSpecies::cesium();
        let eval = |i: f64| {
            let f = field(i, ghz, pol);
            [
                fictitious_field(&f, &cs, 3).unwrap(),
                scattering_rate(&f, &cs, 3, m_f).unwrap(),
                heating_rate(&f, &cs, 3, m_f).unwrap(),
                level_modulation_amplitude(&LightField { modulation_depth: 0.86, ..f }, -8e3, Waveform::Cosine)
                    .unwrap()
                    .amplitude,
            ]
        };
        let base = eval(1.0);
        for i in [0.37, 2.5, 11.0] {
            for (got, unit) in eval(i).iter().zip(base) {
                let want = unit * i;
                prop_assert!((got - want).abs() <= 1e-12 * want.abs(), "I {i}: {got} vs {want}");
            }
        }
    }
}

fn red_blue(ghz: f64) -> (f64, f64, f64, f64) {
    let cs = AtomSpecies::cesium();
    let pol = Polarization::sigma_minus();
    let red = field(1.0, -ghz, pol);
    let blue = field(1.0, ghz, pol);
    (
        scattering_rate(&red, &cs, 3, 3).unwrap(),
        scattering_rate(&blue, &cs, 3, 3).unwrap(),
        fictitious_field(&red, &cs, 3).unwrap(),
        fictitious_field(&blue, &cs, 3).unwrap(),
    )
}

/// Equal red and blue detunings give opposite fields everywhere on
/// 10–40 GHz. The rates converge as the excited hyperfine splitting becomes
/// small against the detuning and agree to 5% from 26 GHz on.
#[test]
fn red_and_blue_detuning_compared() {
    let mut prev_mismatch = f64::INFINITY;
    for k in 0..=30 {
        let ghz = 10.0 + k as f64;
        let (rr, rb, fr, fb) = red_blue(ghz);
        assert!(fr * fb < 0.0, "{ghz} GHz: fields {fr} {fb}");
        let mismatch = (rr - rb).abs() / rr.max(rb);
        assert!(mismatch < prev_mismatch, "{ghz} GHz");
        prev_mismatch = mismatch;
        if ghz >= 26.0 {
            assert!(mismatch < 0.05, "{ghz} GHz: rates differ by {mismatch}");
        }
    }
}

#[test]
fn field_per_scattered_photon_grows_with_detuning() {
    for sign in [-1.0, 1.0] {
        let mut prev = 0.0;
        for k in 0..=30 {
            let ghz = 10.0 + k as f64;
            let (rr, rb, fr, fb) = red_blue(ghz);
            let ratio = if sign < 0.0 { (fr / rr).abs() } else { (fb / rb).abs() };
            assert!(ratio > prev, "{ghz} GHz");
            prev = ratio;
        }
    }
}
