//! Property tests for model and geometry invariants.

use membrane_kit::inflation::{self, Infill, MembraneSpec};
use membrane_kit::material::{self, HyperelasticModel};
use membrane_kit::toolpath::{self, CalibrationTable, PrinterProfile};
use proptest::prelude::*;

fn nh_spec(t0: f64, a: f64) -> MembraneSpec {
    MembraneSpec {
        radius_a: a,
        thickness_t0: t0,
        layers: 1,
        infill: Infill::Lines,
        material: HyperelasticModel::NeoHookean { mu: 0.1 },
    }
}

proptest! {
    /// Membrane thickness thins quadratically with the stretch at every state.
    #[test]
    fn thinning_is_quadratic(
        theta in 1e-3..3.0f64,
        t0 in 0.1..3.0f64,
        a in 5.0..60.0f64,
    ) {
        let s = inflation::cap_state(&nh_spec(t0, a), theta).unwrap();
        prop_assert!((s.current_thickness * s.stretch * s.stretch - t0).abs() <= 1e-12 * t0);
        prop_assert!(s.stretch >= 1.0);
        prop_assert!(s.enclosed_volume >= 0.0);
    }

    /// Ballooning pressure is linear in the reference thickness; the limit
    /// stretch does not depend on it.
    #[test]
    fn ballooning_linear_in_thickness(
        t0 in 0.2..2.0f64,
        scale in 1.1..4.0f64,
        a in 10.0..40.0f64,
    ) {
        let r1 = inflation::find_ballooning(&nh_spec(t0, a)).unwrap();
        let r2 = inflation::find_ballooning(&nh_spec(scale * t0, a)).unwrap();
        prop_assert!(r1.found && r2.found);
        prop_assert!((r2.p_balloon_kpa / r1.p_balloon_kpa - scale).abs() < 1e-6 * scale);
        prop_assert!((r2.stretch_at_limit - r1.stretch_at_limit).abs() < 1e-6);
    }

    /// Every model carries zero stress in the reference configuration and
    /// tension beyond it.
    #[test]
    fn reference_state_is_stress_free(
        mu in 0.01..1.0f64,
        jm in 20.0..300.0f64,
        c01_frac in 0.0..0.5f64,
        alpha in 1.2..4.0f64,
        stretch in 1.0..4.0f64,
    ) {
        let models = [
            HyperelasticModel::NeoHookean { mu },
            HyperelasticModel::MooneyRivlin { c10: mu / 2.0, c01: mu / 2.0 * c01_frac },
            HyperelasticModel::Ogden { terms: vec![(mu, alpha)] },
            HyperelasticModel::Gent { mu, jm },
        ];
        for m in &models {
            prop_assert!(material::uniaxial_eng_stress(m, 1.0).unwrap().abs() < 1e-12);
            if let Ok(s) = material::uniaxial_eng_stress(m, stretch) {
                prop_assert!(s >= 0.0);
            }
        }
    }

    /// Line-infill chord length multiset is invariant under pattern rotation.
    #[test]
    fn chords_rotation_invariant(
        radius in 2.0..40.0f64,
        spacing in 0.2..1.5f64,
        angle in 0.0..180.0f64,
    ) {
        let lengths = |chords: Vec<((f64, f64), (f64, f64))>| -> Vec<f64> {
            let mut v: Vec<f64> = chords
                .iter()
                .map(|c| ((c.1 .0 - c.0 .0).powi(2) + (c.1 .1 - c.0 .1).powi(2)).sqrt())
                .collect();
            v.sort_by(|x, y| x.partial_cmp(y).unwrap());
            v
        };
        let a = lengths(toolpath::plan_lines(radius, spacing, 0.0).unwrap());
        let b = lengths(toolpath::plan_lines(radius, spacing, angle).unwrap());
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    /// Emitted G-code survives parse and re-emit byte for byte.
    #[test]
    fn gcode_roundtrip_stable(
        diameter in 5.0..50.0f64,
        layers in 1u32..4,
    ) {
        let spec = toolpath::MembranePrintSpec {
            diameter,
            layers,
            ..toolpath::MembranePrintSpec::default()
        };
        prop_assume!(diameter / 2.0 - spec.perimeter_loops as f64 * spec.line_width > spec.line_width);
        let path = toolpath::plan_membrane(&spec).unwrap();
        let calibration = CalibrationTable::new(vec![(10.0, 1.05), (60.0, 0.95)]).unwrap();
        let (_, text) = toolpath::emit_gcode(&path, &PrinterProfile::default(), &calibration).unwrap();
        let reemitted = toolpath::parse_gcode(&text).unwrap().to_text();
        prop_assert_eq!(reemitted, text);
    }
}
