mod common;

use btwist_core::twist::{forward_map, iterate_orbit, map_step, Direction};
use btwist_core::{CylinderState, GenFunction};
use common::{gf, p0, p1, p2};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn forward_then_backward_is_identity(which in 0usize..3, c in prop_oneof![Just(0.0), 0.0f64..0.02], t in 0.0f64..1.0, tau in 1.2f64..2.8) {
        let p = [p0(), p1(), p2()][which].clone();
        let g = gf(p, c, 1.0, 3.0);
        let k = g.jet(t, t + tau).unwrap().d1;
        let there = forward_map(&g, CylinderState::new(t, k), Direction::Forward).unwrap();
        let back = forward_map(&g, there, Direction::Backward).unwrap();
        let dt = (back.t - t).rem_euclid(1.0);
        prop_assert!(dt.min(1.0 - dt) <= 1e-9);
        prop_assert!((back.k - k).abs() <= 1e-9 * k.abs().max(1.0));
    }

    #[test]
    fn twist_is_monotone(which in 0usize..3, t in 0.0f64..1.0, tau in 1.2f64..2.7, dtau in 0.01f64..0.2) {
        let p = [p0(), p1(), p2()][which].clone();
        let g = gf(p, 0.0, 1.0, 3.0);
        let k_small = g.jet(t, t + tau + dtau).unwrap().d1;
        let k_large = g.jet(t, t + tau).unwrap().d1;
        prop_assume!(k_large > k_small);
        let a = map_step(&g, CylinderState::new(t, k_large), Direction::Forward).unwrap();
        let b = map_step(&g, CylinderState::new(t, k_small), Direction::Forward).unwrap();
        prop_assert!(a.t_lift < b.t_lift);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn orbits_are_exact(which in 1usize..3, t in 0.0f64..1.0, tau in 5.0f64..9.0) {
        let p = [p0(), p1(), p2()][which].clone();
        let g = gf(p, 0.0, 1.0, 14.0);
        let k = g.jet(t, t + tau).unwrap().d1;
        let orbit = iterate_orbit(&g, CylinderState::new(t, k), 50).unwrap();
        let lt = &orbit.lifted_times;
        for n in 1..lt.len() - 1 {
            let k_n = orbit.states[n].k;
            prop_assert!((g.jet(lt[n], lt[n + 1]).unwrap().d1 - k_n).abs() <= 1e-9);
            prop_assert!((-g.jet(lt[n - 1], lt[n]).unwrap().d2 - k_n).abs() <= 1e-9);
        }
        prop_assert!(orbit.max_del_residual() <= 1e-9);
    }

    #[test]
    fn constant_profile_conserves_k(t in 0.0f64..1.0, tau in 1.5f64..12.0) {
        let g = gf(p0(), 0.0, 1.0, 14.0);
        let k = g.jet(t, t + tau).unwrap().d1;
        let orbit = iterate_orbit(&g, CylinderState::new(t, k), 30).unwrap();
        prop_assert!(orbit.stop.is_none());
        for s in &orbit.states {
            prop_assert!((s.k - k).abs() <= 1e-12 * k.abs());
        }
    }
}

fn p2_extension() -> &'static btwist_core::ExtendedGF {
    use btwist_core::twist::{extend, BlendBands};
    static EXT: std::sync::OnceLock<btwist_core::ExtendedGF> = std::sync::OnceLock::new();
    EXT.get_or_init(|| extend(gf(p2(), 0.0, 1.0, 14.0), BlendBands::new(2.0, 3.0, 12.0, 13.0), 0.0).unwrap())
}

#[test]
fn extension_agrees_with_inner_core() {
    let ext = p2_extension();
    let inner = gf(p2(), 0.0, 1.0, 14.0);
    for i in 0..50 {
        let t = i as f64 / 50.0;
        let tau = 3.0 + 9.0 * i as f64 / 49.0;
        assert_eq!(ext.jet(t, t + tau).unwrap(), inner.jet(t, t + tau).unwrap());
    }
    assert!(ext.tail_coefficient() > 0.0);
    assert!(ext.worst_band_d12().unwrap() < 0.0);
}

#[test]
fn extension_is_c2_across_band_edges() {
    let ext = p2_extension();
    for edge in [2.0, 3.0, 12.0, 13.0] {
        for t in [0.0, 0.3, 0.71] {
            let a = ext.jet(t, t + edge - 1e-9).unwrap();
            let b = ext.jet(t, t + edge + 1e-9).unwrap();
            assert!(a.max_abs_diff(&b) <= 1e-6, "edge {edge}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn extension_twists_everywhere(t in 0.0f64..1.0, tau in 0.01f64..200.0) {
        let ext = p2_extension();
        prop_assert!(ext.jet(t, t + tau).unwrap().d12 < 0.0);
        let shifted = ext.jet(t + 3.0, t + 3.0 + tau).unwrap();
        prop_assert!((shifted.value - ext.jet(t, t + tau).unwrap().value).abs() <= 1e-12 * shifted.value.abs().max(1.0));
    }

    #[test]
    fn extension_maps_invert(t in 0.0f64..1.0, tau in 0.05f64..60.0) {
        let ext = p2_extension();
        let k = ext.jet(t, t + tau).unwrap().d1;
        let step = map_step(ext, CylinderState::new(t, k), Direction::Forward).unwrap();
        prop_assert!((step.tau - tau).abs() <= 1e-9 * tau.max(1.0));
        let back = forward_map(ext, step.image, Direction::Backward).unwrap();
        let dt = (back.t - t).rem_euclid(1.0);
        prop_assert!(dt.min(1.0 - dt) <= 1e-9);
    }
}
