mod common;

use btwist_core::generating::{h0_jet, hc_jet};
use common::{any_profile, central, even_profile, hc_literal};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn diagonal_periodicity(p in any_profile(), t0 in -5.0f64..5.0, tau in 0.2f64..10.0, k in -50i32..50, c in 0.0f64..0.05) {
        let a = hc_jet(&p, c, t0, t0 + tau).unwrap();
        let b = hc_jet(&p, c, t0 + k as f64, t0 + tau + k as f64).unwrap();
        prop_assert!((a.value - b.value).abs() <= 1e-12 * a.value.abs());
    }

    #[test]
    fn zero_c_is_h0(p in any_profile(), t0 in -5.0f64..5.0, tau in 0.05f64..20.0) {
        prop_assert_eq!(hc_jet(&p, 0.0, t0, t0 + tau).unwrap(), h0_jet(&p, t0, t0 + tau));
    }

    #[test]
    fn even_profiles_are_time_reversible(p in even_profile(), t0 in -2.0f64..2.0, tau in 0.1f64..10.0) {
        let t1 = t0 + tau;
        let a = h0_jet(&p, t0, t1).value;
        let b = h0_jet(&p, -t1, -t0).value;
        prop_assert!((a - b).abs() <= 1e-13 * a.abs());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn first_partials_match_finite_differences(p in any_profile(), t0 in 0.0f64..1.0, tau in 0.3f64..8.0, c in 0.0f64..0.05) {
        let j = hc_jet(&p, c, t0, t0 + tau).unwrap();
        let f = |a: f64, b: f64| hc_literal(&p, c, a, b);
        let scale = j.d1.abs().max(j.d2.abs());
        prop_assert!((central(f, t0, t0 + tau, 0, 1e-5) - j.d1).abs() <= 1e-6 * scale);
        prop_assert!((central(f, t0, t0 + tau, 1, 1e-5) - j.d2).abs() <= 1e-6 * scale);
        prop_assert!((f(t0, t0 + tau) - j.value).abs() <= 1e-13 * j.value.abs());
    }
}
