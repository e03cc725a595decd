mod common;

use btwist_core::ckam::{Criterion, CriterionMode};
use btwist_core::profile::{compute_norms, compute_sigmas, KappaHypothesis, DEFAULT_NORM_GRID};
use btwist_core::RadiusProfile;
use common::any_profile;
use proptest::prelude::*;

/// Brute-force norms on a plain grid.
fn brute_norms(p: &RadiusProfile, n: usize) -> [f64; 5] {
    let mut out = [f64::INFINITY, f64::NEG_INFINITY, 0.0, 0.0, 0.0];
    for i in 0..n {
        let j = p.evaluate(i as f64 / n as f64);
        out[0] = out[0].min(j.r);
        out[1] = out[1].max(j.r);
        out[2] = out[2].max(j.dr.abs());
        out[3] = out[3].max(j.ddr.abs());
        out[4] = out[4].max(j.d2_square().abs());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sigma_b_never_exceeds_sigma0(p in any_profile(), eps in 0.05f64..0.95) {
        let norms = p.norms(4096).unwrap();
        let (s0, sb) = compute_sigmas(&norms, eps);
        prop_assert!(sb <= s0);
        if s0.is_finite() {
            prop_assert!(sb <= s0 / 2.0 * (1.0 + 1e-15));
        }
    }

    #[test]
    fn norms_are_scale_covariant(p in any_profile(), lambda in 0.1f64..10.0) {
        let a = p.norms(4096).unwrap();
        let b = p.scaled(lambda).norms(4096).unwrap();
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-9 * y.abs().max(1e-12);
        prop_assert!(close(b.r_min, lambda * a.r_min));
        prop_assert!(close(b.r_max, lambda * a.r_max));
        prop_assert!(close(b.d1_norm, lambda * a.d1_norm));
        prop_assert!(close(b.d2_norm, lambda * a.d2_norm));
        prop_assert!(close(b.d2_sq_norm, lambda * lambda * a.d2_sq_norm));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn raising_kappa_only_grows_xi(p in any_profile(), k1 in 0.0f64..2.0, extra in 0.0f64..2.0) {
        let norms = p.norms(4096).unwrap();
        let base = Criterion::from_norms(&norms, 0.5, CriterionMode::FermiUlam, KappaHypothesis::GlobalMax);
        let low = base.with_kappa(k1);
        let high = base.with_kappa(k1 + extra);
        let (a, b) = (low.inf_f(512), high.inf_f(512));
        prop_assert_eq!((a.0.to_bits(), a.1.to_bits()), (b.0.to_bits(), b.1.to_bits()));
        for w in low.omega_grid(512) {
            if low.point(w).unwrap().in_xi {
                prop_assert!(high.point(w).unwrap().in_xi);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn refined_norms_match_dense_brute_force(p in any_profile()) {
        let refined = compute_norms(&p, DEFAULT_NORM_GRID).unwrap();
        let brute = brute_norms(&p, 10 * DEFAULT_NORM_GRID);
        let fields = [refined.r_min, refined.r_max, refined.d1_norm, refined.d2_norm, refined.d2_sq_norm];
        for (x, y) in fields.iter().zip(brute) {
            prop_assert!((x - y).abs() <= 1e-6 * y.abs().max(1e-12), "{} vs {}", x, y);
        }
    }
}

#[test]
fn constant_profile_has_infinite_sigmas() {
    let norms = RadiusProfile::constant(2.0).unwrap().norms(1024).unwrap();
    assert_eq!(compute_sigmas(&norms, 0.5), (f64::INFINITY, f64::INFINITY));
    assert_eq!(norms.kappa, 0.0);
}

#[test]
fn negative_radius_is_rejected() {
    let p = RadiusProfile::new(0.5, vec![(0.6, 0.0)]).unwrap();
    assert_eq!(p.norms(1024).unwrap_err().name(), "NonPositiveRadius");
}
