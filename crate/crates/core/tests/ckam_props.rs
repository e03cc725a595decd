mod common;

use btwist_core::ckam::{mather_bound_check, strip_extrema, Criterion, CriterionMode, GraphSample};
use btwist_core::profile::KappaHypothesis;
use btwist_core::GenFunction;
use common::{any_profile, gf, p1, p2};
use proptest::prelude::*;

fn criterion(p: &btwist_core::RadiusProfile, mode: CriterionMode) -> Criterion {
    Criterion::from_norms(&p.norms(8192).unwrap(), 0.5, mode, KappaHypothesis::GlobalMax)
}

/// Brute-force strip extrema on an `n x n` grid.
fn brute_extrema<G: GenFunction>(g: &G, omega: f64, n: usize) -> [f64; 4] {
    let mut out = [0.0, 0.0, f64::INFINITY, 0.0f64];
    for i in 0..n {
        let t = i as f64 / n as f64;
        for j in 0..n {
            let tau = omega - 1.0 + 2.0 * j as f64 / (n - 1) as f64;
            let jet = g.jet(t, t + tau).unwrap();
            out[0] = out[0].max(jet.d11.abs());
            out[1] = out[1].max(jet.d22.abs());
            out[2] = out[2].min(-jet.d12);
            out[3] = out[3].max(-jet.d12);
        }
    }
    out
}

#[test]
fn strip_extrema_match_million_point_brute_force() {
    for (p, omega) in [(p1(), 2.0), (p2(), 6.0), (p2(), 12.0)] {
        let g = gf(p, 0.0, 0.5, 14.0);
        let e = strip_extrema(&g, omega, 256).unwrap();
        let b = brute_extrema(&g, omega, 1000);
        let found = [e.h11, e.h22, e.b_min, e.b_max];
        for k in 0..4 {
            // The 1000-point axes resolve an extremum to about 1e-6 relative.
            assert!((found[k] - b[k]).abs() <= 1e-5 * b[k].abs(), "{k}: {} vs {}", found[k], b[k]);
        }
        assert!(e.h11 >= b[0] && e.h22 >= b[1] && e.b_min <= b[2] && e.b_max >= b[3]);
    }
}

#[test]
fn closed_form_bounds_bracket_strip_extrema() {
    for p in [p1(), p2()] {
        let crit = criterion(&p, CriterionMode::FermiUlam);
        let (_, hi) = crit.domain();
        let g = gf(p.clone(), 0.0, 0.25, hi.min(14.0));
        for omega in [1.5, 2.0, 4.0, 8.0, 11.0] {
            if omega + 1.0 >= hi.min(14.0) {
                continue;
            }
            let e = strip_extrema(&g, omega, 128).unwrap();
            assert!(crit.b_low(omega) <= e.b_min * (1.0 + 1e-12), "b_low at {omega}");
            assert!(crit.h_up(omega) >= (e.h11 + e.h22) * (1.0 - 1e-12), "H_up at {omega}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_no_a_minus_f_is_the_a_low_term(p in any_profile(), u in 0.001f64..0.999, billiard: bool) {
        let mode = if billiard { CriterionMode::Billiard } else { CriterionMode::FermiUlam };
        let crit = criterion(&p, mode);
        let grid = crit.omega_grid(2);
        prop_assume!(!grid.is_empty());
        let omega = grid[0] + u * (grid[1] - grid[0]);
        let pt = crit.point(omega).unwrap();
        let norms = p.norms(8192).unwrap();
        let den = 2.0 * (norms.r_max + norms.r_min);
        let expected = (omega + 1.0) / den * pt.a_low;
        prop_assert!((pt.f_no_a - pt.f_value - expected).abs() <= 1e-12 * pt.f_no_a.abs().max(1.0));
        prop_assert!(pt.a_low > 0.0);
        prop_assert!(pt.f_value > 0.0);
        // Xi membership is exactly kappa > F.
        let kappa = norms.kappa;
        if (kappa - pt.f_value).abs() > 1e-12 * kappa.max(1e-300) {
            prop_assert_eq!(pt.in_xi, kappa > pt.f_value);
        }
    }

    #[test]
    fn symmetric_graph_has_reciprocal_d(a in proptest::collection::vec(0.5f64..4.0, 8), b in proptest::collection::vec(0.1f64..1.0, 8)) {
        let mut g = GraphSample::rigid(2.0, 8).unwrap();
        g.a_values = a;
        g.b_values = b.clone();
        g.b_next_values = b;
        let r = mather_bound_check(&g, true).unwrap();
        prop_assert!((r.d_minus * r.d_plus - 1.0).abs() <= 1e-12);
    }
}
