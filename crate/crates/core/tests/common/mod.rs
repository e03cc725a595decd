#![allow(dead_code)]

use btwist_core::{GeneratingFunction, RadiusProfile, StripSpec};

pub fn p0() -> RadiusProfile {
    RadiusProfile::constant(1.0).unwrap()
}

pub fn p1() -> RadiusProfile {
    RadiusProfile::new(1.0, vec![(0.01, 0.0)]).unwrap()
}

pub fn p2() -> RadiusProfile {
    RadiusProfile::new(1.0, vec![(0.0005, 0.0)]).unwrap()
}

pub fn gf(profile: RadiusProfile, c: f64, lo: f64, hi: f64) -> GeneratingFunction {
    GeneratingFunction::new(profile, c, StripSpec::new(lo, hi).unwrap()).unwrap()
}

/// Literal `h_c(t0, t1)`.
pub fn hc_literal(p: &RadiusProfile, c: f64, t0: f64, t1: f64) -> f64 {
    let (r0, r1) = (p.radius(t0), p.radius(t1));
    let tau = t1 - t0;
    let q = (r0 * r0 * r1 * r1 - c * c * tau * tau).sqrt();
    (r0 * r0 + r1 * r1 + 2.0 * q) / (2.0 * tau) + c * (c * tau / q).atan()
}

/// Literal `h_0(t0, t1)`.
pub fn h0_literal(p: &RadiusProfile, t0: f64, t1: f64) -> f64 {
    let s = p.radius(t0) + p.radius(t1);
    s * s / (2.0 * (t1 - t0))
}

/// Central difference of `f` along one argument.
pub fn central(f: impl Fn(f64, f64) -> f64, t0: f64, t1: f64, axis: usize, h: f64) -> f64 {
    match axis {
        0 => (f(t0 + h, t1) - f(t0 - h, t1)) / (2.0 * h),
        _ => (f(t0, t1 + h) - f(t0, t1 - h)) / (2.0 * h),
    }
}

/// Mean 1 and up to three harmonics small enough to keep `R > 0.9`.
pub fn any_profile() -> impl proptest::strategy::Strategy<Value = RadiusProfile> {
    use proptest::prelude::*;
    proptest::collection::vec((-0.03f64..0.03, -0.03f64..0.03), 0..=3)
        .prop_map(|h| RadiusProfile::new(1.0, h.iter().enumerate().map(|(k, &(a, b))| (a / (k + 1) as f64, b / (k + 1) as f64)).collect()).unwrap())
}

/// Cosine-only version of [`any_profile`].
pub fn even_profile() -> impl proptest::strategy::Strategy<Value = RadiusProfile> {
    use proptest::prelude::*;
    proptest::collection::vec(-0.03f64..0.03, 1..=3)
        .prop_map(|h| RadiusProfile::new(1.0, h.iter().enumerate().map(|(k, &a)| (a / (k + 1) as f64, 0.0)).collect()).unwrap())
}
