//! Generating functions `h_0` and `h_c` with closed-form 2-jets.
//!
//! With `S = R_0 + R_1` and `tau = t_1 - t_0`,
//!
//! ```text
//! h_0(t0, t1) = S^2 / (2 tau)
//! h_c(t0, t1) = (R_0^2 + R_1^2 + 2 Q) / (2 tau) + c atan(c tau / Q),   Q = sqrt(R_0^2 R_1^2 - c^2 tau^2).
//! ```
//!
//! `h_c` is evaluated as `h_0 + D(m, tau)` with `m = R_0 R_1` and
//! `D = c asin(c tau / m) - c^2 tau / (Q + m)`, which avoids the cancellation
//! of the literal formula and vanishes identically at `c = 0`.

use alloc::vec::Vec;

use crate::math;
use crate::profile::{compute_sigmas, ProfileNorms, RadiusProfile, DEFAULT_NORM_GRID};
use crate::{Error, Result};

/// Points closer than this to a strip edge are rejected.
pub const STRIP_MARGIN: f64 = 1e-9;

/// `epsilon` used when none is given.
pub const DEFAULT_EPSILON: f64 = 0.5;

/// Value and all first and second partials of `h(t0, t1)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Jet2 {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
    pub d11: f64,
    pub d12: f64,
    pub d22: f64,
}

impl Jet2 {
    /// Componentwise maximum of `|self - other|`.
    pub fn max_abs_diff(&self, other: &Jet2) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_array(&self) -> [f64; 6] {
        [self.value, self.d1, self.d2, self.d11, self.d12, self.d22]
    }
}

/// The band `tau_min < t1 - t0 < tau_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StripSpec {
    pub tau_min: f64,
    #[cfg_attr(feature = "serde", serde(with = "crate::ext_real"))]
    pub tau_max: f64,
}

impl StripSpec {
    pub fn new(tau_min: f64, tau_max: f64) -> Result<Self> {
        if !(tau_min >= 0.0 && tau_min.is_finite() && tau_max > tau_min) {
            return Err(Error::InvalidArgument { reason: "strip needs 0 <= tau_min < tau_max" });
        }
        Ok(StripSpec { tau_min, tau_max })
    }

    /// True when `tau` is inside the open strip, away from the edges by
    /// [`STRIP_MARGIN`].
    #[inline]
    pub fn contains(&self, tau: f64) -> bool {
        tau > self.tau_min + STRIP_MARGIN && tau < self.tau_max - STRIP_MARGIN
    }

    pub fn check(&self, tau: f64) -> Result<()> {
        if self.contains(tau) {
            Ok(())
        } else {
            Err(Error::OutOfStrip { tau, lo: self.tau_min, hi: self.tau_max })
        }
    }

    /// `n` evenly spaced flight times covering the closed strip, pulled
    /// inside by twice the margin.
    pub fn grid(&self, n: usize) -> Vec<f64> {
        let lo = self.tau_min + 2.0 * STRIP_MARGIN;
        let hi = self.tau_max - 2.0 * STRIP_MARGIN;
        if n <= 1 {
            return alloc::vec![0.5 * (lo + hi)];
        }
        (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
    }
}

/// Anything that provides 2-jets on a strip: the physical generating
/// functions and their twist extensions.
pub trait GenFunction {
    fn jet(&self, t0: f64, t1: f64) -> Result<Jet2>;
    fn strip(&self) -> StripSpec;
}

impl<G: GenFunction + ?Sized> GenFunction for &G {
    fn jet(&self, t0: f64, t1: f64) -> Result<Jet2> {
        (**self).jet(t0, t1)
    }

    fn strip(&self) -> StripSpec {
        (**self).strip()
    }
}

/// 2-jet of `h_0` by the closed forms.
pub fn h0_jet(profile: &RadiusProfile, t0: f64, t1: f64) -> Jet2 {
    let a = profile.evaluate(t0);
    let b = profile.evaluate(t1);
    let tau = t1 - t0;
    let s = a.r + b.r;
    let s2 = s * s;
    let (tau2, tau3) = (tau * tau, tau * tau * tau);
    Jet2 {
        value: s2 / (2.0 * tau),
        d1: s * a.dr / tau + s2 / (2.0 * tau2),
        d2: s * b.dr / tau - s2 / (2.0 * tau2),
        d11: (a.dr * a.dr + s * a.ddr) / tau + 2.0 * s * a.dr / tau2 + s2 / tau3,
        d22: (b.dr * b.dr + s * b.ddr) / tau - 2.0 * s * b.dr / tau2 + s2 / tau3,
        d12: -s2 / tau3 + s * (b.dr - a.dr) / tau2 + a.dr * b.dr / tau,
    }
}

/// 2-jet of `h_c`. Exactly [`h0_jet`] when `c = 0`.
pub fn hc_jet(profile: &RadiusProfile, c: f64, t0: f64, t1: f64) -> Result<Jet2> {
    let base = h0_jet(profile, t0, t1);
    if c == 0.0 {
        return Ok(base);
    }
    let a = profile.evaluate(t0);
    let b = profile.evaluate(t1);
    let tau = t1 - t0;
    let m = a.r * b.r;
    let disc = m * m - c * c * tau * tau;
    if !(disc > 0.0) || m <= 0.0 {
        return Err(Error::DiscriminantNonPositive { tau, c });
    }
    let q = math::sqrt(disc);
    let ratio = c * tau / q;
    if ratio >= ARCTAN_LIMIT {
        return Err(Error::DiscriminantNonPositive { tau, c });
    }
    let c2 = c * c;
    let qm = q + m;
    let g = -c2 * tau / qm + c * math::atan(ratio);
    let g_m = -c2 * tau / (m * qm);
    let g_t = c2 / qm;
    let g_mm = c2 * tau / (m * m * q);
    let g_mt = -c2 / (q * qm);
    let g_tt = c2 * c2 * tau / (q * qm * qm);

    let m0 = a.dr * b.r;
    let m1 = a.r * b.dr;
    let m00 = a.ddr * b.r;
    let m11 = a.r * b.ddr;
    let m01 = a.dr * b.dr;
    Ok(Jet2 {
        value: base.value + g,
        d1: base.d1 + g_m * m0 - g_t,
        d2: base.d2 + g_m * m1 + g_t,
        d11: base.d11 + g_mm * m0 * m0 + g_m * m00 - 2.0 * g_mt * m0 + g_tt,
        d22: base.d22 + g_mm * m1 * m1 + g_m * m11 + 2.0 * g_mt * m1 + g_tt,
        d12: base.d12 + g_mm * m0 * m1 + g_mt * (m0 - m1) + g_m * m01 - g_tt,
    })
}

/// `tan(pi/2 - 1e-6)`: the arctangent argument stays below this.
const ARCTAN_LIMIT: f64 = 999_999.999_999_666_7;

/// `h_0` (for `c = 0`) or `h_c` restricted to a strip.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingFunction {
    profile: RadiusProfile,
    c: f64,
    strip: StripSpec,
    epsilon: f64,
    norms: ProfileNorms,
    sigma: f64,
}

impl GeneratingFunction {
    /// Uses [`DEFAULT_EPSILON`] for `sigma_B`.
    pub fn new(profile: RadiusProfile, c: f64, strip: StripSpec) -> Result<Self> {
        Self::with_epsilon(profile, c, strip, DEFAULT_EPSILON)
    }

    /// Checks `tau_max <= sigma` (`sigma_B` if `c > 0`, else `sigma_0`) and
    /// `c tau_max < R_min^2`, so the discriminant is positive on the strip.
    pub fn with_epsilon(profile: RadiusProfile, c: f64, strip: StripSpec, epsilon: f64) -> Result<Self> {
        if !(c >= 0.0 && c.is_finite()) {
            return Err(Error::InvalidArgument { reason: "angular momentum must be finite and >= 0" });
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidArgument { reason: "epsilon must lie in (0, 1)" });
        }
        let strip = StripSpec::new(strip.tau_min, strip.tau_max)?;
        let norms = profile.norms(DEFAULT_NORM_GRID)?;
        let (sigma0, sigma_b) = compute_sigmas(&norms, epsilon);
        let sigma = if c > 0.0 { sigma_b } else { sigma0 };
        if !strip.tau_max.is_finite() || strip.tau_max > sigma {
            return Err(Error::OutOfStrip { tau: strip.tau_max, lo: 0.0, hi: sigma });
        }
        if c * strip.tau_max >= norms.r_min * norms.r_min {
            return Err(Error::DiscriminantNonPositive { tau: strip.tau_max, c });
        }
        Ok(GeneratingFunction { profile, c, strip, epsilon, norms, sigma })
    }

    /// The largest admissible strip `(0, sigma)`, shrunk so that the
    /// discriminant stays positive.
    pub fn full_strip(profile: &RadiusProfile, c: f64, epsilon: f64) -> Result<StripSpec> {
        let norms = profile.norms(DEFAULT_NORM_GRID)?;
        let (sigma0, sigma_b) = compute_sigmas(&norms, epsilon);
        let mut hi = if c > 0.0 { sigma_b } else { sigma0 };
        if c > 0.0 {
            hi = hi.min(norms.r_min * norms.r_min / c * (1.0 - 1e-9));
        }
        StripSpec::new(0.0, hi)
    }

    pub fn profile(&self) -> &RadiusProfile {
        &self.profile
    }

    pub fn angular_momentum(&self) -> f64 {
        self.c
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn norms(&self) -> &ProfileNorms {
        &self.norms
    }

    /// `sigma_B` when `c > 0`, `sigma_0` otherwise.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Same profile and strip, different `c`.
    pub fn with_c(&self, c: f64) -> Result<Self> {
        Self::with_epsilon(self.profile.clone(), c, self.strip, self.epsilon)
    }

    /// Same profile and `c`, different strip.
    pub fn with_strip(&self, strip: StripSpec) -> Result<Self> {
        Self::with_epsilon(self.profile.clone(), self.c, strip, self.epsilon)
    }
}

impl GenFunction for GeneratingFunction {
    fn jet(&self, t0: f64, t1: f64) -> Result<Jet2> {
        self.strip.check(t1 - t0)?;
        hc_jet(&self.profile, self.c, t0, t1)
    }

    fn strip(&self) -> StripSpec {
        self.strip
    }
}

/// Minimum of `-d12` over a phase by flight-time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TwistReport {
    pub min_neg_d12: f64,
    pub argmin_t0: f64,
    pub argmin_tau: f64,
    pub grid: usize,
}

/// Scans `-d12` over `t0 in [0, 1)` by `tau` covering the strip.
///
/// Errors with `TwistViolation` at the first grid point where `-d12 <= 0`.
pub fn verify_twist<G: GenFunction>(gf: &G, grid: usize) -> Result<TwistReport> {
    if grid < 64 {
        return Err(Error::InvalidArgument { reason: "twist grid needs at least 64 points per axis" });
    }
    let taus = gf.strip().grid(grid);
    let mut report = TwistReport { min_neg_d12: f64::INFINITY, argmin_t0: 0.0, argmin_tau: 0.0, grid };
    for i in 0..grid {
        let t0 = i as f64 / grid as f64;
        for &tau in &taus {
            let neg = -gf.jet(t0, t0 + tau)?.d12;
            if !(neg > 0.0) {
                return Err(Error::TwistViolation { t0, tau, neg_d12: neg });
            }
            if neg < report.min_neg_d12 {
                report = TwistReport { min_neg_d12: neg, argmin_t0: t0, argmin_tau: tau, grid };
            }
        }
    }
    Ok(report)
}

/// One row of a jet grid dump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JetSample {
    pub t0: f64,
    pub tau: f64,
    pub jet: Jet2,
}

/// Jets on `n_t0` phases times `n_tau` flight times.
pub fn jet_grid<G: GenFunction>(gf: &G, n_t0: usize, n_tau: usize) -> Result<Vec<JetSample>> {
    let taus = gf.strip().grid(n_tau);
    let mut out = Vec::with_capacity(n_t0 * taus.len());
    for i in 0..n_t0 {
        let t0 = i as f64 / n_t0 as f64;
        for &tau in &taus {
            out.push(JetSample { t0, tau, jet: gf.jet(t0, t0 + tau)? });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceEntry {
    pub c: f64,
    /// `sup |h_c - h_0|`
    pub sup_value: f64,
    /// sup over the value and all five partial differences.
    pub sup_c2: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ConvergenceReport {
    pub entries: Vec<ConvergenceEntry>,
    /// Least-squares slope of `ln sup_c2` against `ln c`.
    pub slope: f64,
}

/// Grid used by [`convergence_probe`] along each axis.
pub const CONVERGENCE_GRID: usize = 64;

/// Measures `sup_{strip} |h_c - h_0|` in `C^2` for each `c`.
pub fn convergence_probe(
    profile: &RadiusProfile,
    strip: StripSpec,
    c_values: &[f64],
    epsilon: f64,
) -> Result<ConvergenceReport> {
    if c_values.len() < 4 {
        return Err(Error::InvalidArgument { reason: "convergence probe needs at least 4 values of c" });
    }
    if c_values.iter().any(|&c| !(c > 0.0)) {
        return Err(Error::InvalidArgument { reason: "convergence probe needs c > 0" });
    }
    let base = GeneratingFunction::with_epsilon(profile.clone(), 0.0, strip, epsilon)?;
    let reference = jet_grid(&base, CONVERGENCE_GRID, CONVERGENCE_GRID)?;
    let mut entries = Vec::with_capacity(c_values.len());
    for &c in c_values {
        let gf = base.with_c(c)?;
        let mut sup_value: f64 = 0.0;
        let mut sup_c2: f64 = 0.0;
        for s in &reference {
            let j = gf.jet(s.t0, s.t0 + s.tau)?;
            sup_value = sup_value.max((j.value - s.jet.value).abs());
            sup_c2 = sup_c2.max(j.max_abs_diff(&s.jet));
        }
        entries.push(ConvergenceEntry { c, sup_value, sup_c2 });
    }
    let x: Vec<f64> = entries.iter().map(|e| math::ln(e.c)).collect();
    let y: Vec<f64> = entries.iter().map(|e| math::ln(e.sup_c2)).collect();
    let slope = math::ls_slope(&x, &y);
    Ok(ConvergenceReport { entries, slope })
}
